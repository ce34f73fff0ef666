"""Event-driven Monte Carlo for the 1-d random flight.

Two microscopic models generate the same position law:

* ``Model.REVERSAL``: the velocity sign flips at the events of a Poisson
  process of rate lam/2;
* ``Model.SCATTERING``: at the events of a Poisson process of rate lam the
  sign is redrawn uniformly, so half the scatterings change nothing.

Trajectories that never changed sign end exactly on a front and are counted
as atoms, never binned. Ensembles are split into fixed-size blocks, each with
its own generator derived from ``SeedSequence(seed, spawn_key=(block,))``,
so results do not depend on how many workers process the blocks.
"""
from __future__ import annotations

import enum
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .domain import InitialCondition, MixedDensity, ModelParams, check_time
from .errors import DomainError

__all__ = [
    "Model",
    "Trajectory",
    "EnsembleResult",
    "simulate_trajectory",
    "simulate_position",
    "simulate_block",
    "run_ensemble",
    "conditioned_samples",
    "ks_distance",
    "ks_two_sample",
    "ks_one_sample",
    "dkw_bound",
    "ks_two_sample_critical",
    "default_workers",
    "BLOCK_SIZE",
]

BLOCK_SIZE = 1 << 16
WORKERS_ENV = "RANDFLIGHT_WORKERS"


class Model(enum.Enum):
    REVERSAL = "reversal"
    SCATTERING = "scattering"

    def event_rate(self, params: ModelParams) -> float:
        return params.reversal_rate if self is Model.REVERSAL else params.lam


def default_workers() -> int:
    """Worker count from $RANDFLIGHT_WORKERS, 1 if unset."""
    raw = os.environ.get(WORKERS_ENV, "1")
    try:
        n = int(raw)
    except ValueError:
        raise DomainError(f"{WORKERS_ENV} must be an integer, got {raw!r}") from None
    return max(1, n)


def _initial_sign(ic: InitialCondition, rng: np.random.Generator, n: int) -> np.ndarray:
    if ic is InitialCondition.BULLET_RIGHT:
        return np.ones(n)
    if ic is InitialCondition.BULLET_LEFT:
        return -np.ones(n)
    return np.where(rng.random(n) < 0.5, -1.0, 1.0)


@dataclass(frozen=True)
class Trajectory:
    position: float
    event_times: tuple[float, ...]
    initial_sign: float
    at_boundary: bool

    @property
    def event_count(self) -> int:
        return len(self.event_times)


def simulate_trajectory(
    t: float, params: ModelParams, ic: InitialCondition, model: Model, rng: np.random.Generator
) -> Trajectory:
    """One trajectory, event by event."""
    t = check_time(t)
    rate = model.event_rate(params)
    sign0 = float(_initial_sign(ic, rng, 1)[0])
    sign, clock, pos = sign0, 0.0, 0.0
    events: list[float] = []
    changed = False
    while True:
        nxt = clock + rng.exponential(1.0 / rate)
        if nxt >= t:
            pos += sign * params.v * (t - clock)
            break
        pos += sign * params.v * (nxt - clock)
        clock = nxt
        events.append(nxt)
        if model is Model.REVERSAL:
            sign = -sign
        else:
            sign = -1.0 if rng.random() < 0.5 else 1.0
        changed = changed or sign != sign0
    if not changed:
        pos = sign0 * params.front(t)
    return Trajectory(position=pos, event_times=tuple(events), initial_sign=sign0, at_boundary=not changed)


def simulate_position(
    t: float, params: ModelParams, ic: InitialCondition, model: Model, rng: np.random.Generator
) -> tuple[float, int, bool]:
    """(position, event count, at_boundary) of one trajectory."""
    tr = simulate_trajectory(t, params, ic, model, rng)
    return tr.position, tr.event_count, tr.at_boundary


def simulate_block(
    n: int,
    t: float,
    params: ModelParams,
    ic: InitialCondition,
    model: Model,
    rng: np.random.Generator,
    record: int = 0,
) -> dict[str, np.ndarray]:
    """Vectorized version of :func:`simulate_trajectory` for n trajectories.

    Returns arrays ``position``, ``count``, ``at_boundary``; with
    ``record > 0`` also ``times`` of shape (n, record) holding the first
    ``record`` event times (NaN where fewer events happened).
    """
    t = check_time(t)
    rate = model.event_rate(params)
    v = params.v
    sign0 = _initial_sign(ic, rng, n)
    sign = sign0.copy()
    clock = np.zeros(n)
    pos = np.zeros(n)
    count = np.zeros(n, dtype=np.int64)
    changed = np.zeros(n, dtype=bool)
    times = np.full((n, record), np.nan) if record else None
    live = np.arange(n)
    while live.size:
        nxt = clock[live] + rng.exponential(1.0 / rate, live.size)
        done = nxt >= t
        fin = live[done]
        pos[fin] += sign[fin] * v * (t - clock[fin])
        go = live[~done]
        step = nxt[~done]
        pos[go] += sign[go] * v * (step - clock[go])
        clock[go] = step
        if times is not None:
            slot = count[go]
            keep = slot < record
            times[go[keep], slot[keep]] = step[keep]
        count[go] += 1
        if model is Model.REVERSAL:
            sign[go] = -sign[go]
        else:
            sign[go] = np.where(rng.random(go.size) < 0.5, -1.0, 1.0)
        changed[go] |= sign[go] != sign0[go]
        live = go
    at_boundary = ~changed
    pos[at_boundary] = sign0[at_boundary] * params.front(t)
    out = {"position": pos, "count": count, "at_boundary": at_boundary}
    if times is not None:
        out["times"] = times
    return out


@dataclass(frozen=True)
class EnsembleResult:
    """Histogram of final positions with the two fronts counted separately."""

    n_trials: int
    bin_edges: np.ndarray = field(compare=False)
    counts: np.ndarray = field(compare=False)
    atom_counts: tuple[int, int]  # (at +vt, at -vt)
    seed: int
    model: Model
    ic: InitialCondition
    t: float
    params: ModelParams

    def __post_init__(self):
        if int(self.counts.sum()) + sum(self.atom_counts) != self.n_trials:
            raise DomainError("bin counts and atom counts do not add up to n_trials")

    def empirical_cdf(self, *, include_right_atom: bool = True) -> np.ndarray:
        """Empirical CDF at every bin edge; the -vt atom enters at the left edge."""
        plus, minus = self.atom_counts
        cum = minus + np.concatenate(([0], np.cumsum(self.counts)))
        cum = cum.astype(float)
        if include_right_atom:
            cum[-1] += plus
        return cum / self.n_trials

    def same_setup(self, other: "EnsembleResult") -> bool:
        return (
            self.t == other.t
            and self.params == other.params
            and np.array_equal(self.bin_edges, other.bin_edges)
        )

    @property
    def atom_fraction(self) -> float:
        return sum(self.atom_counts) / self.n_trials


def _block_rng(seed: int, block: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(block,)))


def run_ensemble(
    n: int,
    t: float,
    params: ModelParams,
    ic: InitialCondition = InitialCondition.ISOTROPIC,
    model: Model = Model.REVERSAL,
    bins: int = 200,
    seed: int = 0,
    workers: int | None = None,
    moments: bool = False,
):
    """Simulate n trajectories and histogram them on ``bins`` equal bins.

    With ``moments=True`` returns ``(result, (sum_x, sum_x2))`` so callers can
    check low moments without keeping all positions.
    """
    t = check_time(t)
    if n < 1 or bins < 1:
        raise DomainError(f"need n >= 1 and bins >= 1, got n={n}, bins={bins}")
    L = params.front(t)
    edges = np.linspace(-L, L, bins + 1)
    n_blocks = math.ceil(n / BLOCK_SIZE)

    def run_block(b: int):
        size = min(BLOCK_SIZE, n - b * BLOCK_SIZE)
        sim = simulate_block(size, t, params, ic, model, _block_rng(seed, b))
        pos = sim["position"]
        edge = sim["at_boundary"]
        inner = pos[~edge]
        hist = np.histogram(inner, bins=edges)[0]
        plus = int(np.count_nonzero(edge & (pos > 0)))
        minus = int(np.count_nonzero(edge & (pos < 0)))
        return hist, plus, minus, math.fsum(pos), math.fsum(pos * pos)

    workers = workers or default_workers()
    if workers > 1 and n_blocks > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(run_block, range(n_blocks)))
    else:
        parts = [run_block(b) for b in range(n_blocks)]
    counts = np.sum([p[0] for p in parts], axis=0).astype(np.int64)
    result = EnsembleResult(
        n_trials=n,
        bin_edges=edges,
        counts=counts,
        atom_counts=(sum(p[1] for p in parts), sum(p[2] for p in parts)),
        seed=seed,
        model=model,
        ic=ic,
        t=t,
        params=params,
    )
    if moments:
        return result, (math.fsum(p[3] for p in parts), math.fsum(p[4] for p in parts))
    return result


def conditioned_samples(
    r: int,
    n: int,
    t: float,
    params: ModelParams,
    ic: InitialCondition = InitialCondition.ISOTROPIC,
    model: Model = Model.REVERSAL,
    seed: int = 0,
) -> dict[str, np.ndarray]:
    """n trajectories with exactly r events, kept by rejection from the
    unconditioned simulation. Returns ``position`` (n,) and ``times`` (n, r)."""
    t = check_time(t)
    if r < 0 or n < 1:
        raise DomainError(f"need r >= 0 and n >= 1, got r={r}, n={n}")
    rate = model.event_rate(params)
    mu = rate * t
    p_r = math.exp(r * math.log(mu) - mu - math.lgamma(r + 1)) if r else math.exp(-mu)
    batch = max(1024, int(1.2 * n / max(p_r, 1e-6)))
    got_pos, got_times, have, block = [], [], 0, 0
    while have < n:
        sim = simulate_block(batch, t, params, ic, model, _block_rng(seed, block), record=max(r, 1))
        keep = sim["count"] == r
        got_pos.append(sim["position"][keep])
        got_times.append(sim["times"][keep, :r])
        have += int(keep.sum())
        block += 1
    return {"position": np.concatenate(got_pos)[:n], "times": np.concatenate(got_times)[:n]}


def ks_distance(result: EnsembleResult, analytic: MixedDensity) -> float:
    """sup over bin edges of |empirical CDF - analytic CDF|, atoms included.

    The +vt front is checked both before and after its atom.
    """
    if not (
        math.isclose(result.t, analytic.t, rel_tol=1e-12) and result.params == analytic.params
    ):
        raise DomainError("ensemble and analytic density disagree on t or params")
    edges = result.bin_edges
    ana = analytic.cdf(edges, include_right_atom=False)
    emp = result.empirical_cdf(include_right_atom=False)
    dist = float(np.max(np.abs(emp - ana)))
    right = abs(result.empirical_cdf()[-1] - (ana[-1] + analytic.atom_weight(edges[-1])))
    return max(dist, right)


def ks_two_sample(a: EnsembleResult, b: EnsembleResult) -> float:
    """Two-sample KS statistic on the shared bin edges."""
    if not a.same_setup(b):
        raise DomainError("ensembles must share t, params and bin edges")
    d1 = np.abs(a.empirical_cdf(include_right_atom=False) - b.empirical_cdf(include_right_atom=False))
    return float(np.max(d1))


def ks_one_sample(samples: np.ndarray, cdf: Callable[[np.ndarray], np.ndarray]) -> float:
    """Exact one-sample KS statistic of raw samples against a continuous CDF."""
    xs = np.sort(np.asarray(samples, dtype=float))
    n = xs.size
    F = np.asarray(cdf(xs), dtype=float)
    i = np.arange(1, n + 1)
    return float(max(np.max(i / n - F), np.max(F - (i - 1) / n)))


def dkw_bound(n: int, alpha: float = 1e-3) -> float:
    """Dvoretzky-Kiefer-Wolfowitz band half-width at level alpha."""
    return math.sqrt(math.log(2.0 / alpha) / (2.0 * n))


def ks_two_sample_critical(n: int, m: int, alpha: float = 1e-3) -> float:
    """Asymptotic two-sample KS critical value c(alpha) sqrt((n+m)/(n m))."""
    c = math.sqrt(-0.5 * math.log(alpha / 2.0))
    return c * math.sqrt((n + m) / (n * m))
