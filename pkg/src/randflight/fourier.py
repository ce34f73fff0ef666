"""Fourier-series representation of the isotropic density.

Periodizing the density with period 2vt turns its Fourier transform sampled
at nu = h/(2vt) into Fourier-series coefficients. Writing the renewal
equation of the scattering model in Fourier-Laplace variables and inverting
the Laplace transform gives the characteristic function in closed form::

    rho~(nu, t) = e^{-lam t/2} [cos(sqrt(a)) + (lam t/2) sin(sqrt(a))/sqrt(a)],
    a = ((2 pi nu v)^2 - (lam/2)^2) t^2,

which stays real for a < 0 (cos -> cosh, sin -> sinh). At nu = h/(2vt),
a = (pi h)^2 - (lam t/2)^2.

The periodized Dirac front contributes (-1)^h e^{-lam t/2} to coefficient h
and never decays in h; the resulting oscillation is not a Gibbs effect and
does not shrink with more harmonics. Subtracting it leaves the coefficients
of the continuous part alone, whose series converges smoothly.

A second route builds the same coefficients from the even moments,
<x^2m> = e^{-lam t} (vt)^2m 1F1(m+1, 2m+1; lam t), via the Maclaurin series
of the characteristic function. That sum alternates with terms up to about
e^{pi h} in size, so it is evaluated in extended precision by default.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Iterable, Literal, Sequence

import mpmath
import numpy as np
from numpy.typing import ArrayLike

from .closed_form import front_weight
from .domain import Atom, MixedDensity, ModelParams, check_time
from .errors import DomainError, MomentsNotAchievable, PrecisionLossWarning, TruncationError
from .specfun import cos_sqrt, hyp1f1_moment, hyp1f1_moment_mp, log_factorial, sinc_sqrt

__all__ = [
    "FourierCoefficients",
    "char_fn",
    "front_coefficient",
    "fourier_coefficients",
    "fourier_series_full",
    "fourier_series_continuous",
    "fourier_series_continuous_adaptive",
    "moment",
    "moment_partial_sums",
    "coeff_from_moments",
    "identity_residual",
    "required_moments",
    "moment_coefficients",
    "series_from_moments_full",
    "series_from_moments_continuous",
    "fourier_density",
]

Precision = Literal["extended", "double"]

# |partial sum| beyond this multiple of the result triggers PrecisionLossWarning
_CANCELLATION_LIMIT = 1e6


@dataclass(frozen=True)
class FourierCoefficients:
    """Cosine-series coefficients c_h = rho~(h/(2vt), t), h = 0..H."""

    t: float
    params: ModelParams
    values: np.ndarray = field(compare=False)
    front_subtracted: bool = False

    def __post_init__(self):
        vals = np.asarray(self.values, dtype=float)
        if vals.ndim != 1 or vals.size == 0:
            raise DomainError("need at least the h = 0 coefficient")
        if not np.all(np.isfinite(vals)):
            raise DomainError("Fourier coefficients must be finite reals")
        if not self.front_subtracted:
            if abs(vals[0] - 1.0) > 1e-9:
                raise DomainError(f"c_0 must be 1 for a probability law, got {vals[0]!r}")
            if np.any(np.abs(vals) > 1.0 + 1e-9):
                raise DomainError("|c_h| > 1: not the characteristic function of a probability law")
        object.__setattr__(self, "values", vals)

    @property
    def harmonics(self) -> int:
        return self.values.size - 1

    def evaluate(self, x: ArrayLike):
        """Partial cosine sum at x; exactly zero outside [-vt, vt]."""
        L = self.params.front(self.t)
        xs = np.asarray(x, dtype=float)
        flat = xs.ravel()
        inside = np.abs(flat) <= L
        out = np.zeros(flat.shape)
        if np.any(inside):
            h = np.arange(1, self.values.size)
            phase = np.outer(flat[inside], np.pi * h / L)
            out[inside] = (self.values[0] + 2.0 * np.cos(phase) @ self.values[1:]) / (2 * L)
        out = out.reshape(xs.shape)
        return float(out) if xs.ndim == 0 else out


def _bracket(a: ArrayLike, half_lt: float):
    return cos_sqrt(a) + half_lt * sinc_sqrt(a)


def char_fn(nu: ArrayLike, t: float, params: ModelParams):
    """Fourier transform (characteristic function) of the full isotropic law."""
    t = check_time(t)
    nus = np.asarray(nu, dtype=float)
    half_lt = 0.5 * params.lam * t
    a = ((2 * np.pi * nus * params.v) ** 2 - (0.5 * params.lam) ** 2) * t * t
    out = math.exp(-half_lt) * _bracket(a, half_lt)
    return float(out) if nus.ndim == 0 else out


def front_coefficient(h: ArrayLike, t: float, params: ModelParams):
    """Coefficient (-1)^h e^{-lam t/2} of the periodized unreversed front."""
    hs = np.asarray(h)
    out = np.where(hs % 2 == 0, 1.0, -1.0) * front_weight(check_time(t), params)
    return float(out) if hs.ndim == 0 else out


def fourier_coefficients(
    t: float, params: ModelParams, H: int, front_subtracted: bool = False
) -> FourierCoefficients:
    t = check_time(t)
    _check_harmonics(H)
    h = np.arange(H + 1)
    vals = char_fn(h / (2 * params.front(t)), t, params)
    if front_subtracted:
        vals = vals - front_coefficient(h, t, params)
    return FourierCoefficients(t=t, params=params, values=vals, front_subtracted=front_subtracted)


def _check_harmonics(H: int) -> None:
    if int(H) != H or H < 1:
        raise DomainError(f"need H >= 1 harmonics, got {H}")


def fourier_series_full(x: ArrayLike, t: float, params: ModelParams, H: int):
    """Partial sum with H harmonics of the series for the *whole* law,
    periodized front included; oscillates about the continuous part."""
    return fourier_coefficients(t, params, H).evaluate(x)


def fourier_series_continuous(x: ArrayLike, t: float, params: ModelParams, H: int):
    """Partial sum with H harmonics of the series for the continuous part."""
    return fourier_coefficients(t, params, H, front_subtracted=True).evaluate(x)


def fourier_series_continuous_adaptive(
    x: ArrayLike,
    t: float,
    params: ModelParams,
    H0: int = 10,
    tol: float = 1e-6,
    H_max: int = 1 << 16,
    interior: float = 0.75,
):
    """Continuous part with H0 harmonics on |x| <= interior * vt; closer to
    the fronts H is doubled pointwise until two successive partial sums differ
    by less than tol.
    """
    t = check_time(t)
    xs = np.asarray(x, dtype=float)
    flat = xs.ravel()
    out = fourier_series_continuous(flat, t, params, H0)
    pending = np.flatnonzero(np.abs(flat) > interior * params.front(t))
    H = H0
    prev = out[pending]
    last_diff = float("nan")
    while pending.size:
        H *= 2
        if H > H_max:
            raise TruncationError(
                f"fourier series did not settle to {tol:g} within {H_max} harmonics",
                last_term=last_diff,
            )
        cur = fourier_series_continuous(flat[pending], t, params, H)
        diff = np.abs(cur - prev)
        last_diff = float(np.max(diff))
        settled = diff < tol
        out[pending] = cur
        pending, prev = pending[~settled], cur[~settled]
    out = out.reshape(xs.shape)
    return float(out) if xs.ndim == 0 else out


def moment(m: int, t: float, params: ModelParams) -> float:
    """Even moment <x^2m> of the full isotropic law (odd moments vanish)."""
    t = check_time(t)
    lt = params.lam * t
    return math.exp(-lt) * params.front(t) ** (2 * m) * hyp1f1_moment(m, lt)


# ---------------------------------------------------------------------------
# moment route


def _extended_dps(h: int, z: float) -> int:
    # the largest term is about e^{pi h + z}; keep 25 digits beyond it,
    # rounded up so nearby h share a cached 1F1 table
    need = 25 + (math.pi * h + z) / math.log(10)
    return 20 * math.ceil(need / 20)


@lru_cache(maxsize=64)
def _hyp1f1_table(z: float, M: int, dps: int) -> tuple:
    return tuple(hyp1f1_moment_mp(m, z, dps) for m in range(M + 1))


def moment_partial_sums(
    h: int, z: float, M: int, precision: Precision = "extended"
) -> np.ndarray:
    """Partial sums S_k = sum_{m=0}^{k} (-1)^m (pi h)^2m / (2m)! 1F1(m+1, 2m+1; z),
    k = 0..M, returned as floats.

    ``precision="double"`` adds float terms with compensated summation and
    warns when cancellation has eaten more than six digits.
    """
    if int(h) != h or h < 0:
        raise DomainError(f"harmonic index must be a nonnegative integer, got {h}")
    if int(M) != M or M < 0:
        raise DomainError(f"M must be a nonnegative integer, got {M}")
    h, M = int(h), int(M)
    if precision == "extended":
        return _partial_sums_extended(h, float(z), M)
    if precision == "double":
        return _partial_sums_double(h, float(z), M)
    raise DomainError(f"unknown precision {precision!r}")


def _partial_sums_extended(h: int, z: float, M: int) -> np.ndarray:
    dps = _extended_dps(h, z)
    table = _hyp1f1_table(z, M, dps)
    out = np.empty(M + 1)
    with mpmath.workdps(dps):
        q = (mpmath.pi * h) ** 2
        power = mpmath.mpf(1)
        total = mpmath.mpf(0)
        for m in range(M + 1):
            if m:
                power = -power * q / ((2 * m - 1) * (2 * m))
            total += power * table[m]
            out[m] = float(total)
    return out


def _partial_sums_double(h: int, z: float, M: int) -> np.ndarray:
    terms = []
    for m in range(M + 1):
        if h == 0:
            mag = 1.0 if m == 0 else 0.0
        else:
            mag = math.exp(2 * m * math.log(math.pi * h) - log_factorial(2 * m))
        terms.append((-1) ** m * mag * hyp1f1_moment(m, z))
    sums = np.array([math.fsum(terms[: k + 1]) for k in range(M + 1)])
    final = abs(sums[-1])
    peak = float(np.max(np.abs(sums)))
    if peak > _CANCELLATION_LIMIT * final:
        warnings.warn(
            f"moment sum for h={h}, lam*t={z:g}: partial sums reach {peak:.3g} "
            f"against a result of {final:.3g}; switch to precision='extended'",
            PrecisionLossWarning,
            stacklevel=3,
        )
    return sums


def coeff_from_moments(
    h: int, t: float, params: ModelParams, M: int, precision: Precision = "extended"
) -> float:
    """Fourier coefficient h of the full law from the moments m = 0..M."""
    t = check_time(t)
    if M < 1:
        raise DomainError(f"need M >= 1, got {M}")
    z = params.lam * t
    return math.exp(-z) * float(moment_partial_sums(h, z, M, precision)[-1])


def _identity_rhs(h: int, z: float) -> float:
    a = (math.pi * h) ** 2 - (0.5 * z) ** 2
    return math.exp(0.5 * z) * float(_bracket(a, 0.5 * z))


def identity_residual(
    h: int,
    t: float,
    params: ModelParams,
    M: int,
    precision: Precision = "extended",
    floor: float = 1e-300,
) -> float:
    """Relative mismatch between the truncated moment sum and the closed form
    e^{lam t/2} [cos sqrt(a) + (lam t/2) sinc sqrt(a)], a = (pi h)^2 - (lam t/2)^2."""
    t = check_time(t)
    if M < 1:
        raise DomainError(f"need M >= 1, got {M}")
    z = params.lam * t
    lhs = float(moment_partial_sums(h, z, M, precision)[-1])
    rhs = _identity_rhs(h, z)
    return abs(lhs - rhs) / max(abs(rhs), floor)


def required_moments(
    h: int,
    eps_r: float,
    t_grid: Sequence[float] | Iterable[float],
    params: ModelParams = ModelParams(),
    cap: int = 500,
    precision: Precision = "extended",
) -> int:
    """Smallest M >= 1 such that every truncation at M' in [M, cap] meets
    relative error eps_r, for every t in t_grid."""
    if not eps_r > 0:
        raise DomainError(f"eps_r must be positive, got {eps_r}")
    times = [check_time(t) for t in t_grid]
    if not times:
        raise DomainError("t_grid must not be empty")
    worst = 1
    for t in times:
        z = params.lam * t
        sums = moment_partial_sums(h, z, cap, precision)
        rhs = _identity_rhs(h, z)
        resid = np.abs(sums - rhs) / max(abs(rhs), 1e-300)
        bad = np.flatnonzero(resid[1:] > eps_r)
        if bad.size and bad[-1] + 1 == cap:
            raise MomentsNotAchievable(
                f"h={h}: relative error {resid[-1]:.3g} > {eps_r:g} at M={cap} (t={t:g})",
                h=h,
                cap=cap,
            )
        M = int(bad[-1]) + 2 if bad.size else 1
        worst = max(worst, M)
    return worst


def moment_coefficients(
    t: float,
    params: ModelParams,
    H: int,
    M: int,
    front_subtracted: bool = False,
    precision: Precision = "extended",
) -> FourierCoefficients:
    t = check_time(t)
    _check_harmonics(H)
    vals = np.array([coeff_from_moments(h, t, params, M, precision) for h in range(H + 1)])
    if front_subtracted:
        vals = vals - front_coefficient(np.arange(H + 1), t, params)
    return FourierCoefficients(t=t, params=params, values=vals, front_subtracted=front_subtracted)


def series_from_moments_full(
    x: ArrayLike, t: float, params: ModelParams, H: int, M: int, precision: Precision = "extended"
):
    """Moment-built series for the whole law (front included)."""
    return moment_coefficients(t, params, H, M, False, precision).evaluate(x)


def series_from_moments_continuous(
    x: ArrayLike, t: float, params: ModelParams, H: int, M: int, precision: Precision = "extended"
):
    """Moment-built series for the continuous part: coefficient h of the
    front, (-1)^h e^{-lam t/2}, is removed before summing."""
    return moment_coefficients(t, params, H, M, True, precision).evaluate(x)


def fourier_density(
    t: float,
    params: ModelParams,
    H: int | None = None,
    kind: Literal["full", "continuous", "moments"] = "continuous",
    M: int = 69,
    adaptive: bool = False,
) -> MixedDensity:
    """Wrap a Fourier route as a :class:`MixedDensity`.

    ``kind="full"`` has no atoms: its series already carries the front mass
    (smeared into oscillations), so its continuous part is not nonnegative.
    ``H=None`` means 10 harmonics. ``adaptive=True`` (kind "continuous" only)
    evaluates :func:`fourier_series_continuous_adaptive` instead, refining H
    near the fronts; its mass is then no longer exactly c_0.
    """
    t = check_time(t)
    L = params.front(t)
    w = 0.5 * front_weight(t, params)
    atoms = (Atom(-L, w), Atom(L, w))
    if kind == "full":
        coeffs = fourier_coefficients(t, params, H or 10)
        return MixedDensity(t, params, (), coeffs.evaluate, label=f"fourier-full-H{coeffs.harmonics}")
    if kind == "continuous":
        if adaptive:
            H0 = H or 10
            return MixedDensity(
                t, params, atoms,
                lambda xs: fourier_series_continuous_adaptive(xs, t, params, H0),
                label=f"fourier-cont-adaptive-H{H0}",
            )
        H = H or 10
        label = f"fourier-cont-H{H}"
        coeffs = fourier_coefficients(t, params, H, front_subtracted=True)
        return MixedDensity(t, params, atoms, coeffs.evaluate, label=label)
    if kind == "moments":
        coeffs = moment_coefficients(t, params, H or 10, M, front_subtracted=True)
        return MixedDensity(
            t, params, atoms, coeffs.evaluate, label=f"moments-H{coeffs.harmonics}-M{M}"
        )
    raise DomainError(f"unknown Fourier variant {kind!r}")
