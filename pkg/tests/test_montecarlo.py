import math

import numpy as np
import pytest
import scipy.stats as ss
from hypothesis import given, strategies as st

from randflight.closed_form import closed_form_density, goldstein_density
from randflight.collision import gap_pdf, rho_bullet_c, rho_r
from randflight.domain import InitialCondition, ModelParams, cumulative_integral
from randflight.errors import DomainError
from randflight.montecarlo import (
    BLOCK_SIZE,
    EnsembleResult,
    Model,
    conditioned_samples,
    default_workers,
    dkw_bound,
    ks_distance,
    ks_one_sample,
    ks_two_sample,
    ks_two_sample_critical,
    run_ensemble,
    simulate_block,
    simulate_position,
    simulate_trajectory,
)

P = ModelParams()
ISO, RIGHT, LEFT = InitialCondition.ISOTROPIC, InitialCondition.BULLET_RIGHT, InitialCondition.BULLET_LEFT


def kernel_cdf(f, L, n=4001):
    grid = np.linspace(-L, L, n)
    cum = cumulative_integral(f, grid)
    return lambda x: np.interp(x, grid, cum)


def test_event_rates():
    p = ModelParams(lam=3.0)
    assert Model.REVERSAL.event_rate(p) == 1.5
    assert Model.SCATTERING.event_rate(p) == 3.0


def test_trajectory_reconstructs_position():
    rng = np.random.default_rng(3)
    t = 4.0
    for _ in range(200):
        tr = simulate_trajectory(t, P, ISO, Model.REVERSAL, rng)
        edges = np.r_[0.0, tr.event_times, t]
        signs = tr.initial_sign * (-1.0) ** np.arange(edges.size - 1)
        assert tr.position == pytest.approx(float(np.sum(signs * np.diff(edges))), abs=1e-12)
        assert tr.at_boundary == (tr.event_count == 0)
        assert abs(tr.position) <= t


def test_zero_event_trajectory_sits_on_front():
    rng = np.random.default_rng(0)
    hits = [simulate_position(0.01, P, RIGHT, Model.REVERSAL, rng) for _ in range(50)]
    for pos, count, edge in hits:
        if count == 0:
            assert edge and pos == 0.01


@pytest.mark.parametrize("model", list(Model))
def test_front_fraction(model):
    n, t = 200_000, 2.0
    sim = simulate_block(n, t, P, ISO, model, np.random.default_rng(11))
    p = math.exp(-t / 2)
    frac = sim["at_boundary"].mean()
    assert abs(frac - p) < 4 * math.sqrt(p * (1 - p) / n)
    assert np.all(np.abs(sim["position"][sim["at_boundary"]]) == t)
    assert np.all(np.abs(sim["position"]) <= t)


def test_reversal_count_is_poisson():
    n, t = 200_000, 3.0
    sim = simulate_block(n, t, P, ISO, Model.REVERSAL, np.random.default_rng(5))
    mu = t / 2
    for r in range(5):
        p = ss.poisson(mu).pmf(r)
        assert abs(np.mean(sim["count"] == r) - p) < 4 * math.sqrt(p * (1 - p) / n)


def test_ensemble_determinism_and_partitioning():
    kw = dict(n=3 * BLOCK_SIZE + 17, t=2.0, params=P, ic=ISO, model=Model.SCATTERING, seed=42)
    a = run_ensemble(workers=1, **kw)
    b = run_ensemble(workers=4, **kw)
    c = run_ensemble(workers=1, **kw)
    np.testing.assert_array_equal(a.counts, b.counts)
    np.testing.assert_array_equal(a.counts, c.counts)
    assert a.atom_counts == b.atom_counts
    d = run_ensemble(workers=1, **{**kw, "seed": 43})
    assert not np.array_equal(a.counts, d.counts)


def test_ensemble_bookkeeping():
    res = run_ensemble(10_000, 1.0, P, RIGHT, Model.REVERSAL, bins=50, seed=1)
    assert res.counts.size == 50
    assert int(res.counts.sum()) + sum(res.atom_counts) == 10_000
    assert res.atom_counts[1] == 0
    assert res.empirical_cdf()[-1] == 1.0
    assert res.atom_fraction == pytest.approx(math.exp(-0.5), abs=0.02)
    with pytest.raises(DomainError):
        EnsembleResult(5, res.bin_edges, res.counts, (0, 0), 1, Model.REVERSAL, RIGHT, 1.0, P)


def test_ensemble_low_moments():
    n, t = 400_000, 3.0
    res, (s1, s2) = run_ensemble(n, t, P, ISO, Model.REVERSAL, seed=8, moments=True)
    m2 = 2 * (t - (1 - math.exp(-t)))
    sd2 = math.sqrt(t**4 / n)
    assert abs(s1 / n) < 4 * math.sqrt(m2 / n)
    assert abs(s2 / n - m2) < 4 * sd2
    res_b, (b1, _) = run_ensemble(n, t, P, RIGHT, Model.SCATTERING, seed=9, moments=True)
    assert abs(b1 / n - (1 - math.exp(-t))) < 4 * math.sqrt(m2 / n)


def test_ks_self_comparison():
    # a histogram built from exact bin masses reproduces the analytic CDF
    t, bins, n = 2.0, 200, 10**12
    dens = goldstein_density(t, P)
    edges = np.linspace(-t, t, bins + 1)
    cdf = dens.cdf(edges, include_right_atom=False)
    w = dens.atoms[0].weight
    counts = np.round(np.diff(cdf) * n).astype(np.int64)
    atoms = int(round(w * n))
    total = int(counts.sum()) + 2 * atoms
    res = EnsembleResult(total, edges, counts, (atoms, atoms), 0, Model.REVERSAL, ISO, t, P)
    assert ks_distance(res, dens) < 1e-10


def test_ks_rejects_wrong_law():
    res = run_ensemble(100_000, 2.0, P, RIGHT, Model.REVERSAL, seed=2)
    assert ks_distance(res, closed_form_density(2.0, P, RIGHT)) < dkw_bound(100_000)
    assert ks_distance(res, closed_form_density(2.0, P, ISO)) > 0.1
    with pytest.raises(DomainError):
        ks_distance(res, goldstein_density(3.0, P))


def test_two_sample_ks():
    a = run_ensemble(100_000, 2.0, P, ISO, Model.REVERSAL, seed=1)
    b = run_ensemble(100_000, 2.0, P, ISO, Model.SCATTERING, seed=2)
    c = run_ensemble(100_000, 2.0, P, RIGHT, Model.SCATTERING, seed=3)
    crit = ks_two_sample_critical(100_000, 100_000)
    assert ks_two_sample(a, b) < crit
    assert ks_two_sample(a, c) > crit
    with pytest.raises(DomainError):
        ks_two_sample(a, run_ensemble(1000, 2.0, P, ISO, bins=10))


def test_ks_one_sample_matches_scipy():
    x = np.random.default_rng(0).normal(size=2000)
    assert ks_one_sample(x, ss.norm.cdf) == pytest.approx(ss.kstest(x, "norm").statistic, abs=1e-15)


def test_thresholds():
    assert dkw_bound(10**6) == pytest.approx(0.00195, abs=1e-5)
    assert ks_two_sample_critical(10**6, 10**6) == pytest.approx(0.002757, abs=1e-6)


def test_default_workers(monkeypatch):
    monkeypatch.delenv("RANDFLIGHT_WORKERS", raising=False)
    assert default_workers() == 1
    monkeypatch.setenv("RANDFLIGHT_WORKERS", "6")
    assert default_workers() == 6
    monkeypatch.setenv("RANDFLIGHT_WORKERS", "many")
    with pytest.raises(DomainError):
        default_workers()


# --- conditioned laws (smaller N than the acceptance run) ---------------------------

N_COND = 20_000


@pytest.mark.parametrize("r", [1, 2, 3, 5])
def test_conditioned_positions(r):
    t = 6.0
    s = conditioned_samples(r, N_COND, t, P, seed=r)
    cdf = kernel_cdf(lambda x: rho_r(r, x, t, P), t)
    assert ks_one_sample(s["position"], cdf) < 4 / math.sqrt(N_COND)


@pytest.mark.parametrize("r,j", [(1, 1), (3, 2), (4, 4)])
def test_conditioned_order_statistics(r, j):
    t = 6.0
    s = conditioned_samples(r, N_COND, t, P, seed=10 + r)
    cdf = ss.beta(j, r - j + 1).cdf
    assert ks_one_sample(s["times"][:, j - 1] / t, cdf) < 4 / math.sqrt(N_COND)


def test_conditioned_gaps():
    t, r = 6.0, 4
    s = conditioned_samples(r, N_COND, t, P, seed=99)
    gaps = P.v * (s["times"][:, 2] - s["times"][:, 1])
    grid = np.linspace(0, t, 2001)
    cum = cumulative_integral(lambda d: gap_pdf(r, d, t, P), grid)
    assert ks_one_sample(gaps, lambda d: np.interp(d, grid, cum)) < 4 / math.sqrt(N_COND)


@pytest.mark.parametrize("c", [2, 4])
def test_conditioned_bullet_orientation(c):
    t = 6.0
    s = conditioned_samples(c, N_COND, t, P, ic=RIGHT, seed=50 + c)
    good = kernel_cdf(lambda x: rho_bullet_c(c, x, t, P, RIGHT), t)
    mirrored = kernel_cdf(lambda x: rho_bullet_c(c, -x, t, P, RIGHT), t)
    assert ks_one_sample(s["position"], good) < 4 / math.sqrt(N_COND)
    assert ks_one_sample(s["position"], mirrored) > 0.1


def test_conditioned_errors():
    with pytest.raises(DomainError):
        conditioned_samples(-1, 10, 1.0, P)


@given(st.integers(0, 2**32 - 1))
def test_block_positions_in_support(seed):
    sim = simulate_block(200, 1.5, P, LEFT, Model.SCATTERING, np.random.default_rng(seed))
    assert np.all(np.abs(sim["position"]) <= 1.5)
    assert np.all(sim["position"][sim["at_boundary"]] == -1.5)
