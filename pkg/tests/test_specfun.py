import math
from fractions import Fraction

import mpmath
import numpy as np
import pytest
import scipy.special as sc
from hypothesis import given, strategies as st

from randflight.errors import DomainError, TruncationError
from randflight.specfun import (
    EvalTolerance,
    bessel_i0,
    bessel_i1,
    cos_sqrt,
    hyp1f1_moment,
    hyp1f1_moment_mp,
    i1_over_z,
    log_factorial,
    sinc_sqrt,
)


def _i0_exact(z: Fraction, terms: int = 60) -> float:
    q = z * z / 4
    return float(sum(q**j / math.factorial(j) ** 2 for j in range(terms)))


def _i1_exact(z: Fraction, terms: int = 60) -> float:
    q = z * z / 4
    return float(z / 2 * sum(q**j / (math.factorial(j) * math.factorial(j + 1)) for j in range(terms)))


def _kummer_exact(m: int, z: Fraction, terms: int = 120) -> float:
    total, term = Fraction(0), Fraction(1)
    for k in range(terms):
        total += term
        term = term * z * (m + 1 + k) / ((k + 1) * (2 * m + 1 + k))
    return float(total)


# --- examples -------------------------------------------------------------

def test_i0_at_zero():
    assert bessel_i0(0.0) == 1.0


@pytest.mark.parametrize("z", [Fraction(1), Fraction(2), Fraction(5, 2), Fraction(10)])
def test_i0_matches_rational_series(z):
    assert bessel_i0(float(z)) == pytest.approx(_i0_exact(z), rel=1e-15)


@pytest.mark.parametrize("z", [Fraction(1, 2), Fraction(1), Fraction(7), Fraction(20)])
def test_i1_matches_rational_series(z):
    assert bessel_i1(float(z)) == pytest.approx(_i1_exact(z), rel=2e-15)


def test_i1_over_z_limit():
    assert i1_over_z(0.0) == 0.5
    assert bessel_i1(0.0) == 0.0


@pytest.mark.parametrize("m,z", [(0, Fraction(3)), (1, Fraction(2)), (5, Fraction(13, 2)), (30, Fraction(15))])
def test_kummer_matches_rational_series(m, z):
    assert hyp1f1_moment(m, float(z)) == pytest.approx(_kummer_exact(m, z), rel=1e-14)


def test_kummer_special_values():
    assert hyp1f1_moment(7, 0.0) == 1.0
    # 1F1(1; 1; z) = e^z
    assert hyp1f1_moment(0, 3.5) == pytest.approx(math.exp(3.5), rel=1e-15)


@pytest.mark.parametrize("m,z", [(0, 1.0), (4, 5.21), (40, 15.21), (68, 30.0)])
def test_kummer_mp_against_mpmath(m, z):
    with mpmath.workdps(60):
        ref = mpmath.hyp1f1(m + 1, 2 * m + 1, mpmath.mpf(z))
        got = hyp1f1_moment_mp(m, z, 60)
        assert abs(got / ref - 1) < mpmath.mpf(10) ** -55


def test_trig_kernels_examples():
    assert cos_sqrt(0.0) == 1.0
    assert sinc_sqrt(0.0) == 1.0
    assert cos_sqrt(math.pi**2) == pytest.approx(-1.0, abs=1e-15)
    assert sinc_sqrt(math.pi**2) == pytest.approx(0.0, abs=1e-16)
    assert cos_sqrt(-4.0) == pytest.approx(math.cosh(2.0), rel=1e-15)
    assert sinc_sqrt(-4.0) == pytest.approx(math.sinh(2.0) / 2.0, rel=1e-15)


def test_log_factorial():
    assert log_factorial(0) == 0.0
    assert log_factorial(1) == 0.0
    assert log_factorial(20) == pytest.approx(math.log(math.factorial(20)), rel=1e-16)
    assert log_factorial(5000) == pytest.approx(float(mpmath.log(mpmath.factorial(5000))), rel=1e-15)


# --- independent libraries ---------------------------------------------------

def test_bessel_against_scipy():
    z = np.linspace(0.0, 60.0, 241)
    np.testing.assert_allclose(bessel_i0(z), sc.i0(z), rtol=1e-13)
    np.testing.assert_allclose(bessel_i1(z), sc.i1(z), rtol=1e-13)


def test_kummer_against_scipy():
    z = np.linspace(0.0, 40.0, 81)
    for m in (0, 1, 3, 10):
        np.testing.assert_allclose(hyp1f1_moment(m, z), sc.hyp1f1(m + 1, 2 * m + 1, z), rtol=1e-12)


# --- shape and errors ----------------------------------------------------------

def test_shapes_preserved():
    z = np.arange(6.0).reshape(2, 3)
    for f in (bessel_i0, bessel_i1, i1_over_z, cos_sqrt, sinc_sqrt):
        assert f(z).shape == (2, 3)
    assert isinstance(bessel_i0(1.0), float)
    assert isinstance(sinc_sqrt(-1.0), float)


@pytest.mark.parametrize("bad", [-1.0, float("nan"), float("inf")])
def test_domain_errors(bad):
    with pytest.raises(DomainError):
        bessel_i0(bad)
    with pytest.raises(DomainError):
        hyp1f1_moment(2, bad)


def test_order_errors():
    with pytest.raises(DomainError):
        hyp1f1_moment(-1, 1.0)
    with pytest.raises(DomainError):
        hyp1f1_moment(1.5, 1.0)
    with pytest.raises(DomainError):
        log_factorial(-2)


def test_truncation_error_reports_last_term():
    with pytest.raises(TruncationError) as info:
        bessel_i0(50.0, EvalTolerance(max_terms=5))
    assert info.value.last_term > 0


@pytest.mark.parametrize("kw", [dict(rel=0.0), dict(rel=float("nan")), dict(abs=-1.0), dict(max_terms=0)])
def test_tolerance_validation(kw):
    with pytest.raises(DomainError):
        EvalTolerance(**kw)


# --- properties ----------------------------------------------------------------

@given(st.floats(0.0, 200.0))
def test_i0_dominates_i1(z):
    i0, i1 = bessel_i0(z), bessel_i1(z)
    assert i0 >= 1.0
    assert 0.0 <= i1 < i0


@given(st.floats(0.01, 50.0))
def test_bessel_derivative_identity(z):
    # I0' = I1
    h = 1e-4
    d = (bessel_i0(z + h) - bessel_i0(z - h)) / (2 * h)
    assert d == pytest.approx(bessel_i1(z), rel=1e-6)


@given(st.floats(-400.0, 400.0))
def test_trig_kernels_match_closed_forms(y):
    r = math.sqrt(abs(y))
    if y >= 0:
        c, s = math.cos(r), (math.sin(r) / r if r else 1.0)
    else:
        c, s = math.cosh(r), math.sinh(r) / r
    assert cos_sqrt(y) == pytest.approx(c, rel=1e-12, abs=1e-12)
    assert sinc_sqrt(y) == pytest.approx(s, rel=1e-10, abs=1e-12)


@given(st.floats(-1e-4, 1e-4))
def test_sinc_continuous_at_zero(y):
    assert abs(sinc_sqrt(y) - (1.0 - y / 6.0)) < 1e-9


@given(st.integers(0, 40), st.floats(0.0, 30.0))
def test_kummer_monotone_in_z(m, z):
    assert hyp1f1_moment(m, z + 0.5) > hyp1f1_moment(m, z) >= 1.0


@given(st.floats(0.0, 30.0))
def test_pure(z):
    assert bessel_i0(z) == bessel_i0(z)
