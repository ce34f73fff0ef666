"""Expansion of the density in the number of direction reversals.

Conditioned on exactly r reversals in [0, t], the reversal times are r
uniform order statistics and the final position is a linear function of one
of them; the unconditioned law is the Poisson(lam t / 2) mixture over r.

Notation used below: L = vt, u = x/L, s = 1 - u^2, kappa = lam t / 4.
With this notation the paired (r = 2n-1, 2n) terms of the isotropic series are::

    e^{-lam t/2} / L * kappa^(2n-1) (1 + kappa/n) s^(n-1) / ((n-1)!)^2,   n >= 1

and the right-bullet series, grouped the same way, is::

    lam e^{-lam t/2} / (4v) * [n kappa^(2n-1) (1+u) s^(n-1) + kappa^(2n) s^n] / (n!)^2,   n >= 0

Both are summed in log space: the prefactors overflow doubles long before
the sums do.
"""
from __future__ import annotations

import math

import numpy as np
from numpy.typing import ArrayLike

from .closed_form import front_weight
from .domain import (
    Adaptive,
    Atom,
    FixedTerms,
    InitialCondition,
    MixedDensity,
    ModelParams,
    TruncationPolicy,
    check_time,
)
from .errors import DomainError, TruncationError
from .specfun import log_factorial

__all__ = [
    "order_stat_pdf",
    "gap_pdf",
    "rho_r",
    "rho_bullet_c",
    "isotropic_series",
    "bullet_series",
    "bullet_series_as_printed",
    "isotropic_density",
    "bullet_density_series",
    "collision_density",
]

_GUARD = 3


def _shaped(out: np.ndarray, like):
    return float(out) if np.ndim(like) == 0 else out


def order_stat_pdf(r: int, j: int, tj: ArrayLike, t: float):
    """Density of the j-th smallest of r independent uniform times on [0, t]."""
    t = check_time(t)
    if r < 1 or not 1 <= j <= r:
        raise DomainError(f"need 1 <= j <= r, got r={r}, j={j}")
    ts = np.asarray(tj, dtype=float)
    u = ts / t
    inside = (u >= 0) & (u <= 1)
    uc = np.clip(u, 0.0, 1.0)
    coef = r * math.comb(r - 1, j - 1)
    vals = coef * np.power(1.0 - uc, r - j) * np.power(uc, j - 1) / t
    return _shaped(np.where(inside, vals, 0.0), tj)


def gap_pdf(r: int, d: ArrayLike, t: float, params: ModelParams):
    """Density of the spacing between neighbouring points when r points are
    dropped uniformly on [0, vt]."""
    t = check_time(t)
    if r < 1:
        raise DomainError(f"need r >= 1, got {r}")
    L = params.front(t)
    ds = np.asarray(d, dtype=float)
    inside = (ds >= 0) & (ds <= L)
    vals = r * np.power(np.clip(1.0 - ds / L, 0.0, 1.0), r - 1) / L
    return _shaped(np.where(inside, vals, 0.0), d)


def rho_r(r: int, x: ArrayLike, t: float, params: ModelParams):
    """Isotropic-start density conditioned on exactly r >= 1 reversals.

    rho_{2k-1} and rho_{2k} coincide; both equal
    k * C(2k-1, k) / (2^(2k-1) vt) * (1 - x^2/(vt)^2)^(k-1).
    """
    t = check_time(t)
    if int(r) != r or r < 1:
        raise DomainError(f"rho_r needs an integer r >= 1 (r = 0 is an atom pair), got {r}")
    r = int(r)
    L = params.front(t)
    k = (r + 1) // 2
    xs = np.asarray(x, dtype=float)
    s = np.clip(1.0 - (xs / L) ** 2, 0.0, 1.0)
    coef = k * math.comb(r, k) / (2.0**r * L)
    vals = coef * np.power(s, (r - 1) // 2)
    return _shaped(np.where(np.abs(xs) <= L, vals, 0.0), x)


def rho_bullet_c(
    c: int,
    x: ArrayLike,
    t: float,
    params: ModelParams,
    ic: InitialCondition = InitialCondition.BULLET_RIGHT,
):
    """Bullet-start density conditioned on exactly c >= 1 reversals.

    For a right-moving start the time spent moving right is a sum of
    floor(c/2) + 1 of the c + 1 exchangeable spacings, so (x + vt)/(2vt) is
    Beta(floor(c/2) + 1, floor((c-1)/2) + 1) distributed::

        1/(2 (vt)^c) * c! / (floor(c/2)! floor((c-1)/2)!)
            * ((vt+x)/2)^floor(c/2) * ((vt-x)/2)^floor((c-1)/2)
    """
    t = check_time(t)
    if int(c) != c or c < 1:
        raise DomainError(f"rho_bullet_c needs an integer c >= 1 (c = 0 is an atom), got {c}")
    if not ic.is_bullet:
        raise DomainError(f"need a bullet initial condition, got {ic}")
    c = int(c)
    sign = 1.0 if ic is InitialCondition.BULLET_RIGHT else -1.0
    L = params.front(t)
    xs = sign * np.asarray(x, dtype=float)
    a, b = c // 2, (c - 1) // 2
    # Beta(a+1, b+1) density of p = (1+u)/2, divided by dx/dp = 2L
    p = np.clip(0.5 * (1.0 + xs / L), 0.0, 1.0)
    log_coef = log_factorial(c) - log_factorial(a) - log_factorial(b)
    vals = math.exp(log_coef) * np.power(p, a) * np.power(1.0 - p, b) / (2 * L)
    return _shaped(np.where(np.abs(xs) <= L, vals, 0.0), x)


def _policy_limits(trunc: TruncationPolicy) -> tuple[int, bool]:
    if isinstance(trunc, FixedTerms):
        return trunc.n, False
    if isinstance(trunc, Adaptive):
        return trunc.tol.max_terms, True
    raise DomainError(f"unknown truncation policy {trunc!r}")


def _sum_terms(term_fn, shape, trunc: TruncationPolicy, first: int, name: str) -> np.ndarray:
    """Add term_fn(n) for n = first, first+1, ... under the truncation policy."""
    limit, adaptive = _policy_limits(trunc)
    total = np.zeros(shape)
    small = np.zeros(shape, dtype=int)
    term = np.zeros(shape)
    for count in range(limit):
        term = term_fn(first + count)
        total += term
        if adaptive:
            tol = trunc.tol
            small = np.where(np.abs(term) < tol.abs + tol.rel * np.abs(total), small + 1, 0)
            if np.all(small >= _GUARD):
                return total
    if adaptive:
        raise TruncationError(
            f"{name}: no convergence within {limit} terms",
            last_term=float(np.max(np.abs(term))) if term.size else 0.0,
        )
    return total


def _log_or_neg_inf(a: float) -> float:
    return math.log(a) if a > 0 else -math.inf


def isotropic_series(
    x: ArrayLike,
    t: float,
    params: ModelParams,
    trunc: TruncationPolicy = Adaptive(),
):
    """Continuous part of the isotropic density as the paired reversal series."""
    t = check_time(t)
    L = params.front(t)
    xs = np.asarray(x, dtype=float)
    inside = np.abs(xs) <= L
    s = np.clip(1.0 - (np.where(inside, xs, 0.0) / L) ** 2, 0.0, 1.0)
    kappa = 0.25 * params.lam * t
    log_k = math.log(kappa)
    log_base = -0.5 * params.lam * t - math.log(L)

    def term(n: int) -> np.ndarray:
        log_w = log_base + (2 * n - 1) * log_k - 2 * log_factorial(n - 1) + math.log1p(kappa / n)
        return math.exp(log_w) * np.power(s, n - 1)

    vals = _sum_terms(term, s.shape, trunc, first=1, name="isotropic_series")
    return _shaped(np.where(inside, vals, 0.0), x)


def bullet_series(
    x: ArrayLike,
    t: float,
    params: ModelParams,
    trunc: TruncationPolicy = Adaptive(),
    ic: InitialCondition = InitialCondition.BULLET_RIGHT,
):
    """Continuous part of the bullet density as a reversal series.

    This is the grouping of the Poisson mixture over :func:`rho_bullet_c`
    given in the module docstring, not the formula as it appears in print
    (see :func:`bullet_series_as_printed`).
    """
    t = check_time(t)
    if not ic.is_bullet:
        raise DomainError(f"need a bullet initial condition, got {ic}")
    sign = 1.0 if ic is InitialCondition.BULLET_RIGHT else -1.0
    L = params.front(t)
    xs = sign * np.asarray(x, dtype=float)
    inside = np.abs(xs) <= L
    u = np.where(inside, xs, 0.0) / L
    s = np.clip(1.0 - u * u, 0.0, 1.0)
    one_plus_u = 1.0 + u
    kappa = 0.25 * params.lam * t
    log_k = math.log(kappa)
    log_pref = math.log(params.lam / (4 * params.v)) - 0.5 * params.lam * t

    def term(n: int) -> np.ndarray:
        log_nf2 = 2 * log_factorial(n)
        odd = 0.0
        if n > 0:
            odd = math.exp(log_pref + math.log(n) + (2 * n - 1) * log_k - log_nf2)
        even = math.exp(log_pref + 2 * n * log_k - log_nf2)
        return odd * one_plus_u * np.power(s, max(n - 1, 0)) + even * np.power(s, n)

    vals = _sum_terms(term, s.shape, trunc, first=0, name="bullet_series")
    return _shaped(np.where(inside, vals, 0.0), x)


def bullet_series_as_printed(x: ArrayLike, t: float, params: ModelParams, n_terms: int = 200):
    """The right-bullet series exactly as it appears in print, for comparison.

    Term n is::

        (vt - x) / (4 (vt)^(2n)) / n!^2 * (lam t/2)^(2n)
            * ((v^2t^2 - x^2)/(v^2t^2))^(n-1) * (n + lam/(4v) (vt + x))

    It agrees with :func:`bullet_series` only when vt = 2 and x is mirrored;
    the n = 0 term is singular at |x| = vt. Not used by any other route.
    """
    t = check_time(t)
    L = params.front(t)
    lam, v = params.lam, params.v
    xs = np.asarray(x, dtype=float)
    inside = np.abs(xs) < L
    xin = np.where(inside, xs, 0.0)
    ratio = (L * L - xin * xin) / (L * L)
    total = np.zeros(xs.shape)
    for n in range(n_terms):
        log_mag = (
            2 * n * math.log(0.5 * lam * t) - 2 * n * math.log(L) - 2 * log_factorial(n)
        )
        total += (
            (L - xin) / 4.0
            * math.exp(log_mag)
            * np.power(ratio, n - 1)
            * (n + lam / (4 * v) * (L + xin))
        )
    out = math.exp(-0.5 * lam * t) * total
    return _shaped(np.where(inside, out, np.nan), x)


def isotropic_density(
    t: float, params: ModelParams, trunc: TruncationPolicy = Adaptive()
) -> MixedDensity:
    t = check_time(t)
    L = params.front(t)
    w = 0.5 * front_weight(t, params)
    return MixedDensity(
        t=t,
        params=params,
        atoms=(Atom(-L, w), Atom(L, w)),
        continuous=lambda xs: isotropic_series(xs, t, params, trunc),
        label="collision-isotropic",
    )


def bullet_density_series(
    t: float,
    params: ModelParams,
    trunc: TruncationPolicy = Adaptive(),
    ic: InitialCondition = InitialCondition.BULLET_RIGHT,
) -> MixedDensity:
    t = check_time(t)
    if not ic.is_bullet:
        raise DomainError(f"need a bullet initial condition, got {ic}")
    sign = 1.0 if ic is InitialCondition.BULLET_RIGHT else -1.0
    return MixedDensity(
        t=t,
        params=params,
        atoms=(Atom(sign * params.front(t), front_weight(t, params)),),
        continuous=lambda xs: bullet_series(xs, t, params, trunc, ic),
        label=f"collision-{ic.value}",
    )


def collision_density(
    t: float,
    params: ModelParams,
    ic: InitialCondition = InitialCondition.ISOTROPIC,
    trunc: TruncationPolicy = Adaptive(),
) -> MixedDensity:
    if ic is InitialCondition.ISOTROPIC:
        return isotropic_density(t, params, trunc)
    return bullet_density_series(t, params, trunc, ic)
