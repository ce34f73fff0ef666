"""Bessel-function closed forms for the isotropic and bullet initial conditions.

These have the fewest numerical moving parts (two Bessel evaluations, no
interplay between truncations) and serve as the reference every other route
is compared against.

Isotropic start, continuous part (Goldstein's solution)::

    rho_G(x, t) = lam e^{-lam t/2} / (4v) * [I0(z) + (lam t/2) I1(z)/z],
    z = (lam / 2v) sqrt(v^2 t^2 - x^2),

where ``vt / sqrt(v^2t^2 - x^2) * I1(z)`` has been rewritten as
``(lam t/2) * I1(z)/z`` so the front |x| = vt needs no limit.

Right-moving bullet start::

    rho_b+(x, t) = e^{-lam t/2} delta(x - vt)
                   + e^{-lam t/2}/2 * [(lam/2v) I0(w) + (lam/2)^2 (vt+x)/v^2 * I1(w)/w],

with w = z. The left bullet is the mirror image.
"""
from __future__ import annotations

import math

import numpy as np
from numpy.typing import ArrayLike

from .domain import Atom, InitialCondition, MixedDensity, ModelParams, check_time
from .errors import DomainError
from .specfun import bessel_i0, i1_over_z

__all__ = [
    "goldstein_pdf",
    "goldstein_density",
    "bullet_pdf",
    "bullet_pdf_closed",
    "closed_form_density",
    "front_weight",
]


def front_weight(t: float, params: ModelParams) -> float:
    """Total probability of never having reversed direction by time t."""
    return math.exp(-0.5 * params.lam * t)


def _bessel_arg(xs: np.ndarray, t: float, params: ModelParams) -> np.ndarray:
    L = params.front(t)
    return (params.lam / (2 * params.v)) * np.sqrt(np.maximum(L * L - xs * xs, 0.0))


def goldstein_pdf(x: ArrayLike, t: float, params: ModelParams):
    """Continuous part of the isotropic density; zero for |x| > vt."""
    t = check_time(t)
    xs = np.asarray(x, dtype=float)
    inside = np.abs(xs) <= params.front(t)
    z = _bessel_arg(np.where(inside, xs, 0.0), t, params)
    lam, v = params.lam, params.v
    pref = lam * math.exp(-0.5 * lam * t) / (4 * v)
    vals = pref * (bessel_i0(z) + 0.5 * lam * t * i1_over_z(z))
    out = np.where(inside, vals, 0.0)
    return float(out) if xs.ndim == 0 else out


def goldstein_density(t: float, params: ModelParams) -> MixedDensity:
    t = check_time(t)
    L = params.front(t)
    w = 0.5 * front_weight(t, params)
    return MixedDensity(
        t=t,
        params=params,
        atoms=(Atom(-L, w), Atom(L, w)),
        continuous=lambda xs: goldstein_pdf(xs, t, params),
        label="goldstein",
    )


def _direction(ic: InitialCondition) -> float:
    if ic is InitialCondition.BULLET_RIGHT:
        return 1.0
    if ic is InitialCondition.BULLET_LEFT:
        return -1.0
    raise DomainError(f"need a bullet initial condition, got {ic}")


def bullet_pdf(
    x: ArrayLike,
    t: float,
    params: ModelParams,
    ic: InitialCondition = InitialCondition.BULLET_RIGHT,
):
    """Continuous part of the bullet density; zero for |x| > vt."""
    t = check_time(t)
    sign = _direction(ic)
    xs = sign * np.asarray(x, dtype=float)
    inside = np.abs(xs) <= params.front(t)
    xin = np.where(inside, xs, 0.0)
    w = _bessel_arg(xin, t, params)
    lam, v = params.lam, params.v
    half_lam = 0.5 * lam
    vals = 0.5 * math.exp(-half_lam * t) * (
        (half_lam / v) * bessel_i0(w)
        + half_lam**2 * (v * t + xin) / (v * v) * i1_over_z(w)
    )
    out = np.where(inside, vals, 0.0)
    return float(out) if np.ndim(x) == 0 else out


def bullet_pdf_closed(
    t: float,
    params: ModelParams,
    ic: InitialCondition = InitialCondition.BULLET_RIGHT,
) -> MixedDensity:
    """Bullet density: one atom at the leading front plus the Bessel part."""
    t = check_time(t)
    sign = _direction(ic)
    return MixedDensity(
        t=t,
        params=params,
        atoms=(Atom(sign * params.front(t), front_weight(t, params)),),
        continuous=lambda xs: bullet_pdf(xs, t, params, ic),
        label=f"closed-{ic.value}",
    )


def closed_form_density(t: float, params: ModelParams, ic: InitialCondition) -> MixedDensity:
    if ic is InitialCondition.ISOTROPIC:
        return goldstein_density(t, params)
    return bullet_pdf_closed(t, params, ic)
