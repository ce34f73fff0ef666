"""Core data model: process parameters, initial conditions, mixed densities.

A position law of the random flight at time t is a *mixed* density: an
absolutely continuous part on [-vt, vt] plus Dirac atoms at the two fronts
x = +-vt carried by particles that never changed direction. Atoms are kept
as explicit (position, weight) pairs and never smeared onto a grid.
"""
from __future__ import annotations

import enum
import math
import warnings
from dataclasses import dataclass, field
from typing import Callable, Union

import numpy as np
from numpy.typing import ArrayLike
from scipy import integrate

from .errors import DomainError, QuadratureError
from .specfun import DEFAULT_TOL, EvalTolerance

__all__ = [
    "ModelParams",
    "InitialCondition",
    "Atom",
    "MixedDensity",
    "FixedTerms",
    "Adaptive",
    "TruncationPolicy",
    "Grid",
    "quadrature",
    "cumulative_integral",
    "check_time",
]

Evaluator = Callable[[np.ndarray], np.ndarray]


@dataclass(frozen=True)
class ModelParams:
    """Scattering rate ``lam`` (1/time) and speed ``v`` (length/time).

    ``lam`` is the isotropic-scattering rate; direction reversals happen at
    rate ``lam / 2``.
    """

    lam: float = 1.0
    v: float = 1.0

    def __post_init__(self):
        for name in ("lam", "v"):
            val = getattr(self, name)
            if not (math.isfinite(val) and val > 0):
                raise DomainError(f"{name} must be positive and finite, got {val}")

    @property
    def reversal_rate(self) -> float:
        return 0.5 * self.lam

    def front(self, t: float) -> float:
        """Position vt of the right-hand front at time t."""
        return self.v * t


class InitialCondition(enum.Enum):
    ISOTROPIC = "isotropic"
    BULLET_RIGHT = "bullet-right"
    BULLET_LEFT = "bullet-left"

    @property
    def is_bullet(self) -> bool:
        return self is not InitialCondition.ISOTROPIC


def check_time(t: float) -> float:
    t = float(t)
    if not (math.isfinite(t) and t > 0):
        raise DomainError(f"time must be positive and finite, got {t}")
    return t


@dataclass(frozen=True)
class Atom:
    position: float
    weight: float


@dataclass(frozen=True)
class MixedDensity:
    """Continuous density on [-vt, vt] plus point masses at the fronts.

    ``continuous`` maps an array of positions to density values; it is only
    ever called with points inside the support (the public :meth:`pdf` masks
    the rest to zero).
    """

    t: float
    params: ModelParams
    atoms: tuple[Atom, ...]
    continuous: Evaluator = field(repr=False, compare=False)
    label: str = ""

    def __post_init__(self):
        check_time(self.t)
        L = self.half_width
        for atom in self.atoms:
            if not math.isclose(abs(atom.position), L, rel_tol=1e-12):
                raise DomainError(f"atom at {atom.position} is not on a front (+-{L})")
            if not 0.0 <= atom.weight <= 1.0:
                raise DomainError(f"atom weight {atom.weight} outside [0, 1]")

    @property
    def half_width(self) -> float:
        return self.params.front(self.t)

    @property
    def atom_mass(self) -> float:
        return math.fsum(a.weight for a in self.atoms)

    def atom_weight(self, position: float) -> float:
        return math.fsum(
            a.weight for a in self.atoms if math.isclose(a.position, position, rel_tol=1e-12)
        )

    def pdf(self, x: ArrayLike):
        """Continuous part at x, zero outside [-vt, vt]."""
        xs = np.asarray(x, dtype=float)
        inside = np.abs(xs) <= self.half_width
        out = np.zeros(xs.shape)
        if np.any(inside):
            out[inside] = self.continuous(xs[inside])
        return float(out) if xs.ndim == 0 else out

    def continuous_mass(self, tol: float = 1e-11) -> float:
        L = self.half_width
        return quadrature(self.pdf, -L, L, tol)

    def total_mass(self, tol: float = 1e-11) -> float:
        return self.atom_mass + self.continuous_mass(tol)

    def cdf(self, x: ArrayLike, *, include_right_atom: bool = True):
        """P(X <= x), atoms included.

        With ``include_right_atom=False`` the value at x = +vt is the left
        limit, which is what a comparison against binned data needs.
        """
        xs = np.atleast_1d(np.asarray(x, dtype=float))
        L = self.half_width
        clipped = np.clip(xs, -L, L)
        order = np.argsort(clipped, kind="stable")
        knots = np.concatenate(([-L], clipped[order]))
        out = np.empty(xs.size)
        out[order] = cumulative_integral(self.pdf, knots, max_cell=L / 32)[1:]
        for atom in self.atoms:
            if atom.position < 0 or include_right_atom:
                out += np.where(xs >= atom.position, atom.weight, 0.0)
        return float(out[0]) if np.ndim(x) == 0 else out

    def reflected(self, label: str | None = None) -> "MixedDensity":
        """The law of -X."""
        cont = self.continuous
        return MixedDensity(
            t=self.t,
            params=self.params,
            atoms=tuple(Atom(-a.position, a.weight) for a in self.atoms),
            continuous=lambda xs: cont(-np.asarray(xs, dtype=float)),
            label=label if label is not None else f"reflected({self.label})",
        )


@dataclass(frozen=True)
class FixedTerms:
    """Sum exactly ``n`` terms."""

    n: int

    def __post_init__(self):
        if int(self.n) != self.n or self.n < 1:
            raise DomainError(f"FixedTerms needs n >= 1, got {self.n}")


@dataclass(frozen=True)
class Adaptive:
    tol: EvalTolerance = DEFAULT_TOL


TruncationPolicy = Union[FixedTerms, Adaptive]


@dataclass(frozen=True)
class Grid:
    t: float
    points: np.ndarray = field(compare=False)

    def __post_init__(self):
        pts = np.asarray(self.points, dtype=float)
        if pts.ndim != 1 or pts.size == 0:
            raise DomainError("grid needs a nonempty 1-d list of points")
        if np.any(np.diff(pts) <= 0):
            raise DomainError("grid points must be strictly increasing")
        object.__setattr__(self, "points", pts)

    @classmethod
    def uniform(cls, t: float, params: ModelParams, x_min: float, x_max: float, n: int) -> "Grid":
        L = params.front(check_time(t))
        # allow a couple of ulps of slack so that +-vt itself is accepted
        slack = 4 * np.finfo(float).eps * L
        if x_min < -L - slack or x_max > L + slack:
            raise DomainError(f"grid [{x_min}, {x_max}] leaves the support [-{L}, {L}]")
        if n < 1 or (n > 1 and not x_min < x_max):
            raise DomainError("grid needs n >= 1 points and x_min < x_max")
        pts = np.linspace(x_min, x_max, n) if n > 1 else np.array([x_min])
        return cls(t=t, points=np.clip(pts, -L, L))


def quadrature(f: Callable, a: float, b: float, tol: float = 1e-10, limit: int = 200) -> float:
    """Adaptive Gauss-Kronrod estimate of the integral of f over [a, b].

    Raises :class:`QuadratureError` when the subdivision budget runs out
    before the absolute error estimate drops below ``tol``.
    """
    if not a < b:
        raise DomainError(f"quadrature needs a < b, got [{a}, {b}]")
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", integrate.IntegrationWarning)
        val, err, info = integrate.quad(
            lambda s: float(f(s)), a, b, epsabs=tol, epsrel=0.0, limit=limit, full_output=True
        )[:3]
    if not math.isfinite(val) or err > tol:
        raise QuadratureError(f"quadrature on [{a}, {b}] stalled: error estimate {err:.3g} > {tol:.3g}")
    return val


_GL_ORDER = 24
_GL_NODES, _GL_WEIGHTS = np.polynomial.legendre.leggauss(_GL_ORDER)


def cumulative_integral(f: Callable, knots: np.ndarray, max_cell: float | None = None) -> np.ndarray:
    """Running integral of f from knots[0] to each knot.

    Each cell is split into pieces no wider than ``max_cell`` (default: 1/64
    of the span) and integrated with a fixed 24-point Gauss-Legendre rule; for
    the smooth integrands in this package that is exact to rounding.
    """
    knots = np.asarray(knots, dtype=float)
    if knots.size < 2:
        return np.zeros(knots.size)
    span = knots[-1] - knots[0]
    if max_cell is None:
        max_cell = span / 64 if span > 0 else 1.0
    widths = np.diff(knots)
    pieces = np.maximum(1, np.ceil(widths / max_cell).astype(int))
    owner = np.repeat(np.arange(widths.size), pieces)
    step = widths / pieces
    within = np.arange(owner.size) - np.repeat(np.cumsum(pieces) - pieces, pieces)
    sub_w = step[owner]
    lefts = knots[:-1][owner] + sub_w * within
    nodes = lefts[:, None] + 0.5 * sub_w[:, None] * (_GL_NODES[None, :] + 1.0)
    vals = np.asarray(f(nodes.ravel()), dtype=float).reshape(nodes.shape)
    piece_int = 0.5 * sub_w * (vals @ _GL_WEIGHTS)
    cell_int = np.bincount(owner, weights=piece_int, minlength=widths.size)
    return np.concatenate(([0.0], np.cumsum(cell_int)))
