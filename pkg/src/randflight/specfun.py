"""Special-function kernels used by every analytic route.

All kernels accept a float or an array and return the same shape. Series are
summed directly, term by term, with the stopping rule described on
:class:`EvalTolerance`; nothing here delegates to ``scipy.special`` so that the
test-suite can use SciPy and mpmath as independent oracles.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Callable

import mpmath
import numpy as np
from numpy.typing import ArrayLike

from .errors import DomainError, TruncationError

__all__ = [
    "EvalTolerance",
    "DEFAULT_TOL",
    "bessel_i0",
    "bessel_i1",
    "i1_over_z",
    "hyp1f1_moment",
    "hyp1f1_moment_mp",
    "cos_sqrt",
    "sinc_sqrt",
    "log_factorial",
]


@dataclass(frozen=True)
class EvalTolerance:
    """Stopping rule for a positive-term series.

    Summation stops once three consecutive terms each satisfy
    ``|term| < abs + rel * |partial sum|``; reaching ``max_terms`` first is an
    error.
    """

    rel: float = 1e-15
    abs: float = 1e-300
    max_terms: int = 10000

    def __post_init__(self):
        if not (self.rel > 0 and math.isfinite(self.rel)):
            raise DomainError(f"rel must be positive, got {self.rel}")
        if not (self.abs >= 0):
            raise DomainError(f"abs must be nonnegative, got {self.abs}")
        if self.max_terms < 1:
            raise DomainError(f"max_terms must be >= 1, got {self.max_terms}")


DEFAULT_TOL = EvalTolerance()

# consecutive small terms required before stopping
_GUARD = 3


def _as_checked_array(z: ArrayLike, *, nonnegative: bool, name: str) -> np.ndarray:
    arr = np.asarray(z, dtype=float)
    if not np.all(np.isfinite(arr)):
        raise DomainError(f"{name}: argument must be finite")
    if nonnegative and np.any(arr < 0):
        raise DomainError(f"{name}: argument must be >= 0")
    return arr


def _shaped(arr: np.ndarray, like: ArrayLike):
    if np.ndim(like) == 0:
        return float(np.asarray(arr).reshape(()))
    return arr.reshape(np.shape(like))


def _sum_ratio_series(
    first: np.ndarray,
    ratio: Callable[[int], np.ndarray],
    tol: EvalTolerance,
    name: str,
) -> np.ndarray:
    """Sum ``term_0 = first``, ``term_k = term_{k-1} * ratio(k)`` elementwise."""
    term = np.array(first, dtype=float, copy=True)
    total = term.copy()
    small = np.zeros(term.shape, dtype=int)
    for k in range(1, tol.max_terms):
        term = term * ratio(k)
        total += term
        is_small = np.abs(term) < tol.abs + tol.rel * np.abs(total)
        small = np.where(is_small, small + 1, 0)
        if np.all(small >= _GUARD):
            return total
    raise TruncationError(
        f"{name}: no convergence within {tol.max_terms} terms",
        last_term=float(np.max(np.abs(term))),
    )


def bessel_i0(z: ArrayLike, tol: EvalTolerance = DEFAULT_TOL):
    """Modified Bessel function I0 by its power series, for z >= 0."""
    arr = _as_checked_array(z, nonnegative=True, name="bessel_i0")
    q = 0.25 * arr * arr
    out = _sum_ratio_series(np.ones_like(arr), lambda j: q / (j * j), tol, "bessel_i0")
    return _shaped(out, z)


def bessel_i1(z: ArrayLike, tol: EvalTolerance = DEFAULT_TOL):
    """Modified Bessel function I1 by its power series, for z >= 0."""
    arr = _as_checked_array(z, nonnegative=True, name="bessel_i1")
    return _shaped(arr * _i1_over_z(arr, tol), z)


def i1_over_z(z: ArrayLike, tol: EvalTolerance = DEFAULT_TOL):
    """I1(z)/z, finite at z = 0 where it equals 1/2."""
    arr = _as_checked_array(z, nonnegative=True, name="i1_over_z")
    return _shaped(_i1_over_z(arr, tol), z)


def _i1_over_z(arr: np.ndarray, tol: EvalTolerance) -> np.ndarray:
    q = 0.25 * arr * arr
    return _sum_ratio_series(
        np.full_like(arr, 0.5), lambda j: q / (j * (j + 1)), tol, "i1_over_z"
    )


def hyp1f1_moment(m: int, z: ArrayLike, tol: EvalTolerance = DEFAULT_TOL):
    """Kummer function 1F1(m+1, 2m+1; z) for integer m >= 0 and z >= 0.

    Only this one-parameter family is needed (it generates the even moments).
    Every term is positive, so the sum has no cancellation.
    """
    m = _check_order(m)
    arr = _as_checked_array(z, nonnegative=True, name="hyp1f1_moment")
    out = _sum_ratio_series(
        np.ones_like(arr),
        lambda c: arr * (m + c) / (c * (2 * m + c)),
        tol,
        "hyp1f1_moment",
    )
    return _shaped(out, z)


def hyp1f1_moment_mp(m: int, z, dps: int) -> mpmath.mpf:
    """Same series as :func:`hyp1f1_moment`, carried out with ``dps`` digits.

    ``z`` is converted exactly (a float is a dyadic rational), so the only
    error is the working precision.
    """
    m = _check_order(m)
    with mpmath.workdps(dps):
        zz = mpmath.mpf(z)
        if zz < 0:
            raise DomainError("hyp1f1_moment_mp: argument must be >= 0")
        eps = mpmath.mpf(10) ** (-dps)
        term = mpmath.mpf(1)
        total = mpmath.mpf(1)
        small = 0
        c = 0
        while small < _GUARD:
            c += 1
            term = term * zz * (m + c) / (c * (2 * m + c))
            total += term
            small = small + 1 if term < eps * total else 0
        return +total


def _check_order(m) -> int:
    if int(m) != m or m < 0:
        raise DomainError(f"order must be a nonnegative integer, got {m}")
    return int(m)


# below this |y| the sinc kernel switches to its Taylor polynomial
_TAYLOR_CUT = 1e-4


def cos_sqrt(y: ArrayLike):
    """cos(sqrt(y)) continued to y < 0 as cosh(sqrt(-y)); real for all real y."""
    arr = np.atleast_1d(_as_checked_array(y, nonnegative=False, name="cos_sqrt"))
    root = np.sqrt(np.abs(arr))
    pos = arr >= 0
    out = np.empty_like(root)
    out[pos] = np.cos(root[pos])
    with np.errstate(over="ignore"):
        out[~pos] = np.cosh(root[~pos])
    return _shaped(out, y)


def sinc_sqrt(y: ArrayLike):
    """sin(sqrt(y))/sqrt(y), continued to y < 0 as sinh(sqrt(-y))/sqrt(-y).

    Equal to 1 at y = 0; near zero the Taylor polynomial is used.
    """
    arr = np.atleast_1d(_as_checked_array(y, nonnegative=False, name="sinc_sqrt"))
    root = np.sqrt(np.abs(arr))
    near = np.abs(arr) < _TAYLOR_CUT
    pos = (arr > 0) & ~near
    neg = (arr < 0) & ~near
    out = 1.0 + arr * (-1.0 / 6.0 + arr * (1.0 / 120.0 - arr / 5040.0))
    out[pos] = np.sin(root[pos]) / root[pos]
    with np.errstate(over="ignore"):
        out[neg] = np.sinh(root[neg]) / root[neg]
    return _shaped(out, y)


_LOG_FACTORIAL_TABLE_SIZE = 1024


@lru_cache(maxsize=1)
def _log_factorial_table() -> tuple[float, ...]:
    return tuple(math.log(math.factorial(n)) for n in range(_LOG_FACTORIAL_TABLE_SIZE))


def log_factorial(n: int) -> float:
    """ln(n!) from an exact table for small n, ``lgamma`` beyond it."""
    if int(n) != n or n < 0:
        raise DomainError(f"log_factorial: need a nonnegative integer, got {n}")
    n = int(n)
    if n < _LOG_FACTORIAL_TABLE_SIZE:
        return _log_factorial_table()[n]
    return math.lgamma(n + 1)
