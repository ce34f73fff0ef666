"""Exact position density of the one-dimensional random flight.

Four analytic routes (reversal-count expansion, Bessel closed form, Fourier
series from the characteristic function, Fourier series from the moments)
plus an event-driven Monte Carlo oracle.
"""
from .closed_form import bullet_pdf, bullet_pdf_closed, goldstein_density, goldstein_pdf
from .collision import bullet_density_series, isotropic_density, rho_bullet_c, rho_r
from .domain import (
    Adaptive,
    FixedTerms,
    Grid,
    InitialCondition,
    MixedDensity,
    ModelParams,
    quadrature,
)
from .errors import (
    DomainError,
    MomentsNotAchievable,
    PrecisionLossWarning,
    QuadratureError,
    RandFlightError,
    TruncationError,
)
from .fourier import (
    char_fn,
    coeff_from_moments,
    fourier_series_continuous,
    fourier_series_full,
    identity_residual,
    moment,
    required_moments,
    series_from_moments_continuous,
)
from .montecarlo import Model, run_ensemble, ks_distance

__version__ = "0.1.0"
