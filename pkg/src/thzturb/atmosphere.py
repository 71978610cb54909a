"""Turbulence strength: RISC altitude profiles, the Kolmogorov spectrum,
structure-function validation and the Rytov variance.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from typing import Optional

import numpy as np
from scipy import integrate

from .constants import (
    DEFAULT_INNER_SCALE,
    DEFAULT_OUTER_SCALE,
    SATURATION_LIMIT,
    WEAK_TURBULENCE_LIMIT,
    wavenumber,
)
from .errors import DomainError, NumericalError

KOLMOGOROV_COEFF = 0.033

# refractivity temperature coefficients (per millibar / kelvin)
THZ_DRY_COEFF = 77.6e-6
THZ_WET_COEFF = 4810.0
INFRARED_COEFF = 79e-6


@dataclass(frozen=True)
class TurbulenceProfile:
    """Hufnagel-Valley parameters.

    ``terrestrial_risc`` is the ground-level C_n^2 (A) and ``wind_speed``
    the average wind velocity (v).  When ``constant_cn2`` is set the
    profile is flat at that value regardless of altitude.
    """

    terrestrial_risc: float = 1.7e-14
    wind_speed: float = 21.0
    constant_cn2: Optional[float] = None

    def __post_init__(self):
        if self.terrestrial_risc < 0:
            raise DomainError(f"terrestrial RISC must be >= 0, got {self.terrestrial_risc}")
        if self.wind_speed < 0:
            raise DomainError(f"wind speed must be >= 0, got {self.wind_speed}")
        if self.constant_cn2 is not None and not self.constant_cn2 > 0:
            raise DomainError(f"constant C_n^2 override must be > 0, got {self.constant_cn2}")


@dataclass(frozen=True)
class KolmogorovSpectrum:
    cn2: float
    inner_scale: float = DEFAULT_INNER_SCALE
    outer_scale: float = DEFAULT_OUTER_SCALE

    def __post_init__(self):
        if not self.cn2 > 0:
            raise DomainError(f"cn2 must be > 0, got {self.cn2}")
        if not 0 < self.inner_scale < self.outer_scale:
            raise DomainError("need 0 < inner_scale < outer_scale")

    def __call__(self, kappa):
        return kolmogorov_phi(kappa, self.cn2)

    def in_inertial_range(self, r):
        return self.inner_scale < r < self.outer_scale


@dataclass(frozen=True)
class StructureFunctionSample:
    separation: float
    value: float


def risc_infrared(h, profile: TurbulenceProfile):
    """C_n^2(h) of the Hufnagel-Valley model, m^(-2/3).

    Accepts scalar or array altitudes (metres).
    """
    h_arr = np.asarray(h, dtype=float)
    if np.any(h_arr < 0):
        raise DomainError(f"altitude must be >= 0, got {h!r}")
    if profile.constant_cn2 is not None:
        out = np.full_like(h_arr, profile.constant_cn2)
    else:
        v, A = profile.wind_speed, profile.terrestrial_risc
        out = (
            0.00594 * (v / 27.0) ** 2 * (1e-5 * h_arr) ** 10 * np.exp(-h_arr / 1000.0)
            + 2.7e-16 * np.exp(-h_arr / 1500.0)
            + A * np.exp(-h_arr / 100.0)
        )
    return float(out) if out.ndim == 0 else out


def dn_dT_thz(T, Pa, Pv):
    return -THZ_DRY_COEFF * (Pa / T**2 + 2.0 * THZ_WET_COEFF * Pv / T**3)


def dn_dT_infrared(T, Pa):
    return -INFRARED_COEFF * Pa / T**2


def thz_scale_factor(T, Pa, Pv):
    """Ratio (dn_THz/dT)^2 / (dn_IR/dT)^2 mapping infrared C_n^2 to THz.

    The temperature structure constant is frequency independent, so the
    refractive-index structure constant scales with the squared slope of
    n(T) in each band.  With Pv = 0 this is exactly (77.6/79)^2.
    """
    if not T > 0:
        raise DomainError(f"temperature must be > 0 K, got {T}")
    if not Pa > 0:
        raise DomainError(f"atmospheric pressure must be > 0 mbar, got {Pa}")
    if Pv < 0:
        raise DomainError(f"water-vapour pressure must be >= 0 mbar, got {Pv}")
    return (dn_dT_thz(T, Pa, Pv) / dn_dT_infrared(T, Pa)) ** 2


def risc_thz(h, profile: TurbulenceProfile, T=288.15, Pa=1013.25, Pv=0.0, approximate=False):
    """C_n^2 in the THz band at altitude ``h``.

    ``approximate=True`` skips the derivative ratio and returns the
    infrared value unchanged.
    """
    base = risc_infrared(h, profile)
    if approximate:
        return base
    return base * thz_scale_factor(T, Pa, Pv)


def kolmogorov_phi(kappa, cn2):
    kappa = np.asarray(kappa, dtype=float)
    if np.any(kappa <= 0):
        raise DomainError("Kolmogorov spectrum is singular at kappa <= 0")
    out = KOLMOGOROV_COEFF * cn2 * kappa ** (-11.0 / 3.0)
    return float(out) if out.ndim == 0 else out


def rytov_variance(cn2, f, L):
    """Rytov variance 0.5 * C_n^2 * k^(7/6) * L^(11/6).

    cn2 = 0 is allowed and yields 0 (no turbulence).
    """
    if cn2 < 0 or not f > 0 or not L > 0:
        raise DomainError(f"need cn2 >= 0, f > 0, L > 0 (got {cn2}, {f}, {L})")
    k = wavenumber(f)
    return 0.5 * cn2 * k ** (7.0 / 6.0) * L ** (11.0 / 6.0)


def turbulence_regime(sigma_r2, weak_limit=WEAK_TURBULENCE_LIMIT, saturation_limit=SATURATION_LIMIT):
    if sigma_r2 < weak_limit:
        return "weak"
    if sigma_r2 <= saturation_limit:
        return "strong"
    return "saturated"


@dataclass(frozen=True)
class QuadratureConfig:
    epsrel: float = 1e-10
    epsabs: float = 0.0
    limit: int = 500
    # oscillatory integrals are truncated where kappa * r reaches this
    truncation: float = 1e3
    # acceptable estimated relative error before raising
    max_rel_error: float = 1e-6


def _one_minus_sinc(z):
    z = np.asarray(z, dtype=float)
    small = np.abs(z) < 1e-3
    zs = np.where(small, 1.0, z)
    return np.where(small, z * z / 6.0 - z**4 / 120.0, 1.0 - np.sin(zs) / zs)


def structure_function(cn2, r, cfg: QuadratureConfig = QuadratureConfig()):
    """D_n(r) = 8 pi int kappa^2 Phi_n(kappa) (1 - sin(kappa r)/(kappa r)) dkappa.

    Computed in the dimensionless variable u = kappa r over [0, truncation],
    plus the closed-form tail of the non-oscillating kappa^(-5/3) part; the
    oscillating remainder beyond the cut is O(truncation^(-8/3)).
    """
    if not r > 0:
        raise DomainError(f"separation must be > 0, got {r}")
    U = cfg.truncation

    def integrand(u):
        return u ** (-5.0 / 3.0) * float(_one_minus_sinc(u))

    # panel edges: one on [0, 1], then one per half-period of sin(u)
    edges = [0.0, 1.0] + list(np.arange(math.pi, U, math.pi)) + [U]
    total = 0.0
    err = 0.0
    with warnings.catch_warnings():
        # convergence is judged from the summed error estimate below
        warnings.simplefilter("ignore", integrate.IntegrationWarning)
        for a, b in zip(edges[:-1], edges[1:]):
            val, e = integrate.quad(integrand, a, b, epsabs=cfg.epsabs, epsrel=cfg.epsrel, limit=cfg.limit)
            total += val
            err += e
    total += 1.5 * U ** (-2.0 / 3.0)
    if not math.isfinite(total) or err > cfg.max_rel_error * abs(total):
        raise NumericalError(
            "structure-function quadrature did not converge",
            estimated_error=err, value=total, r=r,
        )
    return 8.0 * math.pi * KOLMOGOROV_COEFF * cn2 * r ** (2.0 / 3.0) * total


def structure_function_check(cn2, r, cfg: QuadratureConfig = QuadratureConfig(),
                             spectrum: Optional[KolmogorovSpectrum] = None):
    """Relative deviation of the spectral D_n(r) from the 2/3 law cn2 r^(2/3)."""
    if spectrum is not None and not spectrum.in_inertial_range(r):
        warnings.warn(
            f"r={r} m outside inertial range ({spectrum.inner_scale}, {spectrum.outer_scale})",
            stacklevel=2,
        )
    d = structure_function(cn2, r, cfg)
    return abs(d / (cn2 * r ** (2.0 / 3.0)) - 1.0)
