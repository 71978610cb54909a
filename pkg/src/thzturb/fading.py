"""Turbulence-induced fading: Gamma-Gamma statistics, the limiting laws it
degenerates to, and the empirical attenuation built on its variance.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Union

import numpy as np
from scipy.special import gammaln

from .constants import SPEED_OF_LIGHT, wavenumber
from .errors import DomainError, SingularPointError
from .special import bessel_k_nu, bessel_k_nu_scaled

__all__ = [
    "GammaGammaParams",
    "LogNormal",
    "KDistribution",
    "Exponential",
    "GammaGamma",
    "bessel_k_nu",
    "andrews_params",
    "aperture_param",
    "gamma_gamma_pdf",
    "gamma_gamma_sample",
    "limiting_pdf",
    "scintillation_index",
    "turbulence_attenuation_db",
    "turbulence_attenuation_db_expanded",
]


@dataclass(frozen=True)
class GammaGammaParams:
    alpha: float
    beta: float
    sigma_r2: float = float("nan")
    d_ra2: float = 0.0

    def __post_init__(self):
        if not (self.alpha > 0 and self.beta > 0):
            raise DomainError(f"alpha, beta must be > 0 (got {self.alpha}, {self.beta})")
        if self.d_ra2 < 0:
            raise DomainError(f"aperture parameter must be >= 0, got {self.d_ra2}")

    @property
    def variance(self):
        """Variance of the unit-mean product variable: 1/a + 1/b + 1/(ab)."""
        a, b = self.alpha, self.beta
        return 1.0 / a + 1.0 / b + 1.0 / (a * b)

    def moment(self, n):
        """E[Psi^n] for the product of unit-mean Gamma(alpha), Gamma(beta)."""
        a, b = self.alpha, self.beta
        return math.exp(
            gammaln(a + n) - gammaln(a) - n * math.log(a)
            + gammaln(b + n) - gammaln(b) - n * math.log(b)
        )


def _alpha_exponent(s2, d2):
    return 0.49 * s2 / (1.0 + 0.18 * d2 + 0.56 * s2 ** 1.2) ** (7.0 / 6.0)


def _beta_exponent(s2, d2):
    s125 = s2 ** 1.2
    return (0.51 * s2 * (1.0 + 0.69 * d2 * s125) ** (-5.0 / 6.0)
            / (1.0 + 0.9 * d2 + 0.62 * s125) ** (7.0 / 6.0))


def andrews_params(sigma_r2, d_ra2=0.0) -> GammaGammaParams:
    """Effective large/small-scale cell counts from the Rytov variance.

    ``d_ra2`` is the squared aperture parameter D_ra^2 = k l_ra^2 / (4L).
    """
    if not sigma_r2 > 0:
        raise DomainError(f"Rytov variance must be > 0, got {sigma_r2}")
    alpha = 1.0 / math.expm1(_alpha_exponent(sigma_r2, d_ra2))
    beta = 1.0 / math.expm1(_beta_exponent(sigma_r2, d_ra2))
    return GammaGammaParams(alpha, beta, sigma_r2, d_ra2)


def aperture_param(f, L):
    """D_ra^2 for a receive aperture of diameter lambda/pi; equals lambda/(2 pi L)."""
    if not (f > 0 and L > 0):
        raise DomainError(f"f and L must be > 0 (got {f}, {L})")
    lam = SPEED_OF_LIGHT / f
    l_ra = lam / math.pi
    return wavenumber(f) * l_ra**2 / (4.0 * L)


def _log_gg_pdf(psi, a, b, printed_argument):
    half = 0.5 * (a + b)
    if printed_argument:
        z = math.sqrt(2.0 * a * b * psi)
    else:
        z = 2.0 * math.sqrt(a * b * psi)
    k = bessel_k_nu_scaled(a - b, z)
    if k == 0.0:
        return -math.inf
    return (math.log(2.0) + half * math.log(a * b) - gammaln(a) - gammaln(b)
            + (half - 1.0) * math.log(psi) + math.log(k) - z)


def gamma_gamma_pdf(psi, p: GammaGammaParams, printed_argument=False):
    """Gamma-Gamma density of the unit-mean fading variable.

    The Bessel argument is 2*sqrt(alpha*beta*psi), the form implied by the
    product of two unit-mean Gamma variates.  ``printed_argument=True``
    switches to sqrt(2*alpha*beta*psi) for comparison; that variant does
    not integrate to one.
    """
    arr = np.asarray(psi, dtype=float)
    if np.any(arr <= 0):
        raise DomainError("Gamma-Gamma pdf requires psi > 0")
    vals = [math.exp(_log_gg_pdf(v, p.alpha, p.beta, printed_argument)) for v in arr.ravel()]
    out = np.array(vals).reshape(arr.shape)
    return float(out) if out.ndim == 0 else out


def gamma_gamma_sample(p: GammaGammaParams, n: int, seed: Union[int, np.random.Generator, None] = None):
    """``n`` draws of Psi = Psi_a * Psi_b with unit-mean Gamma factors."""
    if n < 1:
        raise DomainError(f"sample count must be >= 1, got {n}")
    rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
    xa = rng.gamma(p.alpha, 1.0 / p.alpha, size=n)
    xb = rng.gamma(p.beta, 1.0 / p.beta, size=n)
    return xa * xb


# Table-I limiting laws -------------------------------------------------------

@dataclass(frozen=True)
class LogNormal:
    sigma2: float

    def __post_init__(self):
        if not self.sigma2 > 0:
            raise DomainError("log-normal sigma^2 must be > 0")

    @classmethod
    def matching_variance(cls, variance):
        """Log-amplitude parameter ln(1 + var) used when comparing with Gamma-Gamma."""
        return cls(math.log1p(variance))


@dataclass(frozen=True)
class KDistribution:
    alpha: float

    def __post_init__(self):
        if not self.alpha > 0:
            raise DomainError("K-distribution alpha must be > 0")


@dataclass(frozen=True)
class Exponential:
    mean: float = 1.0

    def __post_init__(self):
        if not self.mean > 0:
            raise DomainError("exponential mean must be > 0")


@dataclass(frozen=True)
class GammaGamma:
    params: GammaGammaParams


FadingDistribution = Union[LogNormal, KDistribution, Exponential, GammaGamma]


def _limiting_scalar(dist, psi):
    if isinstance(dist, LogNormal):
        s2 = dist.sigma2
        return math.exp(-math.log(psi) ** 2 / (2.0 * s2)) / (math.sqrt(2.0 * math.pi * s2) * psi)
    if isinstance(dist, KDistribution):
        a = dist.alpha
        z = 2.0 * math.sqrt(a * psi)
        k = bessel_k_nu_scaled(a - 1.0, z)
        if k == 0.0:
            return 0.0
        return math.exp(math.log(2.0 * a) - gammaln(a)
                        + 0.5 * (a - 1.0) * math.log(a * psi) + math.log(k) - z)
    if isinstance(dist, Exponential):
        return math.exp(-psi / dist.mean) / dist.mean
    if isinstance(dist, GammaGamma):
        return gamma_gamma_pdf(psi, dist.params)
    raise TypeError(f"unknown fading distribution {dist!r}")


def limiting_pdf(dist: FadingDistribution, psi):
    arr = np.asarray(psi, dtype=float)
    if np.any(arr <= 0):
        raise DomainError("fading pdf requires psi > 0")
    out = np.array([_limiting_scalar(dist, v) for v in arr.ravel()]).reshape(arr.shape)
    return float(out) if out.ndim == 0 else out


# Attenuation -----------------------------------------------------------------

def scintillation_index(sigma_r2, d_ra2=0.0):
    """Var(Psi) = 1/alpha + 1/beta + 1/(alpha beta); zero without turbulence."""
    if sigma_r2 < 0:
        raise DomainError(f"Rytov variance must be >= 0, got {sigma_r2}")
    if sigma_r2 == 0:
        return 0.0
    return andrews_params(sigma_r2, d_ra2).variance


def _attenuation_from_variance(var, sigma_r2, signed):
    gap = 1.0 - math.sqrt(var)
    if gap == 0.0:
        raise SingularPointError(
            "turbulence attenuation is singular where Var(Psi) = 1", sigma_r2=sigma_r2
        )
    signed_db = 10.0 * math.log10(abs(gap))
    return signed_db if signed else abs(signed_db)


def turbulence_attenuation_db(sigma_r2, d_ra2=0.0, signed=False):
    """Empirical turbulence attenuation |10 log10 |1 - sqrt(Var Psi)|| in dB.

    ``signed=True`` returns the raw logarithm, negative while Var(Psi) < 1.
    Raises :class:`SingularPointError` at Var(Psi) = 1.
    """
    var = scintillation_index(sigma_r2, d_ra2)
    return _attenuation_from_variance(var, sigma_r2, signed)


def turbulence_attenuation_db_expanded(sigma_r2, d_ra2=0.0, signed=False):
    """Same quantity with alpha and beta substituted in closed form.

    Var = e_a + e_b - 2 + (e_a - 1)(e_b - 1) with e_x the exponentials
    inside the cell-count formulas, evaluated through expm1 so that the
    weak-turbulence end keeps full precision.
    """
    if sigma_r2 < 0:
        raise DomainError(f"Rytov variance must be >= 0, got {sigma_r2}")
    ea1 = math.expm1(_alpha_exponent(sigma_r2, d_ra2))
    eb1 = math.expm1(_beta_exponent(sigma_r2, d_ra2))
    var = ea1 + eb1 + ea1 * eb1
    return _attenuation_from_variance(var, sigma_r2, signed)
