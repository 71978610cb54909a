"""Non-turbulent line-of-sight gain: spreading, water-vapour absorption and
Mie scattering by an exponential particle-size distribution.

Unit conventions: extinction coefficients passed to :func:`los_path_gain`
are power coefficients in 1/m.  :func:`scattering_coefficient` reports
dB/km as is customary for rain/fog loss; use :func:`db_per_km_to_per_m`
to feed it back into the path gain.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from importlib import resources
from pathlib import Path
from typing import Callable, Optional, Union

import numpy as np
from scipy import integrate

from . import kernels
from .constants import DB_PER_NEPER_POWER, SPEED_OF_LIGHT, wavenumber
from .errors import DomainError, NumericalError, TableRangeError

DEFAULT_WATER_SCALE_HEIGHT = 2000.0  # m
MIE_START_MARGIN = 15
SIZE_DISTRIBUTION_CUTOFF = 1e-12  # relative weight at the truncation radius


def db_per_km_to_per_m(db_per_km):
    return db_per_km / (DB_PER_NEPER_POWER * 1000.0)


def dbm_to_watt(dbm):
    return 10.0 ** (dbm / 10.0) * 1e-3


@dataclass(frozen=True)
class LinkGeometry:
    """Carrier, path and radio parameters of one link (SI units)."""

    frequency: float = 300e9
    distance: float = 1000.0
    altitude: float = 0.0
    tx_power: float = 0.01  # W (10 dBm)
    bandwidth: float = 1e9
    noise_psd: float = dbm_to_watt(-174.0)  # W/Hz

    def __post_init__(self):
        for name in ("frequency", "distance", "bandwidth", "noise_psd"):
            if not getattr(self, name) > 0:
                raise DomainError(f"{name} must be > 0, got {getattr(self, name)}")
        if self.altitude < 0:
            raise DomainError(f"altitude must be >= 0, got {self.altitude}")
        if self.tx_power < 0:
            raise DomainError(f"tx_power must be >= 0, got {self.tx_power}")

    @property
    def wavelength(self):
        return SPEED_OF_LIGHT / self.frequency

    @property
    def wavenumber(self):
        return wavenumber(self.frequency)


# Absorption ------------------------------------------------------------------

@dataclass(frozen=True)
class AbsorptionTable:
    frequencies: tuple
    coefficients: tuple
    scale_height: float = DEFAULT_WATER_SCALE_HEIGHT

    def __post_init__(self):
        f = np.asarray(self.frequencies, dtype=float)
        k = np.asarray(self.coefficients, dtype=float)
        if f.ndim != 1 or f.shape != k.shape or f.size < 2:
            raise DomainError("absorption table needs >= 2 matching frequency/coefficient rows")
        if np.any(np.diff(f) <= 0):
            raise DomainError("absorption table frequencies must be strictly increasing")
        if np.any(k < 0):
            raise DomainError("absorption coefficients must be >= 0")
        if not self.scale_height > 0:
            raise DomainError("water-vapour scale height must be > 0")

    @classmethod
    def from_csv(cls, path: Union[str, Path], scale_height=DEFAULT_WATER_SCALE_HEIGHT):
        with open(path, newline="", encoding="utf-8") as fh:
            return cls._from_reader(csv.DictReader(fh), scale_height)

    @classmethod
    def default(cls, scale_height=DEFAULT_WATER_SCALE_HEIGHT):
        """Small illustrative sea-level table (0.1-1 THz); not measured data."""
        text = resources.files("thzturb.data").joinpath("absorption_default.csv").read_text("utf-8")
        return cls._from_reader(csv.DictReader(text.splitlines()), scale_height)

    @classmethod
    def _from_reader(cls, reader, scale_height):
        if reader.fieldnames != ["freq_hz", "k_abs_per_m"]:
            raise DomainError(f"expected header freq_hz,k_abs_per_m, got {reader.fieldnames}")
        rows = [(float(r["freq_hz"]), float(r["k_abs_per_m"])) for r in reader]
        return cls(tuple(f for f, _ in rows), tuple(k for _, k in rows), scale_height)

    def terrestrial(self, f):
        """Sea-level coefficient, interpolated linearly in log(coefficient)."""
        fs = self.frequencies
        if not fs[0] <= f <= fs[-1]:
            raise TableRangeError(f, fs[0], fs[-1])
        i = int(np.searchsorted(fs, f, side="right")) - 1
        i = min(i, len(fs) - 2)
        k0, k1 = self.coefficients[i], self.coefficients[i + 1]
        t = (f - fs[i]) / (fs[i + 1] - fs[i])
        if k0 == 0.0 or k1 == 0.0:
            return k0 + t * (k1 - k0)
        return k0 * (k1 / k0) ** t


def water_vapour_ratio(h, scale_height=DEFAULT_WATER_SCALE_HEIGHT):
    """Water-vapour density at altitude relative to the ground."""
    if h < 0:
        raise DomainError(f"altitude must be >= 0, got {h}")
    return math.exp(-h / scale_height)


def absorption_coefficient(f, h, table: AbsorptionTable):
    """Molecular absorption coefficient k_abs(f, h) in 1/m."""
    return table.terrestrial(f) * water_vapour_ratio(h, table.scale_height)


# Mie scattering --------------------------------------------------------------

@dataclass(frozen=True)
class MieMedium:
    """Complex refractive index of the scatterer, tabulated in frequency.

    A single-row table is a frequency-independent index.
    """

    frequencies: tuple
    indices: tuple

    def __post_init__(self):
        if len(self.frequencies) != len(self.indices) or not self.indices:
            raise DomainError("MieMedium needs matching, non-empty frequency/index rows")
        for m in self.indices:
            m = complex(m)
            if m.real < 1.0 or m.imag < 0.0:
                raise DomainError(f"refractive index must have Re >= 1, Im >= 0, got {m}")
        if np.any(np.diff(self.frequencies) <= 0):
            raise DomainError("MieMedium frequencies must be strictly increasing")

    @classmethod
    def constant(cls, m):
        return cls((0.0,), (complex(m),))

    def index_at(self, f):
        if len(self.indices) == 1:
            return complex(self.indices[0])
        fs = self.frequencies
        if not fs[0] <= f <= fs[-1]:
            raise TableRangeError(f, fs[0], fs[-1])
        re = np.interp(f, fs, [complex(m).real for m in self.indices])
        im = np.interp(f, fs, [complex(m).imag for m in self.indices])
        return complex(re, im)


def mie_truncation_order(x):
    """Highest partial-wave order kept: ceil(x + 4 x^(1/3) + 2)."""
    return int(math.ceil(x + 4.0 * x ** (1.0 / 3.0) + 2.0))


def mie_coefficients(x, m, m_max: Optional[int] = None):
    """Partial-wave coefficients (a_n, b_n), n = 1..m_max, as two complex arrays."""
    if not x > 0:
        raise DomainError(f"size parameter must be > 0, got {x}")
    if m_max is None:
        m_max = mie_truncation_order(x)
    m = complex(m)
    nstart = max(m_max, int(math.ceil(abs(m) * x))) + MIE_START_MARGIN
    a, b = kernels.mie_ab(float(x), m, int(m_max), int(nstart))
    bad = ~(np.isfinite(a) & np.isfinite(b))
    if bad.any():
        raise NumericalError("Mie recurrence produced non-finite values", order=int(np.argmax(bad)) + 1, x=x)
    return a, b


def extinction_efficiency(x, m, extra_orders=0):
    """Q_ext = 2/x^2 sum (2n+1) Re(a_n + b_n)."""
    n_max = mie_truncation_order(x) + extra_orders
    a, b = mie_coefficients(x, m, n_max)
    n = np.arange(1, n_max + 1)
    return 2.0 / x**2 * math.fsum((2 * n + 1) * (a + b).real)


def extinction_cross_section(f, r, medium: MieMedium, extra_orders=0):
    """Mie extinction cross-section (m^2) of a sphere of radius ``r``."""
    if not (f > 0 and r > 0):
        raise DomainError(f"frequency and radius must be > 0 (got {f}, {r})")
    m = medium.index_at(f)
    if m == 1:
        return 0.0
    k = wavenumber(f)
    x = k * r
    return extinction_efficiency(x, m, extra_orders) * math.pi * r * r


@dataclass(frozen=True)
class ParticleSizeDistribution:
    """Exponential size law N(h, r) = N0(h) exp(-rho0(h) r), piecewise constant in h.

    Row i applies to altitudes [altitudes[i], altitudes[i+1]).
    """

    altitudes: tuple
    n0: tuple  # 1/m^4
    rho0: tuple  # 1/m

    def __post_init__(self):
        if not (len(self.altitudes) == len(self.n0) == len(self.rho0) >= 1):
            raise DomainError("particle table columns must have equal, non-zero length")
        if np.any(np.diff(self.altitudes) <= 0):
            raise DomainError("particle table altitudes must be strictly increasing")
        if any(v < 0 for v in self.n0):
            raise DomainError("N0 must be >= 0")
        if any(not v > 0 for v in self.rho0):
            raise DomainError("rho0 must be > 0")

    @classmethod
    def uniform(cls, n0, rho0):
        return cls((0.0,), (float(n0),), (float(rho0),))

    @classmethod
    def from_csv(cls, path):
        with open(path, newline="", encoding="utf-8") as fh:
            return cls._from_reader(csv.DictReader(fh))

    @classmethod
    def default(cls):
        """Illustrative rain-like profile (Marshall-Palmer slope, about 10 mm/h)."""
        text = resources.files("thzturb.data").joinpath("particles_default.csv").read_text("utf-8")
        return cls._from_reader(csv.DictReader(text.splitlines()))

    @classmethod
    def _from_reader(cls, reader):
        if reader.fieldnames != ["alt_m", "n0_per_m4", "rho0_per_m"]:
            raise DomainError(f"expected header alt_m,n0_per_m4,rho0_per_m, got {reader.fieldnames}")
        rows = [(float(r["alt_m"]), float(r["n0_per_m4"]), float(r["rho0_per_m"])) for r in reader]
        return cls(*(tuple(col) for col in zip(*rows)))

    def at(self, h):
        if h < self.altitudes[0]:
            raise TableRangeError(h, self.altitudes[0], math.inf, what="altitude")
        i = int(np.searchsorted(self.altitudes, h, side="right")) - 1
        return self.n0[i], self.rho0[i]


def scattering_extinction(f, h, dist: ParticleSizeDistribution, medium: MieMedium,
                          sigma_ext: Optional[Callable[[float, float], float]] = None,
                          epsrel=1e-8):
    """int_0^inf sigma_ext(f, r) N0 exp(-rho0 r) dr in 1/m.

    The integral is truncated at the radius where the exponential weight
    falls to 1e-12 of its peak.  ``sigma_ext(f, r)`` replaces the Mie
    cross-section when given.
    """
    n0, rho0 = dist.at(h)
    if n0 == 0.0:
        return 0.0
    if sigma_ext is None:
        def sigma_ext(ff, rr):
            return extinction_cross_section(ff, rr, medium)
    r_max = -math.log(SIZE_DISTRIBUTION_CUTOFF) / rho0
    # breakpoints every few wavelengths keep the Mie ripple resolved
    lam = SPEED_OF_LIGHT / f
    n_panels = max(1, min(200, int(math.ceil(r_max / (2.0 * lam)))))
    edges = np.linspace(0.0, r_max, n_panels + 1)
    total = 0.0
    err = 0.0

    def integrand(r):
        if r <= 0.0:
            return 0.0
        return sigma_ext(f, r) * math.exp(-rho0 * r)

    for lo, hi in zip(edges[:-1], edges[1:]):
        val, e = integrate.quad(integrand, lo, hi, epsabs=0.0, epsrel=epsrel, limit=200)
        total += val
        err += e
    if not math.isfinite(total) or err > 1e-6 * abs(total) + 1e-300:
        raise NumericalError("particle-size quadrature did not converge", estimated_error=err, value=total)
    return n0 * total


def scattering_coefficient(f, h, dist: ParticleSizeDistribution, medium: MieMedium,
                           sigma_ext: Optional[Callable[[float, float], float]] = None):
    """Mie scattering loss in dB/km (4.343 x the 1/m extinction, per km)."""
    return DB_PER_NEPER_POWER * 1000.0 * scattering_extinction(f, h, dist, medium, sigma_ext)


def free_space_amplitude(f, L):
    return SPEED_OF_LIGHT / (4.0 * math.pi * f * L)


def los_path_gain(geom: LinkGeometry, k_abs=0.0, k_sca=0.0):
    """Amplitude gain c/(4 pi f L) * exp(-(k_abs + k_sca) L / 2).

    The coefficients are power extinction in 1/m, hence the halves; the
    power loss in dB is -20 log10 of the returned value.
    """
    L = geom.distance
    return free_space_amplitude(geom.frequency, L) * math.exp(-0.5 * (k_abs + k_sca) * L)


def path_loss_db(gain):
    return -20.0 * math.log10(gain)
