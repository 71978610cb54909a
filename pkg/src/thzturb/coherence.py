"""Loss of spatial coherence in UM-MIMO arrays.

Normalized covariance (NC) between the turbulence perturbations of two
SISO sub-channels, in closed form for constant C_n^2 and by direct
quadrature of the Rytov double integral; the array-gain penalty it
causes; and the ergodic-capacity bound.

The quadruple sum over (i, i', j, j') only depends on the scalar
separations |r_i - r_i'| and |r_j - r_j'|, so it is evaluated over the
displacement histograms of the two arrays instead of element pairs.
"""

from __future__ import annotations

import functools
import math
from dataclasses import dataclass
from typing import Callable, Optional, Sequence, Tuple

import numpy as np
from scipy import special, stats

from . import kernels
from .atmosphere import KOLMOGOROV_COEFF
from .constants import SPEED_OF_LIGHT
from .errors import DomainError, NumericalError
from .fading import GammaGammaParams

EIGEN_FLOOR = 1e-12  # relative to the largest eigenvalue


@dataclass(frozen=True)
class PlanarArray:
    """Uniform planar array of ``nx`` x ``ny`` elements, centred on its own origin."""

    nx: int
    ny: int
    spacing: float

    def __post_init__(self):
        if self.nx < 1 or self.ny < 1:
            raise DomainError(f"array needs nx, ny >= 1 (got {self.nx}, {self.ny})")
        if not self.spacing > 0:
            raise DomainError(f"element spacing must be > 0, got {self.spacing}")

    @classmethod
    def square(cls, n, spacing):
        return cls(n, n, spacing)

    @classmethod
    def half_wavelength(cls, nx, ny, f):
        return cls(nx, ny, SPEED_OF_LIGHT / f / 2.0)

    @property
    def size(self):
        return self.nx * self.ny

    def positions(self):
        """(size, 2) array of element coordinates, x index varying fastest."""
        ix = (np.arange(self.nx) - (self.nx - 1) / 2.0) * self.spacing
        iy = (np.arange(self.ny) - (self.ny - 1) / 2.0) * self.spacing
        gx, gy = np.meshgrid(ix, iy, indexing="xy")
        return np.column_stack([gx.ravel(), gy.ravel()])


def steering_vector(array: PlanarArray, theta, phi, k):
    """exp(i k r . u) with u the transverse part of the unit direction (theta from z)."""
    pos = array.positions()
    u = np.array([math.sin(theta) * math.cos(phi), math.sin(theta) * math.sin(phi)])
    return np.exp(1j * k * (pos @ u))


@dataclass(frozen=True)
class NCQuery:
    dt: float
    dr: float
    cn2: float
    k: float
    L: float

    def __post_init__(self):
        if self.dt < 0 or self.dr < 0:
            raise DomainError("separations must be >= 0")
        if not (self.cn2 >= 0 and self.k > 0 and self.L > 0):
            raise DomainError("need cn2 >= 0, k > 0, L > 0")

    @property
    def strength(self):
        return self.cn2 * self.k**2 * self.L


def nc_closed_form(q: NCQuery) -> float:
    """Closed-form NC for constant C_n^2.

    exp(-0.546 C k^2 L (dt^(8/3) - dr^(8/3)) / (dt - dr)), or
    exp(-1.457 C k^2 L d^(5/3)) when the separations coincide.
    """
    return float(np.exp(kernels.nc_exponent(q.dt, q.dr, q.strength)))


def nc_sum_form(q: NCQuery) -> float:
    """The same NC written as the ratio of the two power sums.

    No equal-separation branch is needed here; at dt = dr it gives the
    exact 0.546 * 8/3 limit (the dedicated branch uses the rounded 1.457).
    """
    a = q.dt ** (1.0 / 3.0)
    b = q.dr ** (1.0 / 3.0)
    if a == 0.0 and b == 0.0:
        return 1.0
    num = sum(a**p * b ** (7 - p) for p in range(8))
    den = sum(a**p * b ** (2 - p) for p in range(3))
    return math.exp(-kernels.NC_COEFF * q.strength * num / den)


# Numerical NC ----------------------------------------------------------------

@dataclass(frozen=True)
class NCQuadrature:
    xi_nodes: int = 64
    panel_nodes: int = 16
    # kappa * s where 1 - J0 switches to its series
    small_argument: float = 1e-3
    # oscillatory panels stop at kappa * s = truncation
    truncation: float = 2e3
    log_panels_per_decade: int = 1
    rtol: float = 1e-5


def _gauss_legendre(n):
    x, w = np.polynomial.legendre.leggauss(n)
    return x, w


def _kappa_integral(s, kappa_split, cfg: NCQuadrature):
    """int_0^inf kappa^(-8/3) (1 - J0(kappa s)) dkappa by panel quadrature."""
    if s == 0.0:
        return 0.0
    x, w = _gauss_legendre(cfg.panel_nodes)
    k_a = cfg.small_argument / s
    # series part: (1 - J0(z)) ~ z^2/4 - z^4/64
    total = 0.75 * s * s * k_a ** (1.0 / 3.0) - (3.0 / 448.0) * s**4 * k_a ** (7.0 / 3.0)

    k_mid = max(kappa_split, k_a)
    if k_mid > k_a:
        # log-mapped panels tame the kappa^(-2/3) growth towards small kappa
        t0, t1 = math.log(k_a), math.log(k_mid)
        n_pan = max(1, int(math.ceil((t1 - t0) / math.log(10.0) * cfg.log_panels_per_decade)))
        edges = np.linspace(t0, t1, n_pan + 1)
        half = 0.5 * np.diff(edges)
        mid = 0.5 * (edges[1:] + edges[:-1])
        t = (mid[:, None] + half[:, None] * x[None, :]).ravel()
        ww = (half[:, None] * w[None, :]).ravel()
        kap = np.exp(t)
        total += float(np.sum(ww * kap ** (-5.0 / 3.0) * (1.0 - special.j0(kap * s))))

    # oscillatory region in panels of half a J0 period
    k_max = cfg.truncation / s
    width = math.pi / s
    n_pan = max(1, int(math.ceil((k_max - k_mid) / width)))
    edges = k_mid + width * np.arange(n_pan + 1)
    k_max = edges[-1]
    half = 0.5 * width
    mid = 0.5 * (edges[1:] + edges[:-1])
    kap = (mid[:, None] + half * x[None, :]).ravel()
    ww = np.tile(half * w, n_pan)
    total += float(np.sum(ww * kap ** (-8.0 / 3.0) * (1.0 - special.j0(kap * s))))
    # closed-form tail of the non-oscillating kappa^(-8/3) term
    total += 0.6 * k_max ** (-5.0 / 3.0)
    return total


def nc_numeric_exponent(q: NCQuery, cn2_profile: Optional[Callable[[float], float]] = None,
                        cfg: NCQuadrature = NCQuadrature(),
                        separation_vectors: Optional[Tuple[Sequence[float], Sequence[float]]] = None):
    """Exponent -4 pi^2 k^2 L int_0^1 int_0^inf kappa Phi_n (1 - J0(kappa s(xi))) dkappa dxi.

    s(xi) = xi dr + (1 - xi) dt.  ``cn2_profile(xi)`` gives a path-varying
    C_n^2 (xi = 1 - z/L); ``q.cn2`` is used when it is None.  Passing
    ``separation_vectors=(dt_vec, dr_vec)`` evaluates the vector form
    s(xi) = |xi dr_vec + (1 - xi) dt_vec| instead (exploratory).
    """
    xg, wg = _gauss_legendre(cfg.xi_nodes)
    xi = 0.5 * (xg + 1.0)
    w = 0.5 * wg
    if separation_vectors is not None:
        vt = np.asarray(separation_vectors[0], dtype=float)
        vr = np.asarray(separation_vectors[1], dtype=float)
        s = np.linalg.norm(xi[:, None] * vr[None, :] + (1.0 - xi[:, None]) * vt[None, :], axis=1)
        lam_ref = max(np.linalg.norm(vt), np.linalg.norm(vr))
    else:
        s = xi * q.dr + (1.0 - xi) * q.dt
        lam_ref = max(q.dt, q.dr)
    kappa_split = 1.0 / max(lam_ref, 2.0 * math.pi / q.k)
    cn2 = np.array([cn2_profile(v) for v in xi]) if cn2_profile is not None else np.full(xi.shape, q.cn2)

    inner = np.array([_kappa_integral(float(v), kappa_split, cfg) for v in s])
    integral = float(np.sum(w * cn2 * inner))

    # convergence check against a half-order Gauss rule
    coarse_x, coarse_w = _gauss_legendre(cfg.xi_nodes // 2)
    if separation_vectors is None and cn2_profile is None and cfg.xi_nodes >= 8:
        xi_c = 0.5 * (coarse_x + 1.0)
        s_c = xi_c * q.dr + (1.0 - xi_c) * q.dt
        inner_c = np.array([_kappa_integral(float(v), kappa_split, cfg) for v in s_c])
        coarse = float(np.sum(0.5 * coarse_w * q.cn2 * inner_c))
        if integral != 0.0 and abs(coarse - integral) > cfg.rtol * abs(integral):
            raise NumericalError(
                "NC quadrature did not reach the requested tolerance",
                achieved=abs(coarse - integral) / abs(integral), requested=cfg.rtol,
            )
    if not math.isfinite(integral):
        raise NumericalError("NC quadrature produced a non-finite value", dt=q.dt, dr=q.dr)
    return -4.0 * math.pi**2 * q.k**2 * q.L * KOLMOGOROV_COEFF * integral


def nc_numeric(q: NCQuery, cn2_profile=None, cfg: NCQuadrature = NCQuadrature(), separation_vectors=None):
    """NC by quadrature of the Rytov double integral; see :func:`nc_numeric_exponent`."""
    return math.exp(nc_numeric_exponent(q, cn2_profile, cfg, separation_vectors))


# Array sums ------------------------------------------------------------------

@dataclass(frozen=True)
class DisplacementHistogram:
    """Element-pair separations of one array, grouped by length.

    ``squared_lengths`` are dx^2 + dy^2 in units of the spacing, so equal
    lengths are grouped exactly; ``counts`` sum to size^2.
    """

    squared_lengths: np.ndarray
    counts: np.ndarray
    spacing: float

    @property
    def distances(self):
        return np.sqrt(self.squared_lengths.astype(float)) * self.spacing

    def entries(self):
        return list(zip(self.distances.tolist(), self.counts.tolist()))


@functools.lru_cache(maxsize=64)
def displacement_histogram(array: PlanarArray) -> DisplacementHistogram:
    dx = np.arange(-(array.nx - 1), array.nx)
    dy = np.arange(-(array.ny - 1), array.ny)
    gx, gy = np.meshgrid(dx, dy, indexing="ij")
    mult = (array.nx - np.abs(gx)) * (array.ny - np.abs(gy))
    q = (gx * gx + gy * gy).ravel().astype(np.int64)
    keys, inv = np.unique(q, return_inverse=True)
    counts = np.bincount(inv, weights=mult.ravel()).astype(np.int64)
    # cached and shared between callers
    keys.setflags(write=False)
    counts.setflags(write=False)
    return DisplacementHistogram(keys, counts, array.spacing)


def rho_sum(tx: PlanarArray, rx: PlanarArray, cn2, k, L):
    """sum_{i,i',j,j'} rho_{ij,i'j'} via the two displacement histograms."""
    ht = displacement_histogram(tx)
    hr = displacement_histogram(rx)
    strength = cn2 * k * k * L
    return kernels.losc_pair_sum(ht.distances, ht.counts.astype(float),
                                 hr.distances, hr.counts.astype(float), strength)


def array_gain_turbulent(tx: PlanarArray, rx: PlanarArray, cn2, k, L):
    """Effective array gain (1/(Nt Nr)) sum rho; equals Nt Nr without turbulence."""
    return rho_sum(tx, rx, cn2, k, L) / (tx.size * rx.size)


def losc_loss(tx: PlanarArray, rx: PlanarArray, cn2, k, L):
    """Loss of spatial coherence 10 log10(Nt^2 Nr^2 / sum rho) in dB."""
    n2 = float(tx.size * rx.size) ** 2
    return 10.0 * math.log10(n2 / rho_sum(tx, rx, cn2, k, L))


# Capacity --------------------------------------------------------------------

@dataclass(frozen=True)
class CapacityInputs:
    bandwidth: float
    tx_power: float
    noise_psd: float
    alpha_los: float
    alpha_turb: float
    tx: PlanarArray
    rx: PlanarArray

    def __post_init__(self):
        for name in ("bandwidth", "noise_psd", "alpha_los", "alpha_turb"):
            if not getattr(self, name) > 0:
                raise DomainError(f"{name} must be > 0, got {getattr(self, name)}")
        if self.tx_power < 0:
            raise DomainError(f"tx_power must be >= 0, got {self.tx_power}")


def ergodic_capacity_bound(inputs: CapacityInputs, cn2, k, L):
    """B log2(1 + P a_LoS^2 a_turb^2 sum(rho) / (N0 B Nt Nr)) in bit/s.

    Attained with beamformer p = a_t and combiner w = a_r.
    """
    gain = array_gain_turbulent(inputs.tx, inputs.rx, cn2, k, L)
    snr = (inputs.tx_power * inputs.alpha_los**2 * inputs.alpha_turb**2
           / (inputs.noise_psd * inputs.bandwidth) * gain)
    return inputs.bandwidth * math.log2(1.0 + snr)


# Channel sampling ------------------------------------------------------------

def _nearest_correlation(R, tol=1e-10):
    """Clip negative eigenvalues and rescale to unit diagonal; returns a factor F with F F^T = R'."""
    vals, vecs = np.linalg.eigh(R)
    # rounding noise around zero would otherwise enter at its square root
    vals = np.where(vals > EIGEN_FLOOR * vals.max(), vals, 0.0)
    F = vecs * np.sqrt(vals)
    d = np.sqrt(np.sum(F * F, axis=1))
    if np.any(d < tol):
        raise NumericalError("copula correlation matrix degenerate after regularization",
                             min_diagonal=float(d.min()))
    F = F / d[:, None]
    R2 = F @ F.T
    if np.linalg.eigvalsh(R2).min() < -1e-8:
        raise NumericalError("copula correlation matrix not positive semidefinite after regularization")
    return F


def perturbation_correlation(tx: PlanarArray, rx: PlanarArray, cn2, k, L):
    """NC matrix over channel entries; entry (j, i) is flattened as j * Nt + i."""
    pt, pr = tx.positions(), rx.positions()
    dt = np.linalg.norm(pt[:, None, :] - pt[None, :, :], axis=-1)  # (Nt, Nt)
    dr = np.linalg.norm(pr[:, None, :] - pr[None, :, :], axis=-1)  # (Nr, Nr)
    D_t = np.broadcast_to(dt[None, :, None, :], (rx.size, tx.size, rx.size, tx.size))
    D_r = np.broadcast_to(dr[:, None, :, None], (rx.size, tx.size, rx.size, tx.size))
    rho = np.exp(kernels.nc_exponent(D_t, D_r, cn2 * k * k * L))
    n = tx.size * rx.size
    return rho.reshape(n, n)


def channel_matrix_sample(tx: PlanarArray, rx: PlanarArray, angles, alpha_los, k,
                          fading: Optional[GammaGammaParams] = None, correlation=False,
                          seed=None, cn2=0.0, L=1.0):
    """One draw of H = H0 * Psi (elementwise), shape (Nr, Nt).

    ``angles = (theta_t, phi_t, theta_r, phi_r)``.  With ``fading=None``
    Psi is all ones.  Otherwise each Psi entry is a Gamma-Gamma amplitude
    (product of unit-mean Gamma factors); with ``correlation=True`` both
    factors are coupled across entries by a Gaussian copula whose
    correlation matrix is the closed-form NC matrix.
    """
    theta_t, phi_t, theta_r, phi_r = angles
    a_t = steering_vector(tx, theta_t, phi_t, k)
    a_r = steering_vector(rx, theta_r, phi_r, k)
    H0 = alpha_los * np.outer(a_r, a_t.conj())
    if fading is None:
        return H0
    rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
    shape = (rx.size, tx.size)
    n = rx.size * tx.size
    if not correlation:
        psi_a = rng.gamma(fading.alpha, 1.0 / fading.alpha, size=shape)
        psi_b = rng.gamma(fading.beta, 1.0 / fading.beta, size=shape)
        return H0 * (psi_a * psi_b)
    F = _nearest_correlation(perturbation_correlation(tx, rx, cn2, k, L))
    z = F @ rng.standard_normal((n, 2))
    u = special.ndtr(z)
    psi_a = stats.gamma.ppf(u[:, 0], fading.alpha, scale=1.0 / fading.alpha)
    psi_b = stats.gamma.ppf(u[:, 1], fading.beta, scale=1.0 / fading.beta)
    return H0 * (psi_a * psi_b).reshape(shape)
