"""Pure-Python/numpy implementations of the hot kernels.

Used when the compiled ``_kernels`` extension is unavailable; both
modules expose the same functions with the same semantics.
"""

import math

import numpy as np

NC_COEFF = 0.546
NC_COEFF_EQUAL = 1.457
TIE_QUANTUM = 1e-12  # m


def log_derivative_cf(n, z, eps=1e-16, maxit=100_000):
    """D_n(z) = psi_n'(z)/psi_n(z) from the continued fraction for
    J_{n-1/2}(z)/J_{n+1/2}(z), evaluated with the modified Lentz method.
    """
    tiny = 1e-300
    nu = n + 0.5
    f = 2.0 * nu / z
    if f == 0:
        f = tiny
    C, D = f, 0j
    for k in range(1, maxit):
        b = 2.0 * (nu + k) / z
        D = b - D
        if D == 0:
            D = tiny
        C = b - 1.0 / C
        if C == 0:
            C = tiny
        D = 1.0 / D
        delta = C * D
        f *= delta
        if abs(delta - 1.0) < eps:
            return f - n / z
    raise ArithmeticError(f"log-derivative continued fraction did not converge at n={n}")


def mie_ab(x, m, nmax, nstart):
    """Mie coefficients a_n, b_n for n = 1..nmax.

    Logarithmic derivative D_n(mx) by downward recurrence from ``nstart``,
    whose starting value comes from a continued fraction; Riccati-Bessel
    psi_n, chi_n by upward recurrence.
    """
    m = complex(m)
    mx = m * x
    D = [0j] * (nstart + 1)
    D[nstart] = log_derivative_cf(nstart, mx)
    for n in range(nstart, 0, -1):
        r = n / mx
        D[n - 1] = r - 1.0 / (D[n] + r)

    a = np.empty(nmax, dtype=complex)
    b = np.empty(nmax, dtype=complex)
    psi0, psi1 = math.cos(x), math.sin(x)
    chi0, chi1 = -math.sin(x), math.cos(x)
    xi1 = complex(psi1, -chi1)
    for n in range(1, nmax + 1):
        psi = (2.0 * n - 1.0) * psi1 / x - psi0
        chi = (2.0 * n - 1.0) * chi1 / x - chi0
        xi = complex(psi, -chi)
        ta = D[n] / m + n / x
        tb = D[n] * m + n / x
        a[n - 1] = (ta * psi - psi1) / (ta * xi - xi1)
        b[n - 1] = (tb * psi - psi1) / (tb * xi - xi1)
        psi0, psi1 = psi1, psi
        chi0, chi1 = chi1, chi
        xi1 = complex(psi1, -chi1)
    return a, b


def nc_separation_factor(dt, dr):
    """(dt^(8/3) - dr^(8/3)) / (dt - dr) evaluated without cancellation.

    Written as hi^(8/3) * (1 - (lo/hi)^(8/3)) / (hi - lo) with the bracket
    from expm1/log1p, so nearly equal separations keep full precision.
    """
    dt = np.asarray(dt, dtype=float)
    dr = np.asarray(dr, dtype=float)
    hi = np.maximum(dt, dr)
    lo = np.minimum(dt, dr)
    gap = hi - lo
    with np.errstate(divide="ignore", invalid="ignore"):
        bracket = -np.expm1((8.0 / 3.0) * np.log1p(-gap / hi))
        out = hi ** (8.0 / 3.0) * bracket / gap
    return out


def nc_exponent(dt, dr, strength):
    """Exponent of the closed-form normalized covariance (<= 0).

    ``strength`` is C_n^2 k^2 L.  Separations equal after quantization to
    TIE_QUANTUM use the dedicated equal-separation coefficient.
    """
    dt = np.asarray(dt, dtype=float)
    dr = np.asarray(dr, dtype=float)
    tie = np.rint(dt / TIE_QUANTUM) == np.rint(dr / TIE_QUANTUM)
    with np.errstate(divide="ignore", invalid="ignore"):
        general = NC_COEFF * nc_separation_factor(dt, dr)
    equal = NC_COEFF_EQUAL * dt ** (5.0 / 3.0)
    return -strength * np.where(tie, equal, general)


def losc_pair_sum(dt, mt, dr, mr, strength):
    """Sum over histogram pairs of m_t * m_r * rho(d_t, d_r).

    Accumulated with math.fsum, so the result does not depend on the order
    in which partial sums are combined.
    """
    dt = np.asarray(dt, dtype=float)
    dr = np.asarray(dr, dtype=float)
    rho = np.exp(nc_exponent(dt[:, None], dr[None, :], strength))
    terms = np.asarray(mt, dtype=float)[:, None] * np.asarray(mr, dtype=float)[None, :] * rho
    return math.fsum(terms.ravel())
