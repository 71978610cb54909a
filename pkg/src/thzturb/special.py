"""Modified Bessel function of the second kind for real (fractional) order.

Temme's method: the order is split as nu = n + mu with |mu| <= 1/2.
K_mu and K_{mu+1} come from Temme's series for x <= 2 and from Steed's
continued fraction (CF2) for x > 2; forward recurrence in the order,
which is stable for K, then climbs to nu.
"""

import math

import numpy as np

from .errors import DomainError, NumericalError

_EPS = 1e-16
_MAXIT = 10_000
_XMIN = 2.0

# Taylor coefficients of 1/Gamma(z) = sum_k c_k z^k (k >= 1)
_RGAMMA_COEFFS = (
    1.0,
    0.5772156649015329,
    -0.6558780715202538,
    -0.0420026350340952,
    0.1665386113822915,
    -0.0421977345555443,
    -0.0096219715278770,
    0.0072189432466630,
    -0.0011651675918591,
    -0.0002152416741149,
    0.0001280502823882,
    -0.0000201348547807,
    -0.0000012504934821,
    0.0000011330272320,
    -0.0000002056338417,
    0.0000000061160950,
    0.0000000050020075,
    -0.0000000011812746,
    0.0000000001043427,
    0.0000000000077823,
    -0.0000000000036968,
    0.0000000000005100,
    -0.0000000000000206,
    -0.0000000000000054,
    0.0000000000000014,
    0.0000000000000001,
)


def _temme_gammas(mu):
    """gam1, gam2, 1/Gamma(1+mu), 1/Gamma(1-mu) for |mu| <= 1/2.

    gam1 = (1/Gamma(1-mu) - 1/Gamma(1+mu)) / (2 mu) is summed directly from
    the even coefficients so it stays accurate as mu -> 0.
    """
    gam1 = 0.0
    gam2 = 0.0
    for k, c in enumerate(_RGAMMA_COEFFS, start=1):
        if k % 2:
            gam2 += c * mu ** (k - 1)
        else:
            gam1 -= c * mu ** (k - 2)
    gampl = gam2 - mu * gam1  # 1/Gamma(1+mu)
    gammi = gam2 + mu * gam1  # 1/Gamma(1-mu)
    return gam1, gam2, gampl, gammi


def _k_mu_pair(mu, x, scaled):
    """(K_mu(x), K_{mu+1}(x)), optionally multiplied by exp(x)."""
    if x < _XMIN:
        x2 = 0.5 * x
        pimu = math.pi * mu
        fact = 1.0 if abs(pimu) < _EPS else pimu / math.sin(pimu)
        d = -math.log(x2)
        e = mu * d
        fact2 = 1.0 if abs(e) < _EPS else math.sinh(e) / e
        gam1, gam2, gampl, gammi = _temme_gammas(mu)
        ff = fact * (gam1 * math.cosh(e) + gam2 * fact2 * d)
        total = ff
        e = math.exp(e)
        p = 0.5 * e / gampl
        q = 0.5 / (e * gammi)
        c = 1.0
        d = x2 * x2
        total1 = p
        mu2 = mu * mu
        for i in range(1, _MAXIT):
            ff = (i * ff + p + q) / (i * i - mu2)
            c *= d / i
            p /= i - mu
            q /= i + mu
            delta = c * ff
            total += delta
            total1 += c * (p - i * ff)
            if abs(delta) < abs(total) * _EPS:
                break
        else:
            raise NumericalError("Temme series did not converge", nu=mu, x=x)
        kmu, k1 = total, total1 * 2.0 / x
        if scaled:
            s = math.exp(x)
            kmu, k1 = kmu * s, k1 * s
        return kmu, k1

    # Steed's algorithm for CF2 with Thompson-Barnett summation
    b = 2.0 * (1.0 + x)
    d = 1.0 / b
    h = delh = d
    q1, q2 = 0.0, 1.0
    a1 = 0.25 - mu * mu
    q = c = a1
    a = -a1
    s = 1.0 + q * delh
    for i in range(2, _MAXIT):
        a -= 2 * (i - 1)
        c = -a * c / i
        qnew = (q1 - b * q2) / a
        q1, q2 = q2, qnew
        q += c * qnew
        b += 2.0
        d = 1.0 / (b + a * d)
        delh = (b * d - 1.0) * delh
        h += delh
        dels = q * delh
        s += dels
        if abs(dels / s) < _EPS:
            break
    else:
        raise NumericalError("continued fraction CF2 did not converge", nu=mu, x=x)
    h = a1 * h
    kmu = math.sqrt(math.pi / (2.0 * x)) / s
    if not scaled:
        kmu *= math.exp(-x)
    k1 = kmu * (mu + x + 0.5 - h) / x
    return kmu, k1


def _bessel_k_scalar(nu, x, scaled):
    if not x > 0:
        raise DomainError(f"K_nu(x) requires x > 0, got {x}")
    nu = abs(nu)
    n = int(nu + 0.5)
    mu = nu - n
    kmu, k1 = _k_mu_pair(mu, x, scaled)
    xi2 = 2.0 / x
    for i in range(1, n + 1):
        kmu, k1 = k1, (mu + i) * xi2 * k1 + kmu
    if not math.isfinite(kmu):
        raise NumericalError("K_nu overflowed", nu=nu, x=x)
    return kmu


def bessel_k_nu(nu, x):
    """K_nu(x) for real order ``nu`` and x > 0 (scalar or array ``x``)."""
    if np.ndim(x) == 0:
        return _bessel_k_scalar(float(nu), float(x), False)
    xs = np.asarray(x, dtype=float)
    return np.array([_bessel_k_scalar(float(nu), v, False) for v in xs.ravel()]).reshape(xs.shape)


def bessel_k_nu_scaled(nu, x):
    """exp(x) * K_nu(x); avoids underflow for large arguments."""
    if np.ndim(x) == 0:
        return _bessel_k_scalar(float(nu), float(x), True)
    xs = np.asarray(x, dtype=float)
    return np.array([_bessel_k_scalar(float(nu), v, True) for v in xs.ravel()]).reshape(xs.shape)
