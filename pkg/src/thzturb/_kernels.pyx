# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled versions of the hot kernels; mirrors ``_kernels_py``."""

import numpy as np
cimport numpy as cnp
from libc.math cimport cos, sin, exp, expm1, log1p, pow, fabs, rint

cdef extern from "<complex.h>" nogil:
    double cabs(double complex z)

cnp.import_array()

cdef double NC_COEFF = 0.546
cdef double NC_COEFF_EQUAL = 1.457
cdef double TIE_QUANTUM = 1e-12


cdef double complex _log_derivative_cf(Py_ssize_t n, double complex z) except *:
    cdef double tiny = 1e-300
    cdef double nu = n + 0.5
    cdef double complex f = 2.0 * nu / z
    cdef double complex C, D, b, delta
    cdef Py_ssize_t k
    if f == 0:
        f = tiny
    C = f
    D = 0
    for k in range(1, 100000):
        b = 2.0 * (nu + k) / z
        D = b - D
        if D == 0:
            D = tiny
        C = b - 1.0 / C
        if C == 0:
            C = tiny
        D = 1.0 / D
        delta = C * D
        f = f * delta
        if cabs(delta - 1.0) < 1e-16:
            return f - n / z
    raise ArithmeticError(f"log-derivative continued fraction did not converge at n={n}")


def mie_ab(double x, m, Py_ssize_t nmax, Py_ssize_t nstart):
    cdef double complex mc = complex(m)
    cdef double complex mx = mc * x
    cdef double complex[::1] D = np.zeros(nstart + 1, dtype=np.complex128)
    cdef Py_ssize_t n
    cdef double complex r
    D[nstart] = _log_derivative_cf(nstart, mx)
    for n in range(nstart, 0, -1):
        r = n / mx
        D[n - 1] = r - 1.0 / (D[n] + r)

    a_arr = np.empty(nmax, dtype=np.complex128)
    b_arr = np.empty(nmax, dtype=np.complex128)
    cdef double complex[::1] a = a_arr
    cdef double complex[::1] b = b_arr
    cdef double psi0 = cos(x), psi1 = sin(x)
    cdef double chi0 = -sin(x), chi1 = cos(x)
    cdef double psi, chi
    cdef double complex xi, xi1 = psi1 - 1j * chi1
    cdef double complex ta, tb
    for n in range(1, nmax + 1):
        psi = (2.0 * n - 1.0) * psi1 / x - psi0
        chi = (2.0 * n - 1.0) * chi1 / x - chi0
        xi = psi - 1j * chi
        ta = D[n] / mc + n / x
        tb = D[n] * mc + n / x
        a[n - 1] = (ta * psi - psi1) / (ta * xi - xi1)
        b[n - 1] = (tb * psi - psi1) / (tb * xi - xi1)
        psi0 = psi1
        psi1 = psi
        chi0 = chi1
        chi1 = chi
        xi1 = psi1 - 1j * chi1
    return a_arr, b_arr


cdef inline double _exponent(double dt, double dr, double strength) nogil:
    cdef double hi, lo, gap
    if rint(dt / TIE_QUANTUM) == rint(dr / TIE_QUANTUM):
        return -strength * NC_COEFF_EQUAL * pow(dt, 5.0 / 3.0)
    if dt > dr:
        hi = dt
        lo = dr
    else:
        hi = dr
        lo = dt
    gap = hi - lo
    return -strength * NC_COEFF * pow(hi, 8.0 / 3.0) * (-expm1((8.0 / 3.0) * log1p(-gap / hi))) / gap


def losc_pair_sum(dt, mt, dr, mr, double strength):
    cdef const double[::1] vdt = np.ascontiguousarray(dt, dtype=np.float64)
    cdef const double[::1] vdr = np.ascontiguousarray(dr, dtype=np.float64)
    cdef const double[::1] vmt = np.ascontiguousarray(mt, dtype=np.float64)
    cdef const double[::1] vmr = np.ascontiguousarray(mr, dtype=np.float64)
    cdef Py_ssize_t i, j
    cdef double s = 0.0, comp = 0.0, term, t
    with nogil:
        for i in range(vdt.shape[0]):
            for j in range(vdr.shape[0]):
                term = vmt[i] * vmr[j] * exp(_exponent(vdt[i], vdr[j], strength))
                # Neumaier compensated summation
                t = s + term
                if fabs(s) >= fabs(term):
                    comp += (s - t) + term
                else:
                    comp += (term - t) + s
                s = t
    return s + comp
