# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Fused loops for the operator integrands on H-type groups.

Every node h needs two group products, a change of origin to the field
center, the profile value and the partition cutoff; doing that in one pass
avoids a dozen full-size temporaries per call.
"""
import numpy as np
cimport numpy as cnp
from libc.math cimport exp, sqrt, pow

cnp.import_array()

cdef enum:
    MAXD = 16


cdef inline double _cutoff(double t, double plateau) noexcept nogil:
    cdef double x, e0, e1
    if t <= plateau:
        return 1.0
    if t >= 1.0:
        return 0.0
    x = (t - plateau) / (1.0 - plateau)
    e1 = exp(-1.0 / (1.0 - x))
    e0 = exp(-1.0 / x)
    return e1 / (e1 + e0)


cdef inline double _field(int kind, double n4, double r2, double s2,
                          double p0, double p1, double p2) noexcept nogil:
    # kind 0: p2 * ((r2 + p0)^2 + 16 s2)^(-p1)
    # kind 1: p2 * max(1 - n4 / p0, 0)^p1
    cdef double t
    if kind == 0:
        t = r2 + p0
        return p2 * pow(t * t + 16.0 * s2, -p1)
    t = 1.0 - n4 / p0
    if t <= 0.0:
        return 0.0
    return p2 * pow(t, p1)


cdef inline void _prod(const double* az, const double* as_, const double* bz, const double* bs,
                       double sign, const double* J, int m, int k,
                       double* oz, double* os) noexcept nogil:
    # (a) o (sign * b)
    cdef int a, i, j
    cdef double acc
    for i in range(m):
        oz[i] = az[i] + sign * bz[i]
    for a in range(k):
        acc = 0.0
        for i in range(m):
            for j in range(m):
                acc += J[(a * m + i) * m + j] * az[j] * bz[i]
        os[a] = as_[a] + sign * bs[a] + 0.5 * sign * acc


cdef inline double _tilde(const double* xz, const double* xs, const double* ncz,
                          const double* ncs, const double* J, int m, int k,
                          int kind, double p0, double p1, double p2,
                          int partition, double r_c, double plateau) noexcept nogil:
    # u(x) (1 - w(x)) with coordinates taken relative to the center c
    cdef double yz[MAXD]
    cdef double ys[MAXD]
    cdef double r2 = 0.0, s2 = 0.0, n4, t, w = 0.0
    cdef int i
    _prod(ncz, ncs, xz, xs, 1.0, J, m, k, yz, ys)
    for i in range(m):
        r2 += yz[i] * yz[i]
    for i in range(k):
        s2 += ys[i] * ys[i]
    n4 = r2 * r2 + 16.0 * s2
    if partition:
        # skip the root and exponentials away from the transition band
        t = r_c * r_c
        t = t * t
        if n4 <= t * plateau * plateau * plateau * plateau:
            return 0.0
        if n4 < t:
            w = _cutoff(sqrt(sqrt(n4)) / r_c, plateau)
    return _field(kind, n4, r2, s2, p0, p1, p2) * (1.0 - w)


def sym_avg(const double[::1] gz, const double[::1] gs, const double[:, ::1] hz,
            const double[:, ::1] hs, const double[:, :, ::1] J, const double[::1] cz,
            const double[::1] cs, int kind, double p0, double p1, double p2,
            int partition, double r_c, double plateau):
    """``1/2 [u~(g h) + u~(g h^-1)]`` for every row of (hz, hs)."""
    cdef Py_ssize_t n = hz.shape[0], r
    cdef int m = hz.shape[1], k = hs.shape[1]
    cdef double xz[MAXD]
    cdef double xs[MAXD]
    cdef double ncz[MAXD]
    cdef double ncs[MAXD]
    cdef double acc
    cdef int i
    cdef cnp.ndarray[cnp.float64_t, ndim=1] out = np.empty(n)
    cdef double[::1] ov = out
    if m > MAXD or k > MAXD or k < 1:
        raise ValueError("compiled kernel needs 1 <= k and m, k <= 16")
    cdef const double* Jp = &J[0, 0, 0]
    for i in range(m):
        ncz[i] = -cz[i]
    for i in range(k):
        ncs[i] = -cs[i]
    with nogil:
        for r in range(n):
            _prod(&gz[0], &gs[0], &hz[r, 0], &hs[r, 0],
                  1.0, Jp, m, k, xz, xs)
            acc = _tilde(xz, xs, ncz, ncs, Jp, m, k, kind, p0, p1, p2, partition, r_c, plateau)
            _prod(&gz[0], &gs[0], &hz[r, 0], &hs[r, 0],
                  -1.0, Jp, m, k, xz, xs)
            acc += _tilde(xz, xs, ncz, ncs, Jp, m, k, kind, p0, p1, p2, partition, r_c, plateau)
            ov[r] = 0.5 * acc
    return out


def far_part(const double[::1] gz, const double[::1] gs, const double[:, ::1] xz,
             const double[:, ::1] xs, const double[::1] rho, const double[:, :, ::1] J,
             const double[::1] cz, const double[::1] cs, int kind, double p0, double p1,
             double p2, double gamma, double kexp, double r_c, double plateau):
    """``-u(x) rho^gamma w(x) |g^-1 x|^(-kexp)`` for center-polar nodes x."""
    cdef Py_ssize_t n = xz.shape[0], r
    cdef int m = xz.shape[1], k = xs.shape[1], i
    cdef double yz[MAXD]
    cdef double ys[MAXD]
    cdef double ngz[MAXD]
    cdef double ngs[MAXD]
    cdef double ncz[MAXD]
    cdef double ncs[MAXD]
    cdef double w, r2, s2, n4, val, kn4
    cdef cnp.ndarray[cnp.float64_t, ndim=1] out = np.empty(n)
    cdef double[::1] ov = out
    if m > MAXD or k > MAXD or k < 1:
        raise ValueError("compiled kernel needs 1 <= k and m, k <= 16")
    cdef const double* Jp = &J[0, 0, 0]
    for i in range(m):
        ngz[i] = -gz[i]
        ncz[i] = -cz[i]
    for i in range(k):
        ngs[i] = -gs[i]
        ncs[i] = -cs[i]
    with nogil:
        for r in range(n):
            w = _cutoff(rho[r] / r_c, plateau)
            if w <= 0.0:
                ov[r] = 0.0
                continue
            _prod(ncz, ncs, &xz[r, 0], &xs[r, 0], 1.0, Jp, m, k, yz, ys)
            r2 = 0.0
            s2 = 0.0
            for i in range(m):
                r2 += yz[i] * yz[i]
            for i in range(k):
                s2 += ys[i] * ys[i]
            n4 = r2 * r2 + 16.0 * s2
            if gamma != 0.0:
                val = _field(kind, n4, r2, s2, p0, p1, p2) * pow(rho[r], gamma)
            else:
                val = _field(kind, n4, r2, s2, p0, p1, p2)
            _prod(ngz, ngs, &xz[r, 0], &xs[r, 0], 1.0, Jp, m, k, yz, ys)
            r2 = 0.0
            s2 = 0.0
            for i in range(m):
                r2 += yz[i] * yz[i]
            for i in range(k):
                s2 += ys[i] * ys[i]
            kn4 = r2 * r2 + 16.0 * s2
            ov[r] = -val * w * pow(kn4, -kexp / 4.0)
    return out
