"""Intertwined heat kernels and the Riesz-type kernel built from the heat semigroup.

For an H-type group with ``m`` horizontal and ``k`` vertical dimensions,

    K_(+-s)((z, sigma), t) = 2^k (4 pi t)^(-(m/2+k)) int_{R^k} e^{-i<sigma,lam>/t}
                             (|lam|/sinh|lam|)^(m/2+1-+s) e^{-|z|^2 |lam| coth|lam| / 4t} d lam,

and the heat kernel ``p`` is the ``(+1)`` branch at ``s = 1``. Only the
cosine part survives the ``lam -> -lam`` symmetry. For ``k = 3`` the
oscillatory factor is averaged over spheres, which leaves a radial integral
against ``sin(omega r)/(omega r)``.

The Riesz kernel ``|h|_(s)^(-(Q+2s)) = 2s/Gamma(1-s) int t^(-1-s) p(h, t) dt``
is computed by nested quadrature (log-substituted trapezoid in t) and also
by integrating t out analytically.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import integrate

from .errors import InvalidInputError, SingularityError, UnsupportedFeatureError
from .groups import GroupPoint, GroupSpec, _check
from .quadrature import QuadratureConfig, composite_gauss_legendre
from .special import euclidean_riesz_constant, log_gamma

_NSEG = 16
_NGL = 64


@dataclass(frozen=True)
class HeatKernelQuery:
    spec: GroupSpec
    point: GroupPoint
    t: float
    s: float = 1.0
    branch: int = 1

    def __post_init__(self):
        if not self.t > 0:
            raise InvalidInputError("heat kernel time must be positive")
        if not 0 < self.s <= 1:
            raise InvalidInputError("heat kernel needs 0 < s <= 1")
        if self.branch not in (1, -1):
            raise InvalidInputError("branch must be +1 or -1")
        _check(self.spec, self.point)

    @property
    def exponent(self) -> float:
        return self.spec.m / 2 + 1 - self.branch * self.s


@dataclass(frozen=True)
class KernelValue:
    value: float
    error: float
    method: str = ""


def _lam_profile(lam, zn2, t, a):
    lam = np.maximum(lam, 1e-300)
    ratio = lam / np.sinh(np.minimum(lam, 700.0))
    ratio = np.where(lam > 700.0, 0.0, ratio)
    coth_l = lam / np.tanh(np.minimum(lam, 700.0))
    coth_l = np.where(lam > 700.0, lam, coth_l)
    return ratio ** a * np.exp(-zn2 / (4 * t) * coth_l)


def _lam_cutoff(a: float, k: int, rate: float, tol: float) -> float:
    """Lambda with ``(2L)^(a+k) exp(-rate L)`` below ``tol`` (rate >= a > 0)."""
    L = 4.0
    while L < 2000.0 and (a + k) * math.log(2 * L) - rate * L > math.log(tol):
        L *= 1.25
    return L


def _log_ratio_coth(zeta):
    """``log(zeta / sinh zeta)`` and ``zeta coth zeta`` for Re zeta >= 0, |Im zeta| <= pi/2.

    Written through ``e^(-2 zeta)`` so that nothing overflows; the logarithm
    is the branch continuous from the positive real axis.
    """
    e2 = np.exp(-2.0 * zeta)
    log_sinh = zeta + np.log1p(-e2) - math.log(2.0)
    return np.log(zeta) - log_sinh, zeta * (1.0 + e2) / (1.0 - e2)


def _shift_height(zn2, sn, t, a):
    """Height eta of the contour lam -> lam + i eta for the lambda integral.

    Both lambda-factors are even and analytic for |Im lam| < pi, so the
    contour may be lifted; along the lifted line the oscillating factor
    carries ``e^(-eta |sigma|/t)`` and the cancellation disappears. eta is the
    minimiser (on a grid in (0, pi/2]) of the integrand size at ``lam = i eta``,
    a saddle-point choice; ``Re(zeta coth zeta) >= 0`` holds up to pi/2.
    """
    if sn == 0.0:
        return 0.0
    eta = np.linspace(0.0, 0.5 * math.pi, 65)[1:]
    logmag = -eta * sn / t - zn2 / (4 * t) * eta / np.tan(eta) + a * np.log(eta / np.sin(eta))
    j = int(np.argmin(logmag))
    # not worth it unless the shifted integrand is 10x smaller than the real-axis one
    return float(eta[j]) if logmag[j] < -zn2 / (4 * t) - math.log(10.0) else 0.0


def _heat_shifted(k, zn2, sn, t, a, eta, L):
    om = sn / t
    damp = math.exp(-om * eta) if om * eta < 745.0 else 0.0
    if damp == 0.0:
        return 0.0, 0.0
    nseg = max(_NSEG, int(math.ceil(om * L / (_NGL * math.pi / 4))))
    vals, mags = [], []
    for ns in (nseg, 2 * nseg):
        x, w = composite_gauss_legendre(np.linspace(0.0, L, ns + 1), _NGL)
        zeta = x + 1j * eta
        lr, zc = _log_ratio_coth(zeta)
        f = np.exp(a * lr - zn2 / (4 * t) * zc + 1j * om * x)
        if k == 1:
            g = f
            vals.append(2.0 * damp * float(np.sum(w * g).real))
        else:
            g = zeta * f
            vals.append(4 * math.pi / om * damp * float(np.sum(w * g).imag))
        mags.append(float(np.sum(w * np.abs(g))) * damp * (2.0 if k == 1 else 4 * math.pi / om))
    x = np.array([L])
    lr, zc = _log_ratio_coth(x + 1j * eta)
    gL = float(np.abs(np.exp(a * lr - zn2 / (4 * t) * zc) * (1 if k == 1 else (L + eta)))[0])
    trunc = gL / (a + zn2 / (4 * t)) * damp * (2.0 if k == 1 else 4 * math.pi / om)
    err = abs(vals[1] - vals[0]) + 1e-15 * mags[1] + trunc
    return vals[1], err


def _heat_lambda_integral(k, zn2, sn, t, a, tol):
    """``int_{R^k} cos(<sigma,lam>/t) F(|lam|) d lam`` with error estimate."""
    rate = a + zn2 / (4 * t)
    L = _lam_cutoff(a, k, rate, min(tol * 1e-3, 1e-17))
    om = sn / t
    eta = _shift_height(zn2, sn, t, a)
    if eta > 0:
        return _heat_shifted(k, zn2, sn, t, a, eta, L)
    spacing = L / (_NSEG * _NGL)
    f = lambda lam: _lam_profile(lam, zn2, t, a)
    if om * spacing < math.pi / 4:
        vals = []
        for nseg in (_NSEG, 2 * _NSEG):
            x, w = composite_gauss_legendre(np.linspace(0.0, L, nseg + 1), _NGL)
            if k == 1:
                v = 2.0 * np.sum(w * np.cos(om * x) * f(x))
            else:
                v = 4 * math.pi * np.sum(w * x * x * np.sinc(om * x / math.pi) * f(x))
            vals.append(v)
        trunc = float(f(np.array([L]))[0]) * L ** (k - 1) / rate * (2.0 if k == 1 else 4 * math.pi)
        return vals[1], abs(vals[1] - vals[0]) + 1e-15 * abs(vals[1]) + trunc
    # Filon-type regime: modified Chebyshev moments of the trigonometric weight (QAWO)
    if k == 1:
        v, e = integrate.quad(f, 0.0, L, weight="cos", wvar=om, limit=400)
        return 2.0 * v, 2.0 * e
    v, e = integrate.quad(lambda r: r * f(r), 0.0, L, weight="sin", wvar=om, limit=400)
    return 4 * math.pi * v / om, 4 * math.pi * e / om


def _heat_core(m, k, zn2, sn, t, a, tol):
    pref = 2.0 ** k * (4 * math.pi * t) ** (-(m / 2 + k))
    v, e = _heat_lambda_integral(k, zn2, sn, t, a, tol)
    return pref * v, pref * e


def heat_kernel(query: HeatKernelQuery, quad: QuadratureConfig | None = None) -> KernelValue:
    """Value of the intertwined heat kernel selected by ``query``."""
    quad = quad or QuadratureConfig()
    spec, p, t = query.spec, query.point, float(query.t)
    zn2 = float(p.z @ p.z)
    if spec.k == 0:
        return KernelValue((4 * math.pi * t) ** (-spec.m / 2) * math.exp(-zn2 / (4 * t)), 0.0,
                           "closed-form")
    if spec.k not in (1, 3):
        raise UnsupportedFeatureError(f"heat kernel implemented for k in (1, 3), got k={spec.k}")
    sn = float(np.sqrt(p.sigma @ p.sigma))
    v, e = _heat_core(spec.m, spec.k, zn2, sn, t, query.exponent, quad.rel_tol)
    return KernelValue(v, e, "quadrature")


# --------------------------------------------------------------------------
# Riesz-type kernel

@dataclass(frozen=True)
class RieszValue:
    value: float
    error: float
    nested: float
    nested_error: float
    reduced: float | None
    reduced_error: float | None
    method: str

    @property
    def discrepancy(self) -> float | None:
        if self.reduced is None:
            return None
        return abs(self.nested - self.reduced)


def _t_integral(integrand, t_lo, t_hi, du, tail):
    """Trapezoid in u = log t of ``t^(-s) p(t)`` plus a power-law tail beyond t_hi.

    ``t_lo`` is pushed down until the integrand there is negligible next to
    its value at the initial guess (the small-t decay carries a polynomial
    prefactor that grows with the dimension).
    """
    ref = abs(integrand(t_lo * 4.0))
    while abs(integrand(t_lo)) * t_lo > 1e-17 * ref * t_lo * 4.0 and t_lo > 1e-12 * t_hi:
        t_lo /= 1.5
    n = int(math.ceil(math.log(t_hi / t_lo) / du)) + 1
    n += 1 - n % 2
    u = np.linspace(math.log(t_lo), math.log(t_hi), n)
    du = u[1] - u[0]
    vals = np.array([integrand(math.exp(x)) for x in u])
    full = du * (vals.sum() - 0.5 * (vals[0] + vals[-1]))
    half = 2 * du * (vals[::2].sum() - 0.5 * (vals[0] + vals[-1]))
    return full + tail, abs(full - half) + 1e-15 * abs(full + tail)


def _p0_vertical_mass(m, k):
    """``2^k (4 pi)^(-Q/2) int_{R^k} (|lam|/sinh|lam|)^(m/2) d lam`` (p(e, 1))."""
    f = lambda r: (r / math.sinh(r)) ** (m / 2) * (r ** (k - 1) if k > 1 else 1.0) if r > 0 else (
        1.0 if k == 1 else 0.0)
    v = integrate.quad(f, 0, 200, epsabs=0, epsrel=1e-13, limit=200)[0]
    area = 2.0 if k == 1 else 4 * math.pi
    return 2.0 ** k * (4 * math.pi) ** (-(m / 2 + k)) * area * v


def _riesz_nested(spec, zn2, sn, s, quad, du):
    m, k, Q = spec.m, spec.k, spec.Q
    pref = 2 * s / math.gamma(1 - s)
    if k == 0:
        c = zn2 / 4
        t_lo, t_hi = c / 45, 1e5 * zn2
        integrand = lambda t: t ** (-s) * (4 * math.pi * t) ** (-m / 2) * math.exp(-c / t)
        p0 = (4 * math.pi) ** (-m / 2)
    else:
        scale = zn2 / 4 + math.pi * sn
        t_lo, t_hi = scale / 45, 1e5 * max(zn2, sn)
        tol = quad.rel_tol * 1e-2
        integrand = lambda t: t ** (-s) * _heat_core(m, k, zn2, sn, t, m / 2, tol)[0]
        p0 = _p0_vertical_mass(m, k)
    tail = p0 * t_hi ** (-s - Q / 2) / (s + Q / 2)
    v, e = _t_integral(integrand, t_lo, t_hi, du, tail)
    # the tail uses p(h, t) ~ p(e, t); the neglected term is O(|h|^2 / t_hi)
    e += abs(tail) * 1e-4
    return pref * v, pref * e


_ETA_REDUCED = 1.0


def _reduced_shifted(m, k, zn2, sn, a, L, n_seg):
    """Reduced lambda integral along ``lam = x - i eta``.

    On the real axis the base ``A(lam) + i |sigma| lam`` of the complex power
    nearly vanishes at ``lam = 0`` when ``z`` is small, and the integral is a
    difference of large numbers. Shifting down by eta adds ``eta |sigma|``
    to its real part.
    """
    eta = _ETA_REDUCED
    vals = []
    for nseg in (n_seg // 2, n_seg):
        x, w = composite_gauss_legendre(np.linspace(0.0, L, nseg + 1), _NGL)
        up = x + 1j * eta
        lr, zc = _log_ratio_coth(up)
        zeta = np.conj(up)                       # x - i eta
        G = np.conj(np.exp(m / 2 * lr))
        A = zn2 / 4 * np.conj(zc)
        base = A + 1j * sn * zeta
        if k == 1:
            v = 2.0 * float(np.sum(w * G * base ** (-a)).real)
        else:
            q = zeta * G * base ** (1 - a)
            v = 4 * math.pi / ((1 - a) * sn) * float(np.sum(w * q).imag)
        vals.append(v)
    return vals[1], abs(vals[1] - vals[0]) + 1e-15 * abs(vals[1])


def _riesz_reduced(spec, zn2, sn, s, n_seg=32):
    m, k, Q = spec.m, spec.k, spec.Q
    a = Q / 2 + s
    pref = 2 * s / math.gamma(1 - s) * 2.0 ** k * (4 * math.pi) ** (-Q / 2) * math.exp(log_gamma(a))
    L = _lam_cutoff(m / 2, k, m / 2, 1e-18)
    if sn > 1e-3 * zn2:
        v, e = _reduced_shifted(m, k, zn2, sn, a, L, n_seg)
        return pref * v, pref * e
    vals = []
    for nseg in (n_seg // 2, n_seg):
        lam, w = composite_gauss_legendre(np.linspace(0.0, L, nseg + 1), _NGL)
        lam = np.maximum(lam, 1e-300)
        A = zn2 / 4 * lam / np.tanh(lam)
        G = (lam / np.sinh(lam)) ** (m / 2)
        if k == 1:
            c = A + 1j * sn * lam
            v = 2.0 * np.sum(w * G * (c ** (-a)).real)
        else:
            B = sn * lam
            small = B < 1e-4 * A
            out = np.empty_like(A)
            As = A[small]
            x2 = (B[small] / As) ** 2
            out[small] = 2 * As ** (-a) * (1 - a * (a + 1) / 6 * x2)
            Ab, Bb = A[~small], B[~small]
            out[~small] = 2 * ((Ab + 1j * Bb) ** (1 - a)).imag / ((1 - a) * Bb)
            v = 2 * math.pi * np.sum(w * lam * lam * G * out)
        vals.append(v)
    return pref * vals[1], pref * (abs(vals[1] - vals[0]) + 1e-15 * abs(vals[1]))


def riesz_norm_kernel(spec: GroupSpec, h: GroupPoint, s: float,
                      quad: QuadratureConfig | None = None, du: float = 0.04) -> RieszValue:
    """``1/||h||_(s)^(Q+2s)`` from the heat semigroup.

    For ``k = 0`` the nested value is compared with the classical closed
    form; for ``k >= 1`` with the t-integrated form.
    """
    quad = quad or QuadratureConfig()
    _check(spec, h)
    if not 0 < s < 1:
        raise InvalidInputError("riesz_norm_kernel needs 0 < s < 1")
    if spec.k not in (0, 1, 3):
        raise UnsupportedFeatureError(f"Riesz kernel implemented for k in (0, 1, 3), got {spec.k}")
    zn2 = float(h.z @ h.z)
    sn = float(np.sqrt(h.sigma @ h.sigma))
    if zn2 == 0 and sn == 0:
        raise SingularityError("Riesz kernel is singular at the identity")
    nv, ne = _riesz_nested(spec, zn2, sn, s, quad, du)
    if spec.k == 0:
        cf = euclidean_riesz_constant(spec.m, s) * zn2 ** (-(spec.m + 2 * s) / 2)
        return RieszValue(nv, ne, nv, ne, cf, 0.0, "nested+closed-form")
    rv, re = _riesz_reduced(spec, zn2, sn, s)
    return RieszValue(rv, re, nv, ne, rv, re, "nested+reduced")
