"""Haar measure on H-type groups: sampling, sphere rules and gauge-ball constants.

Haar measure is Lebesgue measure in logarithmic coordinates. Polar
coordinates in the gauge use the parametrization

    |z| = rho sin(b),  |sigma| = rho^2 cos(b) sqrt(1 + sin(b)^2) / 4,

which is smooth on the whole gauge sphere and turns ``dz dsigma`` into

    rho^(Q-1) w(b) d rho d b dS^(m-1) dS^(k-1),
    w(b) = sin(b)^(m-1) q(b)^(k-1) / (2 sqrt(1 + sin(b)^2)),  q = cos(b) sqrt(1+sin(b)^2)/4.

Integrating ``w`` gives the sphere constant sigma_Q and omega_Q = sigma_Q / Q
(the Koranyi unit-ball volume) without Monte Carlo noise.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy import integrate

from .errors import InvalidInputError
from .groups import GroupSpec
from .quadrature import QuadratureConfig, chunked_moments, gauss_legendre, seed_sequence


def _sphere_area(n: int) -> float:
    """Euclidean area of S^(n-1) in R^n (2 for n = 1)."""
    return 2.0 * math.pi ** (n / 2.0) / math.gamma(n / 2.0)


def _w_beta(b, m: int, k: int):
    sb = np.sin(b)
    root = np.sqrt(1.0 + sb * sb)
    q = np.cos(b) * root / 4.0
    return sb ** (m - 1) * q ** (k - 1) / (2.0 * root)


@dataclass(frozen=True)
class HaarConstants:
    sigma_Q: float
    omega_Q: float
    error: float
    method: str


@lru_cache(maxsize=32)
def _haar_constants(m: int, k: int) -> HaarConstants:
    if k == 0:
        s = _sphere_area(m)
        return HaarConstants(s, s / m, 0.0, "closed-form")
    val, err = integrate.quad(_w_beta, 0.0, math.pi / 2, args=(m, k), epsabs=0, epsrel=1e-13,
                              limit=200)
    fac = _sphere_area(m) * _sphere_area(k)
    s = fac * val
    Q = m + 2 * k
    return HaarConstants(s, s / Q, fac * err, "shell-quadrature")


def haar_constants(spec: GroupSpec) -> HaarConstants:
    """Cached sigma_Q and omega_Q for ``spec`` with a quadrature error bar."""
    return _haar_constants(spec.m, spec.k)


def sphere_moment(spec: GroupSpec, p: float = 2.0) -> float:
    """``int_S |z|^p d sigma`` over the unit gauge sphere (``|z| = sin beta`` there)."""
    if spec.k == 0:
        return _sphere_area(spec.m)
    f = lambda b: np.sin(b) ** p * _w_beta(b, spec.m, spec.k)
    val = integrate.quad(f, 0.0, math.pi / 2, epsabs=0, epsrel=1e-13, limit=200)[0]
    return _sphere_area(spec.m) * _sphere_area(spec.k) * val


def sigma_Q(spec: GroupSpec) -> float:
    return haar_constants(spec).sigma_Q


def omega_Q(spec: GroupSpec) -> float:
    return haar_constants(spec).omega_Q


# --------------------------------------------------------------------------
# sampling

def box_volume(spec: GroupSpec, R: float) -> float:
    """Volume of the box ``{|z_i| <= R, |sigma_a| <= R^2/4}`` containing B(e, R)."""
    return (2.0 * R) ** spec.m * (0.5 * R * R) ** spec.k


def sample_box(spec: GroupSpec, R: float, n: int, rng):
    z = rng.uniform(-R, R, size=(n, spec.m))
    s = rng.uniform(-0.25 * R * R, 0.25 * R * R, size=(n, spec.k))
    return z, s


def sample_ball(spec: GroupSpec, R: float, n: int, rng, r_inner: float = 0.0):
    """Uniform samples in ``{r_inner < |g| < R}`` by rejection from the bounding box."""
    zs, ss, got = [], [], 0
    while got < n:
        want = max(64, int(1.3 * (n - got) * box_volume(spec, 1.0) / max(omega_Q(spec), 1e-3)))
        z, s = sample_box(spec, R, want, rng)
        g = spec.gauge_arrays(z, s)
        keep = (g < R) & (g > r_inner)
        zs.append(z[keep])
        ss.append(s[keep])
        got += int(keep.sum())
    return np.concatenate(zs)[:n], np.concatenate(ss)[:n]


def sample_sphere(spec: GroupSpec, n: int, rng):
    """Samples on the unit gauge sphere distributed like the polar surface measure."""
    z, s = sample_ball(spec, 1.0, n, rng, r_inner=1e-3)
    g = spec.gauge_arrays(z, s)
    return z / g[:, None], s / (g * g)[:, None]


def sphere_rule(spec: GroupSpec, n_beta: int, n_psi: int):
    """Deterministic product rule on the unit gauge sphere of H^1.

    Gauss-Legendre in b on [0, pi] (signed vertical coordinate) times the
    periodic trapezoid rule in the horizontal angle. Weights sum to sigma_Q.
    """
    if not (spec.m == 2 and spec.k == 1):
        raise InvalidInputError("tensor sphere rule is only available on heisenberg:1")
    b, wb = gauss_legendre(0.0, math.pi, n_beta)
    psi = np.arange(n_psi) * (2 * math.pi / n_psi)
    B, P = np.meshgrid(b, psi, indexing="ij")
    sb = np.sin(B)
    root = np.sqrt(1.0 + sb * sb)
    z = np.stack([sb * np.cos(P), sb * np.sin(P)], axis=-1).reshape(-1, 2)
    s = (np.cos(B) * root / 4.0).reshape(-1, 1)
    w = np.outer(wb * np.sin(b) / (2.0 * np.sqrt(1.0 + np.sin(b) ** 2)),
                 np.full(n_psi, 2 * math.pi / n_psi)).reshape(-1)
    return z, s, w


# --------------------------------------------------------------------------
# estimators

@dataclass(frozen=True)
class VolumeEstimate:
    value: float
    stderr: float
    n: int
    method: str


def unit_ball_volume(spec: GroupSpec, quad: QuadratureConfig | None = None) -> VolumeEstimate:
    """Monte Carlo estimate of omega_Q = |B(e, 1)| (hit-or-miss in the bounding box)."""
    quad = quad or QuadratureConfig()
    if quad.mc_samples < 10_000:
        raise InvalidInputError("unit_ball_volume needs at least 1e4 samples")
    vol = box_volume(spec, 1.0)

    def fn(rng, size):
        z, s = sample_box(spec, 1.0, size, rng)
        return (spec.gauge_arrays(z, s) < 1.0).astype(float)

    est = chunked_moments(fn, quad.mc_samples, seed_sequence(quad.seed, "unit_ball", spec.name),
                          quad.chunk_size, quad.workers)
    return VolumeEstimate(vol * est.mean, vol * est.stderr, quad.mc_samples, "monte-carlo")


def shell_volume(spec: GroupSpec) -> VolumeEstimate:
    """Deterministic omega_Q from the one-dimensional shell quadrature."""
    hc = haar_constants(spec)
    return VolumeEstimate(hc.omega_Q, hc.error / spec.Q, 0, hc.method)


@dataclass(frozen=True)
class AnnulusIntegral:
    numeric: float
    stderr: float
    closed_form: float
    rel_discrepancy: float


def annulus_closed_form(spec: GroupSpec, gamma: float, r: float, R: float) -> float:
    """``sigma_Q * int_r^R rho^(Q-1-gamma) d rho``."""
    sQ = sigma_Q(spec)
    e = spec.Q - gamma
    if abs(e) < 1e-14:
        return sQ * math.log(R / r)
    return sQ * (R ** e - r ** e) / e


def gauge_annulus_integral(spec: GroupSpec, gamma: float, r: float, R: float,
                           quad: QuadratureConfig | None = None) -> AnnulusIntegral:
    """``int_{r<|g|<R} |g|^(-gamma) dg`` by plain Cartesian MC and by the polar law."""
    quad = quad or QuadratureConfig()
    if not 0 < r < R:
        raise InvalidInputError(f"need 0 < r < R, got r={r}, R={R}")
    vol = box_volume(spec, R)

    def fn(rng, size):
        z, s = sample_box(spec, R, size, rng)
        g = spec.gauge_arrays(z, s)
        inside = (g > r) & (g < R)
        out = np.zeros(size)
        out[inside] = g[inside] ** (-gamma)
        return out

    est = chunked_moments(fn, quad.mc_samples,
                          seed_sequence(quad.seed, "annulus", spec.name, gamma, r, R),
                          quad.chunk_size, quad.workers)
    cf = annulus_closed_form(spec, gamma, r, R)
    num = vol * est.mean
    return AnnulusIntegral(num, vol * est.stderr, cf, abs(num - cf) / abs(cf))


def euclidean_sphere_area(n: int) -> float:
    return _sphere_area(n)

