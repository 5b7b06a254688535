"""Numpy versions of the fused integrand loops (used when the extension is absent)."""
from __future__ import annotations

import numpy as np

from .quadrature import smooth_cutoff


def _prod(az, as_, bz, bs, sign, J):
    br = np.einsum("aij,...j,...i->...a", J, az, bz)
    return az + sign * bz, as_ + sign * bs + 0.5 * sign * br


def _field(kind, r2, s2, p0, p1, p2):
    if kind == 0:
        t = r2 + p0
        with np.errstate(divide="ignore"):
            return p2 * (t * t + 16.0 * s2) ** (-p1)
    t = 1.0 - (r2 * r2 + 16.0 * s2) / p0
    return p2 * np.where(t > 0, t, 0.0) ** p1


def _tilde(xz, xs, cz, cs, J, kind, p0, p1, p2, partition, r_c, plateau):
    yz, ys = _prod(-cz, -cs, xz, xs, 1.0, J)
    r2 = np.sum(yz * yz, axis=-1)
    s2 = np.sum(ys * ys, axis=-1)
    val = _field(kind, r2, s2, p0, p1, p2)
    if partition:
        w = smooth_cutoff(np.sqrt(np.sqrt(r2 * r2 + 16.0 * s2)) / r_c, plateau)
        val = np.where(w < 1.0, val * (1.0 - w), 0.0)
    return val


def sym_avg(gz, gs, hz, hs, J, cz, cs, kind, p0, p1, p2, partition, r_c, plateau):
    acc = 0.0
    for sign in (1.0, -1.0):
        xz, xs = _prod(gz, gs, hz, hs, sign, J)
        acc = acc + _tilde(xz, xs, cz, cs, J, kind, p0, p1, p2, partition, r_c, plateau)
    return 0.5 * acc


def far_part(gz, gs, xz, xs, rho, J, cz, cs, kind, p0, p1, p2, gamma, kexp, r_c, plateau):
    w = smooth_cutoff(rho / r_c, plateau)
    yz, ys = _prod(-cz, -cs, xz, xs, 1.0, J)
    r2 = np.sum(yz * yz, axis=-1)
    s2 = np.sum(ys * ys, axis=-1)
    val = _field(kind, r2, s2, p0, p1, p2)
    if gamma != 0.0:
        val = val * rho ** gamma
    yz, ys = _prod(-gz, -gs, xz, xs, 1.0, J)
    kn4 = np.sum(yz * yz, axis=-1) ** 2 + 16.0 * np.sum(ys * ys, axis=-1)
    return np.where(w > 0, -val * w * kn4 ** (-kexp / 4.0), 0.0)
