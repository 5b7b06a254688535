"""Selection between the compiled kernels and the numpy fallback.

The extension is imported once; ``HTFRAC_BACKEND=python`` forces the
fallback (handy for benchmarks and for checking that both agree).
"""
from __future__ import annotations

import os

import numpy as np

from . import _pykernels

BACKEND = "python"
_impl = _pykernels
if os.environ.get("HTFRAC_BACKEND", "").lower() != "python":
    try:
        from . import _ckernels as _impl  # noqa: F811
        BACKEND = "cython"
    except ImportError:  # pragma: no cover - depends on the build
        _impl = _pykernels


def backend() -> str:
    return BACKEND


def implementation(name: str | None = None):
    """Kernel module by name (``cython``/``python``) or the active one."""
    if name is None:
        return _impl
    if name == "python":
        return _pykernels
    from . import _ckernels
    return _ckernels


_KINDS = {"profile": 0, "bump": 1}


class _Plan:
    def __init__(self, impl, spec, kernel, partition, r_c, plateau):
        kind, p0, p1, p2, center = kernel
        self.impl = impl
        self.J = np.ascontiguousarray(spec.J)
        self.kind = _KINDS[kind]
        self.p = (float(p0), float(p1), float(p2))
        self.cz = np.ascontiguousarray(center.z)
        self.cs = np.ascontiguousarray(center.sigma)
        self.partition = int(bool(partition))
        self.r_c = float(r_c) if partition else 1.0
        self.plateau = float(plateau)

    def avg(self, gz, gs, hz, hs):
        shape = hz.shape[:-1]
        hz = np.ascontiguousarray(hz.reshape(-1, hz.shape[-1]))
        hs = np.ascontiguousarray(hs.reshape(-1, hs.shape[-1]))
        out = self.impl.sym_avg(np.ascontiguousarray(gz), np.ascontiguousarray(gs), hz, hs,
                                self.J, self.cz, self.cs, self.kind, *self.p, self.partition,
                                self.r_c, self.plateau)
        return np.asarray(out).reshape(shape)

    def sym_diff(self, gz, gs, hz, hs, ug):
        return ug - self.avg(gz, gs, hz, hs)

    def far(self, gz, gs, xz, xs, rho, gamma, s):
        shape = xz.shape[:-1]
        xz = np.ascontiguousarray(xz.reshape(-1, xz.shape[-1]))
        xs = np.ascontiguousarray(xs.reshape(-1, xs.shape[-1]))
        rho = np.ascontiguousarray(np.broadcast_to(rho, shape).reshape(-1), dtype=float)
        kexp = self.J.shape[2] + 2 * self.J.shape[0] + 2 * s
        out = self.impl.far_part(np.ascontiguousarray(gz), np.ascontiguousarray(gs), xz, xs,
                                 rho, self.J, self.cz, self.cs, self.kind, *self.p, float(gamma),
                                 float(kexp), self.r_c, self.plateau)
        return np.asarray(out).reshape(shape)


def plan(spec, u, partition, r_c, plateau, impl=None):
    """Fused evaluator for fields with a known closed form, else ``None``."""
    if u.kernel is None or spec.k < 1 or spec.m > 16 or spec.k > 16:
        return None
    if u.kernel[0] not in _KINDS:
        return None
    return _Plan(impl or _impl, spec, u.kernel, partition, r_c, plateau)
