"""The hypersingular operator, its tail functional and horizontal derivatives.

``L_s u(g) = 1/2 int [2u(g) - u(gh) - u(gh^-1)] |h|^(-Q-2s) dh``.

The symmetrized difference is O(rho^2) at the identity for C^2 fields, so
the integral converges absolutely and no principal value is taken. It agrees
with ``lim_{eps->0} int_{|h|>eps} (u(g) - u(gh)) |h|^(-Q-2s) dh`` because the
two truncated integrals coincide for every eps (``h -> h^-1`` preserves both
the kernel and the annulus).

Evaluation splits the field as ``u = u (1 - w) + u w`` where ``w`` is a smooth
cutoff around the field center ``c`` of radius ``|c^-1 g| / 2``. The first
part is integrated in polar coordinates around ``g``; the second, which
vanishes near ``g``, is integrated in polar coordinates around ``c``, so a
peaked or singular center never has to be resolved by the ``g``-centered
rule.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

import numpy as np

from . import _dispatch
from .errors import (DivergenceError, InvalidInputError, PreconditionError,
                     UnsupportedFeatureError)
from .fields import ScalarField, sup_estimate
from .groups import GroupPoint, GroupSpec, _check
from .haar import sample_sphere, sigma_Q, sphere_rule
from .polar import Stratum, integrate_mc, integrate_tensor, split_segments
from .quadrature import QuadratureConfig, seed_sequence, smooth_cutoff

CUTOFF_PLATEAU = 0.25
EPS = np.finfo(float).eps


@dataclass
class OperatorResult:
    value: float
    error_estimate: float
    breakdown: dict
    method: str = ""
    diagnostics: dict = field(default_factory=dict)

    def as_dict(self) -> dict:
        return {"value": self.value, "error_estimate": self.error_estimate,
                "breakdown": dict(self.breakdown), "method": self.method}


def resolve_mode(spec: GroupSpec, quad: QuadratureConfig) -> str:
    tensor_ok = spec.m == 2 and spec.k == 1
    if quad.mode == "tensor":
        if not tensor_ok:
            raise UnsupportedFeatureError("tensor mode is only available on heisenberg:1")
        return "tensor"
    if quad.mode == "monte_carlo":
        return "monte_carlo"
    return "tensor" if tensor_ok else "monte_carlo"


def _check_s(s):
    if not 0 < s < 1:
        raise InvalidInputError(f"s must lie in (0, 1), got {s}")


# --------------------------------------------------------------------------
# geometry of one evaluation

@dataclass
class _Layout:
    d: float            # |c^-1 g|
    L: float            # field scale
    partition: bool
    r_c: float
    delta_in: float
    r_max: float
    compact: bool


def _layout(u: ScalarField, g: GroupPoint, quad: QuadratureConfig) -> _Layout:
    spec = u.spec
    d = float(u.distance_from_center(g.z[None], g.sigma[None])[0])
    L = u.scale
    partition = d > L or (not u.bounded and d > 0)
    r_c = 0.5 * d
    if quad.split_radius is not None:
        delta_in = quad.split_radius
    else:
        delta_in = 0.1 * (d if (partition and d < L) else max(L, d))
    if partition:
        delta_in = min(delta_in, 0.2 * d)
    compact = u.support_radius is not None
    if quad.r_max is not None:
        r_max = quad.r_max
    elif compact:
        r_max = 2.0 * (d + u.support_radius)
    else:
        r_max = 200.0 * max(L, d)
    if not delta_in < r_max:
        raise InvalidInputError("split radius must be smaller than the truncation radius")
    return _Layout(d, L, partition, r_c, delta_in, r_max, compact)


class _Integrands:
    """Closures evaluating the two parts of the split at polar nodes."""

    def __init__(self, spec, u: ScalarField, g: GroupPoint, s: float, lay: _Layout):
        self.spec, self.u, self.s, self.lay = spec, u, s, lay
        self.gz, self.gs = g.z, g.sigma
        with np.errstate(divide="ignore"):
            self.ug = u.at(g)
        self.Q = spec.Q
        self.fast = _dispatch.plan(spec, u, lay.partition, lay.r_c, CUTOFF_PLATEAU)

    def u_tilde(self, z, s):
        u, lay = self.u, self.lay
        if not lay.partition:
            return u(z, s)
        w = smooth_cutoff(u.distance_from_center(z, s) / lay.r_c, CUTOFF_PLATEAU)
        out = np.zeros(w.shape)
        keep = w < 1.0
        if np.any(keep):
            out[keep] = u(z[keep], s[keep]) * (1.0 - w[keep])
        return out

    def sym_diff(self, rho, oz, os_):
        hz = rho[:, None] * oz
        hs = (rho * rho)[:, None] * os_
        if self.fast is not None:
            return self.fast.sym_diff(self.gz, self.gs, hz, hs, self.ug)
        tot = 2.0 * self.ug
        for sg in (1.0, -1.0):
            xz, xs = self.spec.product(self.gz, self.gs, sg * hz, sg * hs)
            tot = tot - self.u_tilde(xz, xs)
        return 0.5 * tot

    def avg_tilde(self, rho, oz, os_):
        """``1/2 [u~(g h) + u~(g h^-1)]`` at ``h = delta_rho omega``."""
        hz = rho[:, None] * oz
        hs = (rho * rho)[:, None] * os_
        if self.fast is not None:
            return self.fast.avg(self.gz, self.gs, hz, hs)
        tot = 0.0
        for sg in (1.0, -1.0):
            xz, xs = self.spec.product(self.gz, self.gs, sg * hz, sg * hs)
            tot = tot + self.u_tilde(xz, xs)
        return 0.5 * tot

    def inner(self, rho_floor):
        def F(rho, oz, os_):
            r = np.maximum(rho, rho_floor)
            return self.sym_diff(r, oz, os_) / (r * r)
        return F

    def outer(self, rho, oz, os_):
        return self.sym_diff(rho, oz, os_)

    def far(self, rho, oz, os_):
        """``-u(h') w(h') |g^-1 h'|^(-Q-2s) rho^gamma`` at ``h' = c delta_rho omega``."""
        u, lay = self.u, self.lay
        c = u.center
        hz = rho[:, None] * oz
        hs = (rho * rho)[:, None] * os_
        xz, xs = self.spec.product(c.z, c.sigma, hz, hs)
        if self.fast is not None:
            return self.fast.far(self.gz, self.gs, xz, xs, rho, u.center_exponent, self.s)
        w = smooth_cutoff(rho / lay.r_c, CUTOFF_PLATEAU)
        yz, ys = self.spec.product(-self.gz, -self.gs, xz, xs)
        K = self.spec.norm4(yz, ys) ** (-(self.Q + 2 * self.s) / 4)
        with np.errstate(divide="ignore", invalid="ignore"):
            val = u(xz, xs) * rho ** u.center_exponent
        return -np.where(w > 0, val * w * K, 0.0)

    def sphere_average(self, R, mode, quad, label):
        """``int_S 1/2 [u(g delta_R w) + u(g delta_R w^-1)] d sigma`` (u~ part)."""
        spec = self.spec
        if mode == "tensor":
            oz, os_, ow = sphere_rule(spec, *quad.angular_nodes)
        else:
            rng = np.random.default_rng(seed_sequence(quad.seed, label, "tailfit", R))
            oz, os_ = sample_sphere(spec, 8192, rng)
            ow = np.full(len(oz), sigma_Q(spec) / len(oz))
        return float(self.avg_tilde(np.full(len(oz), R), oz, os_) @ ow)


def _strata(ig: _Integrands, lay: _Layout, s: float, spec: GroupSpec):
    """Strata of the g-centered part and (if split) the center part."""
    b0 = lay.delta_in / 16.0
    strata = [Stratum(0.0, b0, 1 - 2 * s, ig.inner(0.05 * b0), "inner")]
    breaks = [b0, lay.delta_in, lay.r_max]
    band = None
    if lay.partition:
        band = (lay.d - 1.05 * lay.r_c, lay.d + 1.05 * lay.r_c)
        breaks += [x for x in band if b0 < x < lay.r_max]
    breaks = sorted(set(breaks))

    def dens(r):
        if band is not None and band[0] <= r <= band[1]:
            return 3.0
        return 3.0 if r < lay.delta_in else 1.0

    for lo, hi, de in split_segments(breaks, dens):
        inband = band is not None and band[0] <= 0.5 * (lo + hi) <= band[1]
        strata.append(Stratum(lo, hi, -1 - 2 * s, ig.outer,
                              "inner" if hi <= lay.delta_in else "outer",
                              density=de, angular=(3, 2) if inband else (1, 1)))
    if lay.partition:
        gam = ig.u.center_exponent
        p = spec.Q - 1 - gam
        rb = lay.r_c / 64.0
        strata.append(Stratum(0.0, rb, p, ig.far, "far_field"))
        strata.append(Stratum(rb, lay.r_c, p, ig.far, "far_field", density=2.0))
    return strata


def _tail_correction(ig: _Integrands, lay: _Layout, s: float, mode, quad, label):
    """Analytic part beyond r_max and its uncertainty."""
    u = ig.u
    sQ = sigma_Q(ig.spec)
    R = lay.r_max
    const = ig.ug * sQ * R ** (-2 * s) / (2 * s)
    if lay.compact and quad.r_max is None:
        return const, 0.0
    beta = u.decay_exponent
    if beta is not None:
        if not beta > -2 * s:
            raise DivergenceError("decay exponent too small for the kernel to be integrable")
        S1 = ig.sphere_average(R, mode, quad, label)
        S2 = ig.sphere_average(0.5 * R, mode, quad, label)
        C1 = S1 * R ** beta
        C2 = S2 * (0.5 * R) ** beta
        corr = C1 * R ** (-2 * s - beta) / (2 * s + beta)
        rel = abs(C1 - C2) / max(abs(C1), 1e-300) if C1 != 0 else 0.0
        return const - corr, abs(corr) * rel
    bound = u.bound if u.bound is not None else 2.0 * sup_estimate(u, lay.r_max)
    return const, bound * sQ * R ** (-2 * s) / (2 * s)


def _check_field(u: ScalarField, g: GroupPoint, s: float):
    if not u.smooth:
        raise PreconditionError(f"{u.name} is not flagged smooth; L_s needs C^2 near g")
    if not u.bounded and u.decay_exponent is None:
        raise PreconditionError(f"{u.name} is unbounded and carries no decay metadata")
    if not u.bounded:
        d = float(u.distance_from_center(g.z[None], g.sigma[None])[0])
        if d == 0.0:
            raise PreconditionError(f"{u.name} is singular at the evaluation point")
    if u.decay_exponent is not None and not u.decay_exponent > -2 * s:
        raise DivergenceError("u grows too fast for the kernel to be integrable")


def apply_Ls(spec: GroupSpec, u: ScalarField, g: GroupPoint, s: float,
             quad: QuadratureConfig | None = None) -> OperatorResult:
    """Evaluate ``L_s u(g)``.

    Tensor mode (heisenberg:1) runs the rule at two resolutions and reports
    the finer value with the difference as error estimate. Monte Carlo mode
    reports the stratified standard error.
    """
    quad = quad or QuadratureConfig()
    _check(spec, g)
    _check_s(s)
    if u.spec != spec:
        raise InvalidInputError("field lives on a different group")
    if u.constant is not None:
        return OperatorResult(0.0, 0.0, {"inner": 0.0, "outer": 0.0, "tail": 0.0,
                                         "far_field": 0.0}, "exact")
    _check_field(u, g, s)
    mode = resolve_mode(spec, quad)
    lay = _layout(u, g, quad)
    ig = _Integrands(spec, u, g, s, lay)
    label = ("apply_Ls", u.name, g.z.tobytes(), g.sigma.tobytes(), s)
    tail, tail_err = _tail_correction(ig, lay, s, mode, quad, label)
    strata = _strata(ig, lay, s, spec)
    if mode == "tensor":
        coarse = integrate_tensor(spec, strata, quad, 1.0)
        fine = integrate_tensor(spec, strata, quad, 1.5)
        parts = {t: fine.get(t, 0.0) for t in ("inner", "outer", "far_field")}
        disc = abs(sum(fine.values()) - sum(coarse.values()))
        err = disc
        diag = {"coarse": sum(coarse.values()) + tail}
    else:
        res, stats = integrate_mc(spec, strata, quad, label)
        parts = {t: res.get(t, (0.0, 0.0))[0] for t in ("inner", "outer", "far_field")}
        err = 2.0 * math.sqrt(sum(v[1] ** 2 for v in res.values()))
        diag = {"strata": len(stats), "stderr": err / 2.0}
    breakdown = {"inner": parts["inner"], "outer": parts["outer"], "tail": tail,
                 "far_field": parts["far_field"]}
    value = breakdown["inner"] + breakdown["outer"] + breakdown["tail"] + breakdown["far_field"]
    scale_terms = abs(ig.ug) * sigma_Q(spec) * lay.delta_in ** (-2 * s) / (2 * s)
    floor = 64 * EPS * (scale_terms + abs(breakdown["far_field"]) + abs(value))
    err = err + tail_err + floor
    diag.update({"mode": mode, "delta_in": lay.delta_in, "r_max": lay.r_max,
                 "partition": lay.partition, "tail_error": tail_err})
    return OperatorResult(float(value), float(err), breakdown, mode, diag)


# --------------------------------------------------------------------------
# tail functional

@dataclass
class TailResult:
    value: float
    error_estimate: float
    integral: float        # R^(-2s) T
    method: str = ""


def _tail_pieces(spec, u: ScalarField, g0: GroupPoint, radii, s, quad, mode):
    """Non-negative pieces of ``int_{|w|>R} u(g0 w) |w|^(-Q-2s) dw`` for sorted radii.

    Returns the integrals between consecutive radii, the remainder beyond
    the largest radius that does not depend on R, and error estimates. When
    every radius stays below half the distance to the field center the
    center part is split off as in :func:`apply_Ls`; all pieces remain
    non-negative for ``u >= 0``.
    """
    radii = sorted(radii)
    d = float(u.distance_from_center(g0.z[None], g0.sigma[None])[0])
    L = u.scale
    partition = d > L and radii[-1] < 0.5 * d
    r_max = quad.r_max or max(200.0 * max(L, d), 4.0 * radii[-1])
    compact = u.support_radius is not None
    if compact:
        r_max = max(2.0 * (d + u.support_radius), 1.01 * radii[-1])
    lay = _Layout(d, L, partition, 0.5 * d, 0.1 * max(L, d), r_max, compact)
    with np.errstate(divide="ignore"):
        ig = _Integrands(spec, u, g0, s, lay)
    F = ig.avg_tilde

    edges = list(radii) + [r_max]
    band = (d - 1.05 * lay.r_c, d + 1.05 * lay.r_c) if partition else (0.5 * d, 2.0 * d)
    strata = []
    for i, (lo, hi) in enumerate(zip(edges[:-1], edges[1:])):
        segs = [lo] + [x for x in band if lo < x < hi] + [hi]
        for a, b in zip(segs[:-1], segs[1:]):
            inband = d > 0 and band[0] <= 0.5 * (a + b) <= band[1]
            strata.append(Stratum(a, b, -1 - 2 * s, F, f"piece{i}",
                                  density=3.0 if inband else 1.0,
                                  angular=(3, 2) if inband else (1, 1)))
    if partition:
        p = spec.Q - 1 - u.center_exponent
        rb = lay.r_c / 64.0
        neg = lambda rho, oz, os_: -ig.far(rho, oz, os_)
        strata.append(Stratum(0.0, rb, p, neg, "far_field"))
        strata.append(Stratum(rb, lay.r_c, p, neg, "far_field", density=2.0))
    label = ("tail", u.name, g0.z.tobytes(), g0.sigma.tobytes(), s, tuple(radii))
    tags = [f"piece{i}" for i in range(len(radii))] + ["far_field"]
    if mode == "tensor":
        fine = integrate_tensor(spec, strata, quad, 1.5)
        coarse = integrate_tensor(spec, strata, quad, 1.0)
        vals = {t: max(fine.get(t, 0.0), 0.0) for t in tags}
        errs = {t: abs(fine.get(t, 0.0) - coarse.get(t, 0.0)) for t in tags}
    else:
        res, _ = integrate_mc(spec, strata, quad, label)
        vals = {t: max(res.get(t, (0.0, 0.0))[0], 0.0) for t in tags}
        errs = {t: 2 * res.get(t, (0.0, 0.0))[1] for t in tags}
    pieces = [vals[t] for t in tags[:-1]]
    perr = [errs[t] for t in tags[:-1]]
    # beyond r_max
    if compact and r_max >= d + u.support_radius:
        rest, rest_err = 0.0, 0.0
    elif u.decay_exponent is not None:
        beta = u.decay_exponent
        if mode == "tensor":
            oz, os_, ow = sphere_rule(spec, *quad.angular_nodes)
        else:
            rng = np.random.default_rng(seed_sequence(quad.seed, *label, "fit"))
            oz, os_ = sample_sphere(spec, 8192, rng)
            ow = np.full(len(oz), sigma_Q(spec) / len(oz))
        C1 = float(F(np.full(len(oz), r_max), oz, os_) @ ow) * r_max ** beta
        C2 = float(F(np.full(len(oz), 0.5 * r_max), oz, os_) @ ow) * (0.5 * r_max) ** beta
        rest = max(C1, 0.0) * r_max ** (-2 * s - beta) / (2 * s + beta)
        rest_err = rest * abs(C1 - C2) / max(abs(C1), 1e-300)
    else:
        bound = u.bound if u.bound is not None else 2.0 * sup_estimate(u, r_max)
        rest = 0.0
        rest_err = bound * sigma_Q(spec) * r_max ** (-2 * s) / (2 * s)
    return pieces, perr, rest + vals["far_field"], rest_err + errs["far_field"]


def tail_profile(spec: GroupSpec, u: ScalarField, g0: GroupPoint, radii, s: float,
                 quad: QuadratureConfig | None = None):
    """Tails ``T(u; g0, R)`` for several radii from one set of nested pieces.

    Partial sums run from the outside in, so ``R^(-2s) T`` is exactly
    non-increasing in R whenever the pieces are non-negative.
    """
    quad = quad or QuadratureConfig()
    _check(spec, g0)
    _check_s(s)
    radii = sorted(float(r) for r in radii)
    if radii[0] <= 0:
        raise InvalidInputError("tail radii must be positive")
    if u.constant is not None and u.constant == 0.0:
        return [TailResult(0.0, 0.0, 0.0, "exact") for _ in radii]
    if not u.bounded and u.decay_exponent is None:
        raise PreconditionError("tail needs a bounded field or decay metadata")
    if u.decay_exponent is not None and not u.decay_exponent > -2 * s:
        raise DivergenceError("tail diverges: decay exponent too small")
    mode = resolve_mode(spec, quad)
    pieces, errs, rest, rest_err = _tail_pieces(spec, u, g0, radii, s, quad, mode)
    out = []
    acc, acc_err = rest, rest_err
    cum = []
    for p, e in zip(reversed(pieces), reversed(errs)):
        acc = acc + p
        acc_err = acc_err + e
        cum.append((acc, acc_err))
    cum.reverse()
    for R, (I, E) in zip(radii, cum):
        out.append(TailResult(R ** (2 * s) * I, R ** (2 * s) * E, I, mode))
    return out


def tail(spec: GroupSpec, u: ScalarField, g0: GroupPoint, R: float, s: float,
         quad: QuadratureConfig | None = None) -> TailResult:
    """``T(u; g0, R) = R^(2s) int_{|g0^-1 h| > R} u(h) |g0^-1 h|^(-Q-2s) dh``."""
    return tail_profile(spec, u, g0, [R], s, quad)[0]


# --------------------------------------------------------------------------
# horizontal derivatives

def _fd_step(spec, g: GroupPoint, order: int) -> float:
    gn = float(spec.gauge_arrays(g.z, g.sigma))
    # one Richardson level on a central difference: error h^4 vs eps/h^order
    h = EPS ** (1.0 / (4 + order)) * max(1.0, gn)
    scale = max(1.0, float(np.max(np.abs(np.concatenate([g.z, g.sigma])))) if g.z.size else 1.0)
    if h < 64 * EPS * scale:
        warnings.warn("finite-difference step underflows the coordinate scale", _precision())
    return h


def _precision():
    from .errors import PrecisionWarning
    return PrecisionWarning


def _along(spec, u, g: GroupPoint, j: int, t):
    """u(g o (t e_j, 0)) for an array of t."""
    t = np.asarray(t, float)
    hz = np.zeros(t.shape + (spec.m,))
    hz[..., j] = t
    hs = np.zeros(t.shape + (spec.k,))
    z, s = spec.product(g.z, g.sigma, hz, hs)
    return u(z, s)


def horizontal_derivative(spec: GroupSpec, u, g: GroupPoint, j: int, step: float | None = None):
    """``X_j u(g) = d/dt u(g o (t e_j, 0))`` at t = 0 (central difference + Richardson)."""
    _check(spec, g)
    if not 0 <= j < spec.m:
        raise InvalidInputError(f"horizontal index {j} out of range")
    h = step or _fd_step(spec, g, 1)
    v = _along(spec, u, g, j, np.array([h, -h, h / 2, -h / 2]))
    d1 = (v[0] - v[1]) / (2 * h)
    d2 = (v[2] - v[3]) / h
    return float((4 * d2 - d1) / 3)


def second_horizontal(spec: GroupSpec, u, g: GroupPoint, j: int, step: float | None = None):
    """``X_j^2 u(g)``; the curve ``t -> g o (t e_j, 0)`` is a one-parameter subgroup."""
    h = step or _fd_step(spec, g, 2)
    v = _along(spec, u, g, j, np.array([0.0, h, -h, h / 2, -h / 2]))
    d1 = (v[1] - 2 * v[0] + v[2]) / (h * h)
    d2 = (v[3] - 2 * v[0] + v[4]) / (h * h / 4)
    return float((4 * d2 - d1) / 3)


def sub_laplacian(spec: GroupSpec, u, g: GroupPoint, step: float | None = None) -> float:
    """``sum_j X_j^2 u(g)`` (the negative of the sub-Laplacian ``-sum X_j^2``)."""
    _check(spec, g)
    return float(sum(second_horizontal(spec, u, g, j, step) for j in range(spec.m)))
