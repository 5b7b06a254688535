"""Verification suites and the concurrent batch runner.

Each suite expands into independent checks. A check owns a sub-seed
derived from the run seed and its id, runs in a worker thread, and returns
check records; the report is assembled in id order, so neither scheduling
nor the worker count changes its bytes. A check that raises is recorded as
a failure and the batch goes on.
"""
from __future__ import annotations

import math
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np
from scipy import integrate

from . import __version__, forms, lorentz, yamabe
from .config import RunConfig
from .fields import bump, constant, gauge_power, power, product, rescale, translate, zero
from .groups import GroupSpec, dilate, group_from_id, inverse, multiply, validate_htype
from .haar import gauge_annulus_integral, shell_volume, unit_ball_volume
from .heat import HeatKernelQuery, heat_kernel, riesz_norm_kernel
from .limits import limit_points, one_limit, zero_limit
from .operator import apply_Ls
from .quadrature import QuadratureConfig, seed_sequence
from .report import CheckRecord, VerificationReport
from .special import euclidean_riesz_constant, kernel_constants, log_gamma

ANCHORS = dict(yamabe.ANCHORS)
ANCHORS.update({
    "law": "group law (z,s)(z',s') = (z+z', s+s'+<J z, z'>/2)",
    "htype": "H-type structure maps J_a J_b + J_b J_a = -2 delta_ab I",
    "dilation": "dilations are automorphisms and the gauge is homogeneous",
    "polar": "polar coordinates dg = rho^(Q-1) d rho d sigma",
    "gamma": "log-Gamma identities",
    "riesz_eucl": "classical Euclidean Riesz kernel",
    "riesz": "Riesz-type kernel from the heat semigroup",
    "gauge_fn": "the Riesz-type kernel is not a function of the gauge",
    "heat": "heat kernel of the sub-Laplacian",
    "fundamental": "fundamental solution of the conformal sub-Laplacian",
    "invariance": "left invariance and dilation covariance of the operator",
    "scale": "scale invariance of the Gagliardo seminorm",
    "limits": "s -> 0 and s -> 1 limits of the operator",
})


@dataclass(frozen=True)
class Check:
    id: str
    suite: str
    fn: object          # fn(spec, quad) -> iterable of CheckRecord


def sub_seed(seed: int, check_id: str) -> int:
    """Deterministic per-check seed (SeedSequence keyed by the check id)."""
    return int(seed_sequence(seed, "check", check_id).generate_state(1, np.uint32)[0])


def _rec(id, anchor, inputs, value, tol=None, ok=None, err=None, prov="closed-form", msg=""):
    status = "diagnostic" if ok is None else ("pass" if ok else "fail")
    return CheckRecord(id, ANCHORS.get(anchor, anchor), inputs, value, tol, status, err, prov, msg)


# --------------------------------------------------------------------------
# group suite

def _rand_points(spec, n, rng, spread=3.0):
    """Points with coordinates of log-uniform size in [1e-3, 1e3] times random signs."""
    mag_z = 10.0 ** rng.uniform(-spread, spread, (n, 1))
    mag_s = mag_z ** 2 * 10.0 ** rng.uniform(-1, 1, (n, 1))
    z = rng.standard_normal((n, spec.m)) * mag_z
    s = rng.standard_normal((n, spec.k)) * mag_s
    return z, s


def _rel(a, b, scale):
    return float(np.max(np.abs(a - b) / scale[:, None])) if a.size else 0.0


def group_algebra(spec: GroupSpec, n: int = 1000, seed: int = 0, tol: float = 1e-12):
    """Associativity, identity, inverse, automorphism and homogeneity on random triples.

    Errors are relative to the natural size of each coordinate: ``|z|`` for
    horizontal and ``|z|^2 + |sigma|`` for vertical components.
    """
    rng = np.random.default_rng(seed_sequence(seed, "group-algebra", spec.name))
    P = _rand_points(spec, n, rng)
    Qp = _rand_points(spec, n, rng)
    R = _rand_points(spec, n, rng)

    def size(*pts):
        zs = sum(np.linalg.norm(p[0], axis=1) for p in pts)
        ss = sum(np.linalg.norm(p[1], axis=1) for p in pts)
        return zs + 1e-300, zs ** 2 + ss + 1e-300

    def err(a, b, *pts):
        sz, ss = size(*pts)
        return max(_rel(a[0], b[0], sz), _rel(a[1], b[1], ss))

    mul = lambda a, b: spec.product(a[0], a[1], b[0], b[1])
    inv = lambda a: (-a[0], -a[1])
    inputs = {"group": spec.name, "cases": n}
    out = []
    e = err(mul(mul(P, Qp), R), mul(P, mul(Qp, R)), P, Qp, R)
    out.append(_rec("associativity", "law", inputs, e, tol, e <= tol))
    ident = (np.zeros_like(P[0]), np.zeros_like(P[1]))
    e = max(err(mul(P, ident), P, P), err(mul(ident, P), P, P))
    out.append(_rec("identity", "law", inputs, e, tol, e <= tol))
    e = max(err(mul(P, inv(P)), ident, P), err(mul(inv(P), P), ident, P))
    out.append(_rec("inverse", "law", inputs, e, tol, e <= tol))
    lam = 10.0 ** rng.uniform(-3, 3, (n, 1))
    D = lambda a: (lam * a[0], lam ** 2 * a[1])
    dl = D(mul(P, Qp))
    dr = mul(D(P), D(Qp))
    sz, ss = size(P, Qp)
    e = max(_rel(dl[0], dr[0], lam[:, 0] * sz), _rel(dl[1], dr[1], lam[:, 0] ** 2 * ss))
    out.append(_rec("automorphism", "dilation", inputs, e, tol, e <= tol))
    g = spec.gauge_arrays(*P)
    gl = spec.gauge_arrays(*D(P))
    e = float(np.max(np.abs(gl - lam[:, 0] * g) / (lam[:, 0] * g)))
    out.append(_rec("homogeneity", "dilation", inputs, e, tol, e <= tol))
    gi = spec.gauge_arrays(*inv(P))
    e = float(np.max(np.abs(gi - g) / g))
    out.append(_rec("gauge_symmetry", "dilation", inputs, e, tol, e <= tol))
    # triangle inequality, checked empirically on moderate points
    A = _rand_points(spec, 100 * n, rng, 1.0)
    B = _rand_points(spec, 100 * n, rng, 1.0)
    lhs = spec.gauge_arrays(*mul(A, B))
    rhs = spec.gauge_arrays(*A) + spec.gauge_arrays(*B)
    worst = float(np.max(lhs / rhs))
    out.append(_rec("triangle", "dilation", dict(inputs, cases=100 * n), worst, "<= 1 + 1e-12",
                    worst <= 1 + 1e-12, msg="max |pq| / (|p| + |q|)"))
    return out


def _group_checks(spec, quad):
    out = validate_htype(spec).records
    for r in out:
        r.id = r.id.removeprefix("group.")
    out += group_algebra(spec, 1000, quad.seed)
    if spec.name == "heisenberg:1":
        p = multiply(spec, spec.point((1.0, 0.0), (0.0,)), spec.point((0.0, 1.0), (0.0,)))
        ok = np.allclose(p.z, (1, 1)) and abs(p.sigma[0] - 0.5 * spec.J[0][1, 0]) < 1e-15
        out.append(_rec("example.product", "law", {"p": [[1, 0], [0]], "q": [[0, 1], [0]]},
                        p.as_list(), "exact", ok))
    sh = shell_volume(spec)
    mc = unit_ball_volume(spec, quad)
    z = abs(mc.value - sh.value) / mc.stderr
    out.append(_rec("ball_volume", "polar", {"group": spec.name}, {"quadrature": sh.value,
                    "monte_carlo": mc.value}, "3 SE", z <= 3, mc.stderr, "monte_carlo",
                    f"z-score {z:.3g}"))
    Q = spec.Q
    for gam in (0.0, Q / 2, float(Q), Q + 1.0):
        a = gauge_annulus_integral(spec, gam, 0.5, 2.0, quad)
        tol = max(1e-6, 3 * a.stderr)
        out.append(_rec(f"annulus.gamma{gam:g}", "polar",
                        {"group": spec.name, "gamma": gam, "r": 0.5, "R": 2.0},
                        {"numeric": a.numeric, "closed_form": a.closed_form}, tol,
                        abs(a.numeric - a.closed_form) <= tol, a.stderr, "monte_carlo"))
    return out


# --------------------------------------------------------------------------
# kernels suite

def _kernel_checks(spec, quad, s):
    out = []
    inp = {"group": spec.name, "s": s}
    e1 = abs(log_gamma(0.5) - 0.5 * math.log(math.pi))
    xs = np.linspace(0.1, 30.0, 25)
    e2 = max(abs(log_gamma(x + 1) - log_gamma(x) - math.log(x)) for x in xs)
    out.append(_rec("log_gamma", "gamma", {"x": xs.tolist()}, max(e1, e2), 1e-13,
                    max(e1, e2) <= 1e-13, msg="half-integer value and recurrence"))
    for n in (1, 2, 3):
        from .groups import euclidean
        E = euclidean(n)
        h = E.point(np.linspace(0.4, 0.9, n))
        r = riesz_norm_kernel(E, h, s, quad)
        cf = euclidean_riesz_constant(n, s) * float(h.z @ h.z) ** (-(n + 2 * s) / 2)
        rel = abs(r.nested - cf) / cf
        out.append(_rec(f"riesz.euclidean{n}", "riesz_eucl", {"n": n, "s": s, "x": h.as_list()},
                        {"nested": r.nested, "closed_form": cf}, 1e-6, rel <= 1e-6, r.nested_error,
                        "quadrature", f"relative gap {rel:.3g}"))
    if spec.k not in (1, 3):
        if spec.k != 0:
            out.append(_rec("riesz.unsupported", "riesz", inp, None,
                            msg=f"heat/Riesz kernels need k in (1, 3), got {spec.k}"))
        return out
    kc = kernel_constants(spec.m, spec.k, s)
    out.append(_rec("constants", "fundamental", inp, {"C_fundamental": kc.C_fundamental,
                                                     "A_intertwine": kc.A_intertwine}))
    e = np.eye(spec.m)[0]
    f = np.eye(spec.k)[0]
    pts = [spec.point(0.8 * e, 0.1 * f), spec.point(0.3 * e, -0.5 * f), spec.point(0 * e, 0.3 * f)]
    for j, h in enumerate(pts):
        r = riesz_norm_kernel(spec, h, s, quad)
        tol = max(1e-8, 5 * math.hypot(r.nested_error, r.reduced_error))
        out.append(_rec(f"riesz.agreement.{j}", "riesz", dict(inp, h=h.as_list()),
                        {"nested": r.nested, "reduced": r.reduced}, tol,
                        abs(r.nested - r.reduced) <= tol * max(1.0, abs(r.reduced)), r.error,
                        "quadrature"))
        lam = 2.5
        r2 = riesz_norm_kernel(spec, dilate(spec, lam, h), s, quad)
        rel = abs(r2.value * lam ** (spec.Q + 2 * s) / r.value - 1)
        out.append(_rec(f"riesz.homogeneity.{j}", "riesz", dict(inp, h=h.as_list(), lam=lam), rel,
                        1e-8, rel <= 1e-8, prov="quadrature"))
        ri = riesz_norm_kernel(spec, inverse(spec, h), s, quad)
        rel = abs(ri.value / r.value - 1)
        out.append(_rec(f"riesz.inverse.{j}", "riesz", dict(inp, h=h.as_list()), rel, 1e-10,
                        rel <= 1e-10, prov="quadrature"))
    a = riesz_norm_kernel(spec, spec.point(e, 0 * f), s, quad).value
    b = riesz_norm_kernel(spec, spec.point(0 * e, 0.25 * f), s, quad).value
    gap = abs(a - b) / max(a, b)
    out.append(_rec("riesz.non_gauge", "gauge_fn", dict(inp, c=1.0), {"horizontal": a,
                    "vertical": b, "gap": gap}, "> 0.01", gap > 0.01, prov="quadrature"))
    # heat kernel: parabolic scaling, evenness in sigma, 1-D oracle at the origin
    g = spec.point(0.7 * e, 0.2 * f)
    for branch in (1, -1):
        q1 = HeatKernelQuery(spec, g, 0.7, s, branch)
        k1 = heat_kernel(q1, quad)
        k2 = heat_kernel(HeatKernelQuery(spec, dilate(spec, 2.0, g), 2.8, s, branch), quad)
        rel = abs(k2.value * 2.0 ** spec.Q / k1.value - 1)
        out.append(_rec(f"heat.scaling.{'+' if branch > 0 else '-'}", "heat",
                        dict(inp, branch=branch), rel, 1e-8, rel <= 1e-8, prov="quadrature"))
    kp = heat_kernel(HeatKernelQuery(spec, g, 0.7, s), quad)
    km = heat_kernel(HeatKernelQuery(spec, spec.point(g.z, -g.sigma), 0.7, s), quad)
    rel = abs(km.value / kp.value - 1)
    out.append(_rec("heat.sigma_even", "heat", inp, rel, 1e-12, rel <= 1e-12, prov="quadrature"))
    if spec.k == 1:
        a_exp = spec.m / 2 + 1 - s
        t = 0.9
        ref = integrate.quad(lambda l: (l / math.sinh(l)) ** a_exp if l else 1.0, 0, 60,
                             epsabs=0, epsrel=1e-13, limit=200)[0]
        ref = 2 * (4 * math.pi * t) ** (-(spec.m / 2 + 1)) * 2 * ref
        v = heat_kernel(HeatKernelQuery(spec, spec.identity(), t, s), quad).value
        rel = abs(v / ref - 1)
        out.append(_rec("heat.origin", "heat", dict(inp, t=t), {"value": v, "oracle": ref}, 1e-10,
                        rel <= 1e-10, prov="quadrature"))
    return out


# --------------------------------------------------------------------------
# operator suite

def _unit(spec, p):
    g = spec.gauge_arrays(p.z, p.sigma)
    return spec.point(p.z / g, p.sigma / g ** 2)


def _operator_checks(spec, quad, s):
    out = []
    inp = {"group": spec.name, "s": s}
    r = apply_Ls(spec, constant(spec, 2.5), spec.point(np.ones(spec.m) * 0.3, np.ones(spec.k) * 0.1)
                 if spec.k else spec.point(np.ones(spec.m) * 0.3), s, quad)
    out.append(_rec("constant", "invariance", inp, r.value, 1e-12, abs(r.value) <= 1e-12,
                    prov=r.method))
    if spec.k:
        u = gauge_power(spec, spec.Q - 2 * s)
        base = yamabe.default_points(spec, 3, 1.0, 0.21)
        for j, (rad, p) in enumerate(zip((1.0, 2.8, 8.0), base)):
            g = dilate(spec, rad, _unit(spec, p))
            res = apply_Ls(spec, u, g, s, quad)
            ok = abs(res.value) <= 10 * res.error_estimate
            out.append(_rec(f"harmonic.{j}", "fundamental", dict(inp, g=g.as_list(), gauge=rad),
                            res.value, "10 x error", ok, res.error_estimate, res.method))
    # left invariance and dilation covariance on a smooth bump
    b = bump(spec, 1.5, 5)
    g = spec.point(np.full(spec.m, 0.3), np.full(spec.k, -0.2)) if spec.k else spec.point(
        np.full(spec.m, 0.3))
    g0 = spec.point(np.linspace(0.5, -0.5, spec.m), np.full(spec.k, 0.4)) if spec.k else spec.point(
        np.linspace(0.5, -0.5, spec.m))
    a = apply_Ls(spec, translate(b, g0), g, s, quad)
    c = apply_Ls(spec, b, multiply(spec, g0, g), s, quad)
    err = a.error_estimate + c.error_estimate
    out.append(_rec("left_invariance", "invariance", dict(inp, g=g.as_list(), g0=g0.as_list()),
                    {"translated": a.value, "direct": c.value}, "5 x error",
                    abs(a.value - c.value) <= 5 * err, err, a.method))
    lam = 1.7
    a = apply_Ls(spec, rescale(b, lam), g, s, quad)
    c = apply_Ls(spec, b, dilate(spec, lam, g), s, quad)
    err = a.error_estimate + lam ** (2 * s) * c.error_estimate
    out.append(_rec("dilation", "invariance", dict(inp, g=g.as_list(), lam=lam),
                    {"rescaled": a.value, "direct_scaled": lam ** (2 * s) * c.value}, "5 x error",
                    abs(a.value - lam ** (2 * s) * c.value) <= 5 * err, err, a.method))
    # scale invariance of the seminorm and the Sobolev quotient (common random numbers)
    if spec.k:
        sol = yamabe.ExplicitSolutionSpec(spec, 1.0, s)
        u1 = yamabe.bubble(sol)
        w = (spec.Q - 2 * s) / 2
        vals = []
        for lam in (1.0, 0.5, 2.0):
            vals.append(forms.seminorm(spec, rescale(u1, lam, w), s, quad, label="scale.semi"))
        ok = all(abs(v.value - vals[0].value) <= 3 * math.hypot(v.stderr, vals[0].stderr)
                 for v in vals[1:])
        out.append(_rec("seminorm_scale", "scale", dict(inp, lam=[1.0, 0.5, 2.0]),
                        [v.value for v in vals], "3 combined SE", ok,
                        max(v.stderr for v in vals), "monte_carlo"))
    qb = bump(spec, 1.0, 5)
    g0 = spec.point(np.full(spec.m, 0.7), np.full(spec.k, 0.3)) if spec.k else spec.point(
        np.full(spec.m, 0.7))
    qs = [forms.sobolev_quotient(spec, f, s, quad, "scale.quot")
          for f in (qb, translate(qb, g0), rescale(qb, 1.8))]
    ok = all(abs(v.value - qs[0].value) <= 3 * math.hypot(v.stderr, qs[0].stderr) for v in qs[1:])
    out.append(_rec("quotient_invariance", "scale", inp, [v.value for v in qs], "3 combined SE",
                    ok, max(v.stderr for v in qs), "monte_carlo",
                    "original, left-translated, dilated"))
    phi = bump(spec, 1.2, 5, center=g0)
    q1 = forms.quadratic_form(spec, qb, phi, s, quad, "qsym")
    q2 = forms.quadratic_form(spec, phi, qb, s, quad, "qsym")
    err = math.hypot(q1.stderr, q2.stderr)
    out.append(_rec("qform_symmetry", "scale", inp, [q1.value, q2.value], "3 combined SE",
                    abs(q1.value - q2.value) <= 3 * err, err, "monte_carlo"))
    return out


def _limit_checks(spec, quad):
    out = []
    if spec.k == 0:
        return [_rec("limits.skipped", "limits", {"group": spec.name}, None,
                     msg="limits are checked on H-type groups")]
    u = bump(spec, 2.0, 5)
    pts = limit_points(spec, u, 5, seed=quad.seed)
    inp = {"group": spec.name, "field": u.name, "points": [p.as_list() for p in pts]}
    z = zero_limit(spec, u, pts, 0.005, quad)
    dev_plus = float(np.max(z.deviation(+1.0)))
    dev_minus = float(np.max(z.deviation(-1.0)))
    out.append(_rec("limit.zero", "limits", dict(inp, s=0.005), z.scaled.tolist(), 0.05,
                    dev_plus <= 0.05, float(np.max(z.scaled_error)), "quadrature",
                    f"max |(2s/sigma_Q) L u - u| / |u| = {dev_plus:.3g}"))
    out.append(_rec("limit.zero.minus_u", "limits", dict(inp, s=0.005), dev_minus, None, None,
                    prov="quadrature",
                    msg="deviation from the -u normalisation; the hypersingular form tends to +u"))
    o = one_limit(spec, u, pts, 0.995, quad)
    out.append(_rec("limit.one", "limits", dict(inp, s=0.995), o.ratios.tolist(), 0.03,
                    o.cv < 0.03, float(np.max(o.scaled_error)), "quadrature",
                    f"cv {o.cv:.3g}; ratios to -sum X^2 u, prediction tau_m/4m = {o.prediction:.6g}"))
    return out


# --------------------------------------------------------------------------
# yamabe, lorentz, decay, tail, local bound

def _needs_htype(spec, what):
    return [_rec(f"{what}.skipped", "uy", {"group": spec.name}, None,
                 msg="explicit solutions exist on H-type groups (k >= 1) only")]


def _yamabe_checks(spec, quad, s, cfg):
    if spec.k == 0:
        return _needs_htype(spec, "yamabe")
    sol = yamabe.ExplicitSolutionSpec(spec, cfg.y, s)
    inp = {"group": spec.name, "s": s, "y": cfg.y}
    out = []
    cz = yamabe.asymptotic_constant(sol, "z")
    cs = yamabe.asymptotic_constant(sol, "sigma")
    rel = abs(cz / cs - 1)
    out.append(_rec("asymptotic_constant", "uy", inp, {"z_axis": cz, "sigma_axis": cs}, 1e-6,
                    rel <= 1e-6, msg="|g|^(Q-2s) u_y along the two axes"))
    u1 = yamabe.bubble(yamabe.ExplicitSolutionSpec(spec, 1.0, s))
    uy = yamabe.bubble(sol)
    pts = yamabe.default_points(spec, 6)
    e = max(abs(uy.at(dilate(spec, cfg.y, p)) - cfg.y ** (-(spec.Q - 2 * s) / 2) * u1.at(p))
            / u1.at(p) for p in pts)
    out.append(_rec("bubble_scaling", "uy", inp, e, 1e-12, e <= 1e-12))
    n = cfg.points
    cal = yamabe.calibrate_alpha(spec, s, quad, yamabe.default_points(spec, n, 1.0, 0.0),
                                 weak_form=2)
    out += cal.report.records
    out.append(yamabe.y_independence_record(spec, s, quad))
    kc = cal.constants
    out.append(_rec("alpha.value", "riesz", inp, kc.alpha_calibrated, None, None,
                    kc.alpha_uncertainty, cal.intertwining.method, "calibrated alpha(m, k, s)"))
    return out


def _lorentz_checks(spec, quad, s):
    Q = spec.Q
    out = []
    combos = [(Q + 2 * s, Q / (2 * s), 1.0), (Q + 2 * s, Q / (2 * s), math.inf),
              (1.5 * Q, 2.0, 2.0), (Q - 2 * s + 1.0, 1.5, 3.0)]
    for j, (a, p, q) in enumerate(combos):
        if not a > Q / p:
            continue
        cut = lorentz.LorentzCutoffSpec.for_group(spec, a, 2.0, p, q)
        ln = lorentz.lorentz_cutoff_norm(cut)
        inp = {"group": spec.name, "alpha": a, "R": 2.0, "p": p, "q": q}
        out.append(_rec(f"norm.{j}", "lorentz", inp, {"closed_form": ln.closed_form,
                        "quadrature": ln.quadrature}, 1e-8, ln.rel_discrepancy <= 1e-8,
                        ln.quadrature_error, "closed-form+quadrature"))
        slope = lorentz.scaling_slope(cut)
        target = -(a - Q / p)
        out.append(_rec(f"slope.{j}", "lorentz", inp, slope, {"target": target, "rel": 0.01},
                        abs(slope - target) <= 0.01 * abs(target), prov="quadrature"))
    cut = lorentz.LorentzCutoffSpec.for_group(spec, Q + 2 * s, 1.5, Q / (2 * s))
    r0 = float(lorentz.rearrangement(cut, 0.0))
    out.append(_rec("rearrangement.origin", "lorentz", {"R": 1.5}, r0, 1e-14,
                    abs(r0 / 1.5 ** (-cut.alpha) - 1) <= 1e-14))
    top = cut.R ** (-cut.alpha)
    levels = [top * f for f in (0.9, 0.6, 0.35, 0.2, 0.12)]
    for j, d in enumerate(lorentz.distribution_mc(spec, cut, levels, quad)):
        out.append(_rec(f"distribution.{j}", "lorentz", {"level": d.level, "alpha": cut.alpha},
                        {"exact": d.exact, "monte_carlo": d.estimate}, "3 SE", d.z_score <= 3,
                        d.stderr, "monte_carlo", f"z-score {d.z_score:.3g}"))
    return out


def _decay_checks(spec, quad, s):
    out = []
    Q = spec.Q
    beta0 = 2.3
    rep = yamabe.decay_fit(spec, gauge_power(spec, beta0), None, quad, r_min=1.0, label="pure")
    out.append(_rec("pure_power", "asympt", {"beta": beta0}, rep.fitted_exponent, 1e-10,
                    abs(rep.fitted_exponent - beta0) <= 1e-10, rep.fit_residual, "monte_carlo"))
    if spec.k == 0:
        return out + _needs_htype(spec, "decay.bubble")
    target = Q - 2 * s
    u1 = yamabe.bubble(yamabe.ExplicitSolutionSpec(spec, 1.0, s))
    inp = {"group": spec.name, "s": s}
    rep = yamabe.decay_fit(spec, u1, None, quad)
    out.append(_rec("bubble", "asympt", dict(inp, shells=rep.radii), rep.fitted_exponent,
                    {"target": target, "rel": 0.02},
                    abs(rep.fitted_exponent - target) <= 0.02 * target, rep.fit_residual,
                    "monte_carlo"))
    half = power(u1, 0.5)
    rep = yamabe.decay_fit(spec, half, None, quad, label="slow")
    out.append(_rec("slow", "slow", dict(inp, field="u_1^(1/2)"), rep.fitted_exponent,
                    {"target": target / 2, "rel": 0.02},
                    abs(rep.fitted_exponent - target / 2) <= 0.02 * target / 2, rep.fit_residual,
                    "monte_carlo"))
    comp = product(half, gauge_power(spec, target / 2))
    rep = yamabe.decay_fit(spec, comp, None, quad, label="composite")
    out.append(_rec("composite", "slow", dict(inp, field="u_1^(1/2) |g|^(-(Q-2s)/2)"),
                    rep.fitted_exponent, {"target": target, "rel": 0.02},
                    abs(rep.fitted_exponent - target) <= 0.02 * target, rep.fit_residual,
                    "monte_carlo"))
    return out


def _tail_checks(spec, quad, s):
    if spec.k == 0:
        return _needs_htype(spec, "tail")
    return yamabe.tail_decay_check(spec, s, quad).records


def _localbound_checks(spec, quad, s):
    if spec.k == 0:
        return _needs_htype(spec, "localbound")
    u1 = yamabe.bubble(yamabe.ExplicitSolutionSpec(spec, 1.0, s))
    rep = yamabe.local_bound_diagnostic(spec, u1, s, quad=quad)
    z = yamabe.local_bound_diagnostic(spec, zero(spec), s, quad=quad,
                                      g0s=[spec.point(np.eye(spec.m)[0] * 8, np.zeros(spec.k))],
                                      radii=[4.0])
    for r in z.records:
        r.id = "zero_field." + r.id
    return rep.records + z.records


# --------------------------------------------------------------------------
# battery

def build_checks(cfg: RunConfig) -> list:
    checks = []
    fmt = lambda s: f"s={s:g}"
    for suite in cfg.suites:
        if suite == "group":
            checks.append(Check("group", suite, lambda sp, q: _group_checks(sp, q)))
        elif suite == "kernels":
            for s in cfg.s:
                checks.append(Check(f"kernels.{fmt(s)}", suite,
                                    lambda sp, q, s=s: _kernel_checks(sp, q, s)))
        elif suite == "operator":
            for s in cfg.s:
                checks.append(Check(f"operator.{fmt(s)}", suite,
                                    lambda sp, q, s=s: _operator_checks(sp, q, s)))
            checks.append(Check("operator.limits", suite, lambda sp, q: _limit_checks(sp, q)))
        elif suite == "yamabe":
            for s in cfg.s:
                checks.append(Check(f"yamabe.{fmt(s)}", suite,
                                    lambda sp, q, s=s: _yamabe_checks(sp, q, s, cfg)))
        else:
            fn = {"lorentz": _lorentz_checks, "decay": _decay_checks, "tail": _tail_checks,
                  "localbound": _localbound_checks}[suite]
            for s in cfg.s:
                checks.append(Check(f"{suite}.{fmt(s)}", suite,
                                    lambda sp, q, s=s, fn=fn: fn(sp, q, s)))
    return checks


def _run_one(check: Check, spec: GroupSpec, base: QuadratureConfig):
    quad = base.replace(seed=sub_seed(base.seed, check.id))
    t0 = time.perf_counter()
    try:
        recs = list(check.fn(spec, quad))
        if not recs:
            raise RuntimeError("check produced no records")
    except Exception as exc:       # recorded, never aborts the batch
        recs = [CheckRecord("error", "check raised", {"check": check.id}, None, None, "fail",
                            None, "none", f"{type(exc).__name__}: {exc}")]
    wall = time.perf_counter() - t0
    for r in recs:
        r.id = f"{check.id}.{r.id}"
        r.wall_clock = wall
    return recs


def run(cfg: RunConfig, progress=None) -> VerificationReport:
    """Run every selected suite; deterministic for a fixed config and seed."""
    spec = group_from_id(cfg.group)
    base = cfg.quadrature()
    if cfg.workers > 1:
        base = base.replace(workers=1)        # parallelism lives at the check level
    checks = build_checks(cfg)
    records = []
    with ThreadPoolExecutor(max_workers=cfg.workers) as pool:
        futs = [pool.submit(_run_one, c, spec, base) for c in checks]
        for c, f in zip(checks, futs):
            recs = f.result()
            if progress is not None:
                progress(c, recs)
            records.extend(recs)
    rep = VerificationReport("htfrac verification battery",
                             sorted(records, key=lambda r: r.id), cfg.echo(), __version__)
    return rep
