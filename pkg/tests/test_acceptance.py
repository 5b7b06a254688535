"""Acceptance criteria 1-12, each at its stated tolerance and runtime budget.

Every test records one PASS/FAIL line; the lines are printed as they are
produced and collected again in the terminal summary.
"""
import math
import time

import numpy as np
import pytest

from htfrac import (ExplicitSolutionSpec, QuadratureConfig, apply_Ls, bubble, bump, decay_fit,
                    dilate, euclidean, gauge, gauge_annulus_integral, heisenberg, make_point,
                    quaternionic, riesz_norm_kernel, seminorm, sobolev_quotient,
                    tail_decay_check, translate)
from htfrac.config import RunConfig
from htfrac.fields import gauge_power, rescale
from htfrac.haar import sigma_Q
from htfrac.limits import limit_points, one_limit, zero_limit
from htfrac.lorentz import (LorentzCutoffSpec, distribution_mc, lorentz_cutoff_norm,
                            scaling_slope)
from htfrac.operator import resolve_mode
from htfrac.report import emit
from htfrac.special import euclidean_riesz_constant
from htfrac.suites import group_algebra, run
from htfrac.yamabe import calibrate_alpha, default_points, y_independence_record

H1 = heisenberg(1)


class Criterion:
    def __init__(self, log, n, title, budget):
        self.log, self.n, self.title, self.budget = log, n, title, budget
        self.parts = []

    def __enter__(self):
        self.t0 = time.perf_counter()
        return self

    def check(self, ok, detail):
        self.parts.append((bool(ok), detail))

    def __exit__(self, *exc):
        dt = time.perf_counter() - self.t0
        self.check(dt < self.budget, f"runtime {dt:.1f} s < {self.budget:g} s")
        ok = exc[0] is None and all(p[0] for p in self.parts)
        bad = [d for o, d in self.parts if not o]
        line = (f"criterion {self.n:>2} {'PASS' if ok else 'FAIL'}  {self.title}: "
                + "; ".join(d for _, d in self.parts)
                + (f"  [failed: {' | '.join(bad)}]" if bad else ""))
        self.log[self.n] = line
        print(line)
        assert exc[0] is not None or not bad, line
        return False


def test_01_group_algebra(acceptance_log):
    with Criterion(acceptance_log, 1, "group algebra invariants", 5.0) as c:
        worst = 0.0
        for spec in (heisenberg(1), quaternionic(1), euclidean(3)):
            recs = [r for r in group_algebra(spec, 1000, seed=20240517)
                    if r.id in ("associativity", "identity", "inverse", "automorphism",
                                "homogeneity")]
            assert len(recs) == 5
            worst = max(worst, max(r.value for r in recs))
            c.check(all(r.status == "pass" for r in recs), f"{spec.name} all pass")
        c.check(worst <= 1e-12, f"max rel error {worst:.2e} <= 1e-12 on 10^3 cases/group")


def test_02_polar_law(acceptance_log):
    with Criterion(acceptance_log, 2, "polar-coordinate law on H^1", 60.0) as c:
        Q = H1.Q
        for gam in (0.0, Q / 2, float(Q), Q + 1.0):
            a = gauge_annulus_integral(H1, gam, 0.5, 2.0, QuadratureConfig())
            tol = max(1e-6, 3 * a.stderr)
            d = abs(a.numeric - a.closed_form)
            c.check(d <= tol, f"gamma={gam:g}: |diff| {d:.3g} <= {tol:.3g}")


def test_03_euclidean_riesz(acceptance_log):
    with Criterion(acceptance_log, 3, "Euclidean Riesz constant", 30.0) as c:
        worst = 0.0
        for n in (1, 2, 3):
            E = euclidean(n)
            for s in (0.25, 0.5, 0.75):
                for x in (np.full(n, 0.3), np.linspace(0.5, 1.5, n)):
                    h = make_point(E, x)
                    v = riesz_norm_kernel(E, h, s).nested
                    want = euclidean_riesz_constant(n, s) * float(x @ x) ** (-(n + 2 * s) / 2)
                    worst = max(worst, abs(v - want) / want)
        c.check(worst <= 1e-6, f"max rel error {worst:.2e} <= 1e-6 over n in 1..3, 3 s values")


def test_04_non_gauge_witness(acceptance_log):
    with Criterion(acceptance_log, 4, "Riesz-type kernel is not a gauge function", 60.0) as c:
        for s in (0.25, 0.5, 0.75):
            p, q = make_point(H1, [1.0, 0.0], [0.0]), make_point(H1, [0.0, 0.0], [0.25])
            assert gauge(H1, p) == pytest.approx(gauge(H1, q), rel=1e-15)
            a = riesz_norm_kernel(H1, p, s).value
            b = riesz_norm_kernel(H1, q, s).value
            gap = abs(a - b) / max(a, b)
            c.check(gap > 0.01, f"s={s}: gap {gap:.1%} > 1%")


def test_05_intertwining_alpha(acceptance_log):
    with Criterion(acceptance_log, 5, "intertwining and alpha calibration (H^1, s=0.5)",
                   600.0) as c:
        quad = QuadratureConfig()
        c.check(resolve_mode(H1, quad) == "tensor", "tensor mode")
        cal = calibrate_alpha(H1, 0.5, quad, default_points(H1, 10))
        c.check(cal.intertwining.cv < 0.02, f"intertwining CV {cal.intertwining.cv:.2e} < 2% "
                                            f"on {len(cal.intertwining.good)} points")
        c.check(cal.yamabe.cv < 0.02, f"Yamabe-ratio CV {cal.yamabe.cv:.2e} < 2%")
        c.check(cal.agreement <= 5.0, f"|a1-a2|/unc {cal.agreement:.3g} <= 5")
        rec = y_independence_record(H1, 0.5, quad)
        c.check(rec.status == "pass", f"y in (0.5,1,2): {rec.message}")
        c.check(True, f"alpha = {cal.constants.alpha_calibrated:.9g} "
                      f"+- {cal.constants.alpha_uncertainty:.1e}")


def test_06_harmonic_off_pole(acceptance_log):
    with Criterion(acceptance_log, 6, "fundamental solution harmonic off the pole", 300.0) as c:
        s = 0.5
        u = gauge_power(H1, H1.Q - 2 * s)
        dirs = default_points(H1, 5, 1.0, 0.21)
        for rad, p in zip(np.geomspace(1.0, 8.0, 5), dirs):
            g0 = gauge(H1, p)
            g = dilate(H1, rad / g0, p)
            r = apply_Ls(H1, u, g, s)
            c.check(abs(r.value) <= 10 * r.error_estimate,
                    f"|g|={rad:.2f}: |L u| {abs(r.value):.1e} <= 10x{r.error_estimate:.1e}")


def test_07_sharp_decay(acceptance_log):
    with Criterion(acceptance_log, 7, "sharp decay of u_1", 120.0) as c:
        for s in (0.3, 0.5, 0.7):
            rep = decay_fit(H1, bubble(ExplicitSolutionSpec(H1, 1.0, s)))
            tgt = H1.Q - 2 * s
            c.check(abs(rep.fitted_exponent - tgt) <= 0.02 * tgt,
                    f"s={s}: exponent {rep.fitted_exponent:.5f} vs {tgt:g}")


def test_08_tail_law(acceptance_log):
    with Criterion(acceptance_log, 8, "tail law T(u_1; e, R), R in [8, 128]", 300.0) as c:
        for s in (0.3, 0.5, 0.7):
            rep = tail_decay_check(H1, s, QuadratureConfig(), (8, 16, 32, 64, 128))
            sl = rep.by_id("tail.slope")
            var = rep.by_id("tail.scaled_variation")
            c.check(sl.status == "pass", f"s={s}: slope {sl.value:.4f} vs {-(H1.Q - 2 * s):g}")
            c.check(var.status == "pass", f"variation {var.value:.2%} < 10%")


def test_09_lorentz(acceptance_log):
    with Criterion(acceptance_log, 9, "Lorentz norms of gauge cut-offs", 120.0) as c:
        worst, worst_slope, worst_z = 0.0, 0.0, 0.0
        for spec in (H1, quaternionic(1)):
            Q = spec.Q
            for a, p, q in ((Q + 1.0, Q / 1.0, 1.0), (Q + 1.0, Q / 1.0, math.inf),
                            (1.5 * Q, 2.0, 2.0), (Q, 1.5, 3.0)):
                cut = LorentzCutoffSpec.for_group(spec, a, 2.0, p, q)
                worst = max(worst, lorentz_cutoff_norm(cut).rel_discrepancy)
                tgt = -(a - Q / p)
                worst_slope = max(worst_slope, abs(scaling_slope(cut) - tgt) / abs(tgt))
            cut = LorentzCutoffSpec.for_group(spec, Q + 1.0, 1.5, 2.0)
            levels = np.geomspace(0.02, 0.9 * 1.5 ** -(Q + 1.0), 5)
            for d in distribution_mc(spec, cut, levels, QuadratureConfig()):
                worst_z = max(worst_z, d.z_score)
        c.check(worst <= 1e-8, f"closed form vs quadrature {worst:.1e} <= 1e-8")
        c.check(worst_slope <= 0.01, f"R-slope rel error {worst_slope:.1e} <= 1%")
        c.check(worst_z <= 3, f"mu(t) max z-score {worst_z:.2f} <= 3 at 5 levels")


def test_10_operator_limits(acceptance_log):
    with Criterion(acceptance_log, 10, "operator limits s -> 0, s -> 1", 600.0) as c:
        quad = QuadratureConfig()
        u = bump(H1, 2.0, 5)            # C^4
        pts = limit_points(H1, u, 5, seed=quad.seed)
        z = zero_limit(H1, u, pts, 0.005, quad)
        dev = float(np.max(z.deviation(-1.0)))
        c.check(dev <= 0.05, f"(2s/sigma_Q) L u vs -u: max rel deviation {dev:.3g} <= 5%")
        o = one_limit(H1, u, pts, 0.995, quad)
        c.check(o.cv < 0.03, f"s=0.995 ratio to -sum X^2 u: CV {o.cv:.2e} < 3% "
                             f"(mean {np.mean(o.ratios):.4f})")


def test_10b_zero_limit_positive_sign():
    """Companion to criterion 10: with the hypersingular normalisation the limit is +u."""
    quad = QuadratureConfig()
    u = bump(H1, 2.0, 5)
    pts = limit_points(H1, u, 5, seed=quad.seed)
    z = zero_limit(H1, u, pts, 0.005, quad)
    assert float(np.max(z.deviation(+1.0))) <= 0.05
    assert 2 * 0.005 / sigma_Q(H1) * apply_Ls(H1, u, pts[0], 0.005).value > 0


def test_11_scale_invariance(acceptance_log):
    with Criterion(acceptance_log, 11, "scale invariance with common random numbers",
                   600.0) as c:
        s = 0.5
        quad = QuadratureConfig()
        u1 = bubble(ExplicitSolutionSpec(H1, 1.0, s))
        w = (H1.Q - 2 * s) / 2
        base = seminorm(H1, u1, s, quad, label="crn")
        for lam in (0.5, 2.0):
            v = seminorm(H1, rescale(u1, lam, w), s, quad, label="crn")
            lim = 3 * math.hypot(v.stderr, base.stderr)
            c.check(abs(v.value - base.value) <= lim,
                    f"[u_lam] lam={lam}: |diff| {abs(v.value - base.value):.2e} <= {lim:.2e}")
        b = bump(H1, 1.0, 5)
        q0 = sobolev_quotient(H1, b, s, quad, "crnq")
        for name, f in (("dilated", rescale(b, 1.8)),
                        ("translated", translate(b, make_point(H1, [0.7, 0.7], [0.3])))):
            q = sobolev_quotient(H1, f, s, quad, "crnq")
            lim = 3 * math.hypot(q.stderr, q0.stderr)
            c.check(abs(q.value - q0.value) <= lim,
                    f"quotient {name}: |diff| {abs(q.value - q0.value):.2e} <= {lim:.2e}")


def test_12_determinism(acceptance_log):
    with Criterion(acceptance_log, 12, "byte-identical reports", math.inf) as c:
        t0 = time.perf_counter()
        ref = emit(run(RunConfig(workers=1)))
        t_ref = time.perf_counter() - t0
        c.budget = 2 * t_ref      # "full battery" = the default single-thread run
        c.check(True, f"full battery {t_ref:.1f} s")
        t1 = time.perf_counter()
        again = emit(run(RunConfig(workers=4)))
        c.check(again == ref, f"rerun with 4 threads byte-identical ({len(ref)} bytes, "
                              f"{time.perf_counter() - t1:.1f} s)")
