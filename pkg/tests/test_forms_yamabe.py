import math

import mpmath as mp
import numpy as np
import pytest

from htfrac import (DivergenceError, ExplicitSolutionSpec, InvalidInputError, PreconditionError,
                    QuadratureConfig, bubble, bump, decay_fit, euclidean, explicit_solution,
                    gaussian, heisenberg, make_point, quadratic_form, quaternionic, seminorm,
                    sobolev_quotient)
from htfrac.fields import gauge_power, rescale
from htfrac.forms import lebesgue_norm, sobolev_exponent
from htfrac.haar import euclidean_sphere_area
from htfrac.limits import limit_points, limit_prediction
from htfrac.operator import sub_laplacian
from htfrac.special import intertwining_constant
from htfrac.yamabe import (asymptotic_constant, intertwining_check, intertwining_ratios,
                           local_bound_diagnostic, yamabe_ratios, default_points)

H1 = heisenberg(1)


def gaussian_seminorm(n, s):
    """[e^(-|x|^2/2)]_(s,2) from Plancherel: sigma_(n-1) Gamma((n+2s)/2) / C_(n,s)."""
    C = s * 4 ** s * mp.gamma((n + 2 * s) / 2) / (mp.pi ** (mp.mpf(n) / 2) * mp.gamma(1 - s))
    return math.sqrt(float(euclidean_sphere_area(n) * mp.gamma((n + 2 * s) / 2) / C))


@pytest.mark.parametrize("n", [1, 2, 3])
@pytest.mark.parametrize("s", [0.3, 0.7])
def test_euclidean_seminorm_plancherel(n, s):
    E = euclidean(n)
    r = seminorm(E, gaussian(E, math.sqrt(2)), s)
    assert abs(r.value - gaussian_seminorm(n, s)) <= 3 * r.stderr
    assert r.stderr < 0.005 * r.value


@pytest.mark.parametrize("n", [1, 2, 3])
def test_euclidean_l2_norm(n):
    E = euclidean(n)
    r = lebesgue_norm(E, gaussian(E, math.sqrt(2)), 2.0)
    assert abs(r.value - math.pi ** (n / 4)) <= 3 * r.stderr


def test_seminorm_scale_invariance_common_random_numbers():
    sol = ExplicitSolutionSpec(H1, 1.0, 0.5)
    u = bubble(sol)
    w = (H1.Q - 1.0) / 2
    vals = [seminorm(H1, rescale(u, lam, w), 0.5) for lam in (1.0, 0.5, 2.0)]
    for v in vals[1:]:
        assert abs(v.value - vals[0].value) <= 3 * math.hypot(v.stderr, vals[0].stderr)


def test_quadratic_form_symmetric_and_positive():
    a = bump(H1, 1.0, 5)
    b = bump(H1, 1.2, 5, center=make_point(H1, [0.7, 0.7], [0.3]))
    q1 = quadratic_form(H1, a, b, 0.5)
    q2 = quadratic_form(H1, b, a, 0.5)
    assert abs(q1.value - q2.value) <= 3 * math.hypot(q1.stderr, q2.stderr)
    qa = quadratic_form(H1, a, a, 0.5)
    sa = seminorm(H1, a, 0.5)
    assert qa.value > 0
    assert abs(qa.value - sa.value ** 2) <= 3 * (qa.stderr + 2 * sa.value * sa.stderr)


def test_form_preconditions():
    with pytest.raises(InvalidInputError):
        seminorm(H1, bump(H1), 1.2)
    with pytest.raises(PreconditionError):
        quadratic_form(H1, bump(H1), gaussian(H1), 0.5)
    with pytest.raises(DivergenceError):
        lebesgue_norm(H1, gauge_power(H1, 1.0), 2.0)
    assert sobolev_exponent(4, 0.5) == pytest.approx(8 / 3)


def test_bubble_closed_form_and_asymptotics():
    sol = ExplicitSolutionSpec(H1, 2.0, 0.5)
    g = make_point(H1, [0.3, 0.4], [0.2])
    N = (0.25 + 4.0) ** 2 + 16 * 0.04
    c = intertwining_constant(2, 1, 0.5) ** (3 / 2) * (16 * 4.0) ** (3 / 4)
    assert explicit_solution(sol, g) == pytest.approx(c * N ** (-3 / 4), rel=1e-13)
    assert asymptotic_constant(sol, "z") == pytest.approx(asymptotic_constant(sol, "sigma"),
                                                          rel=1e-6)
    with pytest.raises(InvalidInputError):
        ExplicitSolutionSpec(euclidean(3), 1.0, 0.5)


# [DERIVED] alpha on H^1 at s = 1/2 from two independent estimators (intertwining ratio and
# Yamabe ratio, disjoint points); both agree to ~1e-8 and the value is frozen here.
ALPHA_H1_HALF = 3.7640686


def test_intertwining_ratio_constant_on_h1():
    pts = default_points(H1, 5)
    rs = intertwining_ratios(H1, 0.5, 1.0, pts)
    assert rs.cv < 1e-5
    assert rs.median == pytest.approx(ALPHA_H1_HALF, rel=1e-6)
    ys = yamabe_ratios(H1, 0.5, default_points(H1, 5, 1.0, 0.37))
    assert ys.median == pytest.approx(rs.median, rel=1e-6)


def test_intertwining_check_report():
    rep = intertwining_check(H1, 0.3, 1.0, default_points(H1, 5))
    assert rep.passed


def test_decay_fit_pure_power_exact():
    rep = decay_fit(H1, gauge_power(H1, 2.3), None, QuadratureConfig(), r_min=1.0)
    assert rep.fitted_exponent == pytest.approx(2.3, abs=1e-10)


def test_decay_fit_bubble_quaternionic():
    sol = ExplicitSolutionSpec(quaternionic(1), 1.0, 0.5)
    rep = decay_fit(quaternionic(1), bubble(sol))
    assert rep.fitted_exponent == pytest.approx(quaternionic(1).Q - 1.0, rel=0.02)


def test_decay_fit_needs_range():
    with pytest.raises(InvalidInputError):
        decay_fit(H1, gauge_power(H1, 2.0), [1, 2, 4, 8])


def test_limit_prediction_is_pi_over_eight():
    # tau_2 = int_S |z|^2 = pi on H^1, so tau / 4m = pi / 8
    assert limit_prediction(H1) == pytest.approx(math.pi / 8, rel=1e-12)


def test_limit_points_are_admissible():
    u = bump(H1, 2.0, 5)
    pts = limit_points(H1, u, 5, seed=3)
    lap = [abs(sub_laplacian(H1, u, g)) for g in pts]
    vals = [u.at(g) for g in pts]
    assert len(pts) == 5 and min(vals) > 0.3 and min(lap) > 0
    with pytest.raises(ValueError):
        limit_points(H1, u, 50, min_ratio=0.99, candidates=64)


def test_local_bound_on_bubble():
    sol = ExplicitSolutionSpec(H1, 1.0, 0.5)
    rep = local_bound_diagnostic(H1, bubble(sol), 0.5)
    assert rep.passed
