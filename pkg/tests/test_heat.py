"""Heat and Riesz-type kernels against mpmath oracles built from the defining integrals."""
import math

import mpmath as mp
import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from htfrac import (HeatKernelQuery, InvalidInputError, SingularityError, dilate, euclidean,
                    heat_kernel, heisenberg, inverse, make_point, quaternionic,
                    riesz_norm_kernel)
from htfrac.special import euclidean_riesz_constant

H1 = heisenberg(1)
HQ = quaternionic(1)
mp.mp.dps = 25


def heat_h1_origin_closed(sn, t):
    # [DERIVED] Fourier transform of lam/sinh(lam) is (pi^2/2) sech^2(pi w / 2)
    return 2 * (4 * math.pi * t) ** -2 * (math.pi ** 2 / 2) / math.cosh(math.pi * sn / (2 * t)) ** 2


def heat_oracle_k1(m, zn2, sn, t, a):
    f = lambda l: (mp.cos(sn * l / t) * (l / mp.sinh(l)) ** a
                   * mp.exp(-zn2 * l * mp.coth(l) / (4 * t))) if l else mp.mpf(1)
    I = 2 * mp.quad(f, mp.linspace(0, 80, 41))
    return float(2 * (4 * mp.pi * t) ** (-(mp.mpf(m) / 2 + 1)) * I)


def heat_oracle_k3(m, zn2, sn, t, a):
    """Full 3-D lambda integral in spherical coordinates, angle integrated numerically."""
    mp.mp.dps = 15
    w = sn / t

    def radial(r):
        g = (r / mp.sinh(r)) ** a * mp.exp(-zn2 * r * mp.coth(r) / (4 * t)) if r else mp.mpf(1)
        ang = mp.quad(lambda th: mp.cos(w * r * mp.cos(th)) * mp.sin(th), [0, mp.pi])
        return 2 * mp.pi * r ** 2 * g * ang
    I = mp.quad(radial, mp.linspace(0, 60, 16))
    mp.mp.dps = 25
    return float(8 * (4 * mp.pi * t) ** (-(mp.mpf(m) / 2 + 3)) * I)


@pytest.mark.parametrize("sn,t", [(0.0, 1.0), (0.3, 0.5), (1.0, 0.2), (2.0, 0.05), (0.5, 3.0)])
def test_heat_h1_origin_sech2(sn, t):
    v = heat_kernel(HeatKernelQuery(H1, make_point(H1, [0, 0], [sn]), t))
    assert v.value == pytest.approx(heat_h1_origin_closed(sn, t), rel=1e-11)


@pytest.mark.parametrize("z,sn,t,s,branch", [
    ((0.7, 0.1), 0.2, 0.7, 1.0, 1), ((1.5, -0.4), 1.1, 0.3, 0.5, 1),
    ((0.2, 0.2), 0.05, 0.1, 0.25, -1), ((2.0, 1.0), 3.0, 2.0, 0.75, 1)])
def test_heat_h1_general_point(z, sn, t, s, branch):
    q = HeatKernelQuery(H1, make_point(H1, z, [sn]), t, s, branch)
    v = heat_kernel(q)
    want = heat_oracle_k1(2, float(np.dot(z, z)), sn, t, q.exponent)
    assert v.value == pytest.approx(want, rel=1e-9)
    assert abs(v.value - want) <= max(10 * v.error, 1e-12 * abs(want))


@pytest.mark.parametrize("z,sig,t", [((0.3, 0, 0, 0.2), (0.1, 0.2, 0.0), 0.6),
                                     ((0, 0, 0, 0), (0.0, 0.0, 0.4), 0.3)])
def test_heat_quaternionic_spherical_reduction(z, sig, t):
    q = HeatKernelQuery(HQ, make_point(HQ, z, sig), t)
    v = heat_kernel(q)
    want = heat_oracle_k3(4, float(np.dot(z, z)), float(np.linalg.norm(sig)), t, q.exponent)
    assert v.value == pytest.approx(want, rel=1e-8)


def test_heat_sigma_direction_irrelevant_for_k3():
    a = heat_kernel(HeatKernelQuery(HQ, make_point(HQ, [0.2, 0.1, 0, 0], [0.3, 0, 0]), 0.5))
    b = heat_kernel(HeatKernelQuery(HQ, make_point(HQ, [0.2, 0.1, 0, 0], [0, 0.18, -0.24]), 0.5))
    assert a.value == pytest.approx(b.value, rel=1e-12)


@settings(max_examples=25)
@given(st.floats(0.05, 2), st.floats(0, 2), st.floats(0.05, 3), st.floats(0.3, 4))
def test_heat_parabolic_scaling(zr, sn, t, lam):
    g = make_point(H1, [zr, 0.0], [sn])
    a = heat_kernel(HeatKernelQuery(H1, g, t)).value
    b = heat_kernel(HeatKernelQuery(H1, dilate(H1, lam, g), lam ** 2 * t)).value
    if a > 1e-200:
        assert b * lam ** 4 == pytest.approx(a, rel=1e-8)


def test_heat_query_validation():
    with pytest.raises(InvalidInputError):
        HeatKernelQuery(H1, H1.identity(), 0.0)
    with pytest.raises(InvalidInputError):
        HeatKernelQuery(H1, H1.identity(), 1.0, s=1.5)
    with pytest.raises(InvalidInputError):
        HeatKernelQuery(H1, H1.identity(), 1.0, branch=0)


def riesz_h1_vertical_oracle(sn, s):
    """[DERIVED] t-integral of the sech^2 closed form on the vertical axis."""
    f = lambda t: t ** (-1 - s) * 2 * (4 * mp.pi * t) ** -2 * (mp.pi ** 2 / 2) \
        / mp.cosh(mp.pi * sn / (2 * t)) ** 2
    return float(2 * s / mp.gamma(1 - s) * mp.quad(f, [0, sn / 4, sn, 4 * sn, mp.inf]))


# frozen from the oracle above
FROZEN_VERTICAL = {0.5: 0.16636744513565716}


@pytest.mark.parametrize("s", [0.25, 0.5, 0.75])
@pytest.mark.parametrize("sn", [0.3, 1.7])
def test_riesz_h1_vertical_axis(sn, s):
    r = riesz_norm_kernel(H1, make_point(H1, [0, 0], [sn]), s)
    want = riesz_h1_vertical_oracle(sn, s)
    assert r.reduced == pytest.approx(want, rel=1e-10)
    assert r.nested == pytest.approx(want, rel=1e-7)


def test_riesz_frozen_value():
    r = riesz_norm_kernel(H1, make_point(H1, [0, 0], [0.3]), 0.5)
    assert r.value == pytest.approx(FROZEN_VERTICAL[0.5], rel=1e-12)
    assert riesz_h1_vertical_oracle(0.3, 0.5) == pytest.approx(FROZEN_VERTICAL[0.5], rel=1e-12)


def riesz_oracle_k1(zn2, sn, s):
    f = lambda t: t ** (-1 - s) * heat_mp(zn2, sn, t)
    return float(2 * s / mp.gamma(1 - s) * mp.quad(f, [0, 0.05, 0.5, 5, mp.inf]))


def heat_mp(zn2, sn, t):
    f = lambda l: (mp.cos(sn * l / t) * (l / mp.sinh(l)) * mp.exp(-zn2 * l * mp.coth(l) / (4 * t))
                   if l else mp.exp(-zn2 / (4 * t)))
    return 2 * (4 * mp.pi * t) ** -2 * 2 * mp.quad(f, [0, 2, 10, 40])


def test_riesz_h1_general_point_against_double_integral():
    mp.mp.dps = 15
    try:
        zn2, sn, s = 0.64, 0.1, 0.5
        want = riesz_oracle_k1(zn2, sn, s)
    finally:
        mp.mp.dps = 25
    r = riesz_norm_kernel(H1, make_point(H1, [0.8, 0.0], [sn]), s)
    assert r.value == pytest.approx(want, rel=1e-6)


@pytest.mark.parametrize("spec", [H1, HQ], ids=lambda g: g.name)
def test_riesz_homogeneity_and_inverse(spec):
    s = 0.4
    h = make_point(spec, np.linspace(0.2, 0.5, spec.m), np.linspace(-0.1, 0.2, spec.k))
    r = riesz_norm_kernel(spec, h, s).value
    r2 = riesz_norm_kernel(spec, dilate(spec, 1.9, h), s).value
    ri = riesz_norm_kernel(spec, inverse(spec, h), s).value
    assert r2 * 1.9 ** (spec.Q + 2 * s) == pytest.approx(r, rel=1e-9)
    assert ri == pytest.approx(r, rel=1e-12)


def test_riesz_nested_and_reduced_agree_quaternionic():
    r = riesz_norm_kernel(HQ, make_point(HQ, [0.3, 0, 0.1, 0], [0.1, 0.0, 0.2]), 0.5)
    assert r.nested == pytest.approx(r.reduced, rel=1e-8)


def test_riesz_euclidean_closed_form():
    E = euclidean(2)
    r = riesz_norm_kernel(E, make_point(E, [0.6, 0.8]), 0.3)
    assert r.nested == pytest.approx(euclidean_riesz_constant(2, 0.3), rel=1e-8)


def test_riesz_not_a_gauge_function():
    # two points of gauge 1: horizontal and vertical
    a = riesz_norm_kernel(H1, make_point(H1, [1, 0], [0]), 0.5).value
    b = riesz_norm_kernel(H1, make_point(H1, [0, 0], [0.25]), 0.5).value
    assert abs(a - b) / max(a, b) > 0.5


def test_riesz_errors():
    with pytest.raises(SingularityError):
        riesz_norm_kernel(H1, H1.identity(), 0.5)
    with pytest.raises(InvalidInputError):
        riesz_norm_kernel(H1, make_point(H1, [1, 0], [0]), 1.0)
