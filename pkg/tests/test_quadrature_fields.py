import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from htfrac import (InvalidInputError, PreconditionError, QuadratureConfig, bump, constant,
                    euclidean, gauge, gaussian, heisenberg, koranyi_profile, make_point,
                    quaternionic)
from htfrac.fields import from_function, gauge_power, power, product, rescale, translate
from htfrac.haar import sample_ball, sample_sphere, unit_ball_volume, shell_volume
from htfrac.polar import power_mass, power_sample
from htfrac.quadrature import (chunked_moments, composite_gauss_legendre, gauss_legendre,
                               power_rule, seed_sequence, shell_rule, smooth_cutoff)

H1 = heisenberg(1)


def test_gauss_legendre_exact_for_polynomials():
    x, w = gauss_legendre(-1.0, 2.0, 10)
    assert np.sum(w * x ** 19) == pytest.approx((2.0 ** 20 - 1) / 20, rel=1e-13)
    x, w = composite_gauss_legendre([0, 1, 3], 8)
    assert np.sum(w * np.exp(x)) == pytest.approx(math.e ** 3 - 1, rel=1e-14)


@given(st.floats(-0.9, 3.0), st.floats(0.1, 10))
def test_power_rule_moments(power, b):
    x, w = power_rule(b, power, 24)
    assert np.sum(w) == pytest.approx(b ** (power + 1) / (power + 1), rel=1e-12)


def test_shell_rule_integrates_inverse_square():
    x, w = shell_rule(1e-2, 1e3, 6, 8)
    assert np.sum(w / x ** 2) == pytest.approx(1e2 - 1e-3, rel=1e-12)
    with pytest.raises(InvalidInputError):
        shell_rule(0.0, 1.0, 6, 8)


@given(st.floats(0.01, 1), st.floats(1.1, 50), st.floats(-3, 3))
def test_power_sample_mean(a, ratio, q):
    b = a * ratio
    u = (np.arange(4000) + 0.5) / 4000
    r = power_sample(a, b, q, u)
    assert np.all((r >= a * (1 - 1e-12)) & (r <= b * (1 + 1e-12)))
    want = power_mass(a, b, q + 1) / power_mass(a, b, q)
    assert np.mean(r) == pytest.approx(want, rel=2e-3)


def test_smooth_cutoff_shape():
    t = np.linspace(0, 1.2, 241)
    c = smooth_cutoff(t, 0.25)
    assert np.all(c[t <= 0.25] == 1) and np.all(c[t >= 1] == 0)
    assert np.all(np.diff(c) <= 1e-15)


def test_chunked_moments_independent_of_workers():
    fn = lambda rng, n: rng.standard_normal(n) ** 2
    a = chunked_moments(fn, 50_000, seed_sequence(7, "x"), 4096, 1)
    b = chunked_moments(fn, 50_000, seed_sequence(7, "x"), 4096, 4)
    assert a == b
    assert a.mean == pytest.approx(1.0, abs=4 * a.stderr)


def test_seed_sequence_labels_separate_streams():
    s1 = seed_sequence(1, "a").generate_state(4)
    s2 = seed_sequence(1, "b").generate_state(4)
    assert not np.array_equal(s1, s2)
    assert np.array_equal(s1, seed_sequence(1, "a").generate_state(4))


def test_quadrature_config_validation():
    with pytest.raises(InvalidInputError):
        QuadratureConfig(mode="simpson")
    with pytest.raises(InvalidInputError):
        QuadratureConfig(split_radius=2.0, r_max=1.0)
    with pytest.raises(InvalidInputError):
        QuadratureConfig(mc_samples=0)


@pytest.mark.parametrize("spec", [H1, quaternionic(1), euclidean(3)], ids=lambda g: g.name)
def test_samplers_land_on_sphere_and_in_ball(spec):
    rng = np.random.default_rng(0)
    z, s = sample_sphere(spec, 1000, rng)
    assert np.allclose(spec.gauge_arrays(z, s), 1.0, rtol=1e-12)
    z, s = sample_ball(spec, 2.0, 1000, rng)
    assert np.all(spec.gauge_arrays(z, s) <= 2.0 + 1e-12)


@pytest.mark.parametrize("spec", [H1, quaternionic(1)], ids=lambda g: g.name)
def test_ball_volume_mc_vs_shell(spec):
    mc = unit_ball_volume(spec, QuadratureConfig(mc_samples=1 << 17))
    assert abs(mc.value - shell_volume(spec).value) <= 3 * mc.stderr


def test_sphere_sampler_is_uniform_for_surface_measure():
    # the mean of |z|^2 over the sphere is tau / sigma_Q = pi / (pi^2/2) on H^1
    rng = np.random.default_rng(11)
    z, s = sample_sphere(H1, 400_000, rng)
    v = np.sum(z * z, axis=1)
    assert np.mean(v) == pytest.approx(2 / math.pi, abs=4 * np.std(v) / math.sqrt(v.size))


def test_bump_support_and_smoothness_metadata():
    b = bump(H1, 1.5, 5)
    assert b.support_radius == 1.5
    assert b.at(make_point(H1, [1.6, 0], [0])) == 0
    assert b.at(H1.identity()) == 1.0


def test_field_metadata_is_validated():
    with pytest.raises(PreconditionError):
        from_function(H1, lambda z, s: np.ones(z.shape[:-1]), support_radius=1.0)
    with pytest.raises(PreconditionError):
        from_function(H1, lambda z, s: np.ones(z.shape[:-1]), decay_exponent=2.0)
    with pytest.raises(InvalidInputError):
        from_function(H1, lambda z, s: np.zeros(z.shape[:-1]), scale=0.0)


def test_koranyi_profile_asymptotics():
    p = koranyi_profile(H1, 1.0, 0.75)
    for g in (make_point(H1, [1e3, 0], [0]), make_point(H1, [0, 0], [2.5e5])):
        assert p.at(g) * gauge(H1, g) ** 3 == pytest.approx(1.0, rel=1e-5)


def test_field_combinators():
    g0 = make_point(H1, [0.2, 0.1], [0.3])
    g = make_point(H1, [0.5, -0.2], [0.1])
    u = gaussian(H1, 1.3)
    from htfrac import multiply, dilate
    assert translate(u, g0).at(g) == pytest.approx(u.at(multiply(H1, g0, g)))
    assert rescale(u, 2.0, 1.5).at(g) == pytest.approx(2.0 ** 1.5 * u.at(dilate(H1, 2.0, g)))
    assert power(u, 0.5).at(g) == pytest.approx(math.sqrt(u.at(g)))
    gp = gauge_power(H1, 2.0)
    assert product(u, gp).at(g) == pytest.approx(u.at(g) * gauge(H1, g) ** -2)
    assert constant(H1, 2.0).at(g) == 2.0
