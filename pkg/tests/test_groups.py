import numpy as np
import pytest
from hypothesis import given, strategies as st
from hypothesis.extra.numpy import arrays

from htfrac import (InvalidInputError, custom_group, dilate, euclidean, gauge, group_from_id,
                    heisenberg, inverse, make_point, multiply, quaternionic, validate_htype)
from htfrac.groups import quaternion_left_matrices

GROUPS = [heisenberg(1), heisenberg(2), quaternionic(1), euclidean(3)]
coord = st.floats(-50, 50, allow_nan=False, allow_infinity=False)


def points(spec):
    return st.builds(lambda z, s: make_point(spec, z, s),
                     arrays(float, spec.m, elements=coord),
                     arrays(float, spec.k, elements=coord))


def close(spec, p, q, tol=1e-10):
    scale = 1.0 + np.abs(p.z).max(initial=0) ** 2 + np.abs(p.sigma).max(initial=0)
    return (np.allclose(p.z, q.z, atol=tol * scale, rtol=0)
            and np.allclose(p.sigma, q.sigma, atol=tol * scale, rtol=0))


@pytest.mark.parametrize("spec", GROUPS, ids=lambda g: g.name)
def test_structure_maps_are_htype(spec):
    assert validate_htype(spec).passed


def test_quaternion_maps_anticommute():
    J = quaternion_left_matrices()
    for a in range(3):
        for b in range(3):
            want = -2 * np.eye(4) * (a == b)
            assert np.allclose(J[a] @ J[b] + J[b] @ J[a], want)


def test_custom_group_rejects_non_htype():
    with pytest.raises(InvalidInputError):
        custom_group(np.eye(2)[None])


@pytest.mark.parametrize("bad", ["lie:2", "heisenberg:0", "heisenberg:x"])
def test_group_from_id_errors(bad):
    with pytest.raises(InvalidInputError):
        group_from_id(bad)


def test_heisenberg_example_product():
    H = heisenberg(1)
    p = multiply(H, make_point(H, [1, 0], [0]), make_point(H, [0, 1], [0]))
    assert np.allclose(p.z, [1, 1])
    # sigma = <J e1, e2> / 2 with the standard symplectic J
    assert abs(abs(p.sigma[0]) - 0.5) < 1e-15


@pytest.mark.parametrize("spec", GROUPS, ids=lambda g: g.name)
def test_group_laws(spec):
    @given(points(spec), points(spec), points(spec))
    def run(p, q, r):
        assert close(spec, multiply(spec, multiply(spec, p, q), r),
                     multiply(spec, p, multiply(spec, q, r)))
        e = spec.identity()
        assert close(spec, multiply(spec, p, inverse(spec, p)), e)
        assert close(spec, multiply(spec, e, p), p)
    run()


@pytest.mark.parametrize("spec", GROUPS, ids=lambda g: g.name)
def test_dilation_is_automorphism_and_gauge_homogeneous(spec):
    @given(points(spec), points(spec), st.floats(1e-3, 1e3))
    def run(p, q, lam):
        lhs = dilate(spec, lam, multiply(spec, p, q))
        rhs = multiply(spec, dilate(spec, lam, p), dilate(spec, lam, q))
        sz = 1 + lam * (np.abs(p.z).sum() + np.abs(q.z).sum())
        assert np.allclose(lhs.z, rhs.z, atol=1e-12 * sz, rtol=0)
        assert np.allclose(lhs.sigma, rhs.sigma, atol=1e-11 * sz ** 2, rtol=0)
        g = gauge(spec, p)
        assert abs(gauge(spec, dilate(spec, lam, p)) - lam * g) <= 1e-12 * lam * max(g, 1e-300)
        assert abs(gauge(spec, inverse(spec, p)) - g) <= 1e-14 * max(g, 1e-300)
    run()


@pytest.mark.parametrize("spec", GROUPS, ids=lambda g: g.name)
def test_gauge_triangle_inequality(spec):
    @given(points(spec), points(spec))
    def run(p, q):
        assert gauge(spec, multiply(spec, p, q)) <= (gauge(spec, p) + gauge(spec, q)) * (1 + 1e-12)
    run()


def test_euclidean_gauge_is_norm():
    E = euclidean(3)
    p = make_point(E, [3.0, 4.0, 12.0])
    assert gauge(E, p) == pytest.approx(13.0, rel=1e-15)


def test_dilation_rejects_nonpositive():
    H = heisenberg(1)
    with pytest.raises(InvalidInputError):
        dilate(H, 0.0, H.identity())


def test_point_dimension_mismatch():
    with pytest.raises(InvalidInputError):
        make_point(heisenberg(1), [1.0, 2.0, 3.0], [0.0])
