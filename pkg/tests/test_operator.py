import math

import mpmath as mp
import numpy as np
import pytest

import htfrac._dispatch as dispatch
from htfrac import (InvalidInputError, QuadratureConfig, apply_Ls, bump, constant, dilate,
                    euclidean, gaussian, heisenberg, make_point, multiply, polynomial,
                    quaternionic, sub_laplacian, tail, tail_profile)
from htfrac import _pykernels
from htfrac.fields import koranyi_profile, rescale, translate

H1 = heisenberg(1)


def frac_laplacian_gaussian(n, s, r2):
    """(-Delta)^s e^(-|x|^2/2) by the Fourier transform, divided by the standard constant."""
    lap = 2 ** s * mp.gamma((n + 2 * s) / 2) / mp.gamma(n / 2) * mp.hyp1f1((n + 2 * s) / 2, n / 2,
                                                                          -r2 / 2)
    C = s * 4 ** s * mp.gamma((n + 2 * s) / 2) / (mp.pi ** (n / 2) * mp.gamma(1 - s))
    return float(lap / C)


@pytest.mark.parametrize("n", [1, 2, 3])
@pytest.mark.parametrize("s", [0.3, 0.7])
def test_euclidean_operator_matches_fourier_oracle(n, s):
    E = euclidean(n)
    x = [0.3] + [0.1] * (n - 1)
    r = apply_Ls(E, gaussian(E, math.sqrt(2)), make_point(E, x), s)
    want = frac_laplacian_gaussian(n, s, sum(v * v for v in x))
    assert r.method == "monte_carlo"
    assert abs(r.value - want) <= 2 * r.error_estimate      # error estimate is 2 SE
    assert r.error_estimate < 0.03 * abs(want)


def test_constant_field_is_exactly_annihilated():
    r = apply_Ls(H1, constant(H1, 3.0), make_point(H1, [0.1, 0.2], [0.3]), 0.5)
    assert r.value == 0.0 and r.method == "exact"


def test_tensor_and_monte_carlo_agree():
    u = bump(H1, 1.5, 5)
    g = make_point(H1, [0.3, -0.2], [0.1])
    a = apply_Ls(H1, u, g, 0.4)
    b = apply_Ls(H1, u, g, 0.4, QuadratureConfig(mode="monte_carlo"))
    assert a.method == "tensor"
    assert abs(a.value - b.value) <= 2 * (a.error_estimate + b.error_estimate)
    assert a.error_estimate < 1e-6 * abs(a.value)


def test_left_invariance_and_dilation_covariance_tensor():
    u = bump(H1, 1.5, 5)
    g = make_point(H1, [0.3, 0.3], [-0.2])
    g0 = make_point(H1, [0.5, -0.5], [0.4])
    s = 0.6
    a = apply_Ls(H1, translate(u, g0), g, s)
    b = apply_Ls(H1, u, multiply(H1, g0, g), s)
    assert a.value == pytest.approx(b.value, rel=1e-7)
    lam = 1.7
    c = apply_Ls(H1, rescale(u, lam), g, s)
    d = apply_Ls(H1, u, dilate(H1, lam, g), s)
    assert c.value == pytest.approx(lam ** (2 * s) * d.value, rel=1e-7)


def test_compiled_and_numpy_paths_agree(monkeypatch):
    u = koranyi_profile(H1, 1.0, (H1.Q + 1) / 4)
    g = make_point(H1, [0.4, 0.1], [0.2])
    a = apply_Ls(H1, u, g, 0.5)
    monkeypatch.setattr(dispatch, "_impl", _pykernels)
    b = apply_Ls(H1, u, g, 0.5)
    assert a.value == pytest.approx(b.value, rel=1e-12)


@pytest.mark.skipif(dispatch.backend() != "cython", reason="extension not built")
def test_kernel_functions_bitwise_close():
    rng = np.random.default_rng(3)
    u = bump(quaternionic(1), 2.0, 5)
    spec = quaternionic(1)
    hz, hs = rng.normal(size=(500, 4)), rng.normal(size=(500, 3))
    g = make_point(spec, rng.normal(size=4) * 0.2, rng.normal(size=3) * 0.2)
    out = [dispatch.plan(spec, u, True, 0.8, 0.5, dispatch.implementation(n)).avg(
        g.z, g.sigma, hz, hs) for n in ("python", "cython")]
    assert np.allclose(out[0], out[1], rtol=1e-13, atol=1e-300)


def test_sub_laplacian_on_polynomials():
    g = make_point(H1, [0.7, -0.4], [0.25])
    zz = polynomial(H1, lambda z, s: np.sum(z * z, axis=-1))
    ss = polynomial(H1, lambda z, s: s[..., 0] ** 2)
    assert sub_laplacian(H1, zz, g) == pytest.approx(4.0, rel=1e-8)
    # sum_j (X_j sigma)^2 = |J z|^2 / 4, so sum X_j^2 sigma^2 = |z|^2 / 2
    assert sub_laplacian(H1, ss, g) == pytest.approx(0.65 / 2, rel=1e-8)


def test_operator_argument_errors():
    u = bump(H1)
    with pytest.raises(InvalidInputError):
        apply_Ls(H1, u, H1.identity(), 1.0)
    with pytest.raises(InvalidInputError):
        apply_Ls(quaternionic(1), u, quaternionic(1).identity(), 0.5)


def test_tail_profile_consistency():
    u = bump(H1, 1.0, 5)
    radii = (2.0, 4.0, 8.0)
    prof = tail_profile(H1, u, make_point(H1, [3.0, 0.0], [0.0]), radii, 0.5)
    single = tail(H1, u, make_point(H1, [3.0, 0.0], [0.0]), 4.0, 0.5)
    assert single.value == pytest.approx(prof[1].value, rel=1e-9)
    integ = [p.integral for p in prof]
    assert integ[0] >= integ[1] >= integ[2] >= 0
    far = tail_profile(H1, u, H1.identity(), (2.0,), 0.5)
    assert far[0].value == 0.0          # support inside the excluded ball
