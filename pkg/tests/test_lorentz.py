import math

import mpmath as mp
import numpy as np
import pytest
from hypothesis import given, strategies as st

from htfrac import DomainError, InvalidInputError, LorentzCutoffSpec, heisenberg, lorentz_cutoff_norm
from htfrac.lorentz import (distribution, distribution_mc, profile_level_volume,
                            profile_weak_norm, rearrangement, scaling_slope)
from htfrac.haar import omega_Q
from htfrac.quadrature import QuadratureConfig

H1 = heisenberg(1)


def cut(alpha, R, p, q):
    return LorentzCutoffSpec.for_group(H1, alpha, R, p, q)


def lorentz_oracle(c: LorentzCutoffSpec):
    """Defining integral (int_0^inf (t^(1/p) rho*(t))^q dt/t)^(1/q), by mpmath in u = log t."""
    Q, a, p, q, R, sQ = c.Q, c.alpha, c.p, c.sigma_exp, c.R, c.sQ
    g = lambda u: (mp.e ** (u / p) * (Q * mp.e ** u / sQ + mp.mpf(R) ** Q) ** (-mp.mpf(a) / Q)) ** q
    u0 = mp.log(sQ * R ** Q / Q)
    return float(mp.quad(g, [-mp.inf, u0 - 10, u0, u0 + 10, mp.inf]) ** (1 / mp.mpf(q)))


@pytest.mark.parametrize("alpha,R,p,q", [(5.0, 2.0, 4.0, 1.0), (6.0, 1.0, 2.0, 2.0),
                                         (4.0, 3.0, 1.5, 3.0), (7.5, 0.5, 1.0, 1.0)])
def test_closed_form_matches_mpmath(alpha, R, p, q):
    c = cut(alpha, R, p, q)
    ln = lorentz_cutoff_norm(c)
    want = lorentz_oracle(c)
    assert ln.closed_form == pytest.approx(want, rel=1e-10)
    assert ln.rel_discrepancy <= 1e-8


def test_weak_type_norm():
    c = cut(5.0, 2.0, 4.0, math.inf)
    ln = lorentz_cutoff_norm(c)
    ts = np.logspace(-6, 6, 20001)
    brute = float(np.max(ts ** 0.25 * rearrangement(c, ts)))
    assert ln.closed_form == pytest.approx(brute, rel=1e-6)
    assert ln.rel_discrepancy <= 1e-8


@given(st.floats(4.5, 12), st.floats(0.2, 5), st.floats(1.1, 4), st.floats(1, 5))
def test_scaling_law(alpha, R, p, q):
    if not alpha > 4 / p + 0.05:
        return
    c = cut(alpha, R, p, q)
    c2 = cut(alpha, 2 * R, p, q)
    n1, n2 = lorentz_cutoff_norm(c).closed_form, lorentz_cutoff_norm(c2).closed_form
    assert n2 / n1 == pytest.approx(2 ** (-(alpha - 4 / p)), rel=1e-12)


def test_scaling_slope_quadrature():
    c = cut(6.0, 1.0, 2.0, 2.0)
    assert scaling_slope(c) == pytest.approx(-(6.0 - 2.0), rel=1e-8)


@given(st.floats(0, 1e3), st.floats(0, 1e3))
def test_rearrangement_monotone_and_equimeasurable(t1, t2):
    c = cut(5.0, 1.5, 2.0, 1.0)
    lo, hi = sorted((t1, t2))
    assert rearrangement(c, lo) >= rearrangement(c, hi)
    # mu(rho*(t)) = t for t > 0
    if lo > 1e-6:
        assert float(distribution(c, rearrangement(c, lo))) == pytest.approx(lo, rel=1e-9)


def test_distribution_mc_within_three_se():
    c = cut(5.0, 1.0, 2.0, 1.0)
    levels = np.geomspace(0.02, 0.8, 5)
    for d in distribution_mc(H1, c, levels, QuadratureConfig(mc_samples=1 << 17, seed=5)):
        assert d.z_score <= 3


def test_divergent_and_invalid_cutoffs():
    with pytest.raises(DomainError):
        cut(2.0, 1.0, 2.0, 1.0)
    with pytest.raises(InvalidInputError):
        cut(5.0, -1.0, 2.0, 1.0)
    with pytest.raises(InvalidInputError):
        cut(5.0, 1.0, 0.5, 1.0)


def test_profile_level_volume_matches_ball_volume():
    # a = 0 gives the gauge ball of radius M^(1/4)
    assert profile_level_volume(H1, 0.0, 16.0) == pytest.approx(omega_Q(H1) * 2 ** 4, rel=1e-10)


def test_profile_weak_norm_critical_exponent():
    # 4 p r = Q: weak norm equals c omega_Q^(1/r), attained as lam -> 0
    p, r = 0.5, 2.0
    assert profile_weak_norm(H1, 1.0, p, 1.0, r) == pytest.approx(omega_Q(H1) ** (1 / r), rel=1e-8)
