"""Lorentz norms of truncated gauge powers and weak norms of Koranyi profiles.

For ``rho_(alpha,R) = |g|^-alpha 1{|g| >= R}`` the distribution function is
``mu(t) = (sigma_Q/Q)(t^(-Q/alpha) - R^Q)`` below ``R^-alpha`` and its
rearrangement is ``rho*(t) = (Q t / sigma_Q + R^Q)^(-alpha/Q)``. Writing
``t = (sigma_Q R^Q / Q) x`` turns the Lorentz integral into a Beta function,

    ||rho||_(p,q) = (sigma_Q/Q)^(1/p) B(q/p, q(alpha/Q - 1/p))^(1/q) R^-(alpha - Q/p),

which is compared with direct quadrature of the defining integral.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import integrate, optimize

from .errors import DomainError, InvalidInputError
from .groups import GroupSpec
from .haar import box_volume, omega_Q, sample_box, sigma_Q
from .quadrature import QuadratureConfig, chunked_moments, seed_sequence
from .special import log_gamma, lorentz_beta


@dataclass(frozen=True)
class LorentzCutoffSpec:
    """Truncated gauge power ``rho_(alpha,R)`` measured in ``L^(p, sigma_exp)``."""
    Q: int
    alpha: float
    R: float
    p: float
    sigma_exp: float = 1.0
    sigma_Q: float | None = None   # surface constant; defaults to the H-type value for Q

    def __post_init__(self):
        if not self.R > 0:
            raise InvalidInputError("R must be positive")
        if not self.p >= 1 or not self.sigma_exp >= 1:
            raise InvalidInputError("Lorentz indices must be >= 1")
        if not self.alpha > self.Q / self.p:
            raise DomainError("Lorentz norm of the cut-off diverges unless alpha > Q/p")

    @classmethod
    def for_group(cls, spec: GroupSpec, alpha, R, p, sigma_exp=1.0):
        return cls(spec.Q, float(alpha), float(R), float(p), float(sigma_exp), sigma_Q(spec))

    @property
    def sQ(self) -> float:
        if self.sigma_Q is None:
            raise InvalidInputError("sigma_Q must be supplied (use for_group)")
        return self.sigma_Q


@dataclass(frozen=True)
class LorentzNorm:
    closed_form: float
    quadrature: float
    quadrature_error: float
    constant: float           # C_(Q,sigma): the norm times R^(alpha - Q/p)

    @property
    def rel_discrepancy(self) -> float:
        return abs(self.closed_form - self.quadrature) / abs(self.closed_form)


def distribution(cut: LorentzCutoffSpec, t):
    """``mu(t) = |{rho_(alpha,R) > t}|``."""
    t = np.asarray(t, float)
    top = cut.R ** (-cut.alpha)
    with np.errstate(divide="ignore"):
        mu = cut.sQ / cut.Q * (t ** (-cut.Q / cut.alpha) - cut.R ** cut.Q)
    return np.where(t >= top, 0.0, mu)


def rearrangement(cut: LorentzCutoffSpec, t):
    """Decreasing rearrangement ``rho*(t) = (Q t / sigma_Q + R^Q)^(-alpha/Q)``."""
    t = np.asarray(t, float)
    if np.any(t < 0):
        raise InvalidInputError("rearrangement needs t >= 0")
    return (cut.Q * t / cut.sQ + cut.R ** cut.Q) ** (-cut.alpha / cut.Q)


def _closed_form(cut: LorentzCutoffSpec) -> tuple[float, float]:
    Q, a, p, q, R = cut.Q, cut.alpha, cut.p, cut.sigma_exp, cut.R
    lead = (cut.sQ / Q) ** (1.0 / p)
    if math.isinf(q):
        # sup_x x^(1/p) (1+x)^(-a/Q) at x = (Q/p) / (a - Q/p)
        x = (Q / p) / (a - Q / p)
        C = lead * x ** (1 / p) * (1 + x) ** (-a / Q)
    else:
        C = lead * lorentz_beta(q / p, q * (a / Q - 1.0 / p)) ** (1.0 / q)
    return C * R ** (-(a - Q / p)), C


def _quadrature(cut: LorentzCutoffSpec) -> tuple[float, float]:
    p, q = cut.p, cut.sigma_exp
    if math.isinf(q):
        # log of t^(1/p) rho*(t) is concave in u = log t, so a bounded search is safe
        lq, lR = math.log(cut.Q / cut.sQ), cut.Q * math.log(cut.R)
        t0 = lR - lq
        f = lambda u: -(u / p - cut.alpha / cut.Q * np.logaddexp(lq + u, lR))
        res = optimize.minimize_scalar(f, bounds=(t0 - 60, t0 + 60), method="bounded",
                                       options={"xatol": 1e-10})
        v = math.exp(-res.fun)
        return v, 1e-10 * v
    # integrate in u = log t; the integrand is exp(q u / p) rho*(e^u)^q
    t0 = math.log(cut.sQ * cut.R ** cut.Q / cut.Q)
    lq, lR = math.log(cut.Q / cut.sQ), cut.Q * math.log(cut.R)
    e = q * cut.alpha / cut.Q

    def g(u):
        return math.exp(q * u / p - e * np.logaddexp(lq + u, lR))
    v1, e1 = integrate.quad(g, -np.inf, t0, epsabs=0, epsrel=1e-12, limit=200)
    v2, e2 = integrate.quad(g, t0, np.inf, epsabs=0, epsrel=1e-12, limit=200)
    v = v1 + v2
    return v ** (1.0 / q), (e1 + e2) / (q * v) * v ** (1.0 / q)


def lorentz_cutoff_norm(cut: LorentzCutoffSpec) -> LorentzNorm:
    """``||rho_(alpha,R)||_(L^(p,sigma))`` in closed form and by 1-D quadrature."""
    cf, C = _closed_form(cut)
    qv, qe = _quadrature(cut)
    return LorentzNorm(cf, qv, qe, C)


def scaling_slope(cut: LorentzCutoffSpec, radii=(1.0, 2.0, 4.0, 8.0)) -> float:
    """Least-squares slope of log norm vs log R from the quadrature values."""
    from dataclasses import replace
    vals = [lorentz_cutoff_norm(replace(cut, R=float(R))).quadrature for R in radii]
    return float(np.polyfit(np.log(radii), np.log(vals), 1)[0])


@dataclass(frozen=True)
class DistributionCheck:
    level: float
    exact: float
    estimate: float
    stderr: float

    @property
    def z_score(self) -> float:
        return abs(self.estimate - self.exact) / max(self.stderr, 1e-300)


def distribution_mc(spec: GroupSpec, cut: LorentzCutoffSpec, levels,
                    quad: QuadratureConfig | None = None, label="lorentz.mu"):
    """Hit-or-miss estimate of ``|{rho > t}|`` in a box containing every level set."""
    quad = quad or QuadratureConfig()
    levels = [float(t) for t in levels]
    if min(levels) <= 0:
        raise InvalidInputError("levels must be positive")
    Rb = min(levels) ** (-1.0 / cut.alpha)
    vol = box_volume(spec, Rb)
    out = []
    for j, t in enumerate(levels):
        def fn(rng, size, t=t):
            z, s = sample_box(spec, Rb, size, rng)
            g = spec.gauge_arrays(z, s)
            with np.errstate(divide="ignore"):
                rho = np.where(g >= cut.R, g ** (-cut.alpha), 0.0)
            return vol * (rho > t)
        est = chunked_moments(fn, quad.mc_samples, seed_sequence(quad.seed, label, j),
                              quad.chunk_size, quad.workers)
        out.append(DistributionCheck(t, float(distribution(cut, t)), est.mean, est.stderr))
    return out


# --------------------------------------------------------------------------
# Koranyi profiles c ((|z|^2 + a^2)^2 + 16|sigma|^2)^-p

def _unit_ball(n: int) -> float:
    return math.pi ** (n / 2) / math.exp(log_gamma(n / 2 + 1))


def profile_level_volume(spec: GroupSpec, a: float, M: float) -> float:
    """``|{(|z|^2 + a^2)^2 + 16|sigma|^2 < M}|`` by a 1-D integral over |z|."""
    m, k = spec.m, spec.k
    if M <= a ** 4:
        return 0.0
    X = math.sqrt(M) - a * a
    if k == 0:
        return _unit_ball(m) * X ** (m / 2)
    # x = |z|^2; the endpoint factor (X - x)^(k/2) goes into the algebraic weight
    f = lambda x: 0.5 * (math.sqrt(M) + a * a + x) ** (k / 2)
    v = integrate.quad(f, 0.0, X, weight="alg", wvar=(m / 2 - 1, k / 2), epsabs=0,
                       epsrel=1e-12, limit=200)[0]
    return m * _unit_ball(m) * _unit_ball(k) * 4.0 ** (-k) * v


def profile_distribution(spec: GroupSpec, a: float, p: float, c: float, lam: float) -> float:
    """Distribution function of the profile at level ``lam``."""
    if lam <= 0:
        return math.inf
    return profile_level_volume(spec, a, (c / lam) ** (1.0 / p))


def profile_weak_norm(spec: GroupSpec, a: float, p: float, c: float, r: float) -> float:
    """``||u||_(L^(r,inf)) = sup_lam lam mu(lam)^(1/r)`` for a Koranyi profile.

    The supremum is searched on a logarithmic grid, refined by a bounded
    scalar minimisation, and compared with the ``lam -> 0`` limit
    ``c omega_Q^(1/r)`` (valid when ``4 p r = Q``).
    """
    top = c * a ** (-4 * p) if a > 0 else math.inf
    if not math.isfinite(top):
        raise DomainError("weak norm of a singular profile is not supported")
    f = lambda x: -math.exp(x) * profile_distribution(spec, a, p, c, math.exp(x)) ** (1.0 / r)
    xs = np.linspace(math.log(top) - 40.0, math.log(top) - 1e-9, 400)
    vals = np.array([f(x) for x in xs])
    i = int(np.argmin(vals))
    lo, hi = xs[max(i - 1, 0)], xs[min(i + 1, len(xs) - 1)]
    best = -vals[i]
    if hi > lo:
        res = optimize.minimize_scalar(f, bounds=(lo, hi), method="bounded",
                                       options={"xatol": 1e-10})
        best = max(best, -res.fun)
    if abs(4 * p * r - spec.Q) < 1e-12:
        best = max(best, c * omega_Q(spec) ** (1.0 / r))
    return best
