"""Double integrals: the quadratic form, the Gagliardo-type seminorm, Sobolev quotients.

Pairs ``(x, y = x o h)`` are sampled jointly. ``x`` comes from gauge shells
around the field's center and ``h`` from radial strata whose length scale
follows ``x``; every radius is tied to the field's ``center`` and ``scale``
metadata, so the sampler is covariant under left translations and
dilations. Running a transformed field with the same seed therefore reuses
the same random numbers in transformed coordinates (common random numbers).
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import DivergenceError, InvalidInputError, PreconditionError
from .fields import ScalarField
from .groups import GroupSpec
from .haar import omega_Q, sample_ball, sample_sphere, sigma_Q
from .polar import Stratum, integrate_mc, power_mass, power_sample
from .quadrature import QuadratureConfig, chunked_moments, seed_sequence

_INF = float("inf")


@dataclass
class FormResult:
    """Monte Carlo value with its standard error and per-stratum contributions."""
    value: float
    stderr: float
    method: str = "monte_carlo"
    shells: list = field(default_factory=list)
    diagnostics: dict = field(default_factory=dict)

    @property
    def error_estimate(self) -> float:
        return self.stderr

    def as_dict(self) -> dict:
        return {"value": self.value, "stderr": self.stderr, "method": self.method,
                "shells": self.shells, "diagnostics": self.diagnostics}


def _check_s(s, p=2.0):
    if not 0 < s < 1:
        raise InvalidInputError("s must lie in (0, 1)")
    if p < 1:
        raise InvalidInputError("p must be >= 1")


# --------------------------------------------------------------------------
# x shells and h strata

@dataclass(frozen=True)
class _XShell:
    r0: float
    r1: float
    q: float      # radial sampling density ~ r^q on [r0, r1]
    tag: str


def _x_shells(u: ScalarField, decay_power: float | None, n_shells: int = 8):
    """Shells of the center-relative radius; ``decay_power`` is the radial decay
    of the x-integrand (after the h integration), used for the outermost shell."""
    L = u.scale
    Q = u.spec.Q
    if u.support_radius is not None:
        R = u.support_radius
        return [_XShell(0.0, 0.5 * R, Q - 1, "x0"), _XShell(0.5 * R, R, Q - 1, "x1")]
    out = [_XShell(0.0, L, Q - 1, "x0")]
    for j in range(n_shells):
        out.append(_XShell(L * 2.0 ** j, L * 2.0 ** (j + 1), Q - 1, f"x{j + 1}"))
    a = max(decay_power, 0.25)
    out.append(_XShell(L * 2.0 ** n_shells, _INF, -1.0 - a, "xtail"))
    return out


def _draw_x(spec, u: ScalarField, sh: _XShell, rng, n):
    r = power_sample(sh.r0, sh.r1, sh.q, rng.random(n))
    oz, os_ = sample_sphere(spec, n, rng)
    xz, xs = spec.dilate_arrays(r[:, None], oz, os_)
    c = u.center
    xz, xs = spec.product(c.z, c.sigma, xz, xs)
    # x measure r^(Q-1) dr dsigma, sampled with density r^q / mass on the shell
    W = sigma_Q(spec) * power_mass(sh.r0, sh.r1, sh.q) * r ** (spec.Q - 1 - sh.q)
    return xz, xs, W, r


def _h_strata(expo: float, q_inner: float):
    """Unit-scale radial strata for h: power rule near 0, octave shells, tail to infinity."""
    out = [(0.0, 0.125, q_inner)]
    r = 0.125
    while r < 64.0:
        out.append((r, 2 * r, -1.0 - expo))
        r *= 2
    out.append((64.0, _INF, -1.0 - expo))
    return out


def _pair_strata(spec, xshells, hstrata, expo, draw_x, pair_fn, ell_of):
    """Strata evaluating ``W_x ell^-expo D(x, y) rho^(-1-expo-q)`` with y = x o delta_ell(h)."""
    strata = []
    for sh in xshells:
        for (a, b, q) in hstrata:
            def F(rho, oz, os_, rng, sh=sh, q=q):
                n = len(rho)
                xz, xs, W, r = draw_x(sh, rng, n)
                ell = ell_of(r)
                hz, hs = spec.dilate_arrays((ell * rho)[:, None], oz, os_)
                yz, ys = spec.product(xz, xs, hz, hs)
                D = pair_fn(xz, xs, yz, ys, r)
                return W * ell ** (-expo) * D * rho ** (-1.0 - expo - q)
            strata.append(Stratum(a, b, q, F, sh.tag, needs_rng=True))
    return strata


def _collect(res, xshells):
    val = math.fsum(res[sh.tag][0] for sh in xshells if sh.tag in res)
    se = math.sqrt(math.fsum(res[sh.tag][1] ** 2 for sh in xshells if sh.tag in res))
    shells = [{"tag": sh.tag, "r0": sh.r0, "r1": sh.r1, "value": res[sh.tag][0],
               "stderr": res[sh.tag][1]} for sh in xshells if sh.tag in res]
    return val, se, shells


def _shell_convergence(shells, what: str) -> dict:
    """Ratio of successive finite-shell contributions; a ratio near 1 means divergence."""
    finite = [abs(r["value"]) for r in shells if math.isfinite(r["r1"]) and r["r0"] > 0]
    diag = {"shell_values": finite}
    if len(finite) < 4:
        return diag
    last = np.array(finite[-4:])
    if np.all(last > 0):
        ratio = float(np.exp(np.polyfit(np.arange(4.0), np.log(last), 1)[0]))
        diag["shell_ratio"] = ratio
        if ratio > 0.97:
            raise DivergenceError(f"{what}: shell contributions do not decay (ratio {ratio:.3f})")
    return diag


def _require_integrable(u: ScalarField, what: str):
    if u.support_radius is None and u.decay_exponent is None and not (u.bounded and u.bound is not None):
        raise PreconditionError(f"{what}: field needs support or decay metadata")


# --------------------------------------------------------------------------
# public API

def quadratic_form(spec: GroupSpec, u: ScalarField, phi: ScalarField, s: float,
                   quad: QuadratureConfig | None = None, label: str = "qform") -> FormResult:
    """``Q_s(u, phi) = int int (u(x)-u(y))(phi(x)-phi(y)) |y^-1 x|^(-Q-2s) dx dy``.

    One of the two points must lie in ``S = B(c_phi, R_phi)``; with ``x`` drawn
    uniformly in ``S`` the pair weight is 2 when ``y`` leaves ``S`` and 1 when
    it stays (those pairs are otherwise counted twice).
    """
    quad = quad or QuadratureConfig()
    _check_s(s)
    if phi.support_radius is None:
        raise PreconditionError("quadratic_form needs a compactly supported test function")
    _require_integrable(u, "quadratic_form")
    R = phi.support_radius
    cz, cs = phi.center.z, phi.center.sigma
    Q = spec.Q
    if phi.constant == 0 or u.constant is not None:
        return FormResult(0.0, 0.0, "exact")

    def draw_x(sh, rng, n):
        return _draw_x(spec, phi, sh, rng, n)

    def pair(xz, xs, yz, ys, r):
        inside = spec.gauge_arrays(*spec.product(-cz, -cs, yz, ys)) < R
        d = (u(xz, xs) - u(yz, ys)) * (phi(xz, xs) - phi(yz, ys))
        return d * np.where(inside, 1.0, 2.0)

    xshells = [_XShell(0.0, R, Q - 1, "x")]
    strata = _pair_strata(spec, xshells, _h_strata(2 * s, 1 - 2 * s), 2 * s, draw_x, pair,
                          lambda r: np.full_like(r, R))
    res, stats = integrate_mc(spec, strata, quad, label)
    val, se, shells = _collect(res, xshells)
    return FormResult(val, se, "monte_carlo", shells, {"strata": len(strata)})


def seminorm(spec: GroupSpec, u: ScalarField, s: float, quad: QuadratureConfig | None = None,
             p: float = 2.0, label: str = "seminorm") -> FormResult:
    """``[u]_(s,p) = (int int |u(x)-u(y)|^p / |y^-1 x|^(Q+ps))^(1/p)``.

    Pairs are ordered so that ``x`` is the point closer to the field center
    (factor 2), which keeps the x-sampler concentrated where ``u`` lives.
    """
    quad = quad or QuadratureConfig()
    _check_s(s, p)
    Q = spec.Q
    if u.constant is not None:
        return FormResult(0.0, 0.0, "exact")
    if u.support_radius is None:
        if u.decay_exponent is None:
            raise PreconditionError("seminorm needs support or decay metadata")
        decay = p * u.decay_exponent + p * s - Q
        if decay <= 0:
            raise DivergenceError(
                f"seminorm diverges: decay exponent {u.decay_exponent} <= Q/p - s")
    else:
        decay = 1.0
    if u.center_exponent > 0:
        raise PreconditionError("seminorm needs a bounded field")
    c = u.center
    L = u.scale
    xshells = _x_shells(u, decay)
    expo = p * s

    def draw_x(sh, rng, n):
        return _draw_x(spec, u, sh, rng, n)

    def pair(xz, xs, yz, ys, r):
        ry = spec.gauge_arrays(*spec.product(-c.z, -c.sigma, yz, ys))
        d = np.abs(u(xz, xs) - u(yz, ys)) ** p
        return np.where(ry > r, 2.0 * d, 0.0)

    strata = _pair_strata(spec, xshells, _h_strata(expo, p - 1 - expo), expo, draw_x, pair,
                          lambda r: np.maximum(r, L))
    res, stats = integrate_mc(spec, strata, quad, label)
    I, se, shells = _collect(res, xshells)
    diag = _shell_convergence(shells, "seminorm") if u.support_radius is None else {}
    diag["integral"] = I
    diag["integral_stderr"] = se
    if I <= 0:
        return FormResult(0.0, se, "monte_carlo", shells, diag)
    val = I ** (1.0 / p)
    return FormResult(val, se / (p * I ** ((p - 1) / p)), "monte_carlo", shells, diag)


def lebesgue_norm(spec: GroupSpec, u: ScalarField, r: float, quad: QuadratureConfig | None = None,
                  label: str = "lebesgue") -> FormResult:
    """``||u||_r`` by stratified MC over center shells (same geometry as the seminorm)."""
    quad = quad or QuadratureConfig()
    if r <= 0:
        raise InvalidInputError("r must be positive")
    if u.support_radius is None:
        if u.decay_exponent is None or r * u.decay_exponent <= spec.Q:
            raise DivergenceError("u is not in L^r at infinity")
        decay = r * u.decay_exponent - spec.Q
    else:
        decay = 1.0
    xshells = _x_shells(u, decay)
    n = max(1024, quad.mc_samples // len(xshells))
    parts = []
    for j, sh in enumerate(xshells):
        def fn(rng, size, sh=sh):
            xz, xs, W, _ = _draw_x(spec, u, sh, rng, size)
            return W * np.abs(u(xz, xs)) ** r
        parts.append(chunked_moments(fn, n, seed_sequence(quad.seed, label, j),
                                     quad.chunk_size, quad.workers))
    I = math.fsum(e.mean for e in parts)
    se = math.sqrt(math.fsum(e.stderr ** 2 for e in parts))
    if I <= 0:
        return FormResult(0.0, se)
    return FormResult(I ** (1 / r), se / (r * I ** ((r - 1) / r)), "monte_carlo",
                      [{"tag": sh.tag, "value": e.mean, "stderr": e.stderr}
                       for sh, e in zip(xshells, parts)])


def sobolev_exponent(Q: int, s: float, p: float = 2.0) -> float:
    """``p*(s) = Qp / (Q - ps)``."""
    if not p * s < Q:
        raise InvalidInputError("need ps < Q")
    return Q * p / (Q - p * s)


def sobolev_quotient(spec: GroupSpec, u: ScalarField, s: float,
                     quad: QuadratureConfig | None = None, label: str = "sobolev") -> FormResult:
    """``||u||_(2*(s)) / [u]_(s,2)`` with first-order error propagation."""
    quad = quad or QuadratureConfig()
    num = lebesgue_norm(spec, u, sobolev_exponent(spec.Q, s), quad, label + ".norm")
    den = seminorm(spec, u, s, quad, 2.0, label + ".semi")
    if den.value <= 0:
        raise DivergenceError("seminorm vanishes; quotient undefined")
    val = num.value / den.value
    rel = math.hypot(num.stderr / num.value, den.stderr / den.value)
    return FormResult(val, val * rel, "monte_carlo",
                      diagnostics={"norm": num.value, "norm_stderr": num.stderr,
                                   "seminorm": den.value, "seminorm_stderr": den.stderr})


def pairing(spec: GroupSpec, f, phi: ScalarField, quad: QuadratureConfig | None = None,
            label: str = "pairing", samples: int | None = None) -> FormResult:
    """``int f phi`` over the support ball of ``phi`` (uniform MC)."""
    quad = quad or QuadratureConfig()
    if phi.support_radius is None:
        raise PreconditionError("pairing needs a compactly supported test function")
    R = phi.support_radius
    vol = omega_Q(spec) * R ** spec.Q
    c = phi.center

    def fn(rng, size):
        z, s_ = sample_ball(spec, R, size, rng)
        z, s_ = spec.product(c.z, c.sigma, z, s_)
        return vol * f(z, s_) * phi(z, s_)

    est = chunked_moments(fn, int(samples or 4 * quad.mc_samples), seed_sequence(quad.seed, label),
                          quad.chunk_size, quad.workers)
    return FormResult(est.mean, est.stderr)


def weak_residual(spec: GroupSpec, v: ScalarField, phi: ScalarField, rhs, s: float,
                  quad: QuadratureConfig | None = None, label: str = "weak") -> FormResult:
    """``Q_s(v, phi) - 2 int rhs phi``; vanishes when ``L_s v = rhs`` weakly.

    The symmetric double integral equals twice the pairing with the
    hypersingular operator, hence the factor 2.
    """
    q = quadratic_form(spec, v, phi, s, quad, label + ".form")
    f = pairing(spec, rhs, phi, quad, label + ".rhs")
    return FormResult(q.value - 2.0 * f.value, math.hypot(q.stderr, 2.0 * f.stderr),
                      "monte_carlo", diagnostics={"form": q.value, "form_stderr": q.stderr,
                                                  "pairing": f.value, "pairing_stderr": f.stderr})
