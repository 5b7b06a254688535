"""Scalar fields on a group with the metadata the integrators rely on."""
from __future__ import annotations

import numpy as np

from .errors import InvalidInputError, PreconditionError
from .groups import GroupPoint, GroupSpec, _check
from .quadrature import seed_sequence


class ScalarField:
    """Real valued function on ``spec`` evaluated on stacked coordinates.

    Parameters
    ----------
    spec : GroupSpec
    func : callable
        ``func(z, s)`` with ``z[..., m]`` and ``s[..., k]`` returning ``[...]``.
    decay_exponent : float, optional
        beta with ``|u(g)| <= C |c^-1 g|^-beta`` far from the center ``c``.
    support_radius : float, optional
        ``u`` vanishes outside ``B(c, support_radius)``.
    smooth : bool
        The smoothness hint (C^2 away from the center).
    center : GroupPoint, optional
        Where the field's structure lives (defaults to the identity).
    scale : float
        Length scale of that structure; the integrators adapt radii to it.
    center_exponent : float
        ``u ~ |c^-1 g|^-gamma`` at the center (0 for bounded fields).
    kernel : tuple, optional
        Descriptor understood by the compiled evaluators.
    """

    def __init__(self, spec: GroupSpec, func, *, decay_exponent=None, support_radius=None,
                 smooth=True, center: GroupPoint | None = None, scale=1.0, center_exponent=0.0,
                 name="field", kernel=None, constant=None, bound=None, validate=True):
        self.spec = spec
        self.func = func
        self.decay_exponent = None if decay_exponent is None else float(decay_exponent)
        self.support_radius = None if support_radius is None else float(support_radius)
        self.smooth = bool(smooth)
        self.center = center if center is not None else spec.identity()
        _check(spec, self.center)
        if not scale > 0:
            raise InvalidInputError("field scale must be positive")
        self.scale = float(scale)
        self.center_exponent = float(center_exponent)
        self.name = name
        self.kernel = kernel
        self.constant = constant
        self.bound = bound
        if self.support_radius is not None and not self.support_radius > 0:
            raise InvalidInputError("support_radius must be positive")
        if validate:
            self.spot_check()

    # evaluation -----------------------------------------------------------------
    def __call__(self, z, s):
        return np.asarray(self.func(np.asarray(z, float), np.asarray(s, float)), dtype=float)

    def at(self, g: GroupPoint) -> float:
        _check(self.spec, g)
        return float(self(g.z[None], g.sigma[None])[0])

    def relative(self, z, s):
        """Coordinates of ``c^-1 o (z, s)``."""
        c = self.center
        return self.spec.product(-c.z, -c.sigma, z, s)

    def distance_from_center(self, z, s):
        zz, ss = self.relative(z, s)
        return self.spec.gauge_arrays(zz, ss)

    @property
    def bounded(self) -> bool:
        return self.center_exponent <= 0

    def __repr__(self):
        return f"ScalarField({self.name})"

    # metadata -------------------------------------------------------------------
    def spot_check(self, n: int = 10):
        """Validate support and decay metadata on ``n`` deterministic sample points."""
        rng = np.random.default_rng(seed_sequence(0, "spot", self.name))
        spec = self.spec
        if self.support_radius is not None:
            r = self.support_radius * (1.05 + 2.0 * rng.random(n))
            z, s = _points_at_gauge(spec, r, rng)
            z, s = spec.product(self.center.z, self.center.sigma, z, s)
            v = self(z, s)
            if np.any(v != 0):
                raise PreconditionError(f"{self.name}: nonzero values outside the declared support")
        if self.decay_exponent is not None and self.support_radius is None:
            r = self.scale * 10.0 ** np.linspace(1, 3, n)
            z, s = _points_at_gauge(spec, r, rng)
            z, s = spec.product(self.center.z, self.center.sigma, z, s)
            v = np.abs(self(z, s)) * r ** self.decay_exponent
            if not np.all(np.isfinite(v)):
                raise PreconditionError(f"{self.name}: non-finite values far from the center")
            lo = max(v[: n // 2].max(), 1e-300)
            if v[n // 2:].max() > 10.0 * lo and v[n // 2:].max() > 1e-250:
                raise PreconditionError(
                    f"{self.name}: values do not decay like gauge^-{self.decay_exponent}")


def _points_at_gauge(spec: GroupSpec, r, rng):
    from .haar import sample_sphere
    z, s = sample_sphere(spec, len(r), rng)
    return spec.dilate_arrays(np.asarray(r)[:, None], z, s)


# --------------------------------------------------------------------------
# constructors

def constant(spec: GroupSpec, value: float = 1.0) -> ScalarField:
    v = float(value)
    return ScalarField(spec, lambda z, s: np.full(z.shape[:-1], v), decay_exponent=0.0,
                       name=f"constant({v:g})", constant=v, bound=abs(v))


def zero(spec: GroupSpec) -> ScalarField:
    return ScalarField(spec, lambda z, s: np.zeros(z.shape[:-1]), support_radius=1.0,
                       name="zero", constant=0.0, bound=0.0)


def koranyi_profile(spec: GroupSpec, a: float, p: float, c: float = 1.0,
                    center: GroupPoint | None = None, name=None) -> ScalarField:
    """``c ((|z|^2 + a^2)^2 + 16|s|^2)^(-p)`` in coordinates relative to ``center``.

    ``a = 0`` gives the gauge power ``c |g|^(-4p)``.
    """
    if a < 0 or p < 0:
        raise InvalidInputError("koranyi_profile needs a >= 0 and p >= 0")
    cen = center if center is not None else spec.identity()
    cz, cs = -cen.z, -cen.sigma
    a2 = float(a) ** 2
    trivial_center = not (np.any(cz) or np.any(cs))

    def f(z, s):
        if not trivial_center:
            z, s = spec.product(cz, cs, z, s)
        r2 = np.sum(z * z, axis=-1) + a2
        N = r2 * r2 + 16.0 * np.sum(s * s, axis=-1)
        with np.errstate(divide="ignore"):
            return c * N ** (-p)

    return ScalarField(spec, f, decay_exponent=4 * p, center=cen, scale=a if a > 0 else 1.0,
                       center_exponent=0.0 if a > 0 else 4 * p,
                       name=name or f"profile(a={a:g},p={p:g})",
                       kernel=("profile", a2, float(p), float(c), cen))


def gauge_power(spec: GroupSpec, gamma: float, center: GroupPoint | None = None) -> ScalarField:
    """``|c^-1 g|^(-gamma)``."""
    return koranyi_profile(spec, 0.0, gamma / 4.0, 1.0, center, name=f"gauge^-{gamma:g}")


def bump(spec: GroupSpec, radius: float = 1.0, power: int = 5, center: GroupPoint | None = None,
         amplitude: float = 1.0) -> ScalarField:
    """``A (1 - |c^-1 g|^4 / r^4)_+^power``; of class C^(power-1), support radius ``r``."""
    cen = center if center is not None else spec.identity()
    r4 = float(radius) ** 4
    cz, cs = -cen.z, -cen.sigma

    def f(z, s):
        z, s = spec.product(cz, cs, z, s)
        t = 1.0 - spec.norm4(z, s) / r4
        return amplitude * np.where(t > 0, t, 0.0) ** power

    return ScalarField(spec, f, support_radius=radius, center=cen, scale=radius,
                       name=f"bump(r={radius:g},n={power})", bound=abs(amplitude),
                       kernel=("bump", r4, float(power), float(amplitude), cen))


def plateau_bump(spec: GroupSpec, inner: float, outer: float) -> ScalarField:
    """Smooth function equal to 1 on ``B(e, inner)`` and 0 outside ``B(e, outer)``."""
    from .quadrature import smooth_cutoff
    if not 0 < inner < outer:
        raise InvalidInputError("plateau_bump needs 0 < inner < outer")
    plateau = inner / outer

    def f(z, s):
        return smooth_cutoff(spec.gauge_arrays(z, s) / outer, plateau)

    return ScalarField(spec, f, support_radius=outer, scale=outer - inner,
                       name=f"plateau({inner:g},{outer:g})", bound=1.0)


def gaussian(spec: GroupSpec, width: float = 1.0) -> ScalarField:
    w2 = float(width) ** 2

    def f(z, s):
        return np.exp(-(np.sum(z * z, axis=-1) / w2 + np.sum(s * s, axis=-1) / (w2 * w2)))

    return ScalarField(spec, f, decay_exponent=50.0, scale=width, name=f"gaussian({width:g})",
                       bound=1.0, validate=False)


def from_function(spec: GroupSpec, func, **meta) -> ScalarField:
    return ScalarField(spec, func, **meta)


# --------------------------------------------------------------------------
# transformations

def translate(u: ScalarField, g0: GroupPoint) -> ScalarField:
    """``u o L_g0 : g -> u(g0 o g)``."""
    spec = u.spec
    _check(spec, g0)
    gz, gs = g0.z, g0.sigma

    def f(z, s):
        return u(*spec.product(gz, gs, z, s))

    cz, cs = spec.product(-gz, -gs, u.center.z, u.center.sigma)
    kern = None
    if u.kernel is not None:
        kern = u.kernel[:4] + (GroupPoint(cz, cs),)
    return ScalarField(spec, f, decay_exponent=u.decay_exponent, support_radius=u.support_radius,
                       smooth=u.smooth, center=GroupPoint(cz, cs), scale=u.scale,
                       center_exponent=u.center_exponent, name=f"{u.name}oL", kernel=kern,
                       constant=u.constant, bound=u.bound, validate=False)


def rescale(u: ScalarField, lam: float, weight: float = 0.0) -> ScalarField:
    """``g -> lam^weight u(delta_lam g)``."""
    if not lam > 0:
        raise InvalidInputError("rescale needs lam > 0")
    spec = u.spec
    fac = float(lam) ** weight

    def f(z, s):
        return fac * u(*spec.dilate_arrays(lam, z, s))

    cz, cs = spec.dilate_arrays(1.0 / lam, u.center.z, u.center.sigma)
    return ScalarField(spec, f, decay_exponent=u.decay_exponent,
                       support_radius=None if u.support_radius is None else u.support_radius / lam,
                       smooth=u.smooth, center=GroupPoint(cz, cs), scale=u.scale / lam,
                       center_exponent=u.center_exponent, name=f"{u.name}@{lam:g}",
                       constant=None if u.constant is None else fac * u.constant,
                       bound=None if u.bound is None else fac * u.bound, validate=False)


def power(u: ScalarField, q: float) -> ScalarField:
    """``|u|^q`` keeping the metadata consistent."""
    def f(z, s):
        return np.abs(u(z, s)) ** q

    return ScalarField(u.spec, f,
                       decay_exponent=None if u.decay_exponent is None else q * u.decay_exponent,
                       support_radius=u.support_radius, smooth=u.smooth, center=u.center,
                       scale=u.scale, center_exponent=q * u.center_exponent,
                       name=f"{u.name}^{q:g}", validate=False)


def product(u: ScalarField, v: ScalarField) -> ScalarField:
    """Pointwise product; metadata follow from the factors (shared center assumed)."""
    dec = None
    if u.decay_exponent is not None and v.decay_exponent is not None:
        dec = u.decay_exponent + v.decay_exponent
    sup = [r for r in (u.support_radius, v.support_radius) if r is not None]
    return ScalarField(u.spec, lambda z, s: u(z, s) * v(z, s), decay_exponent=dec,
                       support_radius=min(sup) if sup else None, smooth=u.smooth and v.smooth,
                       center=u.center, scale=min(u.scale, v.scale),
                       center_exponent=u.center_exponent + v.center_exponent,
                       name=f"{u.name}*{v.name}", validate=False)


def polynomial(spec: GroupSpec, func, name="polynomial") -> ScalarField:
    """Fields used for derivative checks; no integrability metadata."""
    return ScalarField(spec, func, name=name, validate=False)


def sup_estimate(u: ScalarField, radius: float, n: int = 4096, seed: int = 0) -> float:
    """Max of |u| over ``n`` samples of ``B(c, radius)`` (a lower bound for the sup)."""
    from .haar import sample_ball
    rng = np.random.default_rng(seed_sequence(seed, "sup", u.name))
    z, s = sample_ball(u.spec, radius, n, rng)
    z, s = u.spec.product(u.center.z, u.center.sigma, z, s)
    return float(np.max(np.abs(u(z, s))))

