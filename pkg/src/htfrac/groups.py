"""Step-two homogeneous groups of Heisenberg type and their Euclidean limit.

Points are written in logarithmic coordinates ``g = (z, sigma)`` with
``z`` in R^m and ``sigma`` in R^k. The group law is

    (z, s) o (z', s') = (z + z', s + s' + 1/2 [z, z']),   [z, z']_a = <J_a z, z'>,

and ``delta_lam(z, s) = (lam z, lam^2 s)``. The Koranyi gauge is
``(|z|^4 + 16 |s|^2)^(1/4)``; for ``k = 0`` everything reduces to R^m.

The public functions take :class:`GroupPoint` objects. The ``spec.product``
family works on stacked arrays ``z[..., m]``, ``s[..., k]`` and is what the
integrators use.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import InvalidInputError, UnsupportedFeatureError
from .report import CheckRecord, VerificationReport


@dataclass(frozen=True, eq=False)
class GroupSpec:
    m: int
    k: int
    J: np.ndarray = field(repr=False)
    name: str = ""

    def __post_init__(self):
        if int(self.m) < 1 or int(self.k) < 0:
            raise InvalidInputError("need m >= 1 and k >= 0")
        J = np.asarray(self.J, dtype=float).reshape(int(self.k), int(self.m), int(self.m))
        J.setflags(write=False)
        object.__setattr__(self, "m", int(self.m))
        object.__setattr__(self, "k", int(self.k))
        object.__setattr__(self, "J", J)
        # H^n has a closed-form bracket; skip the einsum there
        sympl = self.k == 1 and self.m % 2 == 0 and np.array_equal(J[0], _symplectic(self.m // 2))
        object.__setattr__(self, "_symplectic", bool(sympl))

    @property
    def Q(self) -> int:
        return self.m + 2 * self.k

    @property
    def dim(self) -> int:
        return self.m + self.k

    @property
    def is_euclidean(self) -> bool:
        return self.k == 0

    @property
    def key(self):
        return (self.m, self.k, self.J.tobytes())

    def __eq__(self, other):
        return isinstance(other, GroupSpec) and self.key == other.key

    def __hash__(self):
        return hash(self.key)

    def __repr__(self):
        return f"GroupSpec({self.name or 'custom'}, m={self.m}, k={self.k}, Q={self.Q})"

    # -- batched array algebra ------------------------------------------------
    def bracket(self, z1, z2):
        """``[z1, z2]_a = <J_a z1, z2>`` for stacked horizontal vectors."""
        z1 = np.asarray(z1, dtype=float)
        z2 = np.asarray(z2, dtype=float)
        if self.k == 0:
            return np.zeros(np.broadcast_shapes(z1.shape, z2.shape)[:-1] + (0,))
        if self._symplectic:
            n = self.m // 2
            x1, y1 = z1[..., :n], z1[..., n:]
            x2, y2 = z2[..., :n], z2[..., n:]
            # J z = (y, -x)  ->  <J z1, z2> = y1.x2 - x1.y2
            return (np.sum(y1 * x2, axis=-1) - np.sum(x1 * y2, axis=-1))[..., None]
        return np.einsum("aij,...j,...i->...a", self.J, z1, z2)

    def product(self, z1, s1, z2, s2):
        z1 = np.asarray(z1, dtype=float)
        z2 = np.asarray(z2, dtype=float)
        if self.k == 0:
            z = z1 + z2
            return z, np.zeros(z.shape[:-1] + (0,))
        return z1 + z2, np.asarray(s1, float) + np.asarray(s2, float) + 0.5 * self.bracket(z1, z2)

    def norm4(self, z, s):
        """``|z|^4 + 16|s|^2`` (the fourth power of the gauge); ``|z|^4`` if k = 0."""
        z = np.asarray(z, dtype=float)
        r2 = np.sum(z * z, axis=-1)
        if self.k == 0:
            return r2 * r2
        s = np.asarray(s, dtype=float)
        return r2 * r2 + 16.0 * np.sum(s * s, axis=-1)

    def gauge_arrays(self, z, s):
        z = np.asarray(z, dtype=float)
        if self.k == 0:
            return np.sqrt(np.sum(z * z, axis=-1))
        return np.sqrt(np.sqrt(self.norm4(z, s)))

    def dilate_arrays(self, lam, z, s):
        return lam * np.asarray(z, float), lam * lam * np.asarray(s, float)

    def identity(self) -> "GroupPoint":
        return GroupPoint(np.zeros(self.m), np.zeros(self.k))

    def point(self, z, sigma=()) -> "GroupPoint":
        return make_point(self, z, sigma)


@dataclass(frozen=True, eq=False)
class GroupPoint:
    z: np.ndarray
    sigma: np.ndarray

    def __post_init__(self):
        z = np.array(self.z, dtype=float).reshape(-1)
        s = np.array(self.sigma, dtype=float).reshape(-1)
        if not (np.all(np.isfinite(z)) and np.all(np.isfinite(s))):
            raise InvalidInputError("group point coordinates must be finite")
        z.setflags(write=False)
        s.setflags(write=False)
        object.__setattr__(self, "z", z)
        object.__setattr__(self, "sigma", s)

    def __eq__(self, other):
        return (isinstance(other, GroupPoint) and np.array_equal(self.z, other.z)
                and np.array_equal(self.sigma, other.sigma))

    def __hash__(self):
        return hash((self.z.tobytes(), self.sigma.tobytes()))

    def __repr__(self):
        return f"GroupPoint(z={self.z.tolist()}, sigma={self.sigma.tolist()})"

    def as_list(self):
        return [self.z.tolist(), self.sigma.tolist()]


def _symplectic(n: int) -> np.ndarray:
    eye = np.eye(n)
    zero = np.zeros((n, n))
    return np.block([[zero, eye], [-eye, zero]])


def _check(spec: GroupSpec, p: GroupPoint):
    if not isinstance(p, GroupPoint):
        raise InvalidInputError(f"expected GroupPoint, got {type(p).__name__}")
    if p.z.shape != (spec.m,) or p.sigma.shape != (spec.k,):
        raise InvalidInputError(
            f"point with dims ({p.z.size}, {p.sigma.size}) does not fit {spec!r}")


def make_point(spec: GroupSpec, z, sigma=()) -> GroupPoint:
    p = GroupPoint(np.atleast_1d(z), np.atleast_1d(np.asarray(sigma, float)) if spec.k else np.zeros(0))
    _check(spec, p)
    return p


# --------------------------------------------------------------------------
# presets

def euclidean(n: int) -> GroupSpec:
    return GroupSpec(n, 0, np.zeros((0, n, n)), name=f"euclidean:{n}")


def heisenberg(n: int = 1) -> GroupSpec:
    return GroupSpec(2 * n, 1, _symplectic(n)[None], name=f"heisenberg:{n}")


def quaternion_left_matrices() -> np.ndarray:
    """Left multiplication by i, j, k on H = R^4 with basis (1, i, j, k)."""
    Li = np.array([[0, -1, 0, 0], [1, 0, 0, 0], [0, 0, 0, -1], [0, 0, 1, 0]], float)
    Lj = np.array([[0, 0, -1, 0], [0, 0, 0, 1], [1, 0, 0, 0], [0, -1, 0, 0]], float)
    Lk = np.array([[0, 0, 0, -1], [0, 0, -1, 0], [0, 1, 0, 0], [1, 0, 0, 0]], float)
    return np.stack([Li, Lj, Lk])


def quaternionic(n: int = 1) -> GroupSpec:
    if n != 1:
        raise UnsupportedFeatureError("only the quaternionic group with n = 1 ships")
    return GroupSpec(4, 3, quaternion_left_matrices(), name="quaternionic:1")


def custom_group(J, name: str = "custom") -> GroupSpec:
    """Group from user supplied structure maps; they must pass validate_htype."""
    J = np.asarray(J, dtype=float)
    if J.ndim != 3 or J.shape[1] != J.shape[2]:
        raise InvalidInputError("J must have shape (k, m, m)")
    spec = GroupSpec(J.shape[1], J.shape[0], J, name=name)
    rep = validate_htype(spec)
    if not rep.passed:
        bad = [r.message for r in rep.records if r.status == "fail"]
        raise InvalidInputError("structure maps are not of H-type: " + "; ".join(bad))
    return spec


def group_from_id(ident: str) -> GroupSpec:
    """Resolve ``euclidean:3``, ``heisenberg:1`` or ``quaternionic:1``."""
    try:
        kind, _, num = str(ident).strip().partition(":")
        n = int(num) if num else 1
    except ValueError:
        raise InvalidInputError(f"malformed group id {ident!r}") from None
    if n < 1:
        raise InvalidInputError(f"group dimension must be positive in {ident!r}")
    table = {"euclidean": euclidean, "heisenberg": heisenberg, "quaternionic": quaternionic}
    if kind not in table:
        raise InvalidInputError(f"unknown group family {kind!r}; expected one of {sorted(table)}")
    return table[kind](n)


# --------------------------------------------------------------------------
# point operations

def multiply(spec: GroupSpec, p: GroupPoint, q: GroupPoint) -> GroupPoint:
    _check(spec, p)
    _check(spec, q)
    z, s = spec.product(p.z, p.sigma, q.z, q.sigma)
    return GroupPoint(z, s)


def inverse(spec: GroupSpec, p: GroupPoint) -> GroupPoint:
    _check(spec, p)
    return GroupPoint(-p.z, -p.sigma)


def dilate(spec: GroupSpec, lam: float, p: GroupPoint) -> GroupPoint:
    _check(spec, p)
    if not lam > 0:
        raise InvalidInputError(f"dilation factor must be positive, got {lam}")
    z, s = spec.dilate_arrays(lam, p.z, p.sigma)
    return GroupPoint(z, s)


def gauge(spec: GroupSpec, p: GroupPoint) -> float:
    _check(spec, p)
    return float(spec.gauge_arrays(p.z, p.sigma))


def validate_htype(spec: GroupSpec, tol: float = 1e-12) -> VerificationReport:
    """Check skew-symmetry and ``J_a J_b + J_b J_a = -2 delta_ab I``."""
    rep = VerificationReport(title=f"validate_htype[{spec.name or 'custom'}]")
    J = spec.J
    eye = np.eye(spec.m)
    for a in range(spec.k):
        err = float(np.max(np.abs(J[a] + J[a].T)))
        rep.add(CheckRecord(
            id=f"group.skew.{a}", anchor="structure maps are skew-symmetric",
            inputs={"a": a}, value=err, tolerance=tol,
            status="pass" if err <= tol else "fail",
            provenance="closed-form",
            message="" if err <= tol else f"skewness violation in J_{a}: max|J+J^T|={err:.3e}"))
    for a in range(spec.k):
        for b in range(a, spec.k):
            target = -2.0 * eye if a == b else 0.0 * eye
            err = float(np.max(np.abs(J[a] @ J[b] + J[b] @ J[a] - target)))
            rep.add(CheckRecord(
                id=f"group.htype.{a}.{b}", anchor="J_a J_b + J_b J_a = -2 delta_ab I",
                inputs={"a": a, "b": b}, value=err, tolerance=tol,
                status="pass" if err <= tol else "fail", provenance="closed-form",
                message="" if err <= tol else f"anticommutation violated for pair ({a},{b}): {err:.3e}"))
    if spec.k == 0:
        rep.add(CheckRecord(id="group.htype.euclidean", anchor="k = 0 is Euclidean space",
                            inputs={}, value=0.0, tolerance=tol, status="pass",
                            provenance="closed-form"))
    return rep
