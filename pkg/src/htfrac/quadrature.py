"""Quadrature configuration, deterministic rules and a reproducible MC engine."""
from __future__ import annotations

import dataclasses
import hashlib
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from numpy.polynomial.legendre import leggauss

from .errors import InvalidInputError

MODES = ("tensor", "monte_carlo", "auto")


@dataclass(frozen=True)
class QuadratureConfig:
    """Tolerances, truncation radii, sample counts and seeds.

    ``split_radius`` and ``r_max`` may be left as ``None``; the evaluators then
    pick defaults relative to the evaluation point and the field scale
    (``0.1*max(1, |g|)`` and ``200*max(1, |g|)`` in field units).
    """

    split_radius: float | None = None
    r_max: float | None = None
    mc_samples: int = 1 << 16
    seed: int = 20240517
    rel_tol: float = 1e-6
    abs_tol: float = 1e-12
    mode: str = "auto"
    shells_per_decade: int = 6
    radial_nodes: int = 8
    angular_nodes: tuple = (32, 48)
    chunk_size: int = 8192
    workers: int = 1

    def __post_init__(self):
        if self.mode not in MODES:
            raise InvalidInputError(f"mode must be one of {MODES}, got {self.mode!r}")
        for name in ("rel_tol", "abs_tol"):
            if not getattr(self, name) > 0:
                raise InvalidInputError(f"{name} must be positive")
        for name in ("mc_samples", "shells_per_decade", "radial_nodes", "chunk_size", "workers"):
            if int(getattr(self, name)) < 1:
                raise InvalidInputError(f"{name} must be a positive integer")
        if self.split_radius is not None and not self.split_radius > 0:
            raise InvalidInputError("split_radius must be positive")
        if self.r_max is not None and not self.r_max > 0:
            raise InvalidInputError("r_max must be positive")
        if (self.split_radius is not None and self.r_max is not None
                and not self.split_radius < self.r_max):
            raise InvalidInputError("split_radius must be smaller than r_max")
        if len(self.angular_nodes) != 2 or min(self.angular_nodes) < 2:
            raise InvalidInputError("angular_nodes must be a pair of integers >= 2")

    def replace(self, **changes) -> "QuadratureConfig":
        return dataclasses.replace(self, **changes)

    def as_dict(self) -> dict:
        d = dataclasses.asdict(self)
        d["angular_nodes"] = list(self.angular_nodes)
        return d


# --------------------------------------------------------------------------
# deterministic rules

@lru_cache(maxsize=64)
def _leggauss(n: int):
    x, w = leggauss(n)
    x.setflags(write=False)
    w.setflags(write=False)
    return x, w


def gauss_legendre(a: float, b: float, n: int):
    """Nodes and weights of the n-point Gauss-Legendre rule on [a, b]."""
    x, w = _leggauss(int(n))
    return 0.5 * (b - a) * x + 0.5 * (b + a), 0.5 * (b - a) * w


def composite_gauss_legendre(edges, n: int):
    edges = np.asarray(edges, dtype=float)
    x, w = _leggauss(int(n))
    a, b = edges[:-1, None], edges[1:, None]
    nodes = 0.5 * (b - a) * x + 0.5 * (b + a)
    weights = 0.5 * (b - a) * w
    return nodes.ravel(), weights.ravel()


def power_rule(b: float, power: float, n: int):
    """Rule for ``int_0^b rho**power * phi(rho) d rho``.

    The returned weights already contain ``rho**power``; the substitution
    ``rho = b * x**(1/(power+1))`` makes the remaining integrand smooth when
    ``phi`` is smooth at 0. Requires ``power > -1``.
    """
    if not power > -1:
        raise InvalidInputError("power rule needs power > -1")
    x, w = gauss_legendre(0.0, 1.0, n)
    return b * x ** (1.0 / (power + 1.0)), w * b ** (power + 1.0) / (power + 1.0)


def shell_rule(a: float, b: float, per_decade: int, n: int):
    """Geometric shells between a and b, log-substituted GL inside each shell.

    Returns nodes and weights for ``d rho`` (the Jacobian is included).
    """
    if not 0 < a < b:
        raise InvalidInputError("shell_rule needs 0 < a < b")
    nsh = max(1, int(math.ceil(math.log10(b / a) * per_decade - 1e-9)))
    edges = np.log(a) + (np.log(b) - np.log(a)) * np.arange(nsh + 1) / nsh
    u, wu = composite_gauss_legendre(edges, n)
    r = np.exp(u)
    return r, wu * r


def smooth_cutoff(t, plateau: float = 0.25):
    """C-infinity cutoff: 1 on [0, plateau], 0 on [1, inf)."""
    t = np.asarray(t, dtype=float)
    out = np.zeros_like(t)
    out[t <= plateau] = 1.0
    mid = (t > plateau) & (t < 1.0)
    x = (t[mid] - plateau) / (1.0 - plateau)
    e1 = np.exp(-1.0 / (1.0 - x))
    e0 = np.exp(-1.0 / x)
    out[mid] = e1 / (e1 + e0)
    return out


# --------------------------------------------------------------------------
# reproducible Monte Carlo

def seed_sequence(seed: int, *names) -> np.random.SeedSequence:
    """Seed sequence derived from a base seed and a tuple of labels.

    Labels are hashed so every named check owns an independent stream.
    """
    words = [int(seed) & 0xFFFFFFFFFFFFFFFF]
    for name in names:
        h = hashlib.sha256(str(name).encode()).digest()
        words.append(int.from_bytes(h[:8], "little"))
    return np.random.SeedSequence(words)


@dataclass(frozen=True)
class MCEstimate:
    mean: float
    stderr: float
    n: int


def chunked_moments(fn, n: int, ss: np.random.SeedSequence, chunk: int = 8192,
                    workers: int = 1):
    """Sample mean and standard error of ``fn(rng, size)`` over ``n`` draws.

    Draws are split into fixed chunks, each with its own child generator, and
    per-chunk sums are combined with ``math.fsum``. The result is therefore
    bit-identical for a given seed whatever ``workers`` is.
    ``fn`` may return shape (size,) or (size, c); the result follows suit.
    """
    n = int(n)
    sizes = [chunk] * (n // chunk)
    if n % chunk:
        sizes.append(n % chunk)
    children = ss.spawn(len(sizes))

    def one(i):
        rng = np.random.default_rng(children[i])
        v = np.asarray(fn(rng, sizes[i]), dtype=float)
        v2 = v.reshape(sizes[i], -1)
        return ([math.fsum(c) for c in v2.T], [math.fsum(c) for c in (v2 * v2).T])

    if workers > 1 and len(sizes) > 1:
        with ThreadPoolExecutor(max_workers=workers) as ex:
            parts = list(ex.map(one, range(len(sizes))))
    else:
        parts = [one(i) for i in range(len(sizes))]
    ncol = len(parts[0][0])
    s1 = np.array([math.fsum(p[0][j] for p in parts) for j in range(ncol)])
    s2 = np.array([math.fsum(p[1][j] for p in parts) for j in range(ncol)])
    mean = s1 / n
    var = np.maximum(s2 / n - mean * mean, 0.0) * n / max(n - 1, 1)
    se = np.sqrt(var / n)
    if ncol == 1:
        return MCEstimate(float(mean[0]), float(se[0]), n)
    return [MCEstimate(float(a), float(b), n) for a, b in zip(mean, se)]
