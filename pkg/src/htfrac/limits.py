"""Behaviour of the hypersingular operator as s -> 0 and s -> 1.

As s -> 0 the far part of the kernel dominates: ``1/2 * 2u(g) * sigma_Q *
int_1^inf rho^(-1-2s) d rho = u(g) sigma_Q / (2s)``, so ``(2s/sigma_Q) L_s u(g)``
tends to ``u(g)``. As s -> 1 the near-diagonal second-order Taylor term
dominates and ``(1-s) L_s u -> -(tau_m / 4m) sum_j X_j^2 u`` with
``tau_m = int_S |z|^2 d sigma``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .fields import ScalarField
from .groups import GroupSpec
from .haar import sigma_Q, sphere_moment
from .operator import apply_Ls, sub_laplacian
from .quadrature import QuadratureConfig


@dataclass
class ZeroLimit:
    s: float
    points: list
    scaled: np.ndarray          # (2s / sigma_Q) L_s u(g)
    scaled_error: np.ndarray
    u: np.ndarray

    def deviation(self, sign: float = -1.0) -> np.ndarray:
        """``|scaled - sign u| / |u|`` pointwise."""
        return np.abs(self.scaled - sign * self.u) / np.abs(self.u)


def zero_limit(spec: GroupSpec, u: ScalarField, points, s: float = 0.005,
               quad: QuadratureConfig | None = None) -> ZeroLimit:
    quad = quad or QuadratureConfig()
    fac = 2 * s / sigma_Q(spec)
    vals, errs, us = [], [], []
    for g in points:
        r = apply_Ls(spec, u, g, s, quad)
        vals.append(fac * r.value)
        errs.append(fac * r.error_estimate)
        us.append(u.at(g))
    return ZeroLimit(s, list(points), np.array(vals), np.array(errs), np.array(us))


@dataclass
class OneLimit:
    s: float
    points: list
    scaled: np.ndarray           # (1 - s) L_s u(g)
    scaled_error: np.ndarray
    minus_sublaplacian: np.ndarray
    prediction: float            # tau_m / (4m)
    extra: dict = field(default_factory=dict)

    @property
    def ratios(self) -> np.ndarray:
        return self.scaled / self.minus_sublaplacian

    @property
    def cv(self) -> float:
        r = self.ratios
        return float(np.std(r, ddof=1) / abs(np.mean(r)))


def limit_prediction(spec: GroupSpec) -> float:
    """``tau_m / (4m)``, the s -> 1 proportionality constant of the Taylor argument."""
    return sphere_moment(spec, 2.0) / (4 * spec.m)


def one_limit(spec: GroupSpec, u: ScalarField, points, s: float = 0.995,
              quad: QuadratureConfig | None = None) -> OneLimit:
    quad = quad or QuadratureConfig()
    vals, errs, lap = [], [], []
    for g in points:
        r = apply_Ls(spec, u, g, s, quad)
        vals.append((1 - s) * r.value)
        errs.append((1 - s) * r.error_estimate)
        lap.append(-sub_laplacian(spec, u, g))
    return OneLimit(s, list(points), np.array(vals), np.array(errs), np.array(lap),
                    limit_prediction(spec))


def limit_points(spec: GroupSpec, u: ScalarField, n: int = 5, min_ratio: float = 0.5,
                 seed: int = 0, candidates: int = 256) -> list:
    """Interior points where both ``u`` and ``sum_j X_j^2 u`` are well away from zero.

    The ``s -> 1`` ratio converges like ``1 + O((1-s) / |sum X_j^2 u|)``, so a
    point near a zero of the sub-Laplacian needs ``s`` much closer to 1 than
    the rest. Candidates are drawn uniformly in half the support (or scale)
    ball around the field centre; the first ``n`` (in draw order) with
    ``|u| >= min_ratio max|u|`` and ``|sum X_j^2 u| >= min_ratio max|sum X_j^2 u|``
    over the candidates are kept.
    """
    from .haar import sample_ball
    cen = u.center
    R = 0.5 * (u.support_radius or u.scale)
    rng = np.random.default_rng(seed)
    z, s = sample_ball(spec, R, candidates, rng)
    z, s = spec.product(cen.z, cen.sigma, z, s)
    pts = [spec.point(z[i], s[i]) for i in range(candidates)]
    uv = np.abs(u(z, s))
    lv = np.abs([sub_laplacian(spec, u, g) for g in pts])
    keep = (uv >= min_ratio * uv.max()) & (lv >= min_ratio * lv.max())
    out = [g for g, k in zip(pts, keep) if k][:n]
    if len(out) < n:
        raise ValueError(f"only {len(out)} admissible limit points found")
    return out
