"""Gamma-function helpers and the closed-form constants attached to H-type groups."""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import DomainError


def log_gamma(x: float) -> float:
    """log Gamma(x) for x > 0 (thin wrapper over the C library lgamma)."""
    x = float(x)
    if not x > 0 or not math.isfinite(x):
        raise DomainError(f"log_gamma needs a positive finite argument, got {x}")
    return math.lgamma(x)


def gamma(x: float) -> float:
    """Gamma(x) for x > 0."""
    x = float(x)
    if not x > 0 or not math.isfinite(x):
        raise DomainError(f"gamma needs a positive finite argument, got {x}")
    return math.gamma(x)


def _require_s(s, lo=0.0, hi=1.0, closed_hi=False):
    s = float(s)
    ok = s > lo and (s <= hi if closed_hi else s < hi)
    if not ok:
        raise DomainError(f"s={s} outside the admissible range")
    return s


def fundamental_constant(m: int, k: int, s: float) -> float:
    """Constant C_(s)(m, k) of the fundamental solution ``C |g|^(-(Q-2s))``.

    2^(m/2+2k-3s-1) Gamma((m/2+1-s)/2) Gamma((m/2+k-s)/2) / (pi^((m+k+1)/2) Gamma(s)).
    """
    s = float(s)
    a1 = 0.5 * (m / 2 + 1 - s)
    a2 = 0.5 * (m / 2 + k - s)
    if not (s > 0 and a1 > 0 and a2 > 0):
        raise DomainError(f"fundamental_constant: Gamma arguments not positive for "
                          f"(m,k,s)=({m},{k},{s})")
    logc = ((m / 2 + 2 * k - 3 * s - 1) * math.log(2.0) + log_gamma(a1) + log_gamma(a2)
            - 0.5 * (m + k + 1) * math.log(math.pi) - log_gamma(s))
    return math.exp(logc)


def intertwining_constant(m: int, k: int, s: float) -> float:
    """Gamma ratio of the intertwining identity.

    Gamma((m+2+2s)/4) Gamma((m+2k+2s)/4) / (Gamma((m+2-2s)/4) Gamma((m+2k-2s)/4)).
    """
    s = _require_s(s)
    lo1 = (m + 2 - 2 * s) / 4
    lo2 = (m + 2 * k - 2 * s) / 4
    if not (lo1 > 0 and lo2 > 0):
        raise DomainError(f"intertwining_constant: non-positive Gamma argument for ({m},{k},{s})")
    return math.exp(log_gamma((m + 2 + 2 * s) / 4) + log_gamma((m + 2 * k + 2 * s) / 4)
                    - log_gamma(lo1) - log_gamma(lo2))


def euclidean_riesz_constant(n: int, s: float) -> float:
    """``s 2^(2s+1) Gamma((n+2s)/2) / (pi^(n/2) Gamma(1-s))``."""
    s = _require_s(s)
    return math.exp(math.log(s) + (2 * s + 1) * math.log(2.0) + log_gamma((n + 2 * s) / 2)
                    - 0.5 * n * math.log(math.pi) - log_gamma(1 - s))


def critical_exponent(Q: int, s: float) -> float:
    """Sobolev exponent ``2*(s) = 2Q/(Q-2s)``."""
    return 2.0 * Q / (Q - 2.0 * s)


@dataclass
class KernelConstants:
    m: int
    k: int
    s: float
    C_fundamental: float
    A_intertwine: float
    alpha_calibrated: float | None = None
    alpha_uncertainty: float | None = None
    alpha_cv: float | None = None
    provenance: dict = field(default_factory=dict)

    def with_alpha(self, value: float, uncertainty: float, cv: float, how: str):
        self.alpha_calibrated = float(value)
        self.alpha_uncertainty = float(uncertainty)
        self.alpha_cv = float(cv)
        self.provenance["alpha_calibrated"] = how
        return self

    def as_dict(self) -> dict:
        return {
            "m": self.m, "k": self.k, "s": self.s,
            "C_fundamental": self.C_fundamental,
            "A_intertwine": self.A_intertwine,
            "alpha_calibrated": self.alpha_calibrated,
            "alpha_uncertainty": self.alpha_uncertainty,
            "alpha_cv": self.alpha_cv,
            "provenance": dict(self.provenance),
        }


def kernel_constants(m: int, k: int, s: float) -> KernelConstants:
    return KernelConstants(
        m, k, float(s), fundamental_constant(m, k, s), intertwining_constant(m, k, s),
        provenance={"C_fundamental": "closed-form", "A_intertwine": "closed-form"})


def lorentz_beta(a: float, b: float) -> float:
    return float(np.exp(log_gamma(a) + log_gamma(b) - log_gamma(a + b)))
