"""Radially stratified integration in gauge polar coordinates.

An integral ``int_a^b rho^q int_S F(rho, omega) d sigma(omega) d rho`` is one
*stratum*. Strata are integrated either deterministically (product of a
radial rule and the H^1 sphere rule) or by stratified Monte Carlo with a
pilot pass followed by Neyman allocation of the remaining budget.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .haar import sample_sphere, sigma_Q, sphere_rule
from .quadrature import (QuadratureConfig, chunked_moments, power_rule, seed_sequence,
                         shell_rule)


@dataclass
class Stratum:
    a: float
    b: float
    q: float
    F: object                  # F(rho[N], oz[N, m], os[N, k]) -> [N]
    tag: str
    density: float = 1.0       # radial refinement factor (tensor mode)
    angular: tuple = (1, 1)    # angular refinement factors (tensor mode)
    needs_rng: bool = False    # F takes a trailing rng (MC only; draws extra variables)


def power_mass(a: float, b: float, q: float) -> float:
    if abs(q + 1) < 1e-12:
        return math.log(b / a)
    return (b ** (q + 1) - a ** (q + 1)) / (q + 1)


def power_sample(a: float, b: float, q: float, u):
    """Inverse-CDF samples of the density proportional to rho^q on [a, b]."""
    if abs(q + 1) < 1e-12:
        return a * (b / a) ** u
    p = q + 1
    return (a ** p + u * (b ** p - a ** p)) ** (1.0 / p)


def split_segments(breaks, density_of):
    """Cut a sorted list of radii into strata, each tagged with a density factor."""
    out = []
    for lo, hi in zip(breaks[:-1], breaks[1:]):
        if hi > lo * (1 + 1e-12):
            out.append((lo, hi, density_of(0.5 * (lo + hi))))
    return out


# --------------------------------------------------------------------------
# tensor backend

def _tensor_stratum(spec, st: Stratum, quad: QuadratureConfig, res: float):
    nb = max(4, int(round(quad.angular_nodes[0] * res * st.angular[0])))
    npsi = max(4, int(round(quad.angular_nodes[1] * res * st.angular[1])))
    oz, os_, ow = sphere_rule(spec, nb, npsi)
    n = max(4, int(round(quad.radial_nodes * res)))
    if st.a == 0.0:
        rho, w = power_rule(st.b, st.q, 2 * n)
    else:
        per = max(1, int(round(quad.shells_per_decade * res * st.density)))
        rho, w = shell_rule(st.a, st.b, per, n)
        w = w * rho ** st.q
    total = 0.0
    # bound memory: evaluate in radial blocks
    blk = max(1, 400_000 // len(ow))
    for i in range(0, len(rho), blk):
        r = rho[i:i + blk]
        R = np.repeat(r, len(ow))
        Z = np.tile(oz, (len(r), 1))
        S = np.tile(os_, (len(r), 1))
        vals = st.F(R, Z, S).reshape(len(r), len(ow))
        total += float(w[i:i + blk] @ (vals @ ow))
    return total


def integrate_tensor(spec, strata, quad: QuadratureConfig, res: float = 1.0) -> dict:
    out: dict = {}
    for st in strata:
        out[st.tag] = out.get(st.tag, 0.0) + _tensor_stratum(spec, st, quad, res)
    return out


# --------------------------------------------------------------------------
# Monte Carlo backend

def _mc_fn(spec, st: Stratum):
    def fn(rng, size):
        u = rng.random(size)
        rho = power_sample(st.a, st.b, st.q, u)
        oz, os_ = sample_sphere(spec, size, rng)
        if st.needs_rng:
            return st.F(rho, oz, os_, rng)
        return st.F(rho, oz, os_)
    return fn


def integrate_mc(spec, strata, quad: QuadratureConfig, label, budget: int | None = None):
    """Stratified MC; returns ``{tag: (value, stderr)}`` and per-stratum stats."""
    n_total = int(budget or quad.mc_samples)
    sQ = sigma_Q(spec)
    masses = [power_mass(st.a, st.b, st.q) * sQ for st in strata]
    n_pilot = max(64, n_total // (4 * max(1, len(strata))))
    pilots = []
    for j, st in enumerate(strata):
        est = chunked_moments(_mc_fn(spec, st), n_pilot,
                              seed_sequence(quad.seed, label, "pilot", j),
                              quad.chunk_size, quad.workers)
        pilots.append(est)
    remaining = max(0, n_total - n_pilot * len(strata))
    score = np.array([m * max(p.stderr * math.sqrt(p.n), 1e-300) for m, p in zip(masses, pilots)])
    alloc = np.floor(remaining * score / score.sum()).astype(int) if score.sum() > 0 else \
        np.zeros(len(strata), int)
    out: dict = {}
    stats = []
    for j, st in enumerate(strata):
        mean, var_n, n = pilots[j].mean, pilots[j].stderr ** 2, pilots[j].n
        if alloc[j] > 0:
            main = chunked_moments(_mc_fn(spec, st), int(alloc[j]),
                                   seed_sequence(quad.seed, label, "main", j),
                                   quad.chunk_size, quad.workers)
            # pool pilot and main draws (both unbiased for the stratum mean)
            n2 = main.n
            mean = (pilots[j].mean * n + main.mean * n2) / (n + n2)
            var_n = (pilots[j].stderr ** 2 * n * n + main.stderr ** 2 * n2 * n2) / (n + n2) ** 2
            n = n + n2
        val = masses[j] * mean
        var = masses[j] ** 2 * var_n
        v0, e0 = out.get(st.tag, (0.0, 0.0))
        out[st.tag] = (v0 + val, e0 + var)
        stats.append((st.tag, st.a, st.b, n, val, math.sqrt(var)))
    return {k: (v, math.sqrt(e)) for k, (v, e) in out.items()}, stats
