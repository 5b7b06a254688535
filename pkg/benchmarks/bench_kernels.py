"""Compiled kernels vs the numpy fallback.

Times the fused symmetric-difference evaluator (the inner loop of the
operator quadrature) and a full ``apply_Ls`` call under each backend, and
reports the largest relative disagreement between them.

    python3 benchmarks/bench_kernels.py [--n 200000] [--repeat 5]
"""
from __future__ import annotations

import argparse
import os
import subprocess
import sys
import timeit

import numpy as np

from htfrac import _dispatch
from htfrac.fields import bump, koranyi_profile
from htfrac.groups import heisenberg, make_point, quaternionic


def _fields(spec):
    return {"bump": bump(spec, 2.0, 5), "profile": koranyi_profile(spec, 1.0, (spec.Q - 1) / 4)}


def bench_sym_avg(n: int, repeat: int):
    rows = []
    rng = np.random.default_rng(1)
    for spec in (heisenberg(1), heisenberg(3), quaternionic(1)):
        g = make_point(spec, rng.normal(size=spec.m) * 0.3, rng.normal(size=spec.k) * 0.3)
        hz = rng.normal(size=(n, spec.m))
        hs = rng.normal(size=(n, spec.k))
        for name, u in _fields(spec).items():
            out, times = {}, {}
            for be in ("python", "cython"):
                p = _dispatch.plan(spec, u, True, 0.8, 0.5, impl=_dispatch.implementation(be))
                out[be] = p.avg(g.z, g.sigma, hz, hs)
                times[be] = min(timeit.repeat(lambda: p.avg(g.z, g.sigma, hz, hs),
                                              number=1, repeat=repeat))
            scale = np.max(np.abs(out["python"])) or 1.0
            diff = float(np.max(np.abs(out["python"] - out["cython"])) / scale)
            rows.append((spec.name, name, n, times["python"], times["cython"],
                         times["python"] / times["cython"], diff))
    return rows


_APPLY = """
import time
from htfrac import backend
from htfrac.fields import bump
from htfrac.groups import heisenberg, make_point
from htfrac.operator import apply_Ls
from htfrac.quadrature import QuadratureConfig
spec = heisenberg(1)
u = bump(spec, 2.0, 5)
g = make_point(spec, [0.3, -0.2], [0.1])
q = QuadratureConfig()
apply_Ls(spec, u, g, 0.5, q)
t0 = time.perf_counter()
r = apply_Ls(spec, u, g, 0.5, q)
print(backend(), time.perf_counter() - t0, repr(r.value))
"""


def bench_apply():
    """Whole operator evaluation; the backend is chosen at import, so use subprocesses."""
    res = {}
    for be in ("python", "cython"):
        env = {"HTFRAC_BACKEND": be}
        out = subprocess.run([sys.executable, "-c", _APPLY], env={**os.environ, **env},
                             capture_output=True, text=True, check=True).stdout.split()
        res[out[0]] = (float(out[1]), float(out[2]))
    return res


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--n", type=int, default=200_000)
    ap.add_argument("--repeat", type=int, default=5)
    a = ap.parse_args(argv)
    print(f"{'group':<16}{'field':<9}{'n':>8}{'python s':>11}{'cython s':>11}{'speedup':>9}"
          f"{'max rel diff':>14}")
    for r in bench_sym_avg(a.n, a.repeat):
        print(f"{r[0]:<16}{r[1]:<9}{r[2]:>8}{r[3]:>11.4f}{r[4]:>11.4f}{r[5]:>9.1f}{r[6]:>14.2e}")
    res = bench_apply()
    (tp, vp), (tc, vc) = res["python"], res["cython"]
    print(f"\napply_Ls on heisenberg:1, bump, s=0.5: python {tp:.3f} s, cython {tc:.3f} s, "
          f"speedup {tp / tc:.1f}, values {vp!r} vs {vc!r}")


if __name__ == "__main__":
    main()
