"""Command line entry point.

    htfrac verify <suite> [flags]     run one suite
    htfrac report [flags]             run the configured battery (all suites by default)
    htfrac decay [flags]              decay fit of the explicit solution, as a CSV table
    htfrac tail [flags]               tail profile T(u_1; e, R), as a CSV table
    htfrac calibrate-alpha [flags]    calibrated alpha(m, k, s) with its uncertainty

Exit status is 0 exactly when no record has status ``fail``; configuration
errors exit with 2.
"""
from __future__ import annotations

import argparse
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .config import SUITES, parse_config
from .errors import ConfigError, HtfracError
from .report import CheckRecord, VerificationReport, emit, table_csv, to_json


def _parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--group", help="group id, e.g. heisenberg:1, quaternionic:1, euclidean:3")
    common.add_argument("--s", help="comma separated s values in (0, 1)")
    common.add_argument("--config", help="config file (key = value lines)")
    common.add_argument("--seed", type=int)
    common.add_argument("--out", help="output file (default: stdout)")
    common.add_argument("--format", choices=("json", "csv"))
    common.add_argument("--workers", type=int, help="concurrent checks")
    common.add_argument("--timings", action="store_true", default=None,
                        help="include wall-clock per check (breaks byte-identity)")
    p = argparse.ArgumentParser(prog="htfrac", description="Verification battery for fractional "
                                "sub-Laplacians on H-type groups.")
    p.add_argument("--version", action="version", version=__version__)
    sub = p.add_subparsers(dest="command", required=True)
    v = sub.add_parser("verify", parents=[common], help="run a single suite")
    v.add_argument("suite", choices=SUITES)
    sub.add_parser("report", parents=[common], help="run the configured battery")
    sub.add_parser("decay", parents=[common], help="decay fit table")
    sub.add_parser("tail", parents=[common], help="tail profile table")
    sub.add_parser("calibrate-alpha", parents=[common], help="calibrate alpha")
    return p


def _config(args, suite=None):
    over = {"group": args.group, "s": args.s, "seed": args.seed, "out": args.out,
            "format": args.format, "workers": args.workers, "timings": args.timings}
    if suite is not None:
        over["suite"] = suite
    return parse_config(args.config, overrides=over)


def _write(data: bytes, out):
    if out:
        Path(out).write_bytes(data)
    else:
        sys.stdout.buffer.write(data)
        sys.stdout.flush()


def _progress(check, recs):
    bad = sum(r.status == "fail" for r in recs)
    print(f"[{check.id}] {len(recs)} records" + (f", {bad} failed" if bad else ""),
          file=sys.stderr)


def _cmd_report(args, suite=None) -> int:
    from .suites import run
    cfg = _config(args, suite)
    rep = run(cfg, progress=_progress)
    _write(emit(rep, cfg.format, cfg.timings), cfg.out)
    c = rep.counts()
    print(f"{c['pass']} pass, {c['fail']} fail, {c['diagnostic']} diagnostic", file=sys.stderr)
    return 0 if rep.passed else 1


def _bubble(cfg, s):
    from .groups import group_from_id
    from .yamabe import ExplicitSolutionSpec, bubble
    spec = group_from_id(cfg.group)
    return spec, bubble(ExplicitSolutionSpec(spec, 1.0, s))


def _cmd_decay(args) -> int:
    from .yamabe import decay_fit
    cfg = _config(args, "decay")
    rows, ok = [], True
    for s in cfg.s:
        spec, u1 = _bubble(cfg, s)
        rep = decay_fit(spec, u1, None, cfg.quadrature())
        target = spec.Q - 2 * s
        ok &= abs(rep.fitted_exponent - target) <= 0.02 * target
        for R, sup, inf in zip(rep.radii, rep.sups, rep.inflation):
            rows.append((s, R, sup, inf, rep.fitted_exponent, target))
        print(f"s={s:g}: fitted exponent {rep.fitted_exponent:.6g} (target {target:g})",
              file=sys.stderr)
    hdr = ("s", "R", "sup", "inflation", "fitted_exponent", "target")
    _write(_table(hdr, rows, cfg.format), cfg.out)
    return 0 if ok else 1


def _cmd_tail(args) -> int:
    from .groups import group_from_id
    from .operator import tail_profile
    cfg = _config(args, "tail")
    rows = []
    radii = (8.0, 16.0, 32.0, 64.0, 128.0)
    ok = True
    for s in cfg.s:
        spec, u1 = _bubble(cfg, s)
        prof = tail_profile(spec, u1, spec.identity(), radii, s, cfg.quadrature())
        T = np.array([p.value for p in prof])
        beta = spec.Q - 2 * s
        slope = float(np.polyfit(np.log(radii), np.log(T), 1)[0])
        ok &= abs(slope + beta) <= 0.05 * beta
        for R, p in zip(radii, prof):
            rows.append((s, R, p.value, p.error_estimate, p.value * R ** beta, slope))
        print(f"s={s:g}: slope {slope:.6g} (target {-beta:g})", file=sys.stderr)
    hdr = ("s", "R", "T", "error_estimate", "T_scaled", "slope")
    _write(_table(hdr, rows, cfg.format), cfg.out)
    return 0 if ok else 1


def _table(hdr, rows, fmt) -> bytes:
    if fmt == "csv":
        return table_csv(hdr, rows)
    return to_json([dict(zip(hdr, r)) for r in rows]).encode()


def _cmd_alpha(args) -> int:
    from .groups import group_from_id
    from .yamabe import ANCHORS, calibrate_alpha
    cfg = _config(args, "yamabe")
    spec = group_from_id(cfg.group)
    if spec.k == 0:
        raise ConfigError("calibrate-alpha needs an H-type group (k >= 1)")
    rep = VerificationReport("alpha calibration", [], cfg.echo(), __version__)
    for s in cfg.s:
        cal = calibrate_alpha(spec, s, cfg.quadrature())
        for r in cal.report.records:
            r.id = f"s={s:g}.{r.id}"
            rep.add(r)
        kc = cal.constants
        rep.add(CheckRecord(f"s={s:g}.constants", ANCHORS["riesz"], {"group": cfg.group, "s": s}, kc.as_dict(),
                            status="diagnostic", error_estimate=kc.alpha_uncertainty,
                            provenance=cal.intertwining.method))
        print(f"s={s:g}: alpha = {kc.alpha_calibrated:.10g} +- {kc.alpha_uncertainty:.2g}",
              file=sys.stderr)
    _write(emit(rep, cfg.format, cfg.timings), cfg.out)
    return 0 if rep.passed else 1


def main(argv=None) -> int:
    args = _parser().parse_args(argv)
    try:
        if args.command == "verify":
            return _cmd_report(args, args.suite)
        if args.command == "report":
            return _cmd_report(args)
        if args.command == "decay":
            return _cmd_decay(args)
        if args.command == "tail":
            return _cmd_tail(args)
        return _cmd_alpha(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except HtfracError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
