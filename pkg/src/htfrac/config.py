"""Run configuration: strict ``key = value`` parsing with environment overrides.

Syntax
------
One assignment per line, ``#`` starts a comment, keys may be dotted
(``quad.mc_samples``). Several assignments can share a line when separated
by commas, so ``group=heisenberg:1, s=0.5, suite=yamabe`` is a complete
config. List values (``s``, ``suite``) are comma or whitespace separated.

Environment variables named ``HTFRAC_<KEY>`` override file values, with dots
written as double underscores: ``HTFRAC_SEED=7``, ``HTFRAC_QUAD__MC_SAMPLES=4096``.
"""
from __future__ import annotations

import os
import re
from dataclasses import dataclass, field
from pathlib import Path

from .errors import ConfigError
from .groups import group_from_id
from .quadrature import QuadratureConfig

SUITES = ("group", "kernels", "operator", "yamabe", "lorentz", "decay", "tail", "localbound")
ENV_PREFIX = "HTFRAC_"
FORMATS = ("json", "csv")
_RESERVED_ENV = ("HTFRAC_BACKEND", "HTFRAC_NO_EXT")   # build/backend switches, not config

_QUAD_KEYS = {
    "split_radius": float, "r_max": float, "mc_samples": int, "seed": int,
    "rel_tol": float, "abs_tol": float, "mode": str, "shells_per_decade": int,
    "radial_nodes": int, "chunk_size": int, "workers": int,
}
_TOP_KEYS = ("group", "s", "suite", "seed", "out", "format", "workers", "timings",
             "y", "points")
_ASSIGN = re.compile(r"^\s*([A-Za-z_][\w.]*)\s*=\s*([^=]*?)\s*$")
_SPLIT = re.compile(r",\s*(?=[A-Za-z_][\w.]*\s*=)")


@dataclass(frozen=True)
class RunConfig:
    """Validated batch configuration (defaults reproduce the standard battery)."""
    group: str = "heisenberg:1"
    s: tuple = (0.5,)
    suites: tuple = SUITES
    quad: dict = field(default_factory=dict)     # QuadratureConfig overrides
    out: str | None = None
    format: str = "json"
    seed: int = 20240517
    workers: int = 1
    timings: bool = False
    y: float = 1.0
    points: int = 8

    def __post_init__(self):
        if not self.suites:
            raise ConfigError("at least one suite must be selected (key 'suite')")
        bad = [x for x in self.suites if x not in SUITES]
        if bad:
            raise ConfigError(f"unknown suite(s) {bad} for key 'suite'; choose from {list(SUITES)}")
        if not self.s:
            raise ConfigError("key 's' needs at least one value")
        for v in self.s:
            if not 0 < v < 1:
                raise ConfigError(f"key 's': value {v} outside (0, 1)")
        try:
            group_from_id(self.group)
        except ValueError as exc:
            raise ConfigError(f"key 'group': {exc}") from exc
        if self.format not in FORMATS:
            raise ConfigError(f"key 'format': expected one of {FORMATS}, got {self.format!r}")
        if self.workers < 1:
            raise ConfigError("key 'workers' must be >= 1")
        if not self.y > 0:
            raise ConfigError("key 'y' must be positive")
        if self.points < 5:
            raise ConfigError("key 'points' must be >= 5")
        try:
            self.quadrature()
        except ValueError as exc:
            raise ConfigError(f"quad.*: {exc}") from exc

    def quadrature(self) -> QuadratureConfig:
        base = {"seed": self.seed, "workers": self.workers}
        base.update(self.quad)
        return QuadratureConfig(**base)

    def replace(self, **kw) -> "RunConfig":
        from dataclasses import replace
        return replace(self, **kw)

    def echo(self) -> dict:
        """Config as recorded in reports; ``workers`` and ``out`` are left out
        because they must not change the report bytes."""
        q = {k: v for k, v in sorted(self.quad.items()) if k != "workers"}
        return {"group": self.group, "s": list(self.s), "suites": list(self.suites),
                "seed": self.seed, "y": self.y, "points": self.points, "quad": q}


def _split_list(v: str) -> list:
    return [t for t in re.split(r"[,\s]+", v.strip()) if t]


def _to_bool(key, v: str) -> bool:
    t = v.strip().lower()
    if t in ("1", "true", "yes", "on"):
        return True
    if t in ("0", "false", "no", "off"):
        return False
    raise ConfigError(f"key {key!r}: expected a boolean, got {v!r}")


def _convert(key: str, raw: str):
    try:
        if key == "s":
            return tuple(float(t) for t in _split_list(raw))
        if key == "suite":
            items = _split_list(raw)
            return SUITES if items == ["all"] else tuple(items)
        if key in ("seed", "workers", "points"):
            return int(raw)
        if key == "y":
            return float(raw)
        if key == "timings":
            return _to_bool(key, raw)
        if key in ("group", "out", "format"):
            if not raw:
                raise ConfigError(f"key {key!r} has an empty value")
            return raw
        sub = key.split(".", 1)[1]
        typ = _QUAD_KEYS[sub]
        return typ(raw)
    except ValueError as exc:
        if isinstance(exc, ConfigError):
            raise
        raise ConfigError(f"key {key!r}: cannot parse {raw!r}") from exc


def _known(key: str) -> bool:
    if key in _TOP_KEYS:
        return True
    return key.startswith("quad.") and key[5:] in _QUAD_KEYS


def parse_pairs(text: str) -> dict:
    """Raw ``key -> string`` mapping; duplicates and malformed lines are errors."""
    pairs: dict = {}
    unknown = []
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        for chunk in _SPLIT.split(line):
            m = _ASSIGN.match(chunk)
            if not m:
                raise ConfigError(f"line {lineno}: expected 'key = value', got {chunk.strip()!r}")
            key, val = m.group(1).lower(), m.group(2)
            if key in pairs:
                raise ConfigError(f"line {lineno}: duplicate key {key!r}")
            if not _known(key):
                unknown.append(key)
            pairs[key] = val
    if unknown:
        raise ConfigError(f"unknown config key(s): {', '.join(unknown)}")
    return pairs


def env_overrides(environ=None) -> dict:
    environ = os.environ if environ is None else environ
    out, unknown = {}, []
    for name, val in environ.items():
        if not name.startswith(ENV_PREFIX) or name in _RESERVED_ENV:
            continue
        key = name[len(ENV_PREFIX):].lower().replace("__", ".")
        if _known(key):
            out[key] = val
        else:
            unknown.append(name)
    if unknown:
        raise ConfigError(f"unknown environment override(s): {', '.join(sorted(unknown))}")
    return out


def build_config(pairs: dict) -> RunConfig:
    kw: dict = {}
    quad: dict = {}
    for key, raw in pairs.items():
        val = _convert(key, raw)
        if key.startswith("quad."):
            quad[key[5:]] = val
        elif key == "suite":
            kw["suites"] = val
        else:
            kw[key] = val
    if quad:
        kw["quad"] = quad
    return RunConfig(**kw)


def parse_config(source: str | os.PathLike | None = None, *, environ=None,
                 overrides: dict | None = None) -> RunConfig:
    """Build a :class:`RunConfig` from a file path or inline text.

    Precedence, lowest first: defaults, the config source, ``HTFRAC_*``
    environment variables, explicit ``overrides`` (the CLI flags).
    """
    text = ""
    if source is not None:
        p = Path(source) if not isinstance(source, str) or "=" not in source else None
        if p is not None:
            if not p.is_file():
                raise ConfigError(f"config file not found: {p}")
            text = p.read_text()
        else:
            text = source
        if not text.strip():
            raise ConfigError("config text is empty")
    pairs = parse_pairs(text)
    pairs.update(env_overrides(environ))
    for key, val in (overrides or {}).items():
        if val is None:
            continue
        if not _known(key):
            raise ConfigError(f"unknown config key(s): {key}")
        pairs[key] = val if isinstance(val, str) else _unparse(val)
    return build_config(pairs)


def _unparse(v) -> str:
    if isinstance(v, (list, tuple)):
        return ",".join(str(x) for x in v)
    return str(v)
