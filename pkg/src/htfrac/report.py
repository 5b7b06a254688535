"""Check records, verification reports and their JSON / CSV serialization."""
from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass, field

import numpy as np

SCHEMA_VERSION = 1
STATUSES = ("pass", "fail", "diagnostic")


@dataclass
class CheckRecord:
    id: str
    anchor: str
    inputs: dict
    value: object
    tolerance: object = None
    status: str = "diagnostic"
    error_estimate: object = None
    provenance: str = "closed-form"
    message: str = ""
    wall_clock: float | None = None

    def __post_init__(self):
        if self.status not in STATUSES:
            raise ValueError(f"status must be one of {STATUSES}")

    def as_dict(self, timings: bool = False) -> dict:
        d = {
            "id": self.id,
            "anchor": self.anchor,
            "inputs": self.inputs,
            "value": self.value,
            "error_estimate": self.error_estimate,
            "tolerance": self.tolerance,
            "status": self.status,
            "provenance": self.provenance,
            "message": self.message,
        }
        if timings:
            d["wall_clock"] = self.wall_clock
        return d


@dataclass
class VerificationReport:
    title: str = ""
    records: list = field(default_factory=list)
    config: dict = field(default_factory=dict)
    version: str = ""

    def add(self, rec: CheckRecord) -> CheckRecord:
        self.records.append(rec)
        return rec

    def extend(self, other: "VerificationReport"):
        self.records.extend(other.records)

    @property
    def passed(self) -> bool:
        return all(r.status != "fail" for r in self.records)

    def by_id(self, ident: str) -> CheckRecord:
        for r in self.records:
            if r.id == ident:
                return r
        raise KeyError(ident)

    def counts(self) -> dict:
        out = {s: 0 for s in STATUSES}
        for r in self.records:
            out[r.status] += 1
        return out

    def sorted(self) -> "VerificationReport":
        return VerificationReport(self.title, sorted(self.records, key=lambda r: r.id),
                                  self.config, self.version)

    def as_dict(self, timings: bool = False) -> dict:
        return {
            "schema": SCHEMA_VERSION,
            "artifact_version": self.version,
            "title": self.title,
            "config": self.config,
            "summary": self.counts(),
            "records": [r.as_dict(timings) for r in self.records],
        }


# --------------------------------------------------------------------------
# serialization

def _plain(obj):
    """Convert numpy scalars/arrays and tuples into JSON-ready python values."""
    if isinstance(obj, dict):
        return {str(k): _plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_plain(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return [_plain(v) for v in obj.tolist()]
    if isinstance(obj, (np.bool_, bool)):
        return bool(obj)
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (np.floating, float)):
        return float(obj)
    return obj


def _dump(obj, out: list, indent: int, level: int):
    pad = " " * (indent * (level + 1))
    end = " " * (indent * level)
    if isinstance(obj, bool) or obj is None:
        out.append(json.dumps(obj))
    elif isinstance(obj, int):
        out.append(str(obj))
    elif isinstance(obj, float):
        if math.isfinite(obj):
            out.append(format(obj, ".17g"))
        else:
            out.append(json.dumps(str(obj)))
    elif isinstance(obj, str):
        out.append(json.dumps(obj, ensure_ascii=False))
    elif isinstance(obj, dict):
        if not obj:
            out.append("{}")
            return
        out.append("{\n")
        items = list(obj.items())
        for i, (k, v) in enumerate(items):
            out.append(pad + json.dumps(k) + ": ")
            _dump(v, out, indent, level + 1)
            out.append(",\n" if i < len(items) - 1 else "\n")
        out.append(end + "}")
    elif isinstance(obj, list):
        if not obj:
            out.append("[]")
            return
        if all(not isinstance(v, (dict, list)) for v in obj):
            out.append("[")
            for i, v in enumerate(obj):
                _dump(v, out, indent, level + 1)
                if i < len(obj) - 1:
                    out.append(", ")
            out.append("]")
            return
        out.append("[\n")
        for i, v in enumerate(obj):
            out.append(pad)
            _dump(v, out, indent, level + 1)
            out.append(",\n" if i < len(obj) - 1 else "\n")
        out.append(end + "]")
    else:
        out.append(json.dumps(str(obj)))


def to_json(obj, indent: int = 2) -> str:
    """JSON text with every float written to 17 significant digits."""
    out: list = []
    _dump(_plain(obj), out, indent, 0)
    return "".join(out) + "\n"


CSV_FIELDS = ("id", "status", "value", "error_estimate", "tolerance", "provenance",
              "anchor", "inputs", "message")


def _cell(v):
    v = _plain(v)
    if isinstance(v, float):
        return format(v, ".17g")
    if isinstance(v, (dict, list)):
        return to_json(v, indent=0).replace("\n", "")
    return "" if v is None else str(v)


def emit(report: VerificationReport, fmt: str = "json", timings: bool = False) -> bytes:
    """Serialize a report; ``fmt`` is ``json`` or ``csv``."""
    if fmt == "json":
        return to_json(report.as_dict(timings)).encode()
    if fmt == "csv":
        buf = io.StringIO()
        fields = CSV_FIELDS + (("wall_clock",) if timings else ())
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(fields)
        for r in report.records:
            d = r.as_dict(timings)
            w.writerow([_cell(d[f]) for f in fields])
        return buf.getvalue().encode()
    raise ValueError(f"unknown report format {fmt!r}")


def table_csv(header, rows) -> bytes:
    """Plain numeric table (fit curves and the like) as CSV bytes."""
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([_cell(v) for v in row])
    return buf.getvalue().encode()
