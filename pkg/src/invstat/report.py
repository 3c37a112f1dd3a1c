"""Run configuration and machine-readable reports."""
from __future__ import annotations

import csv
import hashlib
import io
import json
import time
from dataclasses import asdict, dataclass, field
from typing import Callable

from . import _backend

VERSION = "0.1.0"


@dataclass(frozen=True)
class RunConfig:
    n: int = 2
    alpha: float = 1.0
    abc: tuple[float, float, float] = (1.0, 1.0, 1.0)
    seed: int = 0
    tol_geom: float = 1e-5
    tol_exact: float = 1e-10
    samples: int = 1_000_000
    fd_step: float | None = None
    trials: int = 100

    def __post_init__(self):
        if self.tol_geom <= 0 or self.tol_exact <= 0:
            raise ValueError("tolerances must be positive")
        if self.samples < 1:
            raise ValueError("samples must be >= 1")
        if self.trials < 1:
            raise ValueError("trials must be >= 1")
        if len(self.abc) != 3:
            raise ValueError("abc needs three coefficients")

    def to_json(self) -> dict:
        out = asdict(self)
        out["abc"] = list(self.abc)
        return out


def digest(obj) -> str:
    blob = json.dumps(obj, sort_keys=True, default=float).encode()
    return hashlib.sha256(blob).hexdigest()[:16]


@dataclass
class Record:
    name: str
    inputs_digest: str
    violation: float
    tol: float
    passed: bool
    wall_time: float | None = None
    value: float | None = None

    def to_json(self) -> dict:
        out = {
            "name": self.name,
            "inputs_digest": self.inputs_digest,
            "violation": float(self.violation),
            "tol": float(self.tol),
            "pass": bool(self.passed),
            "wall_time": self.wall_time,
        }
        if self.value is not None:
            out["value"] = self.value
        return out


@dataclass
class Report:
    suite: str
    config: dict
    records: list[Record] = field(default_factory=list)
    data: dict = field(default_factory=dict)
    timings: bool = False

    @property
    def passed(self) -> bool:
        return all(r.passed for r in self.records)

    def check(self, name: str, inputs, fn: Callable[[], tuple], value=None) -> Record:
        """Run ``fn`` returning ``(violation, tol)`` or ``(violation, tol, passed)``."""
        start = time.perf_counter()
        res = fn()
        elapsed = time.perf_counter() - start
        if len(res) == 2:
            viol, tol = res
            ok = viol < tol
        else:
            viol, tol, ok = res
        rec = Record(name, digest(inputs), float(viol), float(tol), bool(ok),
                     round(elapsed, 6) if self.timings else None, value)
        self.records.append(rec)
        return rec

    def to_json(self) -> dict:
        out = {
            "suite": self.suite,
            "tool": "invstat",
            "version": VERSION,
            "backend": _backend.name(),
            "config": self.config,
            "records": [r.to_json() for r in self.records],
            "pass": self.passed,
        }
        out.update(self.data)
        return out

    def dumps(self, fmt: str = "json") -> str:
        if fmt == "json":
            return json.dumps(self.to_json(), indent=2) + "\n"
        buf = io.StringIO()
        cols = ["suite", "name", "inputs_digest", "violation", "tol", "pass", "wall_time", "value"]
        w = csv.DictWriter(buf, fieldnames=cols, lineterminator="\n")
        w.writeheader()
        for r in self.records:
            row = r.to_json()
            row["suite"] = self.suite
            w.writerow({k: "" if row.get(k) is None else row.get(k) for k in cols})
        return buf.getvalue()
