from __future__ import annotations

from dataclasses import dataclass

from .symcone import SymMat


@dataclass(frozen=True)
class Verdict:
    """Outcome of a numerical check at one base point."""

    check: str
    n: int
    point: SymMat
    max_violation: float
    tol: float
    passed: bool

    def __bool__(self):
        return self.passed

    def to_json(self) -> dict:
        return {
            "check": self.check,
            "n": self.n,
            "point": self.point.to_json(),
            "max_violation": float(self.max_violation),
            "tol": float(self.tol),
            "pass": bool(self.passed),
        }

    @classmethod
    def from_json(cls, obj: dict) -> "Verdict":
        return cls(
            obj["check"],
            int(obj["n"]),
            SymMat.from_json(obj["point"]),
            float(obj["max_violation"]),
            float(obj["tol"]),
            bool(obj["pass"]),
        )
