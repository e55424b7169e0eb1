"""Check/report containers shared by verification routines and the CLI."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any

PASS = "pass"
FAIL = "fail"
INFO = "info"
SKIP = "skip"


@dataclass(frozen=True)
class Check:
    name: str
    status: str
    witness: Any = None
    informational: bool = False

    def to_json(self) -> dict:
        out = {"name": self.name, "status": self.status}
        if self.witness is not None:
            out["witness"] = self.witness
        if self.informational:
            out["informational"] = True
        return out


@dataclass
class Report:
    checks: list[Check] = field(default_factory=list)

    def add(self, name: str, ok: bool, witness: Any = None) -> Check:
        c = Check(name, PASS if ok else FAIL, None if ok else witness)
        self.checks.append(c)
        return c

    def add_info(self, name: str, status: str, witness: Any = None) -> Check:
        c = Check(name, status, witness, informational=True)
        self.checks.append(c)
        return c

    def add_skip(self, name: str, witness: Any = None) -> Check:
        c = Check(name, SKIP, witness)
        self.checks.append(c)
        return c

    @property
    def passed(self) -> bool:
        return all(c.status != FAIL for c in self.checks if not c.informational)

    def failures(self) -> list[Check]:
        return [c for c in self.checks if c.status == FAIL and not c.informational]

    def first_failure(self) -> Check | None:
        fs = self.failures()
        return fs[0] if fs else None

    def to_json(self) -> list[dict]:
        return [c.to_json() for c in self.checks]

    def extend(self, other: "Report", prefix: str = "") -> None:
        for c in other.checks:
            self.checks.append(
                Check(prefix + c.name, c.status, c.witness, c.informational)
            )
