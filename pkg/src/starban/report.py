"""Uniform pass/fail record emitted by every law suite."""

from __future__ import annotations

from dataclasses import dataclass, field


@dataclass
class CheckReport:
    check: str
    passed: bool
    details: dict = field(default_factory=dict)

    def to_json(self) -> dict:
        return {"check": self.check, "passed": bool(self.passed), "details": self.details}
