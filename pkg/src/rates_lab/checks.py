"""Lightweight pass/fail records used by validation and diagnostic suites."""

from __future__ import annotations

from dataclasses import dataclass


@dataclass(frozen=True)
class CheckResult:
    """Outcome of one named validation check."""

    name: str
    passed: bool
    detail: str = ""

    def __str__(self) -> str:
        mark = "PASS" if self.passed else "FAIL"
        return f"[{mark}] {self.name}: {self.detail}" if self.detail else f"[{mark}] {self.name}"


def failing(checks: list[CheckResult]) -> list[CheckResult]:
    return [c for c in checks if not c.passed]


def ensure_all(checks: list[CheckResult], context: str) -> None:
    """Raise ValueError listing every failed check."""
    bad = failing(checks)
    if bad:
        lines = "; ".join(str(c) for c in bad)
        raise ValueError(f"{context}: {len(bad)} check(s) failed: {lines}")
