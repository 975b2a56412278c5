"""Shared audit-report containers and their text/CSV renderings.

An audit is a batch of named checks, each with a pass flag, the worst
numeric deviation observed and an optional witnessing assignment. Checks
flagged ``required=False`` are informational: their status is reported
but does not affect the overall verdict.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Any, Mapping

Assignment = tuple[tuple[str, int], ...]


def format_assignment(witness: Assignment | None) -> str:
    if not witness:
        return ""
    return " ".join(f"{name}={value}" for name, value in witness)


@dataclass(frozen=True)
class CheckResult:
    name: str
    passed: bool
    violation: float = 0.0
    witness: Assignment | None = None
    required: bool = True
    detail: Mapping[str, Any] | None = None


@dataclass(frozen=True)
class AuditReport:
    title: str
    checks: tuple[CheckResult, ...]

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks if c.required)

    @property
    def worst_violation(self) -> float:
        return max((c.violation for c in self.checks), default=0.0)

    def to_text(self) -> str:
        rows = [("check", "required", "passed", "violation", "witness")]
        for c in self.checks:
            rows.append((
                c.name,
                "yes" if c.required else "no",
                "yes" if c.passed else "NO",
                f"{c.violation:.9f}",
                format_assignment(c.witness),
            ))
        widths = [max(len(r[i]) for r in rows) for i in range(len(rows[0]))]
        lines = [f"{self.title}"]
        for r in rows:
            lines.append("  ".join(cell.ljust(w) for cell, w in zip(r, widths)).rstrip())
        details = [c for c in self.checks if c.detail]
        for c in details:
            items = " ".join(f"{k}={v}" for k, v in c.detail.items())
            lines.append(f"  [{c.name}] {items}")
        lines.append(f"overall: {'PASS' if self.passed else 'FAIL'}")
        return "\n".join(lines) + "\n"

    def to_csv(self) -> str:
        lines = ["check,required,passed,violation,witness"]
        for c in self.checks:
            witness = format_assignment(c.witness)
            lines.append(
                f"{c.name},{str(c.required).lower()},{str(c.passed).lower()},"
                f"{c.violation:.9f},{witness}"
            )
        return "\n".join(lines) + "\n"
