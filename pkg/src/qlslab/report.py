"""Machine-readable verification reports.

A report serializes to ``{schemaVersion, suite, config, checks, queryCounts,
durationMs}``. Serialization is deterministic: key order is fixed, floats
use ``repr`` and ``durationMs`` stays ``null`` unless timing is requested,
so identical flags and seeds give byte-identical output.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Any, Optional

SCHEMA_VERSION = "1.0"

PASS, FAIL, INFO = "pass", "fail", "info"
PAPER, DERIVED = "paper-claimed", "derived-oracle"


@dataclass
class Check:
    id: str
    anchor: str
    claimed: Any
    computed: Any
    residual: Optional[float]
    status: str
    provenance: str

    def to_dict(self) -> dict:
        return {
            "id": self.id,
            "anchor": self.anchor,
            "claimed": _clean(self.claimed),
            "computed": _clean(self.computed),
            "residual": _clean(self.residual),
            "status": self.status,
            "provenance": self.provenance,
        }


def _clean(value):
    """Make numpy scalars and non-finite floats JSON friendly."""
    if hasattr(value, "item") and not isinstance(value, (list, tuple, dict)):
        value = value.item()
    if isinstance(value, float) and not math.isfinite(value):
        return str(value)
    if isinstance(value, (list, tuple)):
        return [_clean(v) for v in value]
    if isinstance(value, dict):
        return {str(k): _clean(v) for k, v in value.items()}
    return value


@dataclass
class VerificationReport:
    suite: str
    config: dict = field(default_factory=dict)
    checks: list[Check] = field(default_factory=list)
    query_counts: dict = field(default_factory=dict)
    duration_ms: Optional[float] = None

    def add(self, id: str, anchor: str, claimed, computed, residual=None, *, ok: Optional[bool] = True,
            provenance: str = DERIVED) -> Check:
        """Append a check; ``ok=None`` marks it informational."""
        status = INFO if ok is None else (PASS if ok else FAIL)
        check = Check(id, anchor, claimed, computed, residual, status, provenance)
        self.checks.append(check)
        return check

    def extend(self, other: "VerificationReport", prefix: str = "") -> None:
        for c in other.checks:
            self.checks.append(Check(prefix + c.id, c.anchor, c.claimed, c.computed, c.residual,
                                     c.status, c.provenance))
        for key, value in other.query_counts.items():
            self.query_counts[prefix + key] = value

    @property
    def passed(self) -> bool:
        return all(c.status != FAIL for c in self.checks)

    @property
    def failures(self) -> list[Check]:
        return [c for c in self.checks if c.status == FAIL]

    def count(self, status: str) -> int:
        return sum(c.status == status for c in self.checks)

    def to_dict(self) -> dict:
        return {
            "schemaVersion": SCHEMA_VERSION,
            "suite": self.suite,
            "config": _clean(self.config),
            "checks": [c.to_dict() for c in self.checks],
            "queryCounts": _clean(self.query_counts),
            "durationMs": self.duration_ms,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, ensure_ascii=False) + "\n"

    def summary_lines(self) -> list[str]:
        lines = [f"{c.status.upper():4s}  {c.id}" for c in self.checks]
        lines.append(f"{self.suite}: {self.count(PASS)} pass, {self.count(FAIL)} fail, "
                     f"{self.count(INFO)} info")
        return lines
