"""Verification report records and their JSON / text renderings."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import List, Optional, Tuple


@dataclass
class VerificationReport:
    """Outcome of one symbolic check, with an optional numeric guard.

    ``symbolic_residuals`` lists (label, printed expression) for every
    surviving non-zero residual; PASS requires that list empty and, when a
    numeric spot check ran, ``numeric_max`` below its tolerance.
    """

    subject: str
    status: str  # "PASS" | "FAIL"
    symbolic_residuals: List[Tuple[str, str]] = field(default_factory=list)
    numeric_max: Optional[float] = None
    details: str = ""

    @property
    def passed(self) -> bool:
        return self.status == "PASS"

    def to_dict(self) -> dict:
        return {
            "subject": self.subject,
            "status": self.status,
            "symbolic_residuals": [
                {"label": lab, "expr": s} for lab, s in self.symbolic_residuals],
            "numeric_max": self.numeric_max,
            "details": self.details,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, indent=2)

    def to_text(self) -> str:
        lines = [f"[{self.status}] {self.subject}"]
        if self.details:
            lines.append(f"  {self.details}")
        if self.numeric_max is not None:
            lines.append(f"  numeric max |residual| = {self.numeric_max:.3e}")
        for lab, s in self.symbolic_residuals:
            lines.append(f"  residual {lab}: {s}")
        return "\n".join(lines)


def reports_to_json(reports: List[VerificationReport]) -> str:
    return json.dumps([r.to_dict() for r in reports], sort_keys=True, indent=2)


def reports_to_text(reports: List[VerificationReport]) -> str:
    return "\n".join(r.to_text() for r in reports) + "\n"
