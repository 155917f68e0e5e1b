"""Machine-readable verification reports.

A report is an ordered list of named checks, each pass/fail with an
optional witness (index tuple, monomial, value string, ...), plus free-form
metadata.  Serialization is canonical: insertion order is preserved and the
JSON encoding is deterministic, so reports are diffable byte for byte.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field


@dataclass
class Check:
    name: str
    passed: bool
    witness: object = None  # str or small dict; None when not informative

    def to_json_dict(self):
        out = {"name": self.name, "status": "pass" if self.passed else "fail"}
        if self.witness is not None:
            out["witness"] = self.witness
        return out


@dataclass
class VerificationReport:
    checks: list = field(default_factory=list)
    metadata: dict = field(default_factory=dict)

    def add(self, name, passed, witness=None):
        self.checks.append(Check(name, bool(passed), witness))
        return self

    def __getitem__(self, name):
        for c in self.checks:
            if c.name == name:
                return c
        raise KeyError(name)

    @property
    def passed(self):
        return all(c.passed for c in self.checks)

    def failures(self):
        return [c for c in self.checks if not c.passed]

    def to_json_dict(self):
        return {
            "checks": [c.to_json_dict() for c in self.checks],
            "metadata": self.metadata,
        }

    def to_json(self):
        return json.dumps(self.to_json_dict(), indent=2) + "\n"

    def summary_lines(self):
        lines = []
        for c in self.checks:
            line = f"{c.name}: {'pass' if c.passed else 'FAIL'}"
            if c.witness is not None:
                line += f"  witness={json.dumps(c.witness)}"
            lines.append(line)
        return lines
