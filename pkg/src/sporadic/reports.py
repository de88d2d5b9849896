"""Structured verification records and their serialization.

Every verification entry point returns a Report.  The JSON-lines form is the
machine-readable artifact; rendering is deterministic (fixed key order,
values as decimal strings with explicit error radius) so reruns under the
same configuration are byte-identical.  Wall-clock timings are recorded but
only serialized on request, since they would break that determinism.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field


@dataclass
class Report:
    claim: str
    params: dict = field(default_factory=dict)
    lhs: str = ""
    rhs: str = ""
    modulus_or_tolerance: str = ""
    passed: bool = False
    precision_bits: int | None = None
    detail: str = ""
    runtime_ms: int | None = None

    def to_json(self, include_timings: bool = False) -> str:
        record = {
            "claim": self.claim,
            "params": {k: self.params[k] for k in sorted(self.params)},
            "lhs": self.lhs,
            "rhs": self.rhs,
            "modulus_or_tolerance": self.modulus_or_tolerance,
            "pass": self.passed,
            "precision_bits": self.precision_bits,
        }
        if self.detail:
            record["detail"] = self.detail
        if include_timings and self.runtime_ms is not None:
            record["runtime_ms"] = self.runtime_ms
        return json.dumps(record, separators=(",", ":"), sort_keys=False)

    def to_tsv(self) -> str:
        status = "pass" if self.passed else "FAIL"
        params = ",".join(f"{k}={self.params[k]}" for k in sorted(self.params))
        return "\t".join(
            [self.claim, params, self.lhs, self.rhs, self.modulus_or_tolerance, status]
        )

    def to_human(self, include_timings: bool = False) -> str:
        status = "pass" if self.passed else "FAIL"
        params = ", ".join(f"{k}={self.params[k]}" for k in sorted(self.params))
        head = f"[{status}] {self.claim}" + (f" ({params})" if params else "")
        body = f"  lhs = {self.lhs}\n  rhs = {self.rhs}"
        if self.modulus_or_tolerance:
            body += f"\n  within: {self.modulus_or_tolerance}"
        if self.detail:
            body += f"\n  note: {self.detail}"
        if include_timings and self.runtime_ms is not None:
            body += f"\n  runtime_ms: {self.runtime_ms}"
        return head + "\n" + body


def all_passed(reports) -> bool:
    return all(r.passed for r in reports)


def first_failure(reports) -> Report | None:
    for r in reports:
        if not r.passed:
            return r
    return None
