"""Congruence reports and their JSON/CSV serializations.

A report partitions the primes of its range into pass / fail / skip; passes
are stored as a count only, since the failing and skipped primes pin down the
rest of the partition.  JSON is the canonical round-trippable form; CSV
flattens to one row per prime outcome (pass rows are reconstructed by
re-enumerating the range).
"""

from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass, field

from .primes import sieve_primes

TOOL_VERSION = "0.1.0"


@dataclass
class CongruenceReport:
    identity: str
    lo: int
    hi: int
    passed: int = 0
    failed: list = field(default_factory=list)   # (p, lhs, rhs)
    skipped: list = field(default_factory=list)  # (p, reason)
    elapsed_ms: int = None
    tool_version: str = TOOL_VERSION
    spec_hash: str = ""

    def ok(self) -> bool:
        return not self.failed

    def total(self) -> int:
        return self.passed + len(self.failed) + len(self.skipped)


def emit_report(report: CongruenceReport, fmt: str = "json") -> str:
    if fmt == "json":
        return _emit_json(report)
    if fmt == "csv":
        return _emit_csv(report)
    raise ValueError(f"unknown format {fmt!r}")


def _emit_json(report: CongruenceReport) -> str:
    doc = {
        "id": report.identity,
        "range": {"lo": report.lo, "hi": report.hi},
        "passed": report.passed,
        "failed": [{"p": p, "lhs": lhs, "rhs": rhs} for p, lhs, rhs in report.failed],
        "skipped": [{"p": p, "reason": r} for p, r in report.skipped],
        "elapsed_ms": report.elapsed_ms,
        "tool_version": report.tool_version,
        "spec_hash": report.spec_hash,
    }
    return json.dumps(doc, indent=2) + "\n"


def parse_report(text: str) -> CongruenceReport:
    doc = json.loads(text)
    return CongruenceReport(
        identity=doc["id"],
        lo=doc["range"]["lo"],
        hi=doc["range"]["hi"],
        passed=doc["passed"],
        failed=[(f["p"], f["lhs"], f["rhs"]) for f in doc["failed"]],
        skipped=[(s["p"], s["reason"]) for s in doc["skipped"]],
        elapsed_ms=doc["elapsed_ms"],
        tool_version=doc["tool_version"],
        spec_hash=doc["spec_hash"],
    )


def _emit_csv(report: CongruenceReport) -> str:
    failed = {p: (lhs, rhs) for p, lhs, rhs in report.failed}
    skipped = dict(report.skipped)
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["identity", "p", "outcome", "lhs", "rhs", "reason"])
    for p in sieve_primes(report.lo, report.hi):
        if p in failed:
            lhs, rhs = failed[p]
            w.writerow([report.identity, p, "fail", lhs, rhs, ""])
        elif p in skipped:
            w.writerow([report.identity, p, "skip", "", "", skipped[p]])
        else:
            w.writerow([report.identity, p, "pass", "", "", ""])
    return buf.getvalue()


def write_report(report: CongruenceReport, path: str, fmt: str = "json"):
    with open(path, "w") as fh:
        fh.write(emit_report(report, fmt))
