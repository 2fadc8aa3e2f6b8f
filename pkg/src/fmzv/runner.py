"""Parallel per-prime execution of congruence checks.

A Check declares its static skip rule and evaluates to an (lhs, rhs) pair of
residues at one prime; the runner partitions the prime range into numeric
chunks, evaluates every check at every prime (sharing one PrimeContext per
prime), and merges chunk results in range order, so the outcome is
independent of the thread count.  Checkpoints make long scans resumable with
bit-identical final reports.
"""

from __future__ import annotations

import hashlib
import json
import multiprocessing
import os
import time
from dataclasses import dataclass, field

from .errors import CheckpointMismatch, EmptyRange
from .harmonic import PrimeContext
from .primes import sieve_primes
from .report import CongruenceReport

CHECKPOINT_FORMAT = 1
DEFAULT_CHUNK = 4096


class SkipPrime(Exception):
    """Raised inside Check.evaluate to skip a prime for a dynamic reason."""

    def __init__(self, reason: str):
        self.reason = reason
        super().__init__(reason)


class Check:
    """One congruence identity, evaluated prime by prime."""

    id: str = "check"

    def skip_reason(self, p: int):
        """Declared precondition: reason string to skip p, or None."""
        return None

    def evaluate(self, ctx: PrimeContext):
        """Return (lhs, rhs) residues mod ctx.p; may raise SkipPrime."""
        raise NotImplementedError


@dataclass
class _Agg:
    passed: int = 0
    failed: list = field(default_factory=list)
    skipped: list = field(default_factory=list)
    unexpected: list = field(default_factory=list)  # subset of skipped

    def extend(self, other):
        self.passed += other.passed
        self.failed.extend(other.failed)
        self.skipped.extend(other.skipped)
        self.unexpected.extend(other.unexpected)

    def to_doc(self):
        return {
            "passed": self.passed,
            "failed": [list(f) for f in self.failed],
            "skipped": [list(s) for s in self.skipped],
            "unexpected": [list(u) for u in self.unexpected],
        }

    @classmethod
    def from_doc(cls, doc):
        return cls(
            passed=doc["passed"],
            failed=[tuple(f) for f in doc["failed"]],
            skipped=[tuple(s) for s in doc["skipped"]],
            unexpected=[tuple(u) for u in doc["unexpected"]],
        )


def _eval_span(args):
    lo, hi, checks = args
    aggs = [_Agg() for _ in checks]
    primes = sieve_primes(lo, hi)
    for p in primes:
        ctx = None
        for check, agg in zip(checks, aggs):
            if p < 3:
                agg.skipped.append((p, "p < 3"))
                continue
            reason = check.skip_reason(p)
            if reason is not None:
                agg.skipped.append((p, reason))
                continue
            if ctx is None:
                ctx = PrimeContext(p)
            try:
                lhs, rhs = check.evaluate(ctx)
            except SkipPrime as sk:
                agg.skipped.append((p, sk.reason))
                agg.unexpected.append((p, sk.reason))
                continue
            if lhs == rhs:
                agg.passed += 1
            else:
                agg.failed.append((p, lhs, rhs))
    return len(primes), (primes[-1] if primes else None), aggs


def job_fingerprint(payload: dict) -> str:
    """Stable hash of a job's semantic parameters."""
    blob = json.dumps(payload, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(blob.encode()).hexdigest()[:16]


def _write_checkpoint(path, fingerprint, check_ids, resume_from, last_prime,
                      primes_done, aggs):
    doc = {
        "format": CHECKPOINT_FORMAT,
        "fingerprint": fingerprint,
        "check_ids": check_ids,
        "resume_from": resume_from,
        "last_prime": last_prime,
        "primes_done": primes_done,
        "aggregates": [a.to_doc() for a in aggs],
    }
    tmp = path + ".tmp"
    with open(tmp, "w") as fh:
        json.dump(doc, fh)
        fh.flush()
        os.fsync(fh.fileno())
    os.replace(tmp, path)


def _load_checkpoint(path, fingerprint, check_ids):
    with open(path) as fh:
        doc = json.load(fh)
    if doc.get("format") != CHECKPOINT_FORMAT:
        raise CheckpointMismatch(f"unsupported checkpoint format in {path}")
    if doc["fingerprint"] != fingerprint or doc["check_ids"] != check_ids:
        raise CheckpointMismatch(
            f"checkpoint {path} belongs to a different job "
            f"(fingerprint {doc['fingerprint']}, expected {fingerprint})"
        )
    aggs = [_Agg.from_doc(d) for d in doc["aggregates"]]
    return doc["resume_from"], doc["last_prime"], doc["primes_done"], aggs


def default_threads() -> int:
    env = os.environ.get("FMZV_THREADS")
    if env:
        return max(1, int(env))
    return os.cpu_count() or 1


def run_checks(checks, lo: int, hi: int, *, threads: int = None,
               chunk: int = DEFAULT_CHUNK, fingerprint: str = "",
               checkpoint_path: str = None, checkpoint_every: int = None,
               strict_skips: bool = False, stop_after_chunks: int = None):
    """Evaluate every check at every prime in [lo, hi].

    Returns one CongruenceReport per check, in check order.  With
    stop_after_chunks set, processes that many chunks, writes a checkpoint,
    and returns None (exercises kill-and-resume in tests).
    """
    if hi < lo:
        raise EmptyRange(f"empty prime range [{lo}, {hi}]")
    checks = list(checks)
    check_ids = [c.id for c in checks]
    start_time = time.monotonic()

    resume_from = lo
    last_prime = None
    primes_done = 0
    aggs = [_Agg() for _ in checks]
    if checkpoint_path and os.path.exists(checkpoint_path):
        resume_from, last_prime, primes_done, aggs = _load_checkpoint(
            checkpoint_path, fingerprint, check_ids
        )

    spans = []
    a = resume_from
    while a <= hi:
        b = min(a + chunk - 1, hi)
        spans.append((a, b))
        a = b + 1

    if threads is None:
        threads = default_threads()

    state = {"stopped": False}

    def consume(results_iter):
        nonlocal last_prime, primes_done
        since_ckpt = 0
        for consumed, ((span_lo, span_hi), result) in enumerate(
            zip(spans, results_iter), start=1
        ):
            n_primes, span_last, span_aggs = result
            for agg, part in zip(aggs, span_aggs):
                agg.extend(part)
            primes_done += n_primes
            since_ckpt += n_primes
            if span_last is not None:
                last_prime = span_last
            if checkpoint_path and checkpoint_every and since_ckpt >= checkpoint_every:
                _write_checkpoint(checkpoint_path, fingerprint, check_ids,
                                  span_hi + 1, last_prime, primes_done, aggs)
                since_ckpt = 0
            if stop_after_chunks is not None and consumed >= stop_after_chunks:
                _write_checkpoint(checkpoint_path, fingerprint, check_ids,
                                  span_hi + 1, last_prime, primes_done, aggs)
                state["stopped"] = True
                return

    if threads <= 1 or len(spans) <= 1:
        consume(_eval_span((s_lo, s_hi, checks)) for s_lo, s_hi in spans)
    else:
        with multiprocessing.Pool(processes=threads) as pool:
            tasks = [(s_lo, s_hi, checks) for s_lo, s_hi in spans]
            consume(pool.imap(_eval_span, tasks))
    if state["stopped"]:
        return None

    if checkpoint_path:
        _write_checkpoint(checkpoint_path, fingerprint, check_ids,
                          hi + 1, last_prime, primes_done, aggs)

    elapsed_ms = int((time.monotonic() - start_time) * 1000)
    reports = []
    for check, agg in zip(checks, aggs):
        failed = list(agg.failed)
        if strict_skips and agg.unexpected:
            failed.extend((p, None, None) for p, _ in agg.unexpected)
            failed.sort(key=lambda f: f[0])
        reports.append(CongruenceReport(
            identity=check.id,
            lo=lo,
            hi=hi,
            passed=agg.passed,
            failed=failed,
            skipped=list(agg.skipped),
            elapsed_ms=elapsed_ms,
            spec_hash=fingerprint,
        ))
    return reports
