"""Fermat quotients, Wieferich sets, and the quotient congruence family.

The Fermat quotient with base N at an odd prime p not dividing N is
q_p(N) = (N^{p-1} - 1)/p, taken mod p.  It is computed from a single
exponentiation mod p^2, so no big-integer N^{p-1} is ever materialized.
q_p(N) = 0 exactly when p is a Wieferich prime to base N.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from math import gcd

from .errors import ScanExhausted, SharedFactor
from .harmonic import ColorMap, PrimeContext, s_pk, zeta_p_colormap
from .primes import mod_inv, pow_mod_p2, sieve_primes
from .runner import Check, job_fingerprint, run_checks


def fermat_quotient(base: int, p: int) -> int:
    """q_p(base) mod p; requires gcd(base, p) = 1 and odd prime p."""
    if base < 1:
        raise ValueError(f"base must be >= 1, got {base}")
    x = pow_mod_p2(base, p - 1, p)  # raises SharedFactor if p | base
    return (x - 1) // p % p


def is_wieferich_base(base: int, p: int) -> bool:
    """True when p^2 divides base^{p-1} - 1."""
    if gcd(base, p) != 1:
        raise SharedFactor(f"{base} and {p} share a factor")
    return pow_mod_p2(base, p - 1, p) == 1


def ell_p(p: int) -> int:
    """Least base N >= 2 with q_p(N) nonzero mod p.

    q_p(1) = 0 always, so the scan starts at 2; the result is provably < p,
    and a scan reaching p would be report-worthy, not crash-worthy.
    """
    if p < 3:
        raise ValueError(f"need an odd prime, got {p}")
    for n in range(2, p + 1):
        if fermat_quotient(n, p) != 0:
            if n >= p:
                raise ScanExhausted(
                    f"ell_p({p}) = {n} >= p, contradicting the classical bound"
                )
            return n
    raise ScanExhausted(f"no base below {p + 1} has a nonzero quotient at {p}")


def check_lenstra_bound(p: int) -> bool:
    """ell_p <= 4 (ln p)^2, and ell_p < p."""
    val = ell_p(p)
    return val < p and val <= 4 * math.log(p) ** 2


def wieferich_intersection(m_max: int, lo: int, hi: int) -> list:
    """Primes in [lo, hi] that are Wieferich to every base 2..m_max.

    Equivalently the primes with ell_p > m_max; computed by the direct
    mod-p^2 membership test for each base.
    """
    if m_max < 2:
        raise ValueError(f"need m_max >= 2, got {m_max}")
    hits = []
    for p in sieve_primes(max(lo, 3), hi):
        member = True
        for n in range(2, m_max + 1):
            # p | n rules p out of W(n) immediately
            if n % p == 0 or pow(n, p - 1, p * p) != 1:
                member = False
                break
        if member:
            hits.append(p)
    return hits


def wieferich_search(base: int, lo: int, hi: int) -> list:
    """Primes p in [lo, hi] with p^2 | base^{p-1} - 1 (p not dividing base)."""
    hits = []
    for p in sieve_primes(max(lo, 3), hi):
        if base % p == 0:
            continue
        if pow(base, p - 1, p * p) == 1:
            hits.append(p)
    return hits


@dataclass
class LevelWitness:
    """A prime at which some level-N bracket value of weight 1 is nonzero."""

    p: int
    j: int
    value: int        # the depth-1 bracket value at p
    power_value: int  # its k-th power mod p, still nonzero


def nonzero_witness_level(n_level: int, k: int, bound: int):
    """Search p <= bound with q_p(N) != 0; the quotient identity then forces
    some bracket value of weight 1 at level N to be nonzero, and its k-th
    power is a nonzero value of weight k.

    Returns a LevelWitness, or None if no prime below the bound works.
    """
    if n_level < 2:
        raise ValueError(f"need level >= 2, got {n_level}")
    if k < 1:
        raise ValueError(f"need k >= 1, got {k}")
    for p in sieve_primes(3, bound):
        if n_level % p == 0:
            continue
        if fermat_quotient(n_level, p) == 0:
            continue
        ctx = PrimeContext(p)
        for j in range(1, n_level):
            cmap = ColorMap.bracket(n_level, 1, j)
            v = zeta_p_colormap((1,), cmap, p, ctx=ctx)
            if v != 0:
                return LevelWitness(p=p, j=j, value=v,
                                    power_value=pow(v, k, p))
        raise ScanExhausted(
            f"q_p({n_level}) != 0 at p = {p} but every bracket value "
            "vanished; the quotient identity rules this out"
        )
    return None


# ---------------------------------------------------------------------------
# congruence checks

class EisensteinCheck(Check):
    """2 q_p(2) = -s_p(0, 2)."""

    id = "eisenstein"

    def evaluate(self, ctx):
        p = ctx.p
        lhs = 2 * fermat_quotient(2, p) % p
        rhs = -s_pk(0, 2, 1, p, ctx=ctx) % p
        return lhs, rhs


class SdiCheck(Check):
    """(N+1) q_p(2) = -sum_{0 <= j < N/2} s_p(2j, 2N)."""

    def __init__(self, n: int):
        if n < 1:
            raise ValueError(f"need N >= 1, got {n}")
        self.n = n
        self.id = f"sdi-{n}"

    def skip_reason(self, p):
        if (2 * self.n) % p == 0:
            return "p divides 2N"
        return None

    def evaluate(self, ctx):
        p, n = ctx.p, self.n
        lhs = (n + 1) * fermat_quotient(2, p) % p
        total = 0
        for j in range((n + 1) // 2):  # 0 <= j < N/2
            total += s_pk(2 * j, 2 * n, 1, p, ctx=ctx)
        rhs = -total % p
        return lhs, rhs


class LerchCheck(Check):
    """N q_p(N) = sum_{j=1}^{N-1} j s_p(j, N)."""

    def __init__(self, n: int):
        if n < 2:
            raise ValueError(f"need N >= 2, got {n}")
        self.n = n
        self.id = f"lerch-{n}"

    def skip_reason(self, p):
        if self.n % p == 0:
            return "p divides N"
        return None

    def evaluate(self, ctx):
        p, n = ctx.p, self.n
        lhs = n * fermat_quotient(n, p) % p
        rhs = sum(j * s_pk(j, n, 1, p, ctx=ctx) for j in range(1, n)) % p
        return lhs, rhs


class ASdiCheck(Check):
    """q_p(2) = -(2N/(N+1)) sum_{0 <= j < N/2} zeta^{[2j]}_{2N}(1)."""

    def __init__(self, n: int):
        if n < 1:
            raise ValueError(f"need N >= 1, got {n}")
        self.n = n
        self.id = f"a-sdi-{n}"
        self._maps = [ColorMap.bracket(2 * n, 1, 2 * j)
                      for j in range((n + 1) // 2)]

    def skip_reason(self, p):
        if (2 * self.n * (self.n + 1)) % p == 0:
            return "p divides 2N(N+1)"
        return None

    def evaluate(self, ctx):
        p, n = ctx.p, self.n
        lhs = fermat_quotient(2, p)
        total = sum(zeta_p_colormap((1,), cmap, p, ctx=ctx)
                    for cmap in self._maps)
        rhs = -2 * n * mod_inv(n + 1, p) % p * total % p
        return lhs, rhs


class LerchLogCheck(Check):
    """q_p(N) = sum_{j=1}^{N-1} j zeta^{[j]}_{N}(1)."""

    def __init__(self, n: int):
        if n < 2:
            raise ValueError(f"need N >= 2, got {n}")
        self.n = n
        self.id = f"lerch-log-{n}"
        self._maps = [ColorMap.bracket(n, 1, j) for j in range(1, n)]

    def skip_reason(self, p):
        if self.n % p == 0:
            return "p divides N"
        return None

    def evaluate(self, ctx):
        p, n = ctx.p, self.n
        lhs = fermat_quotient(n, p)
        rhs = sum(j * zeta_p_colormap((1,), cmap, p, ctx=ctx)
                  for j, cmap in enumerate(self._maps, start=1)) % p
        return lhs, rhs


class LogAdditivityCheck(Check):
    """q_p(NM) = q_p(N) + q_p(M)."""

    def __init__(self, n: int, m: int):
        if n < 1 or m < 1:
            raise ValueError("bases must be >= 1")
        self.n, self.m = n, m
        self.id = f"log-add-{n}-{m}"

    def skip_reason(self, p):
        if (self.n * self.m) % p == 0:
            return "p divides NM"
        return None

    def evaluate(self, ctx):
        p = ctx.p
        lhs = fermat_quotient(self.n * self.m, p)
        rhs = (fermat_quotient(self.n, p) + fermat_quotient(self.m, p)) % p
        return lhs, rhs


def _single_report(check, lo, hi, **kw):
    fp = job_fingerprint({"id": check.id, "lo": lo, "hi": hi})
    kw.setdefault("fingerprint", fp)
    return run_checks([check], lo, hi, **kw)[0]


def verify_eisenstein(lo: int, hi: int, **kw):
    return _single_report(EisensteinCheck(), lo, hi, **kw)


def verify_sdi(n: int, lo: int, hi: int, **kw):
    return _single_report(SdiCheck(n), lo, hi, **kw)


def verify_lerch(n: int, lo: int, hi: int, **kw):
    return _single_report(LerchCheck(n), lo, hi, **kw)


def verify_a_sdi(n: int, lo: int, hi: int, **kw):
    return _single_report(ASdiCheck(n), lo, hi, **kw)


def verify_lerch_log_form(n: int, lo: int, hi: int, **kw):
    return _single_report(LerchLogCheck(n), lo, hi, **kw)


def verify_log_additivity(n: int, m: int, lo: int, hi: int, **kw):
    return _single_report(LogAdditivityCheck(n, m), lo, hi, **kw)
