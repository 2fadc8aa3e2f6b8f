"""Bernoulli-Seki numbers mod p, regularity scans, and related congruences.

Conventions: B_n is the coefficient family of t*e^t/(e^t - 1), so B_1 = +1/2;
every quantity computed here involves only even (or vanishing odd >= 3)
indices, where the two classical sign conventions agree.

Three independent methods compute B_n mod p (for p - 1 not dividing n):

  half-sum       B_n = n * S / (2^(1-n) - 2)  with  S = sum_{m<=(p-1)/2} m^(n-1),
                 derived from Faulhaber's formula at the midpoint x = 1/2 and
                 B_n(1/2) = (2^(1-n) - 1) B_n; for n = p - k this is
                 B_{p-k} = (-k / (2^k - 2)) * sum_{m<=(p-1)/2} m^(-k).
                 O(p) per (p, n); degenerates when 2^(1-n) = 2 mod p.
  series         invert (e^t - 1)/t as a power series mod p; yields all
                 B_0..B_{p-3} at once in O(p^2), capped at p <= 3000.
  exact-rational exact Fractions by the binomial recurrence, reduced mod p;
                 the ground-truth oracle for p <= 200.

A power-sum variant (solving the interval congruences on (p/6, p/4) and
(p/4, p/3) for B_n) backs up the half-sum method at its rare degeneracies.
"""

from __future__ import annotations

from fractions import Fraction
from math import comb

import numpy as np

from .errors import (CapExceeded, InvalidWeight, PoleAtVonStaudtClausen,
                     ScanExhausted)
from .harmonic import ColorMap, PrimeContext, zeta_p_colormap
from .primes import mod_inv, powmod_array, sieve_primes
from .runner import Check, job_fingerprint, run_checks

SERIES_CAP = 3000
EXACT_ORACLE_CAP = 200

# ---------------------------------------------------------------------------
# method (c): exact rationals

_B_EVEN = [Fraction(1)]  # B_0, B_2, B_4, ... by half-index


def bernoulli_exact(n: int) -> Fraction:
    """B_n as an exact Fraction (B_1 = +1/2; odd n >= 3 give 0)."""
    if n < 0:
        raise ValueError("n must be >= 0")
    if n == 1:
        return Fraction(1, 2)
    if n % 2 == 1:
        return Fraction(0)
    half = n // 2
    while len(_B_EVEN) <= half:
        m = len(_B_EVEN)
        # binomial recurrence sum_{r=0}^{2m} C(2m+1, r) B_r = 0, with the
        # B_1 = -1/2 convention folded in (even indices are convention-free)
        s = Fraction(2 * m + 1) * Fraction(-1, 2)
        for j in range(m):
            s += comb(2 * m + 1, 2 * j) * _B_EVEN[j]
        _B_EVEN.append(-s / (2 * m + 1))
    return _B_EVEN[half]


def _exact_mod(n: int, p: int) -> int:
    b = bernoulli_exact(n)
    den = b.denominator % p
    if den == 0:
        raise PoleAtVonStaudtClausen(f"B_{n} has {p} in its denominator")
    return b.numerator % p * mod_inv(den, p) % p


# ---------------------------------------------------------------------------
# method (b): power-series inversion mod p

def bernoulli_series_mod_p(p: int, n_max: int = None, cap: int = SERIES_CAP) -> np.ndarray:
    """B_0..B_n_max mod p at once, by inverting (e^t - 1)/t mod p.

    Naive O(n_max^2) convolution; refuse p beyond the cap so a scan cannot
    silently turn quadratic at large p.
    """
    if p > cap:
        raise CapExceeded(f"series method capped at p <= {cap}, got {p}")
    if n_max is None:
        n_max = p - 3
    if n_max > p - 2:
        raise ValueError(f"series method supports n <= p-2, got {n_max}")
    fact = np.ones(n_max + 2, dtype=np.int64)
    for i in range(1, n_max + 2):
        fact[i] = fact[i - 1] * i % p
    inv_fact = np.ones(n_max + 2, dtype=np.int64)
    inv_fact[n_max + 1] = mod_inv(int(fact[n_max + 1]), p)
    for i in range(n_max + 1, 0, -1):
        inv_fact[i - 1] = inv_fact[i] * i % p
    # a[i] = 1/(i+1)! are the coefficients of (e^t - 1)/t
    a = inv_fact[1 : n_max + 2].copy()
    c = np.zeros(n_max + 1, dtype=np.int64)
    c[0] = 1
    for n in range(1, n_max + 1):
        # c[n] = -sum_{i=1..n} a[i] c[n-i]; values < p so the dot fits int64
        s = int(np.dot(a[1 : n + 1], c[n - 1 :: -1])) % p
        c[n] = (p - s) % p
    return c * fact[: n_max + 1] % p


# ---------------------------------------------------------------------------
# method (a): half-range power sum

def _half_sum(n: int, p: int, ctx: PrimeContext = None) -> int:
    """sum_{m=1}^{(p-1)/2} m^(n-1) mod p."""
    half = (p - 1) // 2
    k = p - n
    if ctx is not None and 1 <= k <= 32:
        return ctx.range_inv_pow_sum(1, half, k)
    m = np.arange(1, half + 1, dtype=np.int64)
    return int(powmod_array(m, (n - 1) % (p - 1), p).sum() % p)


def _half_sum_bernoulli(n: int, p: int, ctx: PrimeContext = None) -> int:
    den = (pow(2, (1 - n) % (p - 1), p) - 2) % p
    if den == 0:
        raise ZeroDivisionError  # caught by dispatch; means ord_p(2) | n
    s = _half_sum(n, p, ctx)
    return n % p * s % p * mod_inv(den, p) % p


# ---------------------------------------------------------------------------
# backup: solve an interval power-sum congruence for B_n

def _sixth_quarter_bounds(p: int, variant: int):
    # variant 0: p/6 < m < p/4;  variant 1: p/4 < m < p/3
    if variant == 0:
        return p // 6 + 1, -((-p) // 4) - 1
    return p // 4 + 1, -((-p) // 3) - 1


def _power_sum_window(lo: int, hi: int, e: int, p: int) -> int:
    if lo > hi:
        return 0
    m = np.arange(lo, hi + 1, dtype=np.int64)
    return int(powmod_array(m, e % (p - 1), p).sum() % p)


def _power_sum_multiplier(n: int, p: int, variant: int) -> int:
    e = (p - n) % (p - 1)
    if variant == 0:
        return (pow(3, e, p) + pow(4, e, p) - pow(6, e, p) - 1) % p
    return (pow(2, e, p) + pow(3, e, p) - pow(4, e, p) - 1) % p


def _power_sum_bernoulli(n: int, p: int, variant: int) -> int:
    """B_n from  mult/(2n) * B_n = sum over the interval of m^(n-1)."""
    mult = _power_sum_multiplier(n, p, variant)
    if mult == 0 or (2 * n) % p == 0:
        raise ZeroDivisionError
    lo, hi = _sixth_quarter_bounds(p, variant)
    rhs = _power_sum_window(lo, hi, n - 1, p)
    return rhs * (2 * n) % p * mod_inv(mult, p) % p


# ---------------------------------------------------------------------------
# dispatch

def bernoulli_mod_p(n: int, p: int, method: str = "auto",
                    ctx: PrimeContext = None, series_cap: int = SERIES_CAP) -> int:
    """B_n mod p for an index with p-1 not dividing n.

    Methods: "half-sum" (O(p)), "series" (all of B_0..B_{p-3}, O(p^2),
    capped), "exact" (rational oracle), "auto" (exact for small p, else
    half-sum with fallbacks at its degeneracies).
    """
    if n < 2:
        raise ValueError(f"need n >= 2, got {n}")
    if p < 5:
        raise ValueError(f"need p >= 5, got {p}")
    if n % (p - 1) == 0:
        raise PoleAtVonStaudtClausen(f"p-1 = {p - 1} divides n = {n}")
    if n % 2 == 1:
        return 0
    if method == "exact":
        return _exact_mod(n, p)
    if n > p - 2 and method != "auto":
        raise ValueError(f"method {method!r} needs n <= p-2, got n={n}, p={p}")
    if method == "series":
        return int(bernoulli_series_mod_p(p, n, cap=series_cap)[n])
    if method == "half-sum":
        return _half_sum_bernoulli(n, p, ctx)
    if method != "auto":
        raise ValueError(f"unknown method {method!r}")
    if p <= EXACT_ORACLE_CAP or n > p - 2:
        return _exact_mod(n, p)
    try:
        return _half_sum_bernoulli(n, p, ctx)
    except ZeroDivisionError:
        pass
    for variant in (0, 1):
        try:
            return _power_sum_bernoulli(n, p, variant)
        except ZeroDivisionError:
            continue
    return int(bernoulli_series_mod_p(p, n, cap=series_cap)[n])


def finite_zeta(k: int, p: int, ctx: PrimeContext = None, method: str = "auto") -> int:
    """B_{p-k}/k mod p, the finite analogue of the zeta value at k.

    Zero for even k (B at an odd index >= 3); requires 2 <= k <= p-2.
    """
    if k < 2:
        raise ValueError(f"need k >= 2, got {k}")
    if k > p - 2:
        raise ValueError(f"need k <= p-2, got k={k}, p={p}")
    if k % 2 == 0:
        return 0
    b = bernoulli_mod_p(p - k, p, method=method, ctx=ctx)
    return b * mod_inv(k, p) % p


# ---------------------------------------------------------------------------
# regularity scans

def irregular_pairs(p: int, series_cap: int = SERIES_CAP) -> list:
    """Even n with 2 <= n <= p-3 and p | B_n, each confirmed by a second method."""
    if p < 5:
        return []
    table = bernoulli_series_mod_p(p, p - 3, cap=series_cap)
    pairs = []
    for n in range(2, p - 2, 2):
        if table[n] == 0:
            if _confirm_divisibility(n, p) != 0:
                raise ArithmeticError(
                    f"methods disagree on p | B_n at (p, n) = ({p}, {n})"
                )
            pairs.append(n)
    return pairs


def _confirm_divisibility(n: int, p: int) -> int:
    """B_n mod p by a method other than the series, for cross-checking."""
    if p <= EXACT_ORACLE_CAP:
        return _exact_mod(n, p)
    try:
        return _half_sum_bernoulli(n, p)
    except ZeroDivisionError:
        pass
    for variant in (0, 1):
        try:
            return _power_sum_bernoulli(n, p, variant)
        except ZeroDivisionError:
            continue
    raise ArithmeticError(f"no independent method applies at (p, n) = ({p}, {n})")


def irregularity_index(p: int, series_cap: int = SERIES_CAP) -> int:
    """i(p): the number of even n <= p-3 with p | B_n."""
    return len(irregular_pairs(p, series_cap=series_cap))


def is_regular(p: int, series_cap: int = SERIES_CAP) -> bool:
    """Kummer's criterion: p >= 5 divides none of B_2, B_4, ..., B_{p-3}."""
    if p < 5:
        raise ValueError(f"regularity is defined for p >= 5, got {p}")
    return not irregular_pairs(p, series_cap=series_cap)


def eth_p(p: int, ctx: PrimeContext = None, series_cap: int = SERIES_CAP) -> int:
    """Least odd k >= 3 with B_{p-k} not divisible by p."""
    if p < 5:
        raise ValueError(f"need p >= 5, got {p}")
    if ctx is None:
        ctx = PrimeContext(p)
    for k in range(3, p - 1, 2):
        if bernoulli_mod_p(p - k, p, method="auto", ctx=ctx,
                           series_cap=series_cap) != 0:
            return k
    raise ScanExhausted(
        f"p = {p} divides B_{{p-k}} for every odd k < p-1; "
        "this contradicts the known bounds and deserves a very close look"
    )


def check_eth_bound(p: int, series_cap: int = SERIES_CAP) -> bool:
    """Both bounds on the least nonvanishing offset: 2*i(p)+3 and the p/2 one."""
    if p < 11:
        raise ValueError(f"the mod-4 bound needs p >= 11, got {p}")
    eth = eth_p(p, series_cap=series_cap)
    idx = irregularity_index(p, series_cap=series_cap)
    mod4_bound = (p - 3) // 2 if p % 4 == 1 else (p - 5) // 2
    return eth <= 2 * idx + 3 and eth <= mod4_bound


def half_index_scan(lo: int, hi: int, series_cap: int = SERIES_CAP) -> list:
    """Rows (p, p mod 4, vanishes) for B at the half index.

    For p = 3 mod 4 the index is (p+1)/2 and a vanish would contradict a
    classical congruence; for p = 1 mod 4 the index is (p-1)/2 and the row
    is purely observational.
    """
    rows = []
    for p in sieve_primes(max(lo, 5), hi):
        n = (p + 1) // 2 if p % 4 == 3 else (p - 1) // 2
        b = bernoulli_mod_p(n, p, method="auto", series_cap=series_cap)
        rows.append((p, p % 4, b == 0))
    return rows


def nonzero_witness_weight(k: int, bound: int):
    """Smallest prime p <= bound at which weight k provably carries a
    nonzero value: finite_zeta(k) != 0 for odd k, or
    finite_zeta(3) * finite_zeta(k-3) != 0 for even k >= 6.

    Returns the witness prime, or None if the scan exhausts the bound.
    """
    if k in (1, 2, 4):
        raise InvalidWeight(f"every value of weight {k} is zero")
    if k < 1:
        raise ValueError(f"need k >= 1, got {k}")
    parts = (k,) if k % 2 == 1 else (3, k - 3)
    # a witness must sit outside the skip set of the depth-2 congruence
    # for each part, i.e. p > part + 2
    start = max(5, max(parts) + 3)
    for p in sieve_primes(start, bound):
        ctx = PrimeContext(p)
        if all(finite_zeta(ki, p, ctx=ctx) != 0 for ki in parts):
            return p
    return None


# ---------------------------------------------------------------------------
# congruence checks

class VhzCheck(Check):
    """zeta_p(k1, k2) = (-1)^k2 * C(k1+k2, k1) * finite_zeta(k1+k2)."""

    def __init__(self, k1: int, k2: int):
        if k1 < 1 or k2 < 1:
            raise ValueError("k1, k2 must be >= 1")
        self.k1, self.k2 = k1, k2
        self.weight = k1 + k2
        self.id = f"vhz-{k1}-{k2}"

    def skip_reason(self, p):
        if p <= self.weight + 2:
            return f"p <= {self.weight + 2} (weight + 2)"
        return None

    def evaluate(self, ctx):
        p = ctx.p
        lhs = ctx.zeta((self.k1, self.k2))
        sign = -1 if self.k2 % 2 else 1
        rhs = sign * comb(self.weight, self.k1) * finite_zeta(self.weight, p, ctx=ctx) % p
        return lhs, rhs


_LEVEL12_COEFFS = {2: (2, 3, 4, 12), 3: (3, 4, 6, 12)}


class Level12Check(Check):
    """2 * zeta^{[j]}_{12}(k) against its Bernoulli closed form, j in {2, 3}."""

    def __init__(self, k: int):
        if k < 3 or k % 2 == 0:
            raise ValueError(f"need odd k >= 3, got {k}")
        self.k = k
        self.id = f"level12-{k}"
        self._maps = {j: ColorMap.bracket(12, 1, j) for j in (2, 3)}

    def skip_reason(self, p):
        if p in (2, 3):
            return "p divides 12"
        if p <= self.k + 2:
            return f"p <= {self.k + 2} (k + 2)"
        return None

    def evaluate(self, ctx):
        p, k = ctx.p, self.k
        z = finite_zeta(k, p, ctx=ctx)
        outcome = (0, 0)
        for j in (2, 3):
            a, b, c, d = _LEVEL12_COEFFS[j]
            lhs = 2 * zeta_p_colormap((k,), self._maps[j], p, ctx=ctx) % p
            rhs = (pow(a, -k, p) - pow(b, -k, p) - pow(c, -k, p) + pow(d, -k, p)) * z % p
            if lhs != rhs:
                return lhs, rhs
            outcome = (lhs, rhs)
        return outcome


class VandiverPowerSumCheck(Check):
    """The two interval power-sum congruences behind the level-12 formulas:

      (3^{p-2n}+4^{p-2n}-6^{p-2n}-1)/(4n) B_{2n} = sum_{p/6<m<p/4} m^{2n-1}
      (2^{p-2n}+3^{p-2n}-4^{p-2n}-1)/(4n) B_{2n} = sum_{p/4<m<p/3} m^{2n-1}
    """

    def __init__(self, n: int):
        if n < 1:
            raise ValueError(f"need n >= 1, got {n}")
        self.n = n
        self.id = f"vandiver-{n}"

    def skip_reason(self, p):
        if p < 5:
            return "p < 5"
        if (2 * self.n) % (p - 1) == 0:
            return "p-1 divides 2n"
        if (4 * self.n) % p == 0:
            return "p divides 4n"
        return None

    def evaluate(self, ctx):
        p, n = ctx.p, self.n
        b = _exact_mod(2 * n, p)
        inv4n = mod_inv(4 * n, p)
        outcome = (0, 0)
        for variant in (0, 1):
            mult = _power_sum_multiplier(2 * n, p, variant)
            lhs = mult * inv4n % p * b % p
            lo, hi = _sixth_quarter_bounds(p, variant)
            rhs = _power_sum_window(lo, hi, 2 * n - 1, p)
            if lhs != rhs:
                return lhs, rhs
            outcome = (lhs, rhs)
        return outcome


def _single_report(check, lo, hi, **kw):
    fp = job_fingerprint({"id": check.id, "lo": lo, "hi": hi})
    kw.setdefault("fingerprint", fp)
    return run_checks([check], lo, hi, **kw)[0]


def verify_vhz(k1: int, k2: int, lo: int, hi: int, **kw):
    return _single_report(VhzCheck(k1, k2), lo, hi, **kw)


def verify_level12(k: int, lo: int, hi: int, **kw):
    return _single_report(Level12Check(k), lo, hi, **kw)


def verify_vandiver_power_sums(n: int, lo: int, hi: int, **kw):
    return _single_report(VandiverPowerSumCheck(n), lo, hi, **kw)
