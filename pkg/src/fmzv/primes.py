"""Prime generation and core modular arithmetic.

Residues are plain non-negative ints below their modulus; the modulus is an
explicit argument at every call site (an odd prime p, or p^2 for the
Wieferich-style checks).  Python ints are arbitrary precision, so no word-size
handling is needed; numpy tables use int64, which is safe for products of two
residues whenever p < 3·10^9 (far above the desk-scale ranges handled here).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from math import gcd, isqrt

import numpy as np

from .errors import SharedFactor, ZeroInverse

# Odd numbers per sieve segment; one segment covers ~2^21 integers.
_SEGMENT_ODDS = 1 << 20


@dataclass(frozen=True)
class PrimeRange:
    """A work unit: the primes in [lo, hi], split into spans of `chunk` integers."""

    lo: int
    hi: int
    chunk: int = 4096

    def __post_init__(self):
        if self.lo < 2:
            raise ValueError(f"lo must be >= 2, got {self.lo}")
        if self.hi < self.lo:
            raise ValueError(f"hi must be >= lo, got [{self.lo}, {self.hi}]")
        if self.chunk < 1:
            raise ValueError(f"chunk must be positive, got {self.chunk}")

    def spans(self):
        """Yield consecutive (a, b) subintervals covering [lo, hi]."""
        a = self.lo
        while a <= self.hi:
            b = min(a + self.chunk - 1, self.hi)
            yield (a, b)
            a = b + 1

    def primes(self):
        return sieve_primes(self.lo, self.hi)


def _simple_sieve(limit: int) -> np.ndarray:
    """Dense sieve of Eratosthenes; fine for limit up to ~10^7."""
    if limit < 2:
        return np.empty(0, dtype=np.int64)
    is_prime = np.ones(limit + 1, dtype=bool)
    is_prime[:2] = False
    for q in range(2, isqrt(limit) + 1):
        if is_prime[q]:
            is_prime[q * q :: q] = False
    return np.flatnonzero(is_prime).astype(np.int64)


def sieve_primes(lo: int, hi: int) -> list[int]:
    """All primes in [lo, hi], increasing.

    Segmented and odd-only: memory is O(sqrt(hi) + segment), never O(hi).
    """
    if hi < 2 or hi < lo:
        return []
    lo = max(lo, 2)
    base = _simple_sieve(isqrt(hi))
    out: list[int] = []
    if lo <= 2:
        out.append(2)
    start = max(lo, 3)
    if start % 2 == 0:
        start += 1
    span = 2 * _SEGMENT_ODDS
    for seg_lo in range(start, hi + 1, span):
        seg_hi = min(seg_lo + span - 2, hi)  # seg covers odds seg_lo..seg_hi
        count = (seg_hi - seg_lo) // 2 + 1
        mask = np.ones(count, dtype=bool)
        for q in base[1:]:  # skip 2: only odd numbers are present
            q = int(q)
            if q * q > seg_hi:
                break
            first = max(q * q, ((seg_lo + q - 1) // q) * q)
            if first % 2 == 0:
                first += q
            if first > seg_hi:
                continue
            mask[(first - seg_lo) // 2 :: q] = False
        out.extend((seg_lo + 2 * np.flatnonzero(mask)).tolist())
    return out


def is_prime(n: int) -> bool:
    """Deterministic Miller-Rabin, valid far beyond the ranges used here."""
    if n < 2:
        return False
    for q in (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37):
        if n % q == 0:
            return n == q
    d = n - 1
    s = 0
    while d % 2 == 0:
        d //= 2
        s += 1
    for a in (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37):
        x = pow(a, d, n)
        if x == 1 or x == n - 1:
            continue
        for _ in range(s - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


def pow_mod(a: int, e: int, m: int) -> int:
    """a^e mod m with e >= 0; e = 0 gives 1."""
    if e < 0:
        raise ValueError("exponent must be non-negative")
    return pow(a, e, m)


def mod_inv(a: int, p: int) -> int:
    """Multiplicative inverse of a mod p (p prime)."""
    if a % p == 0:
        raise ZeroInverse(a, p)
    return pow(a, -1, p)


def batch_inv(values, p: int) -> list[int]:
    """Inverses of all values mod p using one inversion total.

    Prefix-product trick: 3(n-1) multiplications plus a single mod_inv.
    """
    n = len(values)
    if n == 0:
        return []
    prefix = [1] * (n + 1)
    for i, v in enumerate(values):
        if v % p == 0:
            raise ZeroInverse(v, p, position=i)
        prefix[i + 1] = prefix[i] * v % p
    run = mod_inv(prefix[n], p)
    out = [0] * n
    for i in range(n - 1, -1, -1):
        out[i] = prefix[i] * run % p
        run = run * values[i] % p
    return out


def pow_mod_p2(n: int, e: int, p: int) -> int:
    """n^e mod p^2; requires gcd(n, p) = 1."""
    if gcd(n, p) != 1:
        raise SharedFactor(f"{n} shares the factor {p} with the modulus {p}^2")
    if e < 0:
        raise ValueError("exponent must be non-negative")
    return pow(n, e, p * p)


def _factorize(n: int) -> list[int]:
    """Distinct prime factors by trial division (n up to ~10^12 is fine)."""
    fs = []
    d = 2
    while d * d <= n:
        if n % d == 0:
            fs.append(d)
            while n % d == 0:
                n //= d
        d += 1 if d == 2 else 2
    if n > 1:
        fs.append(n)
    return fs


def primitive_root(p: int) -> int:
    """Smallest primitive root mod p."""
    if p == 2:
        return 1
    fs = _factorize(p - 1)
    g = 2
    while True:
        if all(pow(g, (p - 1) // q, p) != 1 for q in fs):
            return g
        g += 1


def inverse_table(p: int) -> np.ndarray:
    """int64 array t with t[m] = m^{-1} mod p for 1 <= m < p (t[0] = 0).

    Built from the power table of a primitive root g: the powers
    g^0..g^{p-2} enumerate all units, and (g^k)^{-1} = g^{p-1-k}, so the
    whole table costs O(p) multiplications, all vectorized.
    """
    if p == 2:
        return np.array([0, 1], dtype=np.int64)
    g = primitive_root(p)
    pw = np.empty(p - 1, dtype=np.int64)
    pw[0] = 1
    filled = 1
    mult = g  # invariant: mult = g^filled
    while filled < p - 1:
        take = min(filled, p - 1 - filled)
        np.mod(pw[:take] * mult, p, out=pw[filled : filled + take])
        filled += take
        mult = mult * mult % p
    inv = np.zeros(p, dtype=np.int64)
    inv[pw] = np.roll(pw[::-1], 1)
    return inv


def powmod_array(values: np.ndarray, e: int, p: int) -> np.ndarray:
    """Elementwise values^e mod p (square-and-multiply on int64 arrays)."""
    if e < 0:
        raise ValueError("exponent must be non-negative")
    e %= p - 1  # values are nonzero residues in every caller
    result = np.ones_like(values)
    base = np.mod(values, p)
    while e:
        if e & 1:
            np.mod(result * base, p, out=result)
        e >>= 1
        if e:
            np.mod(base * base, p, out=base)
    return result
