"""Per-prime harmonic and multiple-harmonic sums.

Everything here evaluates, for one odd prime p, sums of the shape

    sum over 0 < m_1 < ... < m_r < p  of  1 / (m_1^{k_1} ... m_r^{k_r})   (mod p)

optionally restricted to residue classes mod a level N, or to the window
jp/N < m < (j+1)p/N.  An index is a plain tuple of positive ints; its weight
is the sum of the entries and its depth the length.  The empty tuple () is a
legal index with weight 0, depth 0, and value 1.

A PrimeContext holds the inverse table for 1..p-1 plus lazily-built power and
prefix-sum tables; it is built once per prime and shared by every sum
evaluated at that prime, then dropped.  All public functions accept an
optional ctx and create a throwaway one when none is given.
"""

from __future__ import annotations

from math import gcd

import numpy as np

from .errors import ArityMismatch, LevelSharesFactor
from .primes import inverse_table, mod_inv

#: Color-map entry meaning "the value is 0 at these primes".
BOX = "box"

# Power tables are built by repeated multiplication; exponents in every
# identity handled here are tiny, so cap defensively.
MAX_TABLE_POWER = 64


def index_weight(index) -> int:
    return sum(index)


def index_depth(index) -> int:
    return len(index)


def as_index(parts) -> tuple:
    """Validate and normalize an index to a tuple of positive ints."""
    idx = tuple(int(k) for k in parts)
    if any(k < 1 for k in idx):
        raise ValueError(f"index entries must be positive: {idx}")
    return idx


def units_mod(n: int) -> tuple:
    """The units of Z/nZ as a sorted tuple; (0,) for n = 1."""
    if n == 1:
        return (0,)
    return tuple(a for a in range(n) if gcd(a, n) == 1)


class ColorMap:
    """Total map from the units of Z/NZ to r-tuples of residues mod N, or BOX.

    The entry looked up at a prime p is the one for p mod N; BOX forces the
    value 0 at those primes.  Arity 0 admits only the empty tuple or BOX.
    """

    __slots__ = ("level", "arity", "table", "_key")

    def __init__(self, level: int, arity: int, table: dict):
        if level < 1:
            raise ValueError(f"level must be >= 1, got {level}")
        if arity < 0:
            raise ValueError(f"arity must be >= 0, got {arity}")
        units = units_mod(level)
        norm = {}
        for u in units:
            if u not in table:
                raise ValueError(f"color map is missing the unit {u} mod {level}")
            entry = table[u]
            if entry is BOX or entry == BOX:
                norm[u] = BOX
            else:
                entry = tuple(int(a) % level for a in entry)
                if len(entry) != arity:
                    raise ArityMismatch(
                        f"entry {entry} at unit {u} has length {len(entry)}, "
                        f"expected arity {arity}"
                    )
                norm[u] = entry
        extra = set(table) - set(units)
        if extra:
            raise ValueError(f"color map has non-unit keys {sorted(extra)} mod {level}")
        self.level = level
        self.arity = arity
        self.table = norm
        # canonical flat form, used for ordering, hashing and serialization
        self._key = tuple(
            (u, ((-1,) if norm[u] is BOX else norm[u])) for u in units
        )

    @classmethod
    def bracket(cls, level: int, arity: int, j: int):
        """The map alpha -> (-j*alpha, ..., -j*alpha); requires 0 <= j < level."""
        if not 0 <= j < level:
            raise ValueError(f"bracket j must satisfy 0 <= j < {level}, got {j}")
        table = {
            u: tuple((-j * u) % level for _ in range(arity))
            for u in units_mod(level)
        }
        return cls(level, arity, table)

    @classmethod
    def constant(cls, level: int, arity: int, alpha):
        """The map sending every unit to the same fixed tuple alpha."""
        alpha = tuple(int(a) % level for a in alpha)
        return cls(level, arity, {u: alpha for u in units_mod(level)})

    def at_prime(self, p: int):
        """Entry for the class of p; raises if p divides the level."""
        if self.level > 1 and p % self.level == 0:
            raise LevelSharesFactor(f"prime {p} divides level {self.level}")
        return self.table[p % self.level]

    def reversed(self):
        """Color of the reversed sum: alpha -> (alpha - a_r, ..., alpha - a_1)."""
        table = {}
        for u, entry in self.table.items():
            if entry is BOX:
                table[u] = BOX
            else:
                table[u] = tuple((u - a) % self.level for a in reversed(entry))
        return ColorMap(self.level, self.arity, table)

    def key(self):
        return self._key

    def __eq__(self, other):
        return (
            isinstance(other, ColorMap)
            and self.level == other.level
            and self._key == other._key
        )

    def __hash__(self):
        return hash((self.level, self._key))

    def __repr__(self):
        cells = ", ".join(
            f"{u}->{'box' if e is BOX else e}" for u, e in self.table.items()
        )
        return f"ColorMap(N={self.level}, r={self.arity}, {{{cells}}})"


def window_bounds(j: int, n_level: int, p: int) -> tuple:
    """Integer bounds [lo, hi] of the open interval jp/N < m < (j+1)p/N.

    Since p does not divide N, jp/N is never an integer for 0 < j < N, so
    lo = floor(jp/N)+1 and hi = ceil((j+1)p/N)-1 are forced.
    """
    lo = j * p // n_level + 1
    hi = -((-(j + 1) * p) // n_level) - 1
    return lo, hi


class PrimeContext:
    """Shared per-prime workspace: inverse, power, and prefix-sum tables."""

    __slots__ = ("p", "inv", "_pows", "_cums", "_memo")

    def __init__(self, p: int):
        if p < 3:
            raise ValueError(f"prime context needs p >= 3, got {p}")
        self.p = p
        self.inv = inverse_table(p)
        self._pows = {1: self.inv}
        self._cums = {}
        self._memo = {}

    def inv_pow(self, k: int) -> np.ndarray:
        """Table of m^{-k} mod p, index m (entry 0 unused)."""
        if not 1 <= k <= MAX_TABLE_POWER:
            raise ValueError(f"table power out of range: {k}")
        t = self._pows.get(k)
        if t is None:
            prev = self.inv_pow(k - 1)
            t = np.mod(prev * self.inv, self.p)
            self._pows[k] = t
        return t

    def inv_pow_prefix(self, k: int) -> np.ndarray:
        """C with C[m] = sum_{1<=i<=m} i^{-k} mod p and C[0] = 0."""
        c = self._cums.get(k)
        if c is None:
            c = np.mod(np.cumsum(self.inv_pow(k)), self.p)
            self._cums[k] = c
        return c

    def range_inv_pow_sum(self, lo: int, hi: int, k: int) -> int:
        """Sum of m^{-k} over lo <= m <= hi (clamped to 1..p-1)."""
        lo = max(lo, 1)
        hi = min(hi, self.p - 1)
        if lo > hi:
            return 0
        c = self.inv_pow_prefix(k)
        return int((c[hi] - c[lo - 1]) % self.p)

    # -- nested sums ------------------------------------------------------

    def zeta(self, index: tuple) -> int:
        """zeta_p(index) by prefix-sum sweeps: O(p * depth)."""
        key = ("z", index)
        v = self._memo.get(key)
        if v is None:
            v = self._zeta_sweep(index)
            self._memo[key] = v
        return v

    def zeta_colored(self, index: tuple, level: int, alpha: tuple) -> int:
        """zeta_p with m_i restricted to the class alpha_i mod level."""
        key = ("zc", index, level, alpha)
        v = self._memo.get(key)
        if v is None:
            v = self._colored_sweep(index, level, alpha)
            self._memo[key] = v
        return v

    def interval(self, index: tuple, level: int, j: int) -> int:
        """Nested sum with every m_i inside (jp/level, (j+1)p/level)."""
        key = ("iv", index, level, j)
        v = self._memo.get(key)
        if v is None:
            v = self._interval_sweep(index, level, j)
            self._memo[key] = v
        return v

    def _zeta_sweep(self, index) -> int:
        if not index:
            return 1
        p = self.p
        running = None
        for k in index:
            pk = self.inv_pow(k)
            if running is None:
                layer = pk
            else:
                shifted = np.roll(running, 1)
                shifted[0] = 0
                layer = np.mod(pk * shifted, p)
            running = np.mod(np.cumsum(layer), p)
        return int(running[p - 1])

    def _colored_sweep(self, index, level, alpha) -> int:
        if not index:
            return 1
        p = self.p
        if len(index) == 1:
            a = alpha[0] % level
            start = a if a >= 1 else level
            if start >= p:
                return 0
            return int(self.inv_pow(index[0])[start::level].sum() % p)
        running = None
        for k, a in zip(index, alpha):
            pk = self.inv_pow(k)
            a %= level
            start = a if a >= 1 else level
            idx = np.arange(start, p, level)
            layer = np.zeros(p, dtype=np.int64)
            if idx.size:
                if running is None:
                    layer[idx] = pk[idx]
                else:
                    layer[idx] = np.mod(pk[idx] * running[idx - 1], p)
            running = np.mod(np.cumsum(layer), p)
        return int(running[p - 1])

    def _interval_sweep(self, index, level, j) -> int:
        if not index:
            return 1
        p = self.p
        lo, hi = window_bounds(j, level, p)
        lo = max(lo, 1)
        hi = min(hi, p - 1)
        if lo > hi:
            return 0
        if len(index) == 1:
            return self.range_inv_pow_sum(lo, hi, index[0])
        running = None
        for k in index:
            pk = self.inv_pow(k)[lo : hi + 1]
            if running is None:
                layer = pk
            else:
                shifted = np.roll(running, 1)
                shifted[0] = 0
                layer = np.mod(pk * shifted, p)
            running = np.mod(np.cumsum(layer), p)
        return int(running[-1])


def _require_level_coprime(level: int, p: int):
    if level > 1 and p % level == 0:
        raise LevelSharesFactor(f"prime {p} divides level {level}")


def s_pk(j: int, n_level: int, k: int, p: int, ctx: PrimeContext = None) -> int:
    """Sum of m^{-k} over jp/N < m < (j+1)p/N, mod p; k = 1 is s_p(j, N)."""
    if not 0 <= j < n_level:
        raise ValueError(f"j must satisfy 0 <= j < {n_level}, got {j}")
    _require_level_coprime(n_level, p)
    if ctx is None:
        ctx = PrimeContext(p)
    lo, hi = window_bounds(j, n_level, p)
    return ctx.range_inv_pow_sum(lo, hi, k)


def zeta_p(index, p: int, ctx: PrimeContext = None) -> int:
    """zeta_p(index) mod p; the empty index gives 1."""
    index = as_index(index)
    if ctx is None:
        if not index:
            return 1
        ctx = PrimeContext(p)
    return ctx.zeta(index)


def zeta_p_colored(index, n_level: int, alpha, p: int, ctx: PrimeContext = None) -> int:
    """zeta_p with each m_i restricted to the class alpha_i mod n_level."""
    index = as_index(index)
    alpha = tuple(int(a) % n_level for a in alpha)
    if len(alpha) != len(index):
        raise ArityMismatch(
            f"{len(alpha)} residue classes for an index of depth {len(index)}"
        )
    _require_level_coprime(n_level, p)
    if ctx is None:
        if not index:
            return 1
        ctx = PrimeContext(p)
    return ctx.zeta_colored(index, n_level, alpha)


def zeta_p_colormap(index, cmap: ColorMap, p: int, ctx: PrimeContext = None) -> int:
    """Evaluate the level-N value with color map cmap at the prime p.

    Looks up the entry at the class of p, then evaluates the colored sum;
    a BOX entry gives 0.
    """
    index = as_index(index)
    if len(index) != cmap.arity:
        raise ArityMismatch(
            f"index depth {len(index)} does not match color-map arity {cmap.arity}"
        )
    entry = cmap.at_prime(p)
    if entry is BOX:
        return 0
    return zeta_p_colored(index, cmap.level, entry, p, ctx=ctx)


def interval_sum(index, n_level: int, j: int, p: int, ctx: PrimeContext = None) -> int:
    """Nested sum over jp/N < m_1 < ... < m_r < (j+1)p/N, mod p."""
    index = as_index(index)
    if not 0 <= j < n_level:
        raise ValueError(f"j must satisfy 0 <= j < {n_level}, got {j}")
    _require_level_coprime(n_level, p)
    if ctx is None:
        if not index:
            return 1
        ctx = PrimeContext(p)
    return ctx.interval(index, n_level, j)


# -- brute-force enumerators (test oracles, p <= 50) -----------------------


def zeta_p_brute(index, p: int) -> int:
    """O(p^depth) nested-loop enumeration of zeta_p; the oracle for sweeps."""
    index = as_index(index)
    inv = [0] + [mod_inv(m, p) for m in range(1, p)]

    def rec(pos, start, acc):
        if pos == len(index):
            return acc
        total = 0
        for m in range(start, p):
            total += rec(pos + 1, m + 1, acc * pow(inv[m], index[pos], p) % p)
        return total % p

    return rec(0, 1, 1) if index else 1


def zeta_p_colored_brute(index, n_level: int, alpha, p: int) -> int:
    """Nested-loop enumeration of the colored sum."""
    index = as_index(index)
    alpha = tuple(int(a) % n_level for a in alpha)
    if len(alpha) != len(index):
        raise ArityMismatch("alpha length != index depth")
    _require_level_coprime(n_level, p)
    inv = [0] + [mod_inv(m, p) for m in range(1, p)]

    def rec(pos, start, acc):
        if pos == len(index):
            return acc
        total = 0
        for m in range(start, p):
            if m % n_level == alpha[pos]:
                total += rec(pos + 1, m + 1, acc * pow(inv[m], index[pos], p) % p)
        return total % p

    return rec(0, 1, 1) if index else 1


def interval_sum_brute(index, n_level: int, j: int, p: int) -> int:
    """Nested-loop enumeration of the window-restricted sum."""
    index = as_index(index)
    _require_level_coprime(n_level, p)
    lo, hi = window_bounds(j, n_level, p)
    lo, hi = max(lo, 1), min(hi, p - 1)
    inv = [0] + [mod_inv(m, p) for m in range(1, p)]

    def rec(pos, start, acc):
        if pos == len(index):
            return acc
        total = 0
        for m in range(start, hi + 1):
            total += rec(pos + 1, m + 1, acc * pow(inv[m], index[pos], p) % p)
        return total % p

    return rec(0, lo, 1) if index else 1
