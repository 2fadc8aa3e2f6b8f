"""Symbolic algebra on colored indices, and the numeric per-prime verifier.

A ColoredTerm is an exact-rational multiple of one colored value; a FormalSum
is a canonically ordered, merged list of such terms at a common level.
Products of colored values (needed by the splitting and level-decomposition
transforms) are handled by ProductSum, whose terms carry a tuple of
(index, color) factors; a FormalSum is the one-factor special case.

Identities are verified prime by prime: each side is evaluated as a residue
mod p through the harmonic-sum engine, with skips for p dividing the level,
p <= weight + 2, and p dividing a coefficient denominator.
"""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass
from fractions import Fraction
from math import lcm

from .errors import LevelMismatch
from .harmonic import (BOX, ColorMap, as_index, index_weight, units_mod,
                       zeta_p_colormap)
from .runner import Check, job_fingerprint, run_checks

TRIVIAL_COLOR_CACHE = {}


def trivial_color(arity: int) -> ColorMap:
    """The level-1 color map: no restriction at all (plain zeta values)."""
    cmap = TRIVIAL_COLOR_CACHE.get(arity)
    if cmap is None:
        cmap = ColorMap.bracket(1, arity, 0)
        TRIVIAL_COLOR_CACHE[arity] = cmap
    return cmap


@dataclass(frozen=True)
class ColoredTerm:
    coefficient: Fraction
    index: tuple
    color: ColorMap

    def __post_init__(self):
        object.__setattr__(self, "coefficient", Fraction(self.coefficient))
        object.__setattr__(self, "index", as_index(self.index))
        if self.color.arity != len(self.index):
            raise ValueError(
                f"color arity {self.color.arity} != index depth {len(self.index)}"
            )

    def sort_key(self):
        return (self.index, self.color.key())


def plain_term(coefficient, index) -> ColoredTerm:
    """A level-1 term: coefficient * zeta(index)."""
    index = as_index(index)
    return ColoredTerm(Fraction(coefficient), index, trivial_color(len(index)))


class FormalSum:
    """Canonically merged sum of colored terms sharing one level."""

    __slots__ = ("level", "terms")

    def __init__(self, terms, level: int = None):
        terms = list(terms)
        for t in terms:
            if level is None:
                level = t.color.level
            elif t.color.level != level:
                raise LevelMismatch(
                    f"terms at levels {level} and {t.color.level} in one sum"
                )
        self.level = 1 if level is None else level
        merged = {}
        for t in terms:
            key = t.sort_key()
            merged[key] = merged.get(key, Fraction(0)) + t.coefficient
        self.terms = tuple(
            ColoredTerm(coeff, key[0], _color_by_key(self.level, key))
            for key, coeff in sorted(merged.items())
            if coeff != 0
        )

    def __eq__(self, other):
        return (isinstance(other, FormalSum)
                and self.level == other.level
                and self.terms == other.terms)

    def __hash__(self):
        return hash((self.level, self.terms))

    def __add__(self, other):
        if self.level != other.level:
            raise LevelMismatch(f"levels {self.level} and {other.level}")
        return FormalSum(self.terms + other.terms, level=self.level)

    def scaled(self, c):
        c = Fraction(c)
        return FormalSum(
            [ColoredTerm(t.coefficient * c, t.index, t.color) for t in self.terms],
            level=self.level,
        )

    def __mul__(self, other):
        return stuffle_sums(self, other)

    def __repr__(self):
        body = " + ".join(
            f"{t.coefficient}*z{t.index}^{t.color.key()}" for t in self.terms
        ) or "0"
        return f"FormalSum(N={self.level}, {body})"

    def to_products(self):
        return ProductSum(
            [ProductTerm(t.coefficient, ((t.index, t.color),)) for t in self.terms]
        )


def _color_by_key(level, sort_key):
    _, color_key = sort_key
    table = {u: (BOX if entry == (-1,) else entry) for u, entry in color_key}
    arity = len(sort_key[0])
    return ColorMap(level, arity, table)


@dataclass(frozen=True)
class ProductTerm:
    coefficient: Fraction
    factors: tuple  # of (index, ColorMap); identity factors are dropped

    def __post_init__(self):
        object.__setattr__(self, "coefficient", Fraction(self.coefficient))
        norm = [(as_index(idx), cmap) for idx, cmap in self.factors]
        # an empty-index factor is the constant 1 unless its color can BOX out
        kept = tuple(
            (idx, cmap) for idx, cmap in norm
            if idx or any(e is BOX for e in cmap.table.values())
        )
        object.__setattr__(
            self, "factors", tuple(sorted(kept, key=lambda f: (f[0], f[1].key())))
        )

    def weight(self):
        return sum(index_weight(idx) for idx, _ in self.factors)

    def sort_key(self):
        return tuple((idx, cmap.key(), cmap.level) for idx, cmap in self.factors)


class ProductSum:
    """Sum of exact-rational multiples of products of colored values."""

    __slots__ = ("terms",)

    def __init__(self, terms):
        merged = {}
        keyed = {}
        for t in terms:
            key = t.sort_key()
            merged[key] = merged.get(key, Fraction(0)) + t.coefficient
            keyed[key] = t.factors
        self.terms = tuple(
            ProductTerm(coeff, keyed[key])
            for key, coeff in sorted(merged.items())
            if coeff != 0
        )

    def __eq__(self, other):
        return isinstance(other, ProductSum) and self.terms == other.terms

    def level_lcm(self):
        levels = [cmap.level for t in self.terms for _, cmap in t.factors]
        return lcm(*levels) if levels else 1

    def max_weight(self):
        return max((t.weight() for t in self.terms), default=0)

    def denominators(self):
        return sorted({t.coefficient.denominator for t in self.terms})

    def evaluate(self, ctx) -> int:
        p = ctx.p
        total = 0
        for t in self.terms:
            den = t.coefficient.denominator % p
            num = t.coefficient.numerator % p
            acc = num * pow(den, -1, p) % p
            for idx, cmap in t.factors:
                if acc == 0:
                    break
                acc = acc * zeta_p_colormap(idx, cmap, p, ctx=ctx) % p
            total += acc
        return total % p

    def __repr__(self):
        return f"ProductSum({len(self.terms)} terms)"


def as_products(side) -> ProductSum:
    if isinstance(side, ProductSum):
        return side
    if isinstance(side, FormalSum):
        return side.to_products()
    if isinstance(side, ColoredTerm):
        return FormalSum([side]).to_products()
    raise TypeError(f"cannot interpret {type(side).__name__} as a sum of products")


# ---------------------------------------------------------------------------
# stuffle product

def _merge_patterns(r1: int, r2: int):
    """All interleave-or-merge words for depths (r1, r2).

    Each pattern is a tuple of slots ('a', i), ('b', j) or ('ab', i, j),
    consuming both inputs left to right.  The pattern count is the Delannoy
    number D(r1, r2).
    """
    if r1 == 0:
        return [tuple(("b", j) for j in range(r2))]
    if r2 == 0:
        return [tuple(("a", i) for i in range(r1))]
    out = []
    for pat in _merge_patterns(r1 - 1, r2):
        out.append(pat + (("a", r1 - 1),))
    for pat in _merge_patterns(r1, r2 - 1):
        out.append(pat + (("b", r2 - 1),))
    for pat in _merge_patterns(r1 - 1, r2 - 1):
        out.append(pat + (("ab", r1 - 1, r2 - 1),))
    return out


def _pattern_index(pattern, ka, kb):
    out = []
    for slot in pattern:
        if slot[0] == "a":
            out.append(ka[slot[1]])
        elif slot[0] == "b":
            out.append(kb[slot[1]])
        else:
            out.append(ka[slot[1]] + kb[slot[2]])
    return tuple(out)


def _pattern_color(pattern, ca: ColorMap, cb: ColorMap) -> ColorMap:
    """Interleave two colors along the pattern.

    At each unit: BOX in either input forces BOX; a merged slot demands
    equal residues from the two inputs, else the entry becomes BOX.
    """
    level = ca.level
    table = {}
    for u in units_mod(level):
        ea, eb = ca.table[u], cb.table[u]
        if ea is BOX or eb is BOX:
            table[u] = BOX
            continue
        entry = []
        for slot in pattern:
            if slot[0] == "a":
                entry.append(ea[slot[1]])
            elif slot[0] == "b":
                entry.append(eb[slot[1]])
            else:
                if ea[slot[1]] != eb[slot[2]]:
                    entry = None
                    break
                entry.append(ea[slot[1]])
        table[u] = BOX if entry is None else tuple(entry)
    return ColorMap(level, len(pattern), table)


def stuffle_product(a: ColoredTerm, b: ColoredTerm) -> FormalSum:
    """Harmonic product of two colored terms at a common level."""
    if a.color.level != b.color.level:
        raise LevelMismatch(
            f"levels {a.color.level} and {b.color.level} cannot be multiplied"
        )
    coeff = a.coefficient * b.coefficient
    terms = []
    for pattern in _merge_patterns(len(a.index), len(b.index)):
        idx = _pattern_index(pattern, a.index, b.index)
        cmap = _pattern_color(pattern, a.color, b.color)
        terms.append(ColoredTerm(coeff, idx, cmap))
    return FormalSum(terms, level=a.color.level)


def stuffle_sums(a: FormalSum, b: FormalSum) -> FormalSum:
    """Bilinear extension of the stuffle product to formal sums."""
    if a.level != b.level:
        raise LevelMismatch(f"levels {a.level} and {b.level}")
    total = FormalSum([], level=a.level)
    for ta in a.terms:
        for tb in b.terms:
            total = total + stuffle_product(ta, tb)
    return total


# ---------------------------------------------------------------------------
# transforms

def reverse_transform(t: ColoredTerm) -> ColoredTerm:
    """Reversal: index reversed, color alpha -> (alpha - a_r, ...),
    coefficient multiplied by (-1)^weight."""
    sign = -1 if index_weight(t.index) % 2 else 1
    return ColoredTerm(t.coefficient * sign, tuple(reversed(t.index)),
                       t.color.reversed())


def decompose_level_N(index, n_level: int) -> ProductSum:
    """zeta(index) as N^k times a sum over cut points of products of
    bracket-colored values at level N.

    Cuts 0 <= i_1 <= ... <= i_{N-1} <= r split the index into N consecutive
    (possibly empty) blocks; block j gets the bracket color [j].
    """
    index = as_index(index)
    if n_level < 1:
        raise ValueError(f"need level >= 1, got {n_level}")
    r = len(index)
    k = index_weight(index)
    coeff = Fraction(n_level) ** k
    terms = []
    for cuts in itertools.combinations_with_replacement(range(r + 1), n_level - 1):
        bounds = (0,) + cuts + (r,)
        factors = []
        for j in range(n_level):
            block = index[bounds[j]: bounds[j + 1]]
            factors.append((block, ColorMap.bracket(n_level, len(block), j)))
        terms.append(ProductTerm(coeff, tuple(factors)))
    return ProductSum(terms)


def kmy_level2_split(index) -> ProductSum:
    """zeta(index) as the signed sum over split points i of
    zeta^{(2)}(k_1..k_i) * zeta^{(2)}(k_r..k_{i+1}), where zeta^{(2)} of a
    block is 2^{block weight} times its [0]-bracket value at level 2."""
    index = as_index(index)
    r = len(index)
    k = index_weight(index)
    terms = []
    for i in range(r + 1):
        head = index[:i]
        tail = tuple(reversed(index[i:]))
        tail_weight = index_weight(tail)
        sign = -1 if tail_weight % 2 else 1
        coeff = Fraction(sign * 2 ** k)
        factors = (
            (head, ColorMap.bracket(2, len(head), 0)),
            (tail, ColorMap.bracket(2, len(tail), 0)),
        )
        terms.append(ProductTerm(coeff, factors))
    return ProductSum(terms)


def lift_level_terms(index, alpha, n_level: int, m_level: int) -> FormalSum:
    """The class constraints alpha mod N, rewritten at a multiple level M:
    the sum over all lifts alpha_i + j_i N of constant-colored terms."""
    index = as_index(index)
    if m_level % n_level != 0:
        raise LevelMismatch(f"{n_level} does not divide {m_level}")
    alpha = tuple(int(a) % n_level for a in alpha)
    if len(alpha) != len(index):
        raise ValueError("alpha length != index depth")
    ratio = m_level // n_level
    terms = []
    for js in itertools.product(range(ratio), repeat=len(index)):
        lifted = tuple(a + j * n_level for a, j in zip(alpha, js))
        terms.append(ColoredTerm(
            Fraction(1), index, ColorMap.constant(m_level, len(index), lifted)
        ))
    return FormalSum(terms, level=m_level)


# ---------------------------------------------------------------------------
# the universal verifier

class FormalIdentityCheck(Check):
    """Per-prime equality of two sums of products of colored values."""

    def __init__(self, identity_id: str, lhs, rhs):
        self.id = identity_id
        self.lhs = as_products(lhs)
        self.rhs = as_products(rhs)
        self.level = lcm(self.lhs.level_lcm(), self.rhs.level_lcm())
        self.weight = max(self.lhs.max_weight(), self.rhs.max_weight())
        self.denominators = sorted(
            set(self.lhs.denominators()) | set(self.rhs.denominators())
        )

    def skip_reason(self, p):
        if self.level % p == 0:
            return f"p divides level {self.level}"
        if p <= self.weight + 2:
            return f"p <= {self.weight + 2} (weight + 2)"
        for d in self.denominators:
            if d % p == 0:
                return "coefficient denominator divisible by p"
        return None

    def evaluate(self, ctx):
        return self.lhs.evaluate(ctx), self.rhs.evaluate(ctx)


class JsumCheck(Check):
    """Window sum over (jp/N, (j+1)p/N) against N^weight times the bracket value."""

    def __init__(self, index, n_level: int, j: int):
        self.index = as_index(index)
        if not 0 <= j < n_level:
            raise ValueError(f"need 0 <= j < {n_level}, got {j}")
        self.n_level = n_level
        self.j = j
        self.weight = index_weight(self.index)
        self.cmap = ColorMap.bracket(n_level, len(self.index), j)
        idx_str = ".".join(map(str, self.index)) or "empty"
        self.id = f"jsum-N{n_level}-j{j}-{idx_str}"

    def skip_reason(self, p):
        if self.n_level % p == 0:
            return f"p divides level {self.n_level}"
        if p <= self.weight + 2:
            return f"p <= {self.weight + 2} (weight + 2)"
        return None

    def evaluate(self, ctx):
        p = ctx.p
        lhs = ctx.interval(self.index, self.n_level, self.j)
        rhs = pow(self.n_level, self.weight, p) * zeta_p_colormap(
            self.index, self.cmap, p, ctx=ctx) % p
        return lhs, rhs


def _single_report(check, lo, hi, **kw):
    fp = job_fingerprint({"id": check.id, "lo": lo, "hi": hi})
    kw.setdefault("fingerprint", fp)
    return run_checks([check], lo, hi, **kw)[0]


def verify_formal_identity(lhs, rhs, lo: int, hi: int,
                           identity_id: str = "formal-identity", **kw):
    return _single_report(FormalIdentityCheck(identity_id, lhs, rhs), lo, hi, **kw)


def verify_lemma_jsum(index, n_level: int, j: int, lo: int, hi: int, **kw):
    return _single_report(JsumCheck(index, n_level, j), lo, hi, **kw)


# -- derived identity checks ------------------------------------------------

def _color_tag(cmap: ColorMap) -> str:
    for j in range(cmap.level):
        if cmap == ColorMap.bracket(cmap.level, cmap.arity, j):
            return f"j{j}"
    return "t" + format(abs(hash(cmap.key())) % 16**6, "06x")


def reversal_check(index, cmap: ColorMap) -> FormalIdentityCheck:
    index = as_index(index)
    term = ColoredTerm(Fraction(1), index, cmap)
    rev = reverse_transform(term)
    idx_str = ".".join(map(str, index)) or "empty"
    ident = f"reversal-N{cmap.level}-{_color_tag(cmap)}-{idx_str}"
    return FormalIdentityCheck(ident, FormalSum([term]), FormalSum([rev]))


def decompose_check(index, n_level: int) -> FormalIdentityCheck:
    index = as_index(index)
    lhs = FormalSum([plain_term(1, index)])
    rhs = decompose_level_N(index, n_level)
    idx_str = ".".join(map(str, index)) or "empty"
    return FormalIdentityCheck(f"decompose-N{n_level}-{idx_str}", lhs, rhs)


def kmy_check(index) -> FormalIdentityCheck:
    index = as_index(index)
    lhs = FormalSum([plain_term(1, index)])
    rhs = kmy_level2_split(index)
    idx_str = ".".join(map(str, index)) or "empty"
    return FormalIdentityCheck(f"kmy-split-{idx_str}", lhs, rhs)


def levels_lift_check(index, alpha, n_level: int, m_level: int) -> FormalIdentityCheck:
    index = as_index(index)
    lhs = FormalSum(
        [ColoredTerm(Fraction(1), index,
                     ColorMap.constant(n_level, len(index), alpha))]
    )
    rhs = lift_level_terms(index, alpha, n_level, m_level)
    idx_str = ".".join(map(str, index)) or "empty"
    a_str = ".".join(str(a % n_level) for a in alpha) or "empty"
    ident = f"levels-N{n_level}-M{m_level}-a{a_str}-{idx_str}"
    return FormalIdentityCheck(ident, lhs, rhs)


def stuffle_check(a: ColoredTerm, b: ColoredTerm) -> FormalIdentityCheck:
    """Numeric-homomorphism instance: the product of two values equals the
    evaluation of their stuffle expansion."""
    lhs = ProductSum([ProductTerm(
        a.coefficient * b.coefficient,
        ((a.index, a.color), (b.index, b.color)),
    )])
    rhs = stuffle_product(a, b)
    ia = ".".join(map(str, a.index)) or "empty"
    ib = ".".join(map(str, b.index)) or "empty"
    return FormalIdentityCheck(f"stuffle-N{a.color.level}-{ia}-x-{ib}", lhs, rhs)


# ---------------------------------------------------------------------------
# identity catalogue (JSON, schema_version 1)

CATALOGUE_SCHEMA_VERSION = 1


def _color_to_doc(cmap: ColorMap, bracket_hint=None):
    if bracket_hint is not None:
        return f"bracket:{bracket_hint}"
    # detect bracket maps so the compact form round-trips
    for j in range(cmap.level):
        if cmap == ColorMap.bracket(cmap.level, cmap.arity, j):
            return f"bracket:{j}"
    return {
        "table": {
            str(u): ("box" if e is BOX else list(e)) for u, e in cmap.table.items()
        }
    }


def _color_from_doc(doc, level, arity) -> ColorMap:
    if isinstance(doc, str):
        kind, _, arg = doc.partition(":")
        if kind != "bracket":
            raise ValueError(f"unknown color form {doc!r}")
        return ColorMap.bracket(level, arity, int(arg))
    table = {}
    for u, entry in doc["table"].items():
        table[int(u)] = BOX if entry == "box" else tuple(entry)
    return ColorMap(level, arity, table)


def _factor_to_doc(idx, cmap):
    return {
        "index": ",".join(map(str, idx)),
        "level": cmap.level,
        "color": _color_to_doc(cmap),
    }


def _factor_from_doc(doc):
    raw = doc["index"].strip()
    idx = as_index(int(x) for x in raw.split(",")) if raw else ()
    level = int(doc["level"])
    return idx, _color_from_doc(doc["color"], level, len(idx))


def _side_to_doc(side: ProductSum):
    return [
        {
            "coefficient": str(t.coefficient),
            "factors": [_factor_to_doc(idx, cmap) for idx, cmap in t.factors],
        }
        for t in side.terms
    ]


def _side_from_doc(docs) -> ProductSum:
    terms = []
    for d in docs:
        coeff = Fraction(d["coefficient"])
        factors = tuple(_factor_from_doc(f) for f in d["factors"])
        terms.append(ProductTerm(coeff, factors))
    return ProductSum(terms)


def save_catalogue(identities: dict, path: str):
    """identities: id -> (lhs, rhs), each a FormalSum or ProductSum."""
    doc = {
        "schema_version": CATALOGUE_SCHEMA_VERSION,
        "identities": [
            {
                "id": ident,
                "lhs": _side_to_doc(as_products(lhs)),
                "rhs": _side_to_doc(as_products(rhs)),
            }
            for ident, (lhs, rhs) in sorted(identities.items())
        ],
    }
    with open(path, "w") as fh:
        json.dump(doc, fh, indent=2)
        fh.write("\n")


def load_catalogue(path: str) -> dict:
    with open(path) as fh:
        doc = json.load(fh)
    if doc.get("schema_version") != CATALOGUE_SCHEMA_VERSION:
        raise ValueError(
            f"unsupported catalogue schema {doc.get('schema_version')!r}"
        )
    out = {}
    for rec in doc["identities"]:
        out[rec["id"]] = (_side_from_doc(rec["lhs"]), _side_from_doc(rec["rhs"]))
    return out


def builtin_catalogue() -> dict:
    """Identities shipped with the package, keyed by id."""
    zero = ProductSum([])
    example = FormalSum([
        plain_term(2, (1, 2, 3)),
        plain_term(1, (1, 2, 1, 2)),
        plain_term(1, (1, 2, 2, 1)),
        plain_term(1, (1, 1, 1, 3)),
    ])
    stuffle_11_lhs = ProductSum([
        ProductTerm(Fraction(1), (((1,), trivial_color(1)),
                                  ((1,), trivial_color(1))))
    ])
    stuffle_11_rhs = FormalSum([plain_term(2, (1, 1)), plain_term(1, (2,))])
    rev_12 = reverse_transform(plain_term(1, (1, 2)))
    return {
        "example-relation": (example, zero),
        "stuffle-1-1": (stuffle_11_lhs, stuffle_11_rhs),
        "reversal-1-2": (FormalSum([plain_term(1, (1, 2))]), FormalSum([rev_12])),
    }


def catalogue_check(identity_id: str, catalogue: dict = None) -> FormalIdentityCheck:
    cat = builtin_catalogue() if catalogue is None else catalogue
    if identity_id not in cat:
        raise KeyError(f"unknown identity {identity_id!r}; "
                       f"known: {sorted(cat)}")
    lhs, rhs = cat[identity_id]
    return FormalIdentityCheck(identity_id, lhs, rhs)
