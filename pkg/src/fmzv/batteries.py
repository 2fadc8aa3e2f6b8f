"""Standard check batteries: every identity family at its scan scale.

Grouping many checks into one run_checks call lets all of them share the
per-prime tables, which is where the time goes on large ranges.
"""

from __future__ import annotations

from .bernoulli import Level12Check, VhzCheck
from .harmonic import ColorMap
from .quotients import (ASdiCheck, EisensteinCheck, LerchCheck, LerchLogCheck,
                        SdiCheck)
from .relations import (catalogue_check, decompose_check, kmy_check,
                        levels_lift_check, reversal_check)


def compositions(total: int):
    """All tuples of positive ints summing to total, in lexicographic order."""
    if total == 0:
        return [()]
    out = []
    for first in range(1, total + 1):
        for rest in compositions(total - first):
            out.append((first,) + rest)
    return out


def indices_up_to_weight(w_max: int, include_empty: bool = False):
    out = [()] if include_empty else []
    for w in range(1, w_max + 1):
        out.extend(compositions(w))
    return out


def quotient_battery():
    """Eisenstein, SDI N=1..10, Lerch N=2..10, A-SDI N=1..5, Lerch-log N=2..6."""
    checks = [EisensteinCheck()]
    checks += [SdiCheck(n) for n in range(1, 11)]
    checks += [LerchCheck(n) for n in range(2, 11)]
    checks += [ASdiCheck(n) for n in range(1, 6)]
    checks += [LerchLogCheck(n) for n in range(2, 7)]
    return checks


def vhz_battery(k_max: int = 6):
    return [VhzCheck(k1, k2)
            for k1 in range(1, k_max + 1) for k2 in range(1, k_max + 1)]


def level12_battery(ks=(3, 5, 7)):
    return [Level12Check(k) for k in ks]


def jsum_battery(weight_max: int = 4, levels=(2, 3, 4, 6)):
    from .relations import JsumCheck
    checks = []
    for index in indices_up_to_weight(weight_max, include_empty=True):
        for n in levels:
            for j in range(n):
                checks.append(JsumCheck(index, n, j))
    return checks


def relation_battery(weight_max: int = 5):
    """Reversal (levels 1..3, all brackets), level decompositions (N = 2, 3),
    the level-2 split, level-lift instances (2 -> 4), and the weight-6
    four-term relation."""
    checks = []
    indices = indices_up_to_weight(weight_max)
    for index in indices:
        r = len(index)
        checks.append(reversal_check(index, ColorMap.bracket(1, r, 0)))
        for n in (2, 3):
            for j in range(n):
                checks.append(reversal_check(index, ColorMap.bracket(n, r, j)))
        for n in (2, 3):
            checks.append(decompose_check(index, n))
        checks.append(kmy_check(index))
        checks.append(levels_lift_check(index, (0,) * r, 2, 4))
        checks.append(levels_lift_check(index, (1,) * r, 2, 4))
    checks.append(catalogue_check("example-relation"))
    return checks
