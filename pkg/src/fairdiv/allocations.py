"""Allocations, cleanness, welfare and Lorenz comparisons."""
from __future__ import annotations

import math
import os
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

from .errors import FairDivError
from .valuations import Profile, from_mask, iter_bits, popcount, to_mask

POOL = -1  # owner code for unallocated items

DEFAULT_MAX_ENUM = 2_000_000


def max_enum(override: int | None = None) -> int:
    """Brute-force bound on ``(n+1)**m``; ``FAIRDIV_MAX_ENUM`` overrides the default."""
    if override is not None:
        return int(override)
    env = os.environ.get("FAIRDIV_MAX_ENUM")
    return int(env) if env else DEFAULT_MAX_ENUM


@dataclass(frozen=True)
class Allocation:
    """Ordered subpartition of ``range(m)`` into ``n`` bundles (bitmasks)."""

    masks: tuple
    m: int

    def __post_init__(self):
        seen = 0
        for x in self.masks:
            if x < 0 or x >> self.m:
                raise FairDivError("bundle contains items outside the ground set")
            if seen & x:
                raise FairDivError("bundles must be pairwise disjoint")
            seen |= x

    @classmethod
    def from_bundles(cls, bundles: Iterable[Iterable[int]], m: int) -> "Allocation":
        return cls(tuple(to_mask(b, m) for b in bundles), m)

    @classmethod
    def empty(cls, n: int, m: int) -> "Allocation":
        return cls((0,) * n, m)

    @classmethod
    def from_owners(cls, owners: Sequence[int], n: int) -> "Allocation":
        masks = [0] * n
        for e, k in enumerate(owners):
            if k != POOL:
                masks[k] |= 1 << e
        return cls(tuple(masks), len(owners))

    @property
    def n(self) -> int:
        return len(self.masks)

    @property
    def bundles(self) -> tuple:
        return tuple(from_mask(x) for x in self.masks)

    @property
    def unallocated_mask(self) -> int:
        used = 0
        for x in self.masks:
            used |= x
        return ((1 << self.m) - 1) & ~used

    @property
    def unallocated(self) -> frozenset:
        return from_mask(self.unallocated_mask)

    @property
    def is_complete(self) -> bool:
        return self.unallocated_mask == 0

    def owners(self) -> list:
        own = [POOL] * self.m
        for k, x in enumerate(self.masks):
            for e in iter_bits(x):
                own[e] = k
        return own

    def sizes(self) -> tuple:
        return tuple(popcount(x) for x in self.masks)

    def with_bundle(self, i: int, mask: int) -> "Allocation":
        masks = list(self.masks)
        masks[i] = mask
        return Allocation(tuple(masks), self.m)

    def __str__(self):
        parts = ["{" + ",".join(str(e) for e in sorted(b)) + "}" for b in self.bundles]
        return "(" + ", ".join(parts) + ")"


def _check_dims(P: Profile, A: Allocation) -> None:
    if P.n != A.n or P.m != A.m:
        raise FairDivError(f"profile is {P.n}x{P.m} but allocation is {A.n}x{A.m}")


def values(P: Profile, A: Allocation) -> tuple:
    _check_dims(P, A)
    return tuple(v.value(x) for v, x in zip(P, A.masks))


def is_clean(P: Profile, A: Allocation) -> bool:
    _check_dims(P, A)
    for v, x in zip(P, A.masks):
        if v.is_matroidal:
            if v.value(x) != popcount(x):
                return False
            continue
        full = v.value(x)
        for e in iter_bits(x):
            if not v.value(x & ~(1 << e)) < full:
                return False
    return True


def clean_up(P: Profile, A: Allocation) -> Allocation:
    """Drop zero-marginal items, highest index first, so low-index items survive."""
    _check_dims(P, A)
    out = []
    for v, x in zip(P, A.masks):
        target = v.value(x)
        for e in sorted(iter_bits(x), reverse=True):
            y = x & ~(1 << e)
            if v.value(y) == target:
                x = y
        out.append(x)
    return Allocation(tuple(out), A.m)


def utilitarian_welfare(P: Profile, A: Allocation):
    return sum(values(P, A))


def size_vector(A: Allocation, with_pool: bool = False) -> tuple:
    s = A.sizes()
    if with_pool:
        return (popcount(A.unallocated_mask),) + s
    return s


def sorted_sizes(A: Allocation) -> tuple:
    return tuple(sorted(A.sizes()))


def chi(n: int, i: int) -> tuple:
    return tuple(1 if k == i else 0 for k in range(n))


def supp_plus(x: Sequence, y: Sequence) -> list:
    return [k for k, (a, b) in enumerate(zip(x, y)) if a > b]


def supp_minus(x: Sequence, y: Sequence) -> list:
    return [k for k, (a, b) in enumerate(zip(x, y)) if a < b]


DOMINATES = "dominates"
DOMINATED = "dominated"
EQUAL = "equal"
INCOMPARABLE = "incomparable"


def lorenz_compare(u: Sequence, w: Sequence) -> str:
    """Relation of ``u`` to ``w`` under (weak) Lorenz dominance.

    >>> lorenz_compare((1, 2, 2), (0, 2, 3))
    'dominates'
    >>> lorenz_compare((0, 3), (1, 1))
    'incomparable'
    """
    if len(u) != len(w):
        raise FairDivError("Lorenz comparison needs vectors of equal length")
    su, sw = sorted(u), sorted(w)
    if su == sw:
        return EQUAL
    ge = le = True
    a = b = Fraction(0)
    for x, y in zip(su, sw):
        a += x
        b += y
        if a < b:
            ge = False
        if a > b:
            le = False
    if ge:
        return DOMINATES
    if le:
        return DOMINATED
    return INCOMPARABLE


def weakly_dominates(u: Sequence, w: Sequence) -> bool:
    return lorenz_compare(u, w) in (DOMINATES, EQUAL)


def is_mnw(P: Profile, A: Allocation, *, bound: int | None = None) -> bool:
    """Brute-force test that ``A`` maximises (#positive agents, product of positive values)."""
    _check_dims(P, A)
    from .audit import enumerate_allocations

    def key(vals):
        pos = [x for x in vals if x > 0]
        return len(pos), math.prod(pos) if pos else 1

    mine = key(values(P, A))
    for B in enumerate_allocations(P, complete_only=False, bound=bound):
        if key(values(P, B)) > mine:
            return False
    return True
