"""Valuation oracles over a ground set of ``m`` items.

Item sets are carried internally as integer bitmasks (bit ``e`` set means item
``e`` is in the set). Public helpers accept any iterable of item indices and
convert with :func:`to_mask`.

Matroidal and binary-additive valuations are integer valued; the other classes
return :class:`fractions.Fraction` so that envy comparisons stay exact.
"""
from __future__ import annotations

import random
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations
from typing import Callable, Iterable, Sequence

import numpy as np

from .errors import FairDivError, NotMatroidal

MATROIDAL = "matroidal"
BINARY_ADDITIVE = "binary_additive"
ADDITIVE = "additive"
SUPERADDITIVE = "superadditive"
GENERAL = "general"
CLASS_TAGS = (MATROIDAL, BINARY_ADDITIVE, ADDITIVE, SUPERADDITIVE, GENERAL)
INTEGER_TAGS = (MATROIDAL, BINARY_ADDITIVE)

# exhaustive axiom checks only up to 2**12 subsets
EXHAUSTIVE_MAX = 12
# rank tables are materialised only up to 2**16 subsets
TABLE_MAX = 16


def to_mask(items: Iterable[int] | int, m: int | None = None) -> int:
    if isinstance(items, (int, np.integer)):
        mask = int(items)
        if mask < 0 or (m is not None and mask >> m):
            raise FairDivError(f"item mask {mask:#x} out of range for m={m}")
        return mask
    mask = 0
    for e in items:
        e = int(e)
        if e < 0 or (m is not None and e >= m):
            raise FairDivError(f"item index {e} out of range for m={m}")
        mask |= 1 << e
    return mask


def from_mask(mask: int) -> frozenset[int]:
    out = []
    e = 0
    while mask:
        if mask & 1:
            out.append(e)
        mask >>= 1
        e += 1
    return frozenset(out)


def popcount(mask: int) -> int:
    return int(mask).bit_count()


def iter_bits(mask: int):
    while mask:
        low = mask & -mask
        yield low.bit_length() - 1
        mask ^= low


# --- evaluators: small picklable callables mask -> value -----------------------


class _Uniform:
    def __init__(self, rank: int, support: int):
        self.rank = rank
        self.support = support

    def __call__(self, mask: int) -> int:
        c = popcount(mask & self.support)
        return c if c < self.rank else self.rank


class _Laminar:
    """Rank of a laminar matroid, evaluated bottom-up over the set tree."""

    def __init__(self, sets: Sequence[int], caps: Sequence[int]):
        order = sorted(range(len(sets)), key=lambda k: (popcount(sets[k]), k))
        self.sets = [sets[k] for k in order]
        self.caps = [caps[k] for k in order]
        self.children: list[list[int]] = [[] for _ in self.sets]
        self.roots = []
        for a, s in enumerate(self.sets):
            parent = None
            for b in range(a + 1, len(self.sets)):
                if s & self.sets[b] == s:
                    parent = b
                    break
            if parent is None:
                self.roots.append(a)
            else:
                self.children[parent].append(a)
        self.cover = [s for s in self.sets]
        for a in range(len(self.sets)):
            u = 0
            for c in self.children[a]:
                u |= self.sets[c]
            self.cover[a] = u

    def __call__(self, mask: int) -> int:
        r = [0] * len(self.sets)
        for a, s in enumerate(self.sets):
            total = popcount(mask & s & ~self.cover[a])
            for c in self.children[a]:
                total += r[c]
            r[a] = total if total < self.caps[a] else self.caps[a]
        top = 0
        covered = 0
        for a in self.roots:
            top += r[a]
            covered |= self.sets[a]
        return top + popcount(mask & ~covered)


class _Transversal:
    """Maximum matching of items in a set to slots (Kuhn's algorithm)."""

    def __init__(self, adjacency: Sequence[Sequence[int]]):
        self.adjacency = [tuple(sorted(a)) for a in adjacency]

    def __call__(self, mask: int) -> int:
        match_slot: dict[int, int] = {}
        size = 0
        for e in iter_bits(mask):
            if self._augment(e, match_slot, set()):
                size += 1
        return size

    def _augment(self, e, match_slot, seen):
        for s in self.adjacency[e]:
            if s in seen:
                continue
            seen.add(s)
            other = match_slot.get(s)
            if other is None or self._augment(other, match_slot, seen):
                match_slot[s] = e
                return True
        return False


class _Table:
    def __init__(self, table: Sequence):
        self.table = list(table)

    def __call__(self, mask: int):
        return self.table[mask]


class _Additive:
    def __init__(self, values: Sequence):
        self.values = tuple(values)

    def __call__(self, mask: int):
        total = Fraction(0)
        for e in iter_bits(mask):
            total += self.values[e]
        return total


class _Binary:
    def __init__(self, desired: int):
        self.desired = desired

    def __call__(self, mask: int) -> int:
        return popcount(mask & self.desired)


class _Restrict:
    def __init__(self, base: "Valuation", keep: int):
        self.base = base
        self.keep = keep

    def __call__(self, mask: int):
        return self.base.value(mask & self.keep)


class _Truncate:
    def __init__(self, base: "Valuation", cap: int):
        self.base = base
        self.cap = cap

    def __call__(self, mask: int):
        v = self.base.value(mask)
        return v if v < self.cap else self.cap


class Valuation:
    """Immutable set-function oracle tagged with its valuation class.

    ``spec`` is an optional JSON-able description of how the valuation was
    built; instance serialisation uses it and falls back to a full table.
    """

    __slots__ = ("m", "class_tag", "_fn", "spec", "_table")

    def __init__(self, m: int, class_tag: str, fn: Callable[[int], object], spec: dict | None = None):
        if class_tag not in CLASS_TAGS:
            raise FairDivError(f"unknown valuation class {class_tag!r}")
        if m < 0:
            raise FairDivError("ground size must be non-negative")
        self.m = m
        self.class_tag = class_tag
        self._fn = fn
        self.spec = spec
        self._table = None

    @property
    def is_matroidal(self) -> bool:
        return self.class_tag in INTEGER_TAGS

    @property
    def full(self) -> int:
        return (1 << self.m) - 1

    def value(self, mask: int):
        """Value of a bitmask, no range checks."""
        t = self._table
        if t is not None:
            return t[mask]
        return self._fn(mask)

    def table(self) -> list:
        """All ``2**m`` values indexed by mask; memoised (idempotent, so races are harmless)."""
        if self._table is None:
            if self.m > TABLE_MAX:
                raise FairDivError(f"refusing to tabulate 2**{self.m} subsets")
            self._table = [self._fn(x) for x in range(1 << self.m)]
        return self._table

    def table_array(self) -> np.ndarray:
        if not self.is_matroidal:
            raise NotMatroidal("integer rank tables exist only for matroidal valuations")
        return np.asarray(self.table(), dtype=np.int64)

    def __call__(self, items) -> object:
        return self.value(to_mask(items, self.m))

    def __repr__(self):
        kind = self.spec.get("kind") if self.spec else "custom"
        return f"Valuation(m={self.m}, class={self.class_tag}, kind={kind})"


@dataclass(frozen=True)
class Profile:
    """Valuations of ``n`` agents over a shared ground set."""

    valuations: tuple

    def __init__(self, valuations: Iterable[Valuation]):
        vals = tuple(valuations)
        if not vals:
            raise FairDivError("a profile needs at least one agent")
        m = vals[0].m
        if any(v.m != m for v in vals):
            raise FairDivError("all valuations must share the ground set")
        object.__setattr__(self, "valuations", vals)

    @property
    def n(self) -> int:
        return len(self.valuations)

    @property
    def m(self) -> int:
        return self.valuations[0].m

    def __getitem__(self, i: int) -> Valuation:
        return self.valuations[i]

    def __iter__(self):
        return iter(self.valuations)

    def __len__(self):
        return len(self.valuations)

    @property
    def is_matroidal(self) -> bool:
        return all(v.is_matroidal for v in self.valuations)

    def require_matroidal(self) -> None:
        if not self.is_matroidal:
            bad = [i for i, v in enumerate(self.valuations) if not v.is_matroidal]
            raise NotMatroidal(f"agents {bad} do not have matroidal valuations")

    def replace(self, i: int, v: Valuation) -> "Profile":
        vals = list(self.valuations)
        vals[i] = v
        return Profile(vals)

    def rank_tables(self) -> np.ndarray:
        """``n x 2**m`` int64 array of values (matroidal profiles only)."""
        self.require_matroidal()
        return np.stack([v.table_array() for v in self.valuations])


# --- operations ---------------------------------------------------------------


def evaluate(v: Valuation, items) -> object:
    return v(items)


def marginal(v: Valuation, items, e: int):
    mask = to_mask(items, v.m)
    if e < 0 or e >= v.m:
        raise FairDivError(f"item index {e} out of range for m={v.m}")
    if mask >> e & 1:
        raise FairDivError(f"item {e} already in the set")
    return v.value(mask | 1 << e) - v.value(mask)


def is_independent(v: Valuation, items) -> bool:
    if not v.is_matroidal:
        raise NotMatroidal("independence is defined for matroidal valuations only")
    mask = to_mask(items, v.m)
    return v.value(mask) == popcount(mask)


def restrict(v: Valuation, items) -> Valuation:
    """``Y -> v(X & Y)``; stays in the class of ``v``."""
    keep = to_mask(items, v.m)
    out = Valuation(v.m, v.class_tag, _Restrict(v, keep))
    if v._table is not None or (v.is_matroidal and v.m <= EXHAUSTIVE_MAX):
        base = np.asarray(v.table(), dtype=object if not v.is_matroidal else np.int64)
        vals = base[np.arange(1 << v.m) & keep]
        out._table = [int(x) for x in vals] if v.is_matroidal else list(vals)
    return out


def truncate(v: Valuation, cap: int) -> Valuation:
    """``X -> min(v(X), cap)``, the rank truncation of a matroid."""
    if not v.is_matroidal:
        raise NotMatroidal("truncation is defined for matroidal valuations only")
    if cap < 0:
        raise FairDivError("cap must be non-negative")
    out = Valuation(v.m, MATROIDAL, _Truncate(v, cap))
    if v._table is not None:
        out._table = [x if x < cap else cap for x in v._table]
    return out


# --- constructors -------------------------------------------------------------


def uniform(m: int, rank: int, items: Iterable[int] | None = None) -> Valuation:
    support = (1 << m) - 1 if items is None else to_mask(items, m)
    if rank < 0:
        raise FairDivError("rank must be non-negative")
    spec = {"kind": "uniform", "rank": rank}
    if items is not None:
        spec["items"] = sorted(from_mask(support))
    return Valuation(m, MATROIDAL, _Uniform(rank, support), spec)


def _check_laminar(masks: Sequence[int]) -> None:
    for a, b in combinations(range(len(masks)), 2):
        x, y = masks[a], masks[b]
        if x & y and (x & y) != x and (x & y) != y:
            raise FairDivError(f"sets {sorted(from_mask(x))} and {sorted(from_mask(y))} cross; family is not laminar")


def laminar(m: int, sets: Sequence[Iterable[int]], caps: Sequence[int]) -> Valuation:
    masks = [to_mask(s, m) for s in sets]
    caps = [int(c) for c in caps]
    if len(masks) != len(caps):
        raise FairDivError("laminar matroid needs one capacity per set")
    if any(c < 0 for c in caps):
        raise FairDivError("capacities must be non-negative")
    _check_laminar(masks)
    spec = {"kind": "laminar", "sets": [sorted(from_mask(x)) for x in masks], "caps": caps}
    return Valuation(m, MATROIDAL, _Laminar(masks, caps), spec)


def partition(m: int, blocks: Sequence[Iterable[int]], caps: Sequence[int]) -> Valuation:
    """Partition matroid; items outside every block are unconstrained."""
    masks = [to_mask(b, m) for b in blocks]
    for a, b in combinations(range(len(masks)), 2):
        if masks[a] & masks[b]:
            raise FairDivError("partition blocks must be disjoint")
    v = laminar(m, [from_mask(x) for x in masks], caps)
    v.spec = {"kind": "partition", "blocks": [sorted(from_mask(x)) for x in masks], "caps": [int(c) for c in caps]}
    return v


def transversal(m: int, slots: Sequence[Iterable[int]]) -> Valuation:
    """Rank = size of a maximum matching of items to slots; ``slots[s]`` lists the items slot ``s`` accepts."""
    adjacency: list[list[int]] = [[] for _ in range(m)]
    slot_lists = []
    for s, items in enumerate(slots):
        items = sorted(set(int(e) for e in items))
        for e in items:
            if e < 0 or e >= m:
                raise FairDivError(f"item index {e} out of range for m={m}")
            adjacency[e].append(s)
        slot_lists.append(items)
    return Valuation(m, MATROIDAL, _Transversal(adjacency), {"kind": "transversal", "slots": slot_lists})


def rank_table(m: int, table: Sequence[int]) -> Valuation:
    """Matroid given by its full rank table, checked against the rank axioms."""
    if len(table) != 1 << m:
        raise FairDivError(f"rank table needs {1 << m} entries, got {len(table)}")
    table = [int(x) for x in table]
    v = Valuation(m, MATROIDAL, _Table(table), {"kind": "rank_table"})
    v._table = table
    if m <= EXHAUSTIVE_MAX:
        report = validate_class(v)
        if not report.valid:
            raise FairDivError(f"rank table violates the matroid axioms: {report.violations[:3]}")
    return v


def binary_additive(m: int, desired: Iterable[int]) -> Valuation:
    d = to_mask(desired, m)
    return Valuation(m, BINARY_ADDITIVE, _Binary(d), {"kind": "binary", "desired": sorted(from_mask(d))})


def additive(m: int, values: Sequence) -> Valuation:
    if len(values) != m:
        raise FairDivError(f"additive valuation needs {m} item values")
    vals = tuple(Fraction(x) for x in values)
    if any(x < 0 for x in vals):
        raise FairDivError("item values must be non-negative")
    return Valuation(m, ADDITIVE, _Additive(vals), {"kind": "additive", "values": list(vals)})


def from_table(m: int, class_tag: str, table: Sequence) -> Valuation:
    """Any class, given the value of every subset (indexed by mask)."""
    if len(table) != 1 << m:
        raise FairDivError(f"value table needs {1 << m} entries, got {len(table)}")
    if class_tag in INTEGER_TAGS:
        vals = [int(x) for x in table]
    else:
        vals = [Fraction(x) for x in table]
    v = Valuation(m, class_tag, _Table(vals), {"kind": "table"})
    v._table = vals
    return v


def from_function(m: int, class_tag: str, fn: Callable[[frozenset], object]) -> Valuation:
    """Tabulate an arbitrary Python set function (``m <= TABLE_MAX``)."""
    table = [fn(from_mask(x)) for x in range(1 << m)]
    return from_table(m, class_tag, table)


# --- class validation ---------------------------------------------------------


@dataclass
class ValidationReport:
    class_tag: str
    status: str  # "valid" | "invalid" | "unverified"
    coverage: str  # "exhaustive" | "sampled(seed=...)"
    violations: list = field(default_factory=list)

    @property
    def valid(self) -> bool:
        return self.status == "valid"


def _masks_for(m: int, exhaustive: bool, rng: random.Random, samples: int):
    if exhaustive:
        return range(1 << m)
    return [rng.getrandbits(m) for _ in range(samples)]


def validate_class(v: Valuation, *, samples: int = 2000, seed: int = 0) -> ValidationReport:
    """Check monotonicity, ``v(M) <= m`` and the axioms of ``v.class_tag``.

    Exhaustive for ``m <= EXHAUSTIVE_MAX``; otherwise random masks are sampled
    and a clean result is reported as ``"unverified"``.
    """
    m = v.m
    exhaustive = m <= EXHAUSTIVE_MAX
    rng = random.Random(seed)
    val = v.table() if (exhaustive or v._table is not None) else None
    f = (lambda x: val[x]) if val is not None else v.value
    bad: list = []
    tag = v.class_tag

    if f(0) != 0:
        bad.append(("empty_nonzero", (), ()))
    if f(v.full) > m:
        bad.append(("exceeds_m", sorted(from_mask(v.full)), ()))

    xs = _masks_for(m, exhaustive, rng, samples)
    for x in xs:
        fx = f(x)
        if tag in INTEGER_TAGS and int(fx) != fx:
            bad.append(("non_integer", sorted(from_mask(x)), ()))
        if fx < 0:
            bad.append(("negative", sorted(from_mask(x)), ()))
        for e in range(m):
            if x >> e & 1:
                continue
            d = f(x | 1 << e) - fx
            if d < 0:
                bad.append(("monotone", sorted(from_mask(x)), e))
            elif tag in INTEGER_TAGS and d > 1:
                bad.append(("unit_marginal", sorted(from_mask(x)), e))
        if tag in INTEGER_TAGS:
            rest = [e for e in range(m) if not x >> e & 1]
            for a, b in combinations(rest, 2):
                xa, xb = x | 1 << a, x | 1 << b
                if f(xa) + f(xb) < f(xa | xb) + fx:
                    bad.append(("submodular", sorted(from_mask(xa)), sorted(from_mask(xb))))
        if tag in (ADDITIVE, BINARY_ADDITIVE):
            s = sum((f(1 << e) for e in iter_bits(x)), Fraction(0))
            if s != fx:
                bad.append(("additive", sorted(from_mask(x)), ()))
            if tag == BINARY_ADDITIVE and x == 0:
                for e in range(m):
                    if f(1 << e) not in (0, 1):
                        bad.append(("binary", [e], ()))
        if tag == SUPERADDITIVE:
            comp = v.full & ~x
            if exhaustive:
                # disjoint pairs: y runs over the submasks of the complement
                ys = []
                y = comp
                while y:
                    if y > x:
                        ys.append(y)
                    y = (y - 1) & comp
            else:
                ys = [rng.getrandbits(m) & comp]
            for y in ys:
                if fx + f(y) > f(x | y):
                    bad.append(("superadditive", sorted(from_mask(x)), sorted(from_mask(y))))

    if bad:
        status = "invalid"
    else:
        status = "valid" if exhaustive else "unverified"
    coverage = "exhaustive" if exhaustive else f"sampled(seed={seed})"
    return ValidationReport(tag, status, coverage, bad)
