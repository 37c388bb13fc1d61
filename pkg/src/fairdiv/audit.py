"""Brute-force oracles and property auditors for small instances.

Everything here enumerates: allocations, matroids, misreports. The enumeration
bound defaults to ``DEFAULT_MAX_ENUM`` rows and can be raised with
``FAIRDIV_MAX_ENUM``. A check that cannot run exhaustively reports
``skipped-too-large``; a sampled check says so in ``coverage``.
"""
from __future__ import annotations

import logging
import random
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from itertools import combinations, permutations, product

import numpy as np

from ._kernels import assignment_tables
from .allocations import Allocation, max_enum, values
from .envy import build_envy_graph, has_positive_cycle, is_envy_free, max_path_weights
from .errors import FairDivError, InstanceTooLarge, NotEnvyFreeable
from .exchange import lorenz_dominating
from .instance import format_number, valuation_to_dict
from .mechanisms import Outcome, _outcome, sec_algorithm, se_mechanism
from .valuations import (
    EXHAUSTIVE_MAX,
    Profile,
    Valuation,
    additive,
    from_mask,
    iter_bits,
    laminar,
    partition,
    popcount,
    rank_table,
    restrict,
    transversal,
    uniform,
)

logger = logging.getLogger(__name__)

HOLDS = "holds"
VIOLATED = "violated"
SKIPPED = "skipped-too-large"
EXHAUSTIVE = "exhaustive"


def _jsonable(x):
    if isinstance(x, (Fraction, int)) and not isinstance(x, bool):
        return format_number(x)
    if isinstance(x, np.integer):
        return int(x)
    if isinstance(x, Allocation):
        return str(x)
    if isinstance(x, dict):
        return {str(k): _jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    return x


@dataclass(frozen=True)
class AuditReport:
    property: str
    instance: str
    verdict: str
    witness: object = None
    coverage: str = EXHAUSTIVE
    checked: int = 0

    @property
    def ok(self) -> bool:
        return self.verdict != VIOLATED

    def to_dict(self) -> dict:
        d = {"property": self.property, "instance": self.instance, "verdict": self.verdict, "coverage": self.coverage, "checked": self.checked}
        if self.witness is not None:
            d["witness"] = _jsonable(self.witness)
        return d

    def __str__(self) -> str:
        s = f"{self.property}: {self.verdict} ({self.coverage}, {self.checked} checked)"
        if self.witness is not None:
            s += f" witness={_jsonable(self.witness)}"
        return s


def _report(prop, inst, witness, checked=0, coverage=EXHAUSTIVE) -> AuditReport:
    return AuditReport(prop, inst, HOLDS if witness is None else VIOLATED, witness, coverage, checked)


def describe(P: Profile) -> str:
    tags = sorted({v.class_tag for v in P})
    return f"n={P.n} m={P.m} {'/'.join(tags)}"


# --- allocation enumeration ------------------------------------------------------


def enumerate_allocations(P: Profile, complete_only: bool = False, bound: int | None = None):
    """Yield every (complete) allocation once, item 0's owner varying slowest."""
    n, m = P.n, P.m
    owners_range = range(n) if complete_only else range(-1, n)
    count = len(owners_range) ** m
    if count > max_enum(bound):
        raise InstanceTooLarge(f"{count} allocations exceed the enumeration bound {max_enum(bound)}")
    for owners in product(owners_range, repeat=m):
        yield Allocation.from_owners(owners, n)


class BruteForce:
    """Exhaustive tables over all ``(n+1)**m`` allocations of a matroidal profile."""

    def __init__(self, P: Profile, bound: int | None = None):
        P.require_matroidal()
        n, m = P.n, P.m
        total = (n + 1) ** m
        if total > max_enum(bound):
            raise InstanceTooLarge(f"{total} allocations exceed the enumeration bound {max_enum(bound)}")
        self.P = P
        vals, sizes = assignment_tables(P.rank_tables(), m, pool=True)
        self.max_welfare = int(vals.sum(axis=1, dtype=np.int64).max()) if len(vals) else 0
        clean = (vals == sizes).all(axis=1)
        self.codes = np.flatnonzero(clean)
        self.sizes = sizes[self.codes].astype(np.int64)
        srt = np.sort(self.sizes, axis=1)
        pref = np.cumsum(srt, axis=1)
        self.ld_prefix = pref.max(axis=0)
        ld = (pref == self.ld_prefix[None, :]).all(axis=1)
        if not ld.any():
            raise AssertionError("no clean allocation Lorenz dominates all others")
        self.cld_codes = self.codes[ld]
        self.cld_sizes = self.sizes[ld]
        self.ld_sorted = tuple(int(x) for x in srt[ld][0])
        self.cld_masks = self._masks(self.cld_codes)

    def _masks(self, codes) -> np.ndarray:
        n, m = self.P.n, self.P.m
        base = n + 1
        powers = base ** np.arange(m, dtype=np.int64)
        digits = (codes[:, None] // powers[None, :]) % base - 1
        weights = np.int64(1) << np.arange(m, dtype=np.int64)
        return np.stack([(digits == k).astype(np.int64) @ weights for k in range(n)], axis=1).reshape(len(codes), n)

    def cld(self) -> list:
        out = [Allocation(tuple(int(x) for x in row), self.P.m) for row in self.cld_masks]
        return sorted(out, key=lambda A: A.masks)

    def cld_set(self) -> set:
        return {tuple(int(x) for x in row) for row in self.cld_masks}

    def S1(self) -> set:
        pool = self.P.m - self.sizes.sum(axis=1)
        return {(int(p),) + tuple(int(x) for x in row) for p, row in zip(pool, self.sizes)}

    def S2(self) -> set:
        opt = self.sizes[self.sizes.sum(axis=1) == self.max_welfare]
        return {tuple(int(x) for x in row) for row in opt}

    def S_star(self) -> set:
        return {tuple(int(x) for x in row) for row in self.cld_sizes}

    def min_sizes(self) -> tuple:
        return tuple(int(x) for x in self.cld_sizes.min(axis=0))

    def max_sizes(self) -> tuple:
        return tuple(int(x) for x in self.cld_sizes.max(axis=0))


def brute_cLD(P: Profile, bound: int | None = None) -> list:
    """All clean Lorenz dominating allocations, sorted by bundle masks."""
    return BruteForce(P, bound).cld()


# --- fairness without money ------------------------------------------------------


def _envy_pairs(P: Profile, A: Allocation):
    for i, v in enumerate(P):
        own = v.value(A.masks[i])
        for j in range(P.n):
            if j != i and v.value(A.masks[j]) > own:
                yield i, j, own


def check_ef(P: Profile, A: Allocation, instance: str = "") -> AuditReport:
    for i, j, _ in _envy_pairs(P, A):
        return _report("EF", instance, {"allocation": A, "envious": i, "envied": j})
    return _report("EF", instance, None, P.n * P.n)


def check_efx(P: Profile, A: Allocation, instance: str = "") -> AuditReport:
    for i, j, own in _envy_pairs(P, A):
        for e in iter_bits(A.masks[j]):
            if P[i].value(A.masks[j] & ~(1 << e)) > own:
                return _report("EFX", instance, {"allocation": A, "envious": i, "envied": j, "removed": e})
    return _report("EFX", instance, None, P.n * P.n)


def check_ef1(P: Profile, A: Allocation, instance: str = "") -> AuditReport:
    for i, j, own in _envy_pairs(P, A):
        if not any(P[i].value(A.masks[j] & ~(1 << e)) <= own for e in iter_bits(A.masks[j])):
            return _report("EF1", instance, {"allocation": A, "envious": i, "envied": j})
    return _report("EF1", instance, None, P.n * P.n)


def check_star_condition(P: Profile, A: Allocation, instance: str = "") -> AuditReport:
    """Every positive envy arc ``(i, j)`` has ``v_i(A_j) = |A_j| = v_i(A_i) + 1``."""
    P.require_matroidal()
    for i, j, own in _envy_pairs(P, A):
        other = P[i].value(A.masks[j])
        size = popcount(A.masks[j])
        if not (other == size == own + 1):
            return _report("star-condition", instance, {"allocation": A, "arc": [i, j], "values": [own, other, size]})
    return _report("star-condition", instance, None, P.n * P.n)


# --- exchange structure ----------------------------------------------------------


def _bexc_witness(S: set, plus: bool):
    """First pair violating (B-EXC) (or its one-sided form when ``plus``)."""
    for x in sorted(S):
        for y in sorted(S):
            if x == y:
                continue
            d = [a - b for a, b in zip(x, y)]
            minus = [j for j, t in enumerate(d) if t < 0]
            for i in (k for k, t in enumerate(d) if t > 0):
                ok = False
                for j in minus:
                    y2 = list(y)
                    y2[i] += 1
                    y2[j] -= 1
                    if tuple(y2) not in S:
                        continue
                    if not plus:
                        x2 = list(x)
                        x2[i] -= 1
                        x2[j] += 1
                        if tuple(x2) not in S:
                            continue
                    ok = True
                    break
                if not ok:
                    return {"x": x, "y": y, "i": i}
    return None


def _matroidal_witness(S: set):
    for x, y in combinations(sorted(S), 2):
        if any(abs(a - b) > 1 for a, b in zip(x, y)):
            return {"x": x, "y": y}
    return None


def check_exchange_axioms(P: Profile, instance: str = "", bound: int | None = None) -> list:
    """(B-EXC+) on S1 and S2, (B-EXC) and the +-1 property on the cLD size vectors."""
    try:
        bf = BruteForce(P, bound)
    except InstanceTooLarge:
        return [AuditReport("exchange-axioms", instance, SKIPPED)]
    S1, S2, Ss = bf.S1(), bf.S2(), bf.S_star()
    return [
        _report("S1 B-EXC+", instance, _bexc_witness(S1, True), len(S1)),
        _report("S2 B-EXC+", instance, _bexc_witness(S2, True), len(S2)),
        _report("S* B-EXC", instance, _bexc_witness(Ss, False), len(Ss)),
        _report("S* matroidal", instance, _matroidal_witness(Ss), len(Ss)),
    ]


# --- matroid enumeration ---------------------------------------------------------


@lru_cache(maxsize=None)
def all_matroids(m: int) -> tuple:
    """Every rank function on ``m`` labelled items, as tuples indexed by mask.

    Built subset by subset in order of size: ``r(X)`` must lie within one of
    every ``r(X - e)`` and satisfy local submodularity against every pair.
    """
    if m > 5:
        raise InstanceTooLarge("matroid enumeration is limited to m <= 5")
    order = sorted(range(1, 1 << m), key=lambda x: (popcount(x), x))
    r = [0] * (1 << m)
    out = []

    def go(t):
        if t == len(order):
            out.append(tuple(r))
            return
        x = order[t]
        subs = [x & ~(1 << e) for e in iter_bits(x)]
        lo = max(r[s] for s in subs)
        hi = min(r[s] for s in subs) + 1
        bits = list(iter_bits(x))
        for a, b in combinations(bits, 2):
            hi = min(hi, r[x & ~(1 << a)] + r[x & ~(1 << b)] - r[x & ~(1 << a) & ~(1 << b)])
        for val in range(lo, hi + 1):
            r[x] = val
            go(t + 1)
        r[x] = 0

    go(0)
    return tuple(out)


def all_matroids_naive(m: int) -> tuple:
    """Cross-check: filter all integer tables by the textbook rank axioms (tiny m only)."""
    if m > 3:
        raise InstanceTooLarge("naive matroid enumeration is limited to m <= 3")
    full = 1 << m
    ranges = [range(popcount(x) + 1) for x in range(full)]
    out = []
    for r in product(*ranges):
        if r[0] != 0:
            continue
        ok = all(r[x] <= r[y] for x in range(full) for y in range(full) if x & y == x)
        ok = ok and all(r[x] + r[y] >= r[x | y] + r[x & y] for x in range(full) for y in range(full))
        if ok:
            out.append(tuple(r))
    return tuple(sorted(out))


def matroid_valuations(m: int) -> list:
    return [rank_table(m, t) for t in all_matroids(m)]


# --- random instances ------------------------------------------------------------

MATROID_KINDS = ("uniform", "partition", "laminar", "transversal")


def _random_subset(m, rng, p=0.5):
    return [e for e in range(m) if rng.random() < p]


def _random_laminar_sets(m, rng):
    sets = []

    def split(items, depth):
        if len(items) < 2 or depth > 2:
            return
        rng.shuffle(items)
        cuts = sorted(rng.sample(range(1, len(items)), min(len(items) - 1, rng.randint(1, 2))))
        parts = [items[a:b] for a, b in zip([0] + cuts, cuts + [len(items)])]
        for part in parts:
            if len(part) >= 1 and rng.random() < 0.7:
                sets.append(sorted(part))
                split(list(part), depth + 1)

    root = _random_subset(m, rng, 0.8)
    if root and rng.random() < 0.6:
        sets.append(sorted(root))
    split(list(root), 0)
    uniq = []
    for s in sets:
        if s not in uniq:
            uniq.append(s)
    return uniq


def random_matroid(m: int, rng: random.Random, kind: str | None = None) -> Valuation:
    kind = kind or rng.choice(MATROID_KINDS)
    if kind == "uniform":
        support = _random_subset(m, rng, 0.75)
        return uniform(m, rng.randint(0, len(support)), support)
    if kind == "partition":
        nb = rng.randint(1, max(1, m // 2 + 1))
        blocks = [[] for _ in range(nb)]
        for e in range(m):
            b = rng.randrange(nb + 1)
            if b < nb:
                blocks[b].append(e)
        blocks = [b for b in blocks if b]
        return partition(m, blocks, [rng.randint(0, len(b)) for b in blocks])
    if kind == "laminar":
        sets = _random_laminar_sets(m, rng)
        return laminar(m, sets, [rng.randint(0, len(s)) for s in sets])
    if kind == "transversal":
        slots = [_random_subset(m, rng, 0.4) for _ in range(rng.randint(1, max(1, m)))]
        return transversal(m, slots)
    raise ValueError(f"unknown matroid kind {kind!r}")


def random_matroidal_profile(n: int, m: int, rng: random.Random) -> Profile:
    return Profile([random_matroid(m, rng) for _ in range(n)])


ADDITIVE_GRID = (Fraction(0), Fraction(1, 4), Fraction(1, 2), Fraction(3, 4), Fraction(1))


def random_additive_profile(n: int, m: int, rng: random.Random, grid=ADDITIVE_GRID) -> Profile:
    """Item values drawn from ``grid`` (a subset of [0, 1]), so ``v_i(M) <= m``."""
    return Profile([additive(m, [rng.choice(grid) for _ in range(m)]) for _ in range(n)])


def random_general_profile(n: int, m: int, rng: random.Random, top: int = 4) -> Profile:
    """Monotone valuations from random integer tables closed under taking maxima."""
    from .valuations import GENERAL, from_table

    vals = []
    for _ in range(n):
        t = [Fraction(0)] * (1 << m)
        for x in range(1, 1 << m):
            best = max(t[x & ~(1 << e)] for e in iter_bits(x))
            t[x] = best + rng.randint(0, top) * Fraction(1, 2)
        vals.append(from_table(m, GENERAL, t))
    return Profile(vals)


# --- deviation audits ------------------------------------------------------------


def utility_of(P: Profile, out: Outcome, i: int):
    """Agent ``i``'s utility for ``out`` under the valuation in ``P``."""
    return P[i].value(out.allocation.masks[i]) + out.subsidies[i]


def _misreport_desc(w: Valuation):
    items = [f"e{e + 1}" for e in range(w.m)]
    try:
        return valuation_to_dict(w, items)
    except Exception:  # pragma: no cover - descriptive only
        return repr(w.spec)


def _family(P: Profile, family, i: int):
    if family == "matroids":
        if P.m > 4:
            raise InstanceTooLarge("full matroid misreports are limited to m <= 4")
        return matroid_valuations(P.m)
    if family == "restrictions":
        if P.m > EXHAUSTIVE_MAX:
            raise InstanceTooLarge(f"restriction misreports are limited to m <= {EXHAUSTIVE_MAX}")
        return [restrict(P[i], from_mask(x)) for x in range(1 << P.m)]
    if callable(family):
        return list(family(P, i))
    if isinstance(family, dict):
        return list(family.get(i, ()))
    return list(family)


def _deviation_chunk(mechanism, P: Profile, i: int, misreports: list, u_true):
    best = None
    for w in misreports:
        out = mechanism(P.replace(i, w))
        u = utility_of(P, out, i)
        if u > u_true and (best is None or u - u_true > best[0]):
            best = (u - u_true, w, out)
    if best is None:
        return None
    gain, w, out = best
    return {
        "agent": i,
        "profit": gain,
        "truthful_utility": u_true,
        "deviation_utility": u_true + gain,
        "misreport": _misreport_desc(w),
        "allocation": out.allocation,
        "subsidies": list(out.subsidies),
    }


def deviation_audit(mechanism, P: Profile, family="restrictions", *, agents=None, jobs: int = 1,
                    instance: str = "", coverage: str = EXHAUSTIVE, name: str = "truthfulness") -> AuditReport:
    """Search ``family`` for a report that raises some agent's true utility.

    ``family`` is ``"matroids"`` (every matroid on the items, ``m <= 4``),
    ``"restrictions"`` (every ``v_i|X``), a callable ``(P, i) -> valuations``,
    a dict ``agent -> valuations`` or a plain list shared by all agents. The
    witness reports the most profitable lie for the first agent that has one.
    """
    agents = list(range(P.n)) if agents is None else list(agents)
    truth = mechanism(P)
    tasks = []
    try:
        for i in agents:
            tasks.append((i, _family(P, family, i)))
    except InstanceTooLarge:
        return AuditReport(name, instance or describe(P), SKIPPED)
    checked = sum(len(fam) for _, fam in tasks)
    if jobs > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            futs = [pool.submit(_deviation_chunk, mechanism, P, i, fam, utility_of(P, truth, i)) for i, fam in tasks]
            results = [f.result() for f in futs]
    else:
        results = [_deviation_chunk(mechanism, P, i, fam, utility_of(P, truth, i)) for i, fam in tasks]
    witness = next((r for r in results if r is not None), None)
    return _report(name, instance or describe(P), witness, checked, coverage)


def additive_grid_family(m: int, grid=ADDITIVE_GRID, limit: int = 256, seed: int = 0):
    """Additive misreports with item values in ``grid``.

    Returns ``(valuations, coverage)``: the full grid when it has at most
    ``limit`` points, otherwise ``limit`` points drawn with ``seed``.
    """
    total = len(grid) ** m
    if total <= limit:
        return [additive(m, list(t)) for t in product(grid, repeat=m)], EXHAUSTIVE
    rng = random.Random(seed)
    pts = [[rng.choice(grid) for _ in range(m)] for _ in range(limit)]
    return [additive(m, t) for t in pts], f"sampled(seed={seed})"


# --- strawman mechanisms ---------------------------------------------------------


def naive_ld_mechanism(P: Profile) -> Outcome:
    """Canonical clean Lorenz dominating allocation plus the minimal envy-eliminating subsidy."""
    A = lorenz_dominating(P).allocation
    return _outcome(P, A, max_path_weights(build_envy_graph(P, A)), "naive-ld", [])


def complete_ld_mechanism(P: Profile) -> Outcome:
    """The completed allocation of :func:`sec_algorithm` plus the minimal envy-eliminating subsidy."""
    A = sec_algorithm(P).allocation
    return _outcome(P, A, max_path_weights(build_envy_graph(P, A)), "complete-ld", [])


# --- envy-graph characterisation oracles -------------------------------------------


def freeable_by_permutation(P: Profile, A: Allocation) -> bool:
    """No reassignment of the bundles among the agents raises total value."""
    base = sum(values(P, A), Fraction(0))
    for perm in permutations(range(P.n)):
        if sum((P[i].value(A.masks[perm[i]]) for i in range(P.n)), Fraction(0)) > base:
            return False
    return True


def least_subsidy_by_relaxation(P: Profile, A: Allocation, q):
    """Least subsidy vector with entries at most ``q`` that makes ``A`` envy-free, or ``None``.

    Iterates ``p_i <- max(0, max_j v_i(A_j) - v_i(A_i) + p_j)`` from zero. Each
    iterate is below every feasible vector, so exceeding ``q`` proves
    infeasibility and a fixed point is the least solution.
    """
    n = P.n
    G = build_envy_graph(P, A)
    p = [Fraction(0)] * n
    while True:
        new = [max([Fraction(0)] + [G.w(i, j) + p[j] for j in range(n) if j != i]) for i in range(n)]
        if any(x > q for x in new):
            return None
        if new == p:
            return p
        p = new


def simple_path_weights(P: Profile, A: Allocation) -> tuple:
    """Max weight over simple paths from each agent, by depth-first search (trivial path = 0)."""
    G = build_envy_graph(P, A)
    n = P.n
    best = [Fraction(0)] * n

    def dfs(start, node, seen, acc):
        if acc > best[start]:
            best[start] = acc
        for j in range(n):
            if not seen >> j & 1:
                dfs(start, j, seen | 1 << j, acc + G.w(node, j))

    for i in range(n):
        dfs(i, i, 1 << i, Fraction(0))
    return tuple(best)


def check_envy_characterisation(P: Profile, A: Allocation, grid, instance: str = ""):
    """Compare graph criteria with first-principles answers; returns a witness or ``None``."""
    G = build_envy_graph(P, A)
    cyc = has_positive_cycle(G)
    perm = freeable_by_permutation(P, A)
    if cyc == perm:
        return {"allocation": A, "reason": "positive cycle vs permutation test", "cycle": cyc}
    if cyc:
        for q in grid:
            if least_subsidy_by_relaxation(P, A, q) is not None:
                return {"allocation": A, "reason": "positive cycle yet subsidizable", "q": q}
        return None
    w = max_path_weights(G)
    if min(w) < 0:
        return {"allocation": A, "reason": "negative path weight"}
    if tuple(Fraction(x) for x in w) != simple_path_weights(P, A):
        return {"allocation": A, "reason": "walks vs simple paths", "paths": w}
    if not is_envy_free(P, A, w):
        return {"allocation": A, "reason": "path subsidy leaves envy", "paths": w}
    for q in grid:
        by_graph = max(w) <= q
        least = least_subsidy_by_relaxation(P, A, q)
        if by_graph != (least is not None):
            return {"allocation": A, "reason": "bound disagreement", "q": q, "paths": w}
        if least is not None and tuple(least) != tuple(Fraction(x) for x in w):
            return {"allocation": A, "reason": "least subsidy differs", "q": q, "paths": w, "least": least}
    return None


def audit_envy_theorem(P: Profile, grid=None, instance: str = "", bound: int | None = None) -> AuditReport:
    grid = grid if grid is not None else (Fraction(0), Fraction(1, 2), Fraction(1), Fraction(2), Fraction(P.m))
    count = 0
    try:
        for A in enumerate_allocations(P, bound=bound):
            count += 1
            wit = check_envy_characterisation(P, A, grid, instance)
            if wit is not None:
                return _report("envy-graph characterisation", instance, wit, count)
    except InstanceTooLarge:
        return AuditReport("envy-graph characterisation", instance, SKIPPED)
    return _report("envy-graph characterisation", instance, None, count)


# --- mechanism suites ------------------------------------------------------------


def _first(checks):
    for c in checks:
        if c is not None:
            return c
    return None


def se_reports(P: Profile, instance: str = "", bf: BruteForce | None = None) -> list:
    """Guarantees of the SE mechanism, checked against brute force."""
    out = se_mechanism(P)
    A, p = out.allocation, out.subsidies
    reps = [
        _report("SE subsidies in {0,1}", instance, None if all(x in (0, 1) for x in p) else {"subsidies": p}),
        _report("SE total subsidy <= n-1", instance, None if sum(p) <= max(P.n - 1, 0) else {"subsidies": p}),
        _report("SE envy-free", instance, None if is_envy_free(P, A, p) else {"allocation": A, "subsidies": p}),
    ]
    try:
        bf = bf or BruteForce(P)
    except InstanceTooLarge:
        return reps + [AuditReport("SE brute-force agreement", instance, SKIPPED)]
    welfare = sum(A.sizes())
    reps.append(_report("SE utilitarian optimal", instance, None if welfare == bf.max_welfare else {"welfare": welfare, "optimum": bf.max_welfare}))
    reps.append(_report("SE allocation in cLD", instance, None if A.masks in bf.cld_set() else {"allocation": A}, len(bf.cld_codes)))
    cert = lorenz_dominating(P)
    agree = None
    if cert.sorted_sizes != bf.ld_sorted:
        agree = {"engine": cert.sorted_sizes, "brute": bf.ld_sorted}
    elif cert.min_sizes != bf.min_sizes() or cert.max_sizes != bf.max_sizes():
        agree = {"engine": [cert.min_sizes, cert.max_sizes], "brute": [bf.min_sizes(), bf.max_sizes()]}
    reps.append(_report("cLD oracle agreement", instance, agree))
    reps.append(utility_invariance(P, instance, bf, out))
    return reps


def se_step2(bf: BruteForce, B: Allocation) -> tuple:
    s = B.sizes()
    lo = bf.min_sizes()
    top = max(s) if s else 0
    return tuple(1 if s[i] == lo[i] and s[i] < top else 0 for i in range(len(s)))


def utility_invariance(P: Profile, instance: str = "", bf: BruteForce | None = None, out: Outcome | None = None) -> AuditReport:
    bf = bf or BruteForce(P)
    out = out or se_mechanism(P)
    members = bf.cld()
    for B in members:
        p = se_step2(bf, B)
        u = tuple(x + q for x, q in zip(values(P, B), p))
        if u != out.utilities:
            return _report("SE utility invariance", instance, {"allocation": B, "utilities": u, "canonical": out.utilities}, len(members))
    return _report("SE utility invariance", instance, None, len(members))


def sec_reports(P: Profile, instance: str = "", bf: BruteForce | None = None) -> list:
    try:
        out = sec_algorithm(P)
    except AssertionError as exc:
        return [_report("SEC run", instance, {"error": str(exc)})]
    A, p = out.allocation, out.subsidies
    reps = [
        _report("SEC complete", instance, None if A.is_complete else {"allocation": A}),
        _report("SEC subsidies in {0,1}", instance, None if all(x in (0, 1) for x in p) else {"subsidies": p}),
        _report("SEC total subsidy <= n-1", instance, None if sum(p) <= max(P.n - 1, 0) else {"subsidies": p}),
        _report("SEC envy-free", instance, None if is_envy_free(P, A, p) else {"allocation": A, "subsidies": p}),
    ]
    efx = check_efx(P, A, instance)
    reps.append(AuditReport("SEC EFX", instance, efx.verdict, efx.witness))
    star = path = None
    for step, B in enumerate(out.history):
        r = check_star_condition(P, B, instance)
        if star is None and not r.ok:
            star = dict(r.witness, step=step)
        G = build_envy_graph(P, B)
        if path is None:
            if has_positive_cycle(G):
                path = {"step": step, "allocation": B, "reason": "positive cycle"}
            elif max(max_path_weights(G)) > 1:
                path = {"step": step, "allocation": B, "reason": "path heavier than 1"}
    reps.append(_report("SEC star condition at every step", instance, star, len(out.history)))
    reps.append(_report("SEC path weights <= 1 at every step", instance, path, len(out.history)))
    try:
        bf = bf or BruteForce(P)
    except InstanceTooLarge:
        reps.append(AuditReport("SEC utilitarian optimal", instance, SKIPPED))
        return reps
    welfare = sum(values(P, A))
    reps.append(_report("SEC utilitarian optimal", instance, None if welfare == bf.max_welfare else {"welfare": welfare, "optimum": bf.max_welfare}))
    return reps


def structure_reports(P: Profile, instance: str = "", bound: int | None = None) -> list:
    """Exchange axioms plus the restriction lemmas, all by brute force."""
    try:
        bf = BruteForce(P, bound)
    except InstanceTooLarge:
        return [AuditReport("structure", instance, SKIPPED)]
    reps = check_exchange_axioms(P, instance, bound)
    lo, hi = bf.min_sizes(), bf.max_sizes()
    bad = next(({"agent": i, "min": lo[i], "max": hi[i]} for i in range(P.n) if hi[i] - lo[i] not in (0, 1)), None)
    reps.append(_report("cLD size range in {0,1}", instance, bad, P.n))
    if P.m > EXHAUSTIVE_MAX:
        return reps + [AuditReport("restriction lemmas", instance, SKIPPED)]
    full = (1 << P.m) - 1
    mono = faith = maximp = None
    checked = 0
    for i in range(P.n):
        sub = {}
        for x in range(full + 1):
            sub[x] = BruteForce(P.replace(i, restrict(P[i], from_mask(x))), bound)
        mins = {x: sub[x].min_sizes()[i] for x in sub}
        # some member gives i its whole (restricted) bundle Y with i below the top
        below_top = {}
        for y, b in sub.items():
            rows = b.cld_masks
            sizes = b.cld_sizes
            below_top[y] = bool(((rows[:, i] == y) & (sizes[:, i] < sizes.max(axis=1))).any())
        all_below = {x: bool((b.cld_sizes[:, i] < b.cld_sizes.max(axis=1)).all()) for x, b in sub.items()}
        for y in range(full + 1):
            x = y
            while True:
                checked += 1
                if mono is None and mins[x] > mins[y]:
                    mono = {"agent": i, "X": sorted(from_mask(x)), "Y": sorted(from_mask(y)), "min_X": mins[x], "min_Y": mins[y]}
                if maximp is None and below_top[y] and not all_below[x]:
                    maximp = {"agent": i, "X": sorted(from_mask(x)), "Y": sorted(from_mask(y))}
                if x == 0:
                    break
                x = (x - 1) & y
        for a_row in bf.cld_masks:
            ai = int(a_row[i])
            at_min = popcount(ai) == lo[i]
            x = ai
            while True:
                got = sub[x].cld_masks[:, i]
                if faith is None and not (got == x).any():
                    faith = {"agent": i, "A_i": sorted(from_mask(ai)), "X": sorted(from_mask(x)), "reason": "no member gives X"}
                if faith is None and at_min and not (got == x).all():
                    faith = {"agent": i, "A_i": sorted(from_mask(ai)), "X": sorted(from_mask(x)), "reason": "some member differs"}
                if x == 0:
                    break
                x = (x - 1) & ai
    reps.append(_report("min-monotone under restriction", instance, mono, checked))
    reps.append(_report("restriction faithfulness", instance, faith))
    reps.append(_report("max-implication under restriction", instance, maximp, checked))
    return reps


def se_restriction_reports(P: Profile, instance: str = "") -> list:
    """Monotone and faithful utility under restrictions, for the SE mechanism."""
    if P.m > EXHAUSTIVE_MAX:
        return [AuditReport("SE restriction properties", instance, SKIPPED)]
    truth = se_mechanism(P)
    full = (1 << P.m) - 1
    mono = faith = None
    for i in range(P.n):
        u = {}
        for x in range(full + 1):
            u[x] = utility_of(P, se_mechanism(P.replace(i, restrict(P[i], from_mask(x)))), i)
        for y in range(full + 1):
            x = y
            while mono is None:
                if u[x] > u[y]:
                    mono = {"agent": i, "X": sorted(from_mask(x)), "Y": sorted(from_mask(y)), "u_X": u[x], "u_Y": u[y]}
                if x == 0:
                    break
                x = (x - 1) & y
        ai = truth.allocation.masks[i]
        x = ai
        while faith is None:
            if P[i].value(x) + truth.subsidies[i] > u[x]:
                faith = {"agent": i, "X": sorted(from_mask(x)), "lhs": P[i].value(x) + truth.subsidies[i], "rhs": u[x]}
            if x == 0:
                break
            x = (x - 1) & ai
    return [_report("SE monotone under restriction", instance, mono), _report("SE faithful under restriction", instance, faith)]


# complete allocations enumerated when checking VCG welfare (Fraction arithmetic is slow)
VCG_WELFARE_MAX = 50_000


def vcg_reports(P: Profile, instance: str = "", misreports=None, coverage: str = EXHAUSTIVE) -> list:
    from .mechanisms import vcg_upfront

    out = vcg_upfront(P)
    A, p = out.allocation, out.subsidies
    m = P.m
    reps = [
        _report("VCG subsidies in [0,m]", instance, None if all(0 <= x <= m for x in p) else {"subsidies": p}),
        _report("VCG envy-free", instance, None if is_envy_free(P, A, p) else {"allocation": A, "subsidies": p}),
    ]
    if P.n**m <= min(VCG_WELFARE_MAX, max_enum()):
        best = max(sum(values(P, B), Fraction(0)) for B in enumerate_allocations(P, complete_only=True))
        w = sum(values(P, A), Fraction(0))
        reps.append(_report("VCG utilitarian optimal", instance, None if w == best else {"welfare": w, "optimum": best}))
    else:
        reps.append(AuditReport("VCG utilitarian optimal", instance, SKIPPED))
    if misreports is not None:
        reps.append(deviation_audit(vcg_upfront, P, misreports, instance=instance, coverage=coverage, name="VCG truthfulness"))
    return reps


def wta_reports(P: Profile, instance: str = "") -> list:
    from .mechanisms import winner_takes_all

    out = winner_takes_all(P)
    A, p = out.allocation, out.subsidies
    top = max(v.value((1 << P.m) - 1) for v in P)
    return [
        _report("WTA complete", instance, None if A.is_complete else {"allocation": A}),
        _report("WTA envy-free", instance, None if is_envy_free(P, A, p) else {"allocation": A, "subsidies": p}),
        _report("WTA subsidy <= max value", instance, None if all(x <= top for x in p) else {"subsidies": p}),
    ]


def fairness_hierarchy(P: Profile, A: Allocation, instance: str = "") -> AuditReport:
    """EF implies EFX implies EF1 on ``A``."""
    ef, efx, ef1 = check_ef(P, A).ok, check_efx(P, A).ok, check_ef1(P, A).ok
    bad = (ef and not efx) or (efx and not ef1)
    return _report("EF => EFX => EF1", instance, {"allocation": A, "ef": ef, "efx": efx, "ef1": ef1} if bad else None)


# --- lower bounds ----------------------------------------------------------------


def check_lower_bound(fx, bound: int | None = None) -> AuditReport:
    """Confirm the subsidy figure of one :func:`fixtures.lower_bound_fixtures` entry."""
    P = fx.profile
    name = f"lower bound {fx.name}"
    if fx.name == "complete_ld_manipulation":
        agent, lie = fx.misreport
        rep = deviation_audit(complete_ld_mechanism, P, {agent: [lie]}, instance=fx.name)
        w = rep.witness
        if w is None or w["profit"] < fx.expected:
            return AuditReport(name, fx.name, VIOLATED, {"expected_profit": fx.expected, "found": w}, checked=1)
        return AuditReport(name, fx.name, HOLDS, None, checked=1)
    if fx.name == "dominant_bidder":
        full = (1 << P.m) - 1
        A = Allocation((full, 0), P.m)
        p = max_path_weights(build_envy_graph(P, A))
        best = max(sum(values(P, B), Fraction(0)) for B in enumerate_allocations(P, complete_only=True, bound=bound))
        optimal = [B for B in enumerate_allocations(P, complete_only=True, bound=bound) if sum(values(P, B), Fraction(0)) == best]
        wit = None
        if optimal != [A]:
            wit = {"reason": "(M, empty) is not the unique utilitarian optimum", "optima": len(optimal)}
        elif Fraction(p[1]) != fx.expected:
            wit = {"reason": "required subsidy", "subsidies": p, "expected": fx.expected}
        return _report(name, fx.name, wit, len(optimal))
    if fx.name == "single_jackpot":
        count = 0
        for B in enumerate_allocations(P, complete_only=True, bound=bound):
            count += 1
            try:
                p = max_path_weights(build_envy_graph(P, B))
            except NotEnvyFreeable:
                continue
            if max(p) < fx.expected:
                return _report(name, fx.name, {"allocation": B, "subsidies": p, "expected": fx.expected}, count)
        return _report(name, fx.name, None, count)
    raise FairDivError(f"unknown lower-bound fixture {fx.name!r}")


__all__ = [
    "AuditReport",
    "BruteForce",
    "enumerate_allocations",
    "brute_cLD",
    "check_ef",
    "check_efx",
    "check_ef1",
    "check_star_condition",
    "check_exchange_axioms",
    "deviation_audit",
    "all_matroids",
    "matroid_valuations",
    "check_lower_bound",
    "naive_ld_mechanism",
    "complete_ld_mechanism",
]
