"""Exchange machinery for clean allocations under matroid rank valuations.

Clean allocations are the common independent sets of two matroids on the
item copies ``(agent, item)``: the direct sum of the agents' matroids and the
partition matroid that uses each item at most once. Everything here is built
on one augmenting-path routine over that intersection; per-agent size caps
turn it into the size-vector membership oracle.
"""
from __future__ import annotations

import logging
from collections import deque
from dataclasses import dataclass, field
from typing import Sequence

from .allocations import POOL, Allocation, _check_dims, is_clean
from .errors import FairDivError
from .valuations import EXHAUSTIVE_MAX, Profile, iter_bits, popcount

logger = logging.getLogger(__name__)


class _Intersection:
    """Matroid-intersection state: item owners plus per-agent bundle masks.

    ``caps[k]`` truncates agent ``k``'s matroid. Augmenting paths are shortest
    paths in the exchange graph, explored in (agent, item) order.
    """

    def __init__(self, P: Profile, caps: Sequence[int] | None = None, owners: Sequence[int] | None = None):
        self.n, self.m = P.n, P.m
        if P.m <= EXHAUSTIVE_MAX:
            self.rank = [v.table().__getitem__ for v in P]
        else:
            self.rank = [v.value for v in P]
        self.caps = list(caps) if caps is not None else [P.m] * P.n
        self.owner = list(owners) if owners is not None else [POOL] * P.m
        self.bundle = [0] * P.n
        for e, k in enumerate(self.owner):
            if k != POOL:
                self.bundle[k] |= 1 << e
        for k in range(self.n):
            if not self.indep(k, self.bundle[k]):
                raise FairDivError(f"starting bundle of agent {k} is not independent")

    def indep(self, k: int, mask: int) -> bool:
        c = popcount(mask)
        return c <= self.caps[k] and self.rank[k](mask) == c

    def augment(self) -> list | None:
        n, m, owner, bundle = self.n, self.m, self.owner, self.bundle
        # level 0: copies (k, e) that agent k can add outright
        sources = []
        for k in range(n):
            b = bundle[k]
            if popcount(b) >= self.caps[k]:
                continue
            for e in range(m):
                if not b >> e & 1 and self.indep(k, b | 1 << e):
                    if owner[e] == POOL:
                        return [(k, e)]
                    sources.append((k, e))
        parent: dict = {z: None for z in sources}
        queue = deque(sources)
        while queue:
            z = queue.popleft()
            _, e = z
            y = (owner[e], e)  # the copy currently holding item e
            if y in parent:
                continue
            parent[y] = z
            k2 = y[0]
            base = bundle[k2] & ~(1 << e)
            for e2 in range(m):
                if bundle[k2] >> e2 & 1:
                    continue
                z2 = (k2, e2)
                if z2 in parent or not self.indep(k2, base | 1 << e2):
                    continue
                parent[z2] = y
                if owner[e2] == POOL:
                    path = [z2]
                    node = y
                    while node is not None:
                        path.append(node)
                        node = parent[node]
                    path.reverse()
                    return path
                queue.append(z2)
        return None

    def apply(self, path: list) -> None:
        # path alternates z0, y1, z1, ..., zr; every z takes its item
        for node in path[0::2]:
            k, e = node
            old = self.owner[e]
            if old != POOL:
                self.bundle[old] &= ~(1 << e)
            self.owner[e] = k
            self.bundle[k] |= 1 << e

    def run(self) -> int:
        steps = 0
        while True:
            path = self.augment()
            if path is None:
                return steps
            self.apply(path)
            steps += 1

    def allocation(self) -> Allocation:
        return Allocation(tuple(self.bundle), self.m)


def max_clean_welfare_allocation(P: Profile, caps: Sequence[int] | None = None) -> Allocation:
    """Clean allocation of maximum utilitarian welfare (bundle sizes capped by ``caps``)."""
    P.require_matroidal()
    eng = _Intersection(P, caps)
    eng.run()
    return eng.allocation()


def size_vector_membership(P: Profile, s: Sequence[int]) -> Allocation | None:
    """A clean allocation with exactly ``sv(A) = s``, or ``None``."""
    P.require_matroidal()
    s = [int(x) for x in s]
    if len(s) != P.n:
        raise FairDivError("size vector length must equal the number of agents")
    if any(x < 0 for x in s) or sum(s) > P.m:
        return None
    A = max_clean_welfare_allocation(P, caps=s)
    return A if list(A.sizes()) == s else None


def _shift(P: Profile, A: Allocation, loser: int, gainer: int) -> Allocation | None:
    """Clean allocation with sizes ``sv(A) - chi_loser + chi_gainer`` and the same welfare, if any.

    Drops the lowest item of the loser and looks for one augmenting path under
    the shifted caps; the maximum of the truncated intersection does not depend
    on the starting point.
    """
    s = list(A.sizes())
    if s[loser] == 0:
        return None
    caps = list(s)
    caps[loser] -= 1
    caps[gainer] += 1
    owners = A.owners()
    drop = next(iter_bits(A.masks[loser]))
    owners[drop] = POOL
    eng = _Intersection(P, caps, owners)
    path = eng.augment()
    if path is None:
        return None
    eng.apply(path)
    return eng.allocation()


@dataclass(frozen=True)
class ExchangePath:
    """Transfers ``items[t]`` from ``agents[t+1]`` to ``agents[t]`` (``POOL`` = unallocated)."""

    agents: tuple
    items: tuple
    start: Allocation
    result: Allocation

    @property
    def end(self) -> int:
        return self.agents[-1]


def transfer_path(P: Profile, A: Allocation, B: Allocation, i: int) -> ExchangePath:
    """Move ``B`` one item toward ``A`` at agent ``i`` by a chain of single transfers.

    Starting from ``C = B`` and ``k = i``, repeatedly give ``k`` an item of
    ``A_k`` that keeps ``C_k`` independent, taking it from its holder in ``C``,
    until an agent (or the pool) with ``|A_k| < |B_k|`` is reached.
    """
    P.require_matroidal()
    _check_dims(P, A)
    _check_dims(P, B)
    if not (is_clean(P, A) and is_clean(P, B)):
        raise FairDivError("transfer paths need clean allocations")
    if not popcount(A.masks[i]) > popcount(B.masks[i]):
        raise FairDivError(f"need |A_{i}| > |B_{i}|")
    n = P.n
    a_mask = list(A.masks) + [A.unallocated_mask]
    b_size = list(B.sizes()) + [popcount(B.unallocated_mask)]
    c = list(B.masks) + [B.unallocated_mask]
    pool = n  # pool lives in the last slot while we work
    k = i
    agents, items = [i], []
    limit = (n + 1) * (P.m + 1) + 1
    for _ in range(limit):
        cand = a_mask[k] & ~c[k]
        pick = None
        for e in iter_bits(cand):
            if k == pool or P[k].value(c[k] | 1 << e) == popcount(c[k]) + 1:
                pick = e
                break
        if pick is None:
            raise FairDivError("no admissible item; inputs violate the exchange preconditions")
        holder = next(h for h in range(n + 1) if c[h] >> pick & 1)
        c[holder] &= ~(1 << pick)
        c[k] |= 1 << pick
        items.append(pick)
        agents.append(POOL if holder == pool else holder)
        k = holder
        if popcount(a_mask[k]) < b_size[k]:
            break
    else:
        raise FairDivError("transfer sequence did not terminate")
    return ExchangePath(tuple(agents), tuple(items), B, Allocation(tuple(c[:n]), P.m))


@dataclass(frozen=True)
class LorenzCertificate:
    allocation: Allocation
    sorted_sizes: tuple
    min_sizes: tuple
    max_sizes: tuple
    min_witness: tuple = field(repr=False, default=())
    max_witness: tuple = field(repr=False, default=())
    trace: tuple = field(repr=False, default=())


def _descend(P: Profile, A: Allocation, trace: list) -> Allocation:
    """Apply size-balancing exchanges until no bundle can shrink toward one two smaller."""
    while True:
        s = A.sizes()
        pairs = [(s[j] - s[i], j, i) for i in range(P.n) for j in range(P.n) if s[j] >= s[i] + 2]
        pairs.sort(key=lambda t: (-t[0], t[1], t[2]))
        for _, big, small in pairs:
            B = _shift(P, A, big, small)
            if B is not None:
                trace.append(f"balance: agent {big} -> agent {small}, sizes {list(s)} -> {list(B.sizes())}")
                A = B
                break
        else:
            return A


def lorenz_dominating(P: Profile) -> LorenzCertificate:
    """Canonical clean Lorenz dominating allocation with per-agent size ranges."""
    P.require_matroidal()
    trace: list = []
    A = max_clean_welfare_allocation(P)
    welfare = sum(A.sizes())
    trace.append(f"max-welfare clean allocation {A} welfare {welfare}")
    A = _descend(P, A, trace)
    if sum(A.sizes()) != welfare or not is_clean(P, A):
        raise AssertionError("balancing exchanges changed the welfare")
    trace.append(f"clean Lorenz dominating allocation {A}")
    s = A.sizes()
    lo, hi, lo_w, hi_w = [], [], [], []
    for i in range(P.n):
        a, wa = single_exchange_min(P, A, i)
        b, wb = single_exchange_max(P, A, i)
        lo.append(a)
        hi.append(b)
        lo_w.append(wa)
        hi_w.append(wb)
    return LorenzCertificate(A, tuple(sorted(s)), tuple(lo), tuple(hi), tuple(lo_w), tuple(hi_w), tuple(trace))


def single_exchange_min(P: Profile, A: Allocation, i: int):
    s = A.sizes()
    for j in range(P.n):
        if j != i and s[j] == s[i] - 1:
            B = _shift(P, A, i, j)
            if B is not None:
                return s[i] - 1, B
    return s[i], A


def single_exchange_max(P: Profile, A: Allocation, i: int):
    s = A.sizes()
    for j in range(P.n):
        if j != i and s[j] == s[i] + 1:
            B = _shift(P, A, j, i)
            if B is not None:
                return s[i] + 1, B
    return s[i], A


def single_exchange_membership(cert: LorenzCertificate, P: Profile, i: int) -> tuple:
    """``(min, max)`` of agent ``i``'s bundle size over all clean Lorenz dominating allocations."""
    lo, _ = single_exchange_min(P, cert.allocation, i)
    hi, _ = single_exchange_max(P, cert.allocation, i)
    return lo, hi
