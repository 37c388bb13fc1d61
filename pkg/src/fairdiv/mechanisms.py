"""Allocation mechanisms with subsidies.

* ``se_mechanism``: clean Lorenz dominating allocation plus unit subsidies
  (matroidal valuations; truthful, envy-free, utilitarian optimal).
* ``se_variant_no_cap``: same without the "not a largest bundle" condition.
* ``sec_algorithm``: completes the SE allocation item by item while keeping
  every envy path at weight at most one (not truthful).
* ``vcg_upfront``: VCG payments deducted from an upfront grant of ``m``
  (superadditive valuations).
* ``winner_takes_all``: everything to the agent valuing ``M`` most.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import product

from .allocations import Allocation, max_enum, values
from .envy import build_envy_graph, max_path_weights, max_path_weights_into
from .errors import FairDivError, InstanceTooLarge
from .exchange import LorenzCertificate, lorenz_dominating
from .valuations import ADDITIVE, BINARY_ADDITIVE, SUPERADDITIVE, Profile, iter_bits

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class Outcome:
    allocation: Allocation
    subsidies: tuple
    utilities: tuple
    mechanism: str
    trace: tuple = ()
    history: tuple = field(default=(), repr=False, compare=False)

    @property
    def total_subsidy(self):
        return sum(self.subsidies)


def _outcome(P: Profile, A: Allocation, p, tag: str, trace, history=()) -> Outcome:
    p = tuple(p)
    u = tuple(x + q for x, q in zip(values(P, A), p))
    return Outcome(A, p, u, tag, tuple(trace), tuple(history))


def _se_subsidies(cert: LorenzCertificate, A: Allocation, cap: bool) -> list:
    s = A.sizes()
    top = max(s)
    return [1 if s[i] == cert.min_sizes[i] and (not cap or s[i] < top) else 0 for i in range(len(s))]


def se_mechanism(P: Profile, *, cap: bool = True) -> Outcome:
    """Subsidized egalitarian mechanism."""
    P.require_matroidal()
    cert = lorenz_dominating(P)
    A = cert.allocation
    p = _se_subsidies(cert, A, cap)
    trace = list(cert.trace)
    trace.append(f"min sizes {list(cert.min_sizes)} max sizes {list(cert.max_sizes)}")
    trace.append(f"subsidies {p}")
    return _outcome(P, A, p, "se" if cap else "se-nocap", trace)


def se_variant_no_cap(P: Profile) -> Outcome:
    return se_mechanism(P, cap=False)


def sec_algorithm(P: Profile) -> Outcome:
    """Subsidized egalitarian with completion.

    Leftover items are handled in ascending order. Each starts at agent 0; while
    giving it to the current agent would create a positive path into that
    agent, the item is redirected to the start of a heaviest such path
    (lowest index on ties).
    """
    P.require_matroidal()
    cert = lorenz_dominating(P)
    A = cert.allocation
    trace = list(cert.trace)
    history = [A]
    for e in iter_bits(A.unallocated_mask):
        i = 0
        tried = []
        while True:
            if i in tried:
                raise AssertionError(f"agent {i} chosen twice for item {e}")
            tried.append(i)
            trial = A.with_bundle(i, A.masks[i] | 1 << e)
            into = max_path_weights_into(build_envy_graph(P, trial), i)
            best = max((into[j] for j in range(P.n) if j != i), default=0)
            if best > 0:
                j = next(j for j in range(P.n) if j != i and into[j] == best)
                trace.append(f"item {e}: agent {i} rejected, path of weight {best} from agent {j}")
                i = j
                continue
            A = trial
            history.append(A)
            trace.append(f"item {e}: given to agent {i}")
            break
    w = max_path_weights(build_envy_graph(P, A))
    if any(x > 1 for x in w):
        raise AssertionError(f"envy path heavier than one after completion: {w}")
    p = [1 if x == 1 else 0 for x in w]
    trace.append(f"subsidies {p}")
    return _outcome(P, A, p, "sec", trace, history)


_SUPERADDITIVE_TAGS = (ADDITIVE, BINARY_ADDITIVE, SUPERADDITIVE)


def _best_complete(P: Profile, agents: list, bound: int):
    """Lexicographically first welfare-maximising complete assignment of items to ``agents``."""
    m = P.m
    if not agents:
        return Fraction(0), None
    if all(P[k].class_tag in (ADDITIVE, BINARY_ADDITIVE) for k in agents):
        owners = []
        total = Fraction(0)
        for e in range(m):
            vals = [P[k].value(1 << e) for k in agents]
            best = max(vals)
            owners.append(agents[vals.index(best)])
            total += best
        return total, owners
    if len(agents) ** m > bound:
        raise InstanceTooLarge(f"{len(agents)}**{m} assignments exceed the enumeration bound {bound}")
    best_total, best_owners = None, None
    for combo in product(agents, repeat=m):
        masks = {k: 0 for k in agents}
        for e, k in enumerate(combo):
            masks[k] |= 1 << e
        total = sum((P[k].value(masks[k]) for k in agents), Fraction(0))
        if best_total is None or total > best_total:
            best_total, best_owners = total, list(combo)
    return best_total, best_owners


def vcg_upfront(P: Profile, *, bound: int | None = None) -> Outcome:
    """VCG allocation; agent ``i`` receives ``m`` minus its VCG payment."""
    bad = [i for i, v in enumerate(P) if v.class_tag not in _SUPERADDITIVE_TAGS]
    if bad:
        raise FairDivError(f"VCG with upfront subsidy needs superadditive valuations; agents {bad} are not")
    bound = max_enum(bound)
    n, m = P.n, P.m
    _, owners = _best_complete(P, list(range(n)), bound)
    A = Allocation.from_owners(owners, n)
    vals = values(P, A)
    trace = [f"welfare-maximising allocation {A}"]
    p = []
    for i in range(n):
        others = [k for k in range(n) if k != i]
        w_without, _ = _best_complete(P, others, bound)
        externality = w_without - sum((vals[k] for k in others), Fraction(0))
        p.append(_norm(m - externality))
        trace.append(f"agent {i}: payment {_norm(externality)}")
    return _outcome(P, A, p, "vcg", trace)


def winner_takes_all(P: Profile) -> Outcome:
    full = (1 << P.m) - 1
    vals = [v.value(full) for v in P]
    star = vals.index(max(vals))
    A = Allocation.empty(P.n, P.m).with_bundle(star, full)
    p = [0 if k == star else _norm(vals[star]) for k in range(P.n)]
    return _outcome(P, A, p, "wta", [f"all items to agent {star}"])


def _norm(x):
    if isinstance(x, Fraction) and x.denominator == 1:
        return int(x)
    return x


MECHANISMS = {
    "se": se_mechanism,
    "se-nocap": se_variant_no_cap,
    "sec": sec_algorithm,
    "vcg": vcg_upfront,
    "wta": winner_takes_all,
}
