"""Named instances: worked examples and lower-bound constructions.

Agents and items are 0-indexed internally; the JSON names are ``"1".."n"``
and ``"e1".."em"``.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .instance import Instance
from .valuations import GENERAL, Profile, additive, binary_additive, from_table, transversal


def _inst(P: Profile, name: str, params=None) -> Instance:
    return Instance([str(i + 1) for i in range(P.n)], [f"e{e + 1}" for e in range(P.m)], P, dict(params or {}), name)


def single_item_contested() -> Profile:
    """Two agents, one item, both want it."""
    return Profile([binary_additive(1, [0]), binary_additive(1, [0])])


def single_item_one_wanter() -> Profile:
    """Two agents, one item, only agent 0 wants it."""
    return Profile([binary_additive(1, [0]), binary_additive(1, [])])


def completion_example() -> Profile:
    """Five items; agent 2 values e1..e3 and at most one of e4, e5."""
    m = 5
    return Profile(
        [
            binary_additive(m, [0, 1]),
            binary_additive(m, [0, 1, 2]),
            transversal(m, [[0], [1], [2], [3, 4]]),
        ]
    )


def complete_ld_pair(k: int = 1) -> tuple:
    """Two binary profiles on ``6k`` items where a complete Lorenz dominating rule is manipulable.

    In the first profile both agents want ``e1..e2k``; in the second agent 0
    wants ``e1..e4k`` and agent 1 still wants ``e1..e2k``. Agent 0 gains by
    reporting the first profile's valuation when the truth is the second.
    """
    m = 6 * k
    narrow = binary_additive(m, range(2 * k))
    wide = binary_additive(m, range(4 * k))
    return Profile([narrow, narrow]), Profile([wide, narrow])


def dominant_bidder(m: int = 10, eps=Fraction(1, 2)) -> Profile:
    """Additive: agent 0 values each item at 1, agent 1 at ``1 - eps/m``."""
    eps = Fraction(eps)
    return Profile([additive(m, [1] * m), additive(m, [1 - eps / m] * m)])


def single_jackpot(m: int = 10) -> Profile:
    """Both agents value a bundle at ``m`` if it contains e1, else 0."""
    table = [Fraction(m) if x & 1 else Fraction(0) for x in range(1 << m)]
    v = from_table(m, GENERAL, table)
    return Profile([v, v])


def vcg_two_by_two() -> Profile:
    return Profile([additive(2, [1, Fraction(1, 2)]), additive(2, [Fraction(2, 5), Fraction(3, 5)])])


@dataclass(frozen=True)
class LowerBound:
    """A lower-bound construction and the subsidy figure it should force."""

    name: str
    profile: Profile
    expected: object
    misreport: object = None  # for the manipulation fixture: (agent, valuation)
    params: tuple = ()


def lower_bound_fixtures(k: int = 1, m: int = 10, eps=Fraction(1, 2)) -> list:
    eps = Fraction(eps)
    narrow, truth = complete_ld_pair(k)
    return [
        LowerBound("complete_ld_manipulation", truth, k, (0, narrow[0]), (("k", k),)),
        LowerBound("dominant_bidder", dominant_bidder(m, eps), m - eps, None, (("m", m), ("epsilon", eps))),
        LowerBound("single_jackpot", single_jackpot(m), m, None, (("m", m),)),
    ]


def named_instances() -> dict:
    """Every named fixture as an :class:`Instance`, keyed by file stem."""
    narrow, wide = complete_ld_pair(1)
    out = {
        "single_item_contested": _inst(single_item_contested(), "single_item_contested"),
        "single_item_one_wanter": _inst(single_item_one_wanter(), "single_item_one_wanter"),
        "sec_example": _inst(completion_example(), "sec_example"),
        "complete_ld_narrow": _inst(narrow, "complete_ld_narrow", {"k": 1}),
        "complete_ld_wide": _inst(wide, "complete_ld_wide", {"k": 1}),
        "dominant_bidder": _inst(dominant_bidder(10, Fraction(1, 2)), "dominant_bidder", {"m": 10, "epsilon": "1/2"}),
        "single_jackpot": _inst(single_jackpot(6), "single_jackpot", {"m": 6}),
        "vcg_two_by_two": _inst(vcg_two_by_two(), "vcg_two_by_two"),
    }
    return out
