from fractions import Fraction

import pytest

from fairdiv import fixtures as fx
from fairdiv.allocations import Allocation
from fairdiv.envy import is_envy_free
from fairdiv.errors import FairDivError, NotMatroidal
from fairdiv.mechanisms import sec_algorithm, se_mechanism, se_variant_no_cap, vcg_upfront, winner_takes_all
from fairdiv.valuations import Profile, additive, binary_additive, uniform


def test_se_single_item(contested, one_wanter):
    out = se_mechanism(contested)
    assert sorted(out.allocation.sizes()) == [0, 1]
    assert out.utilities == (1, 1)
    loser = out.allocation.sizes().index(0)
    assert out.subsidies[loser] == 1 and out.subsidies[1 - loser] == 0
    out = se_mechanism(one_wanter)
    assert out.allocation == Allocation((1, 0), 1)
    assert out.subsidies == (0, 1)


def test_se_all_zero():
    P = Profile([uniform(3, 0)] * 3)
    out = se_mechanism(P)
    assert out.allocation == Allocation.empty(3, 3) and out.subsidies == (0, 0, 0)
    assert se_variant_no_cap(P).subsidies == (1, 1, 1)


def test_se_nocap_examples(contested):
    out = se_variant_no_cap(contested)
    holder = out.allocation.sizes().index(1)
    assert out.subsidies[holder] == 0 and out.subsidies[1 - holder] == 1
    single = Profile([binary_additive(1, [0])])
    assert se_variant_no_cap(single).subsidies == (1,)
    assert se_mechanism(single).subsidies == (0,)


def test_se_rejects_additive():
    with pytest.raises(NotMatroidal):
        se_mechanism(fx.vcg_two_by_two())


def test_sec_example(sec_profile):
    out = sec_algorithm(sec_profile)
    assert out.allocation == Allocation.from_bundles([[0, 1], [2], [3, 4]], 5)
    assert out.subsidies == (0, 1, 1)
    assert out.utilities == (2, 2, 2)
    assert out.trace[-3:] == (
        "item 4: agent 0 rejected, path of weight 2 from agent 2",
        "item 4: given to agent 2",
        "subsidies [0, 1, 1]",
    )


def test_sec_nothing_left():
    P = Profile([binary_additive(2, [0]), binary_additive(2, [1])])
    assert sec_algorithm(P).allocation == se_mechanism(P).allocation


def test_sec_narrow_profile():
    k = 1
    narrow, _ = fx.complete_ld_pair(k)
    out = sec_algorithm(narrow)
    A = out.allocation
    assert A.is_complete
    valuable = (1 << 2 * k) - 1
    assert [bin(x & valuable).count("1") for x in A.masks] == [k, k]


def test_vcg_two_by_two():
    out = vcg_upfront(fx.vcg_two_by_two())
    assert out.allocation == Allocation.from_bundles([[0], [1]], 2)
    assert out.subsidies == (Fraction(8, 5), Fraction(3, 2))
    assert is_envy_free(fx.vcg_two_by_two(), out.allocation, out.subsidies)


def test_vcg_single_agent():
    P = Profile([additive(3, [1, 0, Fraction(1, 2)])])
    out = vcg_upfront(P)
    assert out.allocation.is_complete and out.subsidies == (3,)


def test_vcg_dominant_bidder():
    m, eps = 10, Fraction(1, 2)
    out = vcg_upfront(fx.dominant_bidder(m, eps))
    assert out.allocation == Allocation(((1 << m) - 1, 0), m)
    assert out.subsidies == (eps, m)


def test_vcg_rejects_matroidal(sec_profile):
    with pytest.raises(FairDivError):
        vcg_upfront(sec_profile)


def test_wta():
    out = winner_takes_all(fx.single_jackpot(10))
    assert out.allocation.masks[0] == (1 << 10) - 1 and out.subsidies == (0, 10)
    zero = Profile([uniform(2, 0)] * 2)
    out = winner_takes_all(zero)
    assert out.allocation.masks == (3, 0) and out.subsidies == (0, 0)
    one = Profile([additive(2, [1, 1])])
    assert winner_takes_all(one).subsidies == (0,)
