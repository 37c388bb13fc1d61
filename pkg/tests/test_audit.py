import random
from fractions import Fraction

import pytest

from fairdiv import audit as au
from fairdiv import fixtures as fx
from fairdiv.allocations import Allocation
from fairdiv.errors import InstanceTooLarge
from fairdiv.mechanisms import sec_algorithm, se_mechanism, winner_takes_all
from fairdiv.valuations import Profile, additive, binary_additive, uniform


def test_matroid_counts():
    assert [len(au.all_matroids(m)) for m in range(5)] == [1, 2, 5, 16, 68]
    for m in range(4):
        assert sorted(au.all_matroids(m)) == list(au.all_matroids_naive(m))


def test_brute_cld_examples(contested, sec_profile):
    assert au.brute_cLD(contested) == [Allocation((0, 1), 1), Allocation((1, 0), 1)]
    zero = Profile([uniform(2, 0)] * 2)
    assert au.brute_cLD(zero) == [Allocation.empty(2, 2)]
    members = au.brute_cLD(sec_profile)
    assert {tuple(sorted(A.sizes())) for A in members} == {(1, 1, 2)}
    # the first agent does not always hold {e1, e2}: members exist where it holds one item
    assert any(A.masks[0] != 3 for A in members)
    assert Allocation.from_bundles([[0, 1], [2], [3]], 5) in members


def test_brute_force_too_large():
    P = Profile([uniform(14, 1)] * 4)
    with pytest.raises(InstanceTooLarge):
        au.BruteForce(P)


def test_efx_ef1_examples(sec_profile):
    out = sec_algorithm(sec_profile)
    assert au.check_efx(sec_profile, out.allocation).ok
    single = Profile([binary_additive(1, [0]), binary_additive(1, [0])])
    assert au.check_efx(single, Allocation((0, 1), 1)).ok
    A = Allocation((0, 3), 2)
    # both items worth 1: dropping either still leaves envy, so EFX and EF1 both fail
    P = Profile([additive(2, [1, 1]), additive(2, [1, 1])])
    assert not au.check_efx(P, A).ok and not au.check_ef1(P, A).ok
    # e worth 1, f worth 0: dropping f leaves envy (EFX fails), dropping e clears it (EF1 holds)
    P = Profile([additive(2, [1, 0]), additive(2, [1, 0])])
    assert not au.check_efx(P, A).ok
    assert au.check_ef1(P, A).ok
    assert au.check_efx(P, A).witness["envious"] == 0


def test_star_examples(sec_profile):
    assert au.check_star_condition(sec_profile, Allocation.from_bundles([[0, 1], [2], [3]], 5)).ok
    P = Profile([binary_additive(2, [0]), binary_additive(2, [1])])
    assert au.check_star_condition(P, Allocation.from_bundles([[0], [1]], 2)).ok
    assert au.check_star_condition(sec_profile, Allocation.from_bundles([[0, 1], [2, 4], [3]], 5)).ok


def test_deviation_examples(one_wanter):
    truthful = au.deviation_audit(se_mechanism, one_wanter, {1: [binary_additive(1, [0])]})
    assert truthful.ok
    naive = au.deviation_audit(au.naive_ld_mechanism, one_wanter, "matroids")
    assert not naive.ok and naive.witness["agent"] == 1 and naive.witness["profit"] == 1
    P = Profile([additive(2, [1, 1]), additive(2, [Fraction(1, 2), 0])])
    lies = [additive(2, [Fraction(1, 4), 0]), additive(2, [1, 0])]
    assert au.deviation_audit(winner_takes_all, P, {1: lies}).ok


def test_deviation_family_bounds():
    P = Profile([uniform(5, 1)] * 2)
    assert au.deviation_audit(se_mechanism, P, "matroids").verdict == au.SKIPPED


def test_deviation_parallel_matches_serial(sec_profile):
    a = au.deviation_audit(se_mechanism, sec_profile, "restrictions", jobs=1)
    b = au.deviation_audit(se_mechanism, sec_profile, "restrictions", jobs=2)
    assert a == b and a.ok and a.checked == 3 * 32


def test_exchange_axioms_examples(sec_profile):
    assert all(r.ok for r in au.check_exchange_axioms(sec_profile))
    single = Profile([uniform(3, 2)])
    assert all(r.ok for r in au.check_exchange_axioms(single))
    rng = random.Random(6)
    for _ in range(10):
        P = Profile([binary_additive(3, [e for e in range(3) if rng.random() < 0.5]) for _ in range(2)])
        assert all(r.ok for r in au.check_exchange_axioms(P))


def test_bexc_detects_violation():
    # {(2,0),(0,2)} misses the midpoint, so the exchange fails
    S = {(2, 0), (0, 2)}
    assert au._bexc_witness(S, plus=True) is not None
    assert au._matroidal_witness(S) is not None
    assert au._bexc_witness({(1, 0), (0, 1)}, plus=False) is None


def test_lower_bound_fixtures():
    fxs = fx.lower_bound_fixtures(k=1, m=10, eps=Fraction(1, 2))
    assert [f.expected for f in fxs] == [1, Fraction(19, 2), 10]
    for f in fxs:
        assert au.check_lower_bound(f).ok


def test_envy_characterisation_small(sec_profile):
    assert au.audit_envy_theorem(fx.vcg_two_by_two()).ok
    r = au.audit_envy_theorem(sec_profile)
    assert r.ok and r.checked == 4**5


def test_relaxation_oracle():
    P = Profile([additive(2, [0, 1]), additive(2, [1, 0])])
    A = Allocation.from_bundles([[0], [1]], 2)
    assert au.least_subsidy_by_relaxation(P, A, 10) is None
    assert not au.freeable_by_permutation(P, A)
    B = Allocation.from_bundles([[1], [0]], 2)
    assert au.least_subsidy_by_relaxation(P, B, 0) == [0, 0]


def test_report_serialisation(one_wanter):
    r = au.deviation_audit(au.naive_ld_mechanism, one_wanter, "matroids")
    d = r.to_dict()
    assert d["verdict"] == "violated" and d["witness"]["allocation"] == "({0}, {})"
    assert "violated" in str(r)


def test_hierarchy_on_random():
    rng = random.Random(11)
    for _ in range(20):
        P = au.random_additive_profile(2, 3, rng)
        for A in au.enumerate_allocations(P):
            assert au.fairness_hierarchy(P, A).ok
