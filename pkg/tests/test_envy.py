from fractions import Fraction

import numpy as np
import pytest

from fairdiv import _jit
from fairdiv._kernels import longest_walks
from fairdiv.allocations import Allocation
from fairdiv.envy import (
    build_envy_graph,
    has_positive_cycle,
    is_envy_free,
    max_path_weights,
    max_path_weights_into,
    subsidy_for,
)
from fairdiv.errors import NotEnvyFreeable
from fairdiv.valuations import Profile, additive


def test_graph_weights(sec_profile):
    A = Allocation.from_bundles([[0, 1], [2], [3]], 5)
    G = build_envy_graph(sec_profile, A)
    assert G.weights == ((0, -2, -2), (1, 0, -1), (1, 0, 0))
    assert not has_positive_cycle(G)
    assert max_path_weights(G) == (0, 1, 1)
    assert subsidy_for(sec_profile, A) == (0, 1, 1)
    assert is_envy_free(sec_profile, A, (0, 1, 1))
    assert not is_envy_free(sec_profile, A, (0, 0, 0))


def test_path_into_target(sec_profile):
    # e5 given to agent 1 (0-based) creates a positive path ending there
    A = Allocation.from_bundles([[0, 1], [2, 4], [3]], 5)
    into = max_path_weights_into(build_envy_graph(sec_profile, A), 1)
    assert into[2] == 1


def test_positive_cycle_swap():
    P = Profile([additive(2, [0, 1]), additive(2, [1, 0])])
    A = Allocation.from_bundles([[0], [1]], 2)
    G = build_envy_graph(P, A)
    assert has_positive_cycle(G)
    with pytest.raises(NotEnvyFreeable):
        max_path_weights(G)


def test_fraction_weights():
    P = Profile([additive(2, [1, Fraction(1, 2)]), additive(2, [Fraction(2, 5), Fraction(3, 5)])])
    A = Allocation.from_bundles([[0], [1]], 2)
    assert max_path_weights(build_envy_graph(P, A)) == (0, 0)
    B = Allocation.from_bundles([[1], [0]], 2)
    # agent 0 envies the holder of both items by 3/2; agent 1 loses 1 by swapping
    G = build_envy_graph(P, Allocation.from_bundles([[], [0, 1]], 2))
    assert G.w(0, 1) == Fraction(3, 2) and G.w(1, 0) == -1 and has_positive_cycle(G)
    assert has_positive_cycle(build_envy_graph(P, B))


@pytest.mark.skipif(not _jit.HAVE_NUMBA, reason="numba not installed")
def test_backends_agree():
    rng = np.random.default_rng(5)
    for n in (1, 2, 5, 17):
        for _ in range(20):
            W = rng.integers(-5, 4, size=(n, n))
            np.fill_diagonal(W, 0)
            a, b = longest_walks(W, backend="numpy"), longest_walks(W, backend="numba")
            pos_a, pos_b = (np.diag(a) > 0).any(), (np.diag(b) > 0).any()
            assert pos_a == pos_b
            if not pos_a:
                assert np.array_equal(a, b)
