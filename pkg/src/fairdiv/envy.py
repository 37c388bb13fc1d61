"""Envy graphs and the subsidies they induce."""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from ._kernels import longest_walks
from .allocations import Allocation, _check_dims
from .errors import NotEnvyFreeable
from .valuations import Profile


@dataclass(frozen=True)
class EnvyGraph:
    """Complete digraph on agents; ``weights[i][j] = v_i(A_j) - v_i(A_i)``."""

    weights: tuple

    @property
    def n(self) -> int:
        return len(self.weights)

    def w(self, i: int, j: int):
        return self.weights[i][j]

    def matrix(self) -> np.ndarray:
        flat = [x for row in self.weights for x in row]
        if all(isinstance(x, int) for x in flat):
            return np.array(self.weights, dtype=np.int64).reshape(self.n, self.n)
        arr = np.empty((self.n, self.n), dtype=object)
        for i, row in enumerate(self.weights):
            for j, x in enumerate(row):
                arr[i, j] = Fraction(x)
        return arr


def build_envy_graph(P: Profile, A: Allocation) -> EnvyGraph:
    _check_dims(P, A)
    rows = []
    for i, v in enumerate(P):
        own = v.value(A.masks[i])
        rows.append(tuple(v.value(x) - own for x in A.masks))
    return EnvyGraph(tuple(rows))


def _walks(G: EnvyGraph) -> np.ndarray:
    return longest_walks(G.matrix())


def has_positive_cycle(G: EnvyGraph) -> bool:
    D = _walks(G)
    return any(D[i, i] > 0 for i in range(G.n))


def max_path_weights(G: EnvyGraph) -> tuple:
    """Maximum weight of a path starting at each agent (the empty path counts as 0)."""
    D = _walks(G)
    if any(D[i, i] > 0 for i in range(G.n)):
        raise NotEnvyFreeable("envy graph has a positive-weight cycle")
    out = []
    for i in range(G.n):
        best = max(D[i, j] for j in range(G.n))
        out.append(_exact(best))
    return tuple(out)


def max_path_weights_into(G: EnvyGraph, target: int) -> tuple:
    """Maximum weight of a path from each agent to ``target``."""
    D = _walks(G)
    if any(D[i, i] > 0 for i in range(G.n)):
        raise NotEnvyFreeable("envy graph has a positive-weight cycle")
    return tuple(_exact(D[i, target]) for i in range(G.n))


def _exact(x):
    if isinstance(x, (np.integer,)):
        return int(x)
    if isinstance(x, Fraction) and x.denominator == 1:
        return int(x)
    return x


def subsidy_for(P: Profile, A: Allocation) -> tuple:
    return max_path_weights(build_envy_graph(P, A))


def is_envy_free(P: Profile, A: Allocation, p) -> bool:
    _check_dims(P, A)
    if len(p) != P.n:
        raise ValueError("subsidy vector length must equal the number of agents")
    for i, v in enumerate(P):
        mine = v.value(A.masks[i]) + p[i]
        for j in range(P.n):
            if v.value(A.masks[j]) + p[j] > mine:
                return False
    return True
