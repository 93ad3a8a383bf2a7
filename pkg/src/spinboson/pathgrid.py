"""Symbolic path segments and uniform simplex grids.

A memory-window path segment is a piecewise-constant map from ``[0, T)``
to pairs of spins ``(h^+, h^-)`` (forward and backward branch).  It is
identified symbolically by its initial pair, the number of spin flips
``D``, and a sign list marking which branch each flip acts on; the flip
times enter as a vector ``(tau_1, ..., tau_D)`` of consecutive gaps
living on the closed simplex ``tau_k >= 0, sum tau_k <= T``.

Each simplex is discretized on the uniform grid

    P_D = { (m_1 h_s, ..., m_D h_s) : m_k >= 0, sum m_k <= N - 1 },

with grid size ``h_s = T / N``.  No points are placed on the hypotenuse
``sum tau_k = T``; values there follow from the boundary reduction in
the solver module.  Points are enumerated in lexicographic order, which
makes the flattening reproducible and keeps the ``m_1`` advection
neighbours cheap to precompute.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from typing import Sequence, Tuple

import numpy as np

from .spinsys import spin_index

__all__ = [
    "PathSegmentKey",
    "SimplexGrid",
    "MemoryReport",
    "final_state",
    "evaluate_path",
    "enumerate_grid",
    "grid_cardinality",
    "ndof",
]

#: Branch markers: +1 flips the forward branch, -1 the backward branch.
PLUS, MINUS = 1, -1


@dataclass(frozen=True)
class PathSegmentKey:
    """Symbolic identity of a path segment: initial pair and flip signs.

    ``init`` is the pair ``(r^+, r^-)`` at the start of the window;
    ``signs`` holds one branch marker (+1 / -1) per spin flip, in time
    order.  The flip count D is ``len(signs)``.
    """

    init: Tuple[int, int]
    signs: Tuple[int, ...] = ()

    def __post_init__(self):
        spin_index(self.init[0]), spin_index(self.init[1])
        if any(s not in (PLUS, MINUS) for s in self.signs):
            raise ValueError(f"signs must be +1 or -1, got {self.signs!r}")

    @property
    def flips(self) -> int:
        return len(self.signs)


def final_state(key: PathSegmentKey) -> Tuple[int, int]:
    """State of the segment just before the window end (left limit at T).

    Starting from ``key.init``, every +1 marker toggles the forward
    component and every -1 marker the backward component.
    """
    plus, minus = key.init
    for s in key.signs:
        if s == PLUS:
            plus = -plus
        else:
            minus = -minus
    return (plus, minus)


def evaluate_path(key: PathSegmentKey, times: Sequence[float], T: float, tau: float) -> Tuple[int, int]:
    """Pair state of the segment at window time tau, right-continuous at flips."""
    if not 0.0 <= tau < T:
        raise ValueError(f"tau must lie in [0, T), got tau={tau}, T={T}")
    if len(times) != key.flips:
        raise ValueError("times must have one entry per flip")
    plus, minus = key.init
    elapsed = 0.0
    for gap, s in zip(times, key.signs):
        elapsed += gap
        if tau < elapsed:
            break
        if s == PLUS:
            plus = -plus
        else:
            minus = -minus
    return (plus, minus)


def _simplex_indices(n: int, dim: int):
    """Yield multi-indices with sum <= n - 1 in lexicographic order."""

    def rec(prefix, remaining, budget):
        if remaining == 0:
            yield prefix
            return
        for v in range(budget + 1):
            yield from rec(prefix + (v,), remaining - 1, budget - v)

    yield from rec((), dim, n - 1)


class SimplexGrid:
    """Uniform grid on the D-simplex: multi-indices with sum <= N - 1.

    ``points`` is an ``(n_points, D)`` integer array in lexicographic
    order; ``index_of`` inverts it.  ``D = 0`` yields a single empty
    point (the segment is then fully determined by its initial pair).
    """

    def __init__(self, n: int, dim: int):
        if n < 1:
            raise ValueError(f"n must be >= 1, got {n}")
        if dim < 0:
            raise ValueError(f"dim must be >= 0, got {dim}")
        self.n = n
        self.dim = dim
        if dim == 0:
            pts = np.zeros((1, 0), dtype=np.int64)
        else:
            pts = np.array(list(_simplex_indices(n, dim)), dtype=np.int64)
        self.points = pts
        self._rank = {tuple(int(v) for v in row): i for i, row in enumerate(pts)}

    def __len__(self) -> int:
        return len(self.points)

    def index_of(self, multi_index) -> int:
        """Flat lexicographic index of a multi-index; KeyError if off-grid."""
        return self._rank[tuple(int(v) for v in multi_index)]

    def lookup_table(self) -> np.ndarray:
        """Dense (n,)*dim int array mapping multi-index -> flat index (-1 off-grid)."""
        table = np.full((self.n,) * self.dim, -1, dtype=np.int64)
        if self.dim == 0:
            return table  # 0-d array, unused
        table[tuple(self.points.T)] = np.arange(len(self.points))
        return table


def enumerate_grid(N: int, D: int) -> SimplexGrid:
    """Grid points of the D-simplex at resolution N (sum of indices <= N - 1)."""
    return SimplexGrid(N, D)


def grid_cardinality(N: int, D: int) -> int:
    """Number of stored grid points: binomial(N - 1 + D, D)."""
    return math.comb(N - 1 + D, D)


def ndof(N: int, Dmax: int, states: int = 4) -> int:
    """Published degree-of-freedom count for the PDE solver's storage:

        N_dof = states * sum_{D=0}^{Dmax} 2^D binomial(N + D, D).

    Note this accounting uses binomial(N + D, D) per simplex while the
    stored grid holds binomial(N - 1 + D, D) points (the hypotenuse layer
    carries no unknowns); both totals are reported by the harness.
    """
    if N < 1 or Dmax < 0:
        raise ValueError("require N >= 1 and Dmax >= 0")
    return states * sum(2**D * math.comb(N + D, D) for D in range(Dmax + 1))


@dataclass
class MemoryReport:
    """Storage comparison between the PDE solver and tensor propagation."""

    debpi_dof: int
    quapi_dof: int
    ratio: float

    def to_json(self) -> str:
        return json.dumps(
            {"debpi_dof": self.debpi_dof, "quapi_dof": self.quapi_dof, "ratio": self.ratio}
        )
