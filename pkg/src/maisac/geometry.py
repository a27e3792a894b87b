"""Candidate grids, one-hot placements, distances and minimum-distance accounting.

A movable-antenna array picks, for each of its elements, one position out of a
discrete candidate grid. Placements are represented as one index per element;
the equivalent one-hot selection matrix (candidates x elements) is available
for the dense matrix products used as test oracles.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np


@dataclass(frozen=True)
class CandidateGrid:
    """Discrete candidate positions (meters) for one movable-antenna array."""

    positions: np.ndarray  # (count, 2)
    spacing: float

    def __post_init__(self):
        pos = np.asarray(self.positions, dtype=float)
        if pos.ndim != 2 or pos.shape[1] != 2:
            raise ValueError("positions must be an (n, 2) array of coordinates")
        object.__setattr__(self, "positions", pos)
        uniq = {tuple(p) for p in pos}
        if len(uniq) != len(pos):
            raise ValueError("candidate positions must be distinct")

    @property
    def count(self) -> int:
        return len(self.positions)


def build_grid(count: int, spacing: float, origin=(0.0, 0.0), positions=None) -> CandidateGrid:
    """Square row-major grid anchored at `origin`, or an explicit coordinate list.

    position[k] = origin + ((k mod s) * spacing, (k // s) * spacing) with s = sqrt(count).
    """
    if positions is not None:
        return CandidateGrid(np.asarray(positions, dtype=float), spacing)
    if count <= 0:
        raise ValueError("count must be positive")
    side = int(round(np.sqrt(count)))
    if side * side != count:
        raise ValueError(
            f"count={count} is not a perfect square; pass explicit positions instead"
        )
    ox, oy = origin
    pos = np.array([(ox + (k % side) * spacing, oy + (k // side) * spacing) for k in range(count)])
    return CandidateGrid(pos, spacing)


def distance_matrix(grid: CandidateGrid) -> np.ndarray:
    """Euclidean distances between all candidate pairs: entry (i, j) = ||p_i - p_j||."""
    p = grid.positions
    return np.linalg.norm(p[:, None, :] - p[None, :, :], axis=2)


@dataclass(frozen=True)
class Placement:
    """One candidate index per element; one-hot columns by construction."""

    indices: tuple
    n_candidates: int

    def __post_init__(self):
        idx = tuple(int(i) for i in self.indices)
        object.__setattr__(self, "indices", idx)
        if any(i < 0 or i >= self.n_candidates for i in idx):
            raise ValueError("placement index out of range")

    @property
    def n_elements(self) -> int:
        return len(self.indices)

    def one_hot(self) -> np.ndarray:
        """(n_candidates, n_elements) binary selection matrix; columns sum to 1."""
        b = np.zeros((self.n_candidates, self.n_elements))
        for col, i in enumerate(self.indices):
            b[i, col] = 1.0
        return b

    def block_matrix(self) -> np.ndarray:
        """Block-diagonal selection of shape (n_candidates*n_elements, n_elements).

        Column j holds the one-hot vector of element j in its own block of
        n_candidates rows, matching the dense assembly product used for G and H.
        """
        m, n = self.n_candidates, self.n_elements
        b = np.zeros((m * n, n))
        for col, i in enumerate(self.indices):
            b[col * m + i, col] = 1.0
        return b

    def positions(self, grid: CandidateGrid) -> np.ndarray:
        return grid.positions[list(self.indices)]


def placement_from_one_hot(matrix: np.ndarray) -> Placement:
    """Validate a binary selection matrix and convert to index form."""
    b = np.asarray(matrix)
    if not np.all((b == 0) | (b == 1)):
        raise ValueError("selection entries must be 0 or 1")
    if not np.all(b.sum(axis=0) == 1):
        raise ValueError("each element column must select exactly one candidate")
    return Placement(tuple(int(np.argmax(b[:, j])) for j in range(b.shape[1])), b.shape[0])


def pairwise_element_distance(p: Placement, dmat: np.ndarray, i: int, j: int) -> float:
    """Distance b_i^T D b_j between the candidates selected by elements i and j."""
    if i == j:
        raise ValueError("element indices must differ")
    return float(dmat[p.indices[i], p.indices[j]])


def _violating_elements(p: Placement, dmat: np.ndarray, d_min: float) -> set:
    bad = set()
    n = p.n_elements
    for i in range(n):
        for j in range(i + 1, n):
            if dmat[p.indices[i], p.indices[j]] < d_min:
                bad.add(i)
                bad.add(j)
    return bad


def violation_count(p_r: Placement, p_t: Placement, d_r: np.ndarray, d_t: np.ndarray,
                    d_min: float) -> int:
    """Number of elements involved in at least one within-array pair closer than d_min.

    Co-located elements count on both sides of the pair; cross-array distances
    are unconstrained.
    """
    return len(_violating_elements(p_r, d_r, d_min)) + len(_violating_elements(p_t, d_t, d_min))


def is_feasible(p_r: Placement, p_t: Placement, d_r: np.ndarray, d_t: np.ndarray,
                d_min: float) -> bool:
    return violation_count(p_r, p_t, d_r, d_t, d_min) == 0


def fixed_linear_placement(n_elements: int, grid: CandidateGrid) -> Placement:
    """Baseline: elements pinned to the first row of the grid (candidates 0..n-1)."""
    if n_elements > grid.count:
        raise ValueError("more elements than candidates")
    return Placement(tuple(range(n_elements)), grid.count)


def random_feasible_placement(rng: np.random.Generator, grid: CandidateGrid,
                              n_elements: int, d_min: float,
                              dmat: np.ndarray | None = None,
                              max_tries: int = 10000) -> Placement:
    """Uniformly drawn distinct candidates respecting d_min, by rejection."""
    if dmat is None:
        dmat = distance_matrix(grid)
    if n_elements > grid.count:
        raise ValueError("more elements than candidates")
    for _ in range(max_tries):
        idx = rng.choice(grid.count, size=n_elements, replace=False)
        p = Placement(tuple(int(i) for i in idx), grid.count)
        if not _violating_elements(p, dmat, d_min):
            return p
    raise ValueError(
        f"no feasible placement found for {n_elements} elements with d_min={d_min}"
    )
