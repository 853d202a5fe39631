"""Decomposition of doubly stochastic matrices into permutation mixtures.

Birkhoff's theorem says every doubly stochastic matrix is a convex
combination of permutation matrices, and at most (N-1)^2 + 1 of them are
needed.  ``decompose`` extracts terms greedily: find a perfect matching
on the entries still above tolerance, peel off the minimum matched entry
as the term weight, and repeat.  Greedy extraction alone can exceed the
term bound on dense matrices, so a reduction pass then merges affinely
dependent terms (doubly stochastic matrices form an affine space of
dimension (N-1)^2, so any larger set of permutations is dependent) until
the bound holds.

A decomposition is the sampleable form of a probabilistic ranking: draw
term i with probability theta_i and show its ranking.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import MatrixLike, as_matrix, permutation_matrix, stochastic_violation

__all__ = ["BvnTerm", "BvnDecomposition", "decompose", "reconstruct", "term_bound"]

DEFAULT_MATCHING_TOLERANCE = 1e-7

# dependent-term weights below this are treated as eliminated
_DROP_EPS = 1e-14


def term_bound(n: int) -> int:
    """Maximum number of terms any decomposition may need."""
    return (n - 1) ** 2 + 1


@dataclass(frozen=True, eq=False)
class BvnTerm:
    """One mixture component: weight ``theta`` and the ranking it shows.

    ``ranking[j]`` is the item placed at rank j.
    """

    theta: float
    ranking: np.ndarray

    def __post_init__(self) -> None:
        if not 0.0 < self.theta <= 1.0:
            raise ValueError(f"theta must lie in (0, 1], got {self.theta}")
        r = np.asarray(self.ranking, dtype=int).copy()
        if r.ndim != 1 or not np.array_equal(np.sort(r), np.arange(r.size)):
            raise ValueError(f"not a permutation of 0..{r.size - 1}: {self.ranking}")
        r.flags.writeable = False
        object.__setattr__(self, "ranking", r)
        object.__setattr__(self, "theta", float(self.theta))

    def matrix(self) -> np.ndarray:
        return permutation_matrix(self.ranking)


@dataclass(frozen=True, eq=False)
class BvnDecomposition:
    """Convex combination of permutation matrices.

    ``residual`` is the per-row mass the extraction left behind (certified
    below the matching tolerance).
    """

    terms: tuple[BvnTerm, ...]
    residual: float = 0.0

    def __post_init__(self) -> None:
        if not self.terms:
            raise ValueError("a decomposition needs at least one term")
        n = self.terms[0].ranking.size
        if any(t.ranking.size != n for t in self.terms):
            raise ValueError("terms have inconsistent ranking lengths")
        if len(self.terms) > term_bound(n):
            raise ValueError(
                f"{len(self.terms)} terms exceed the bound {term_bound(n)} for n={n}"
            )
        keys = {tuple(t.ranking.tolist()) for t in self.terms}
        if len(keys) != len(self.terms):
            raise ValueError("the same permutation appears in more than one term")
        total = float(sum(t.theta for t in self.terms))
        if not 1.0 - 1e-6 <= total <= 1.0 + 1e-6:
            raise ValueError(f"term weights sum to {total}, expected 1 within 1e-6")
        if self.residual < 0.0:
            raise ValueError(f"residual must be non-negative, got {self.residual}")
        object.__setattr__(self, "terms", tuple(self.terms))

    @property
    def n(self) -> int:
        return self.terms[0].ranking.size

    @property
    def thetas(self) -> np.ndarray:
        return np.array([t.theta for t in self.terms])


def _perfect_matching(mask: np.ndarray) -> np.ndarray | None:
    """Kuhn's augmenting-path matching on the bipartite graph ``mask``.

    Columns are matched to rows in ascending order, scanning candidate
    rows in ascending order, so the result is deterministic with the
    lowest usable row index preferred.  Returns row_of_col, or None when
    no perfect matching exists.
    """
    n = mask.shape[0]
    row_of_col = np.full(n, -1, dtype=int)
    col_of_row = np.full(n, -1, dtype=int)
    candidates = [np.flatnonzero(mask[:, j]) for j in range(n)]

    def augment(j: int, visited: np.ndarray) -> bool:
        for i in candidates[j]:
            if visited[i]:
                continue
            visited[i] = True
            if col_of_row[i] < 0 or augment(col_of_row[i], visited):
                col_of_row[i] = j
                row_of_col[j] = i
                return True
        return False

    for j in range(n):
        if not augment(j, np.zeros(n, dtype=bool)):
            return None
    return row_of_col


def _affine_coordinates(rankings: list[np.ndarray], n: int) -> np.ndarray:
    """Coordinates of each permutation in the doubly stochastic affine space.

    The leading (n-1) x (n-1) block determines a doubly stochastic matrix,
    so that block plus a constant-1 component (encoding that coefficients
    sum to zero) captures affine dependence exactly.
    """
    coords = np.ones((len(rankings), (n - 1) ** 2 + 1))
    for k, ranking in enumerate(rankings):
        block = permutation_matrix(ranking)[: n - 1, : n - 1]
        coords[k, :-1] = block.ravel()
    return coords


def _eliminate_dependent_term(
    thetas: np.ndarray, rankings: list[np.ndarray], n: int
) -> tuple[np.ndarray, list[np.ndarray]]:
    """Zero out at least one term weight without changing the mixture.

    Finds coefficients lam with sum(lam) = 0 and sum(lam_i * P_i) = 0,
    then moves theta along -lam until the first weight hits zero.  Valid
    whenever the number of terms exceeds the affine dimension bound.
    """
    coords = _affine_coordinates(rankings, n)
    if len(rankings) <= coords.shape[1]:
        raise RuntimeError("term count within the affine dimension; nothing to eliminate")
    # null vector of coords^T: direction along which the mixture is flat
    _, _, vt = np.linalg.svd(coords.T, full_matrices=True)
    lam = vt[-1]
    if float(np.abs(coords.T @ lam).max()) > 1e-8:
        raise RuntimeError("no affine dependence found among decomposition terms")
    if not np.any(lam > 0.0):
        lam = -lam
    positive = lam > 1e-12 * float(np.abs(lam).max())
    steps = thetas[positive] / lam[positive]
    t = float(steps.min())
    new_thetas = thetas - t * lam
    new_thetas[np.abs(new_thetas) <= _DROP_EPS] = 0.0
    if float(new_thetas.min()) < -1e-9:
        raise RuntimeError("dependence elimination produced a negative weight")
    keep = new_thetas > 0.0
    if keep.all():
        raise RuntimeError("dependence elimination failed to drop a term")
    return new_thetas[keep], [r for r, k in zip(rankings, keep) if k]


def decompose(P: MatrixLike, tol: float = DEFAULT_MATCHING_TOLERANCE) -> BvnDecomposition:
    """Decompose ``P`` into a convex combination of permutation matrices.

    Entries at or below ``tol`` are treated as structural zeros when
    building the matching graph; extraction stops once every row's
    remaining mass is below ``tol``.  Terms come back sorted by weight
    descending (ties broken by ranking, lexicographically).
    """
    m = as_matrix(P).astype(float, copy=True)
    n = m.shape[0]
    violation = stochastic_violation(m)
    if violation > tol:
        raise ValueError(
            f"matrix is not doubly stochastic within {tol:g} "
            f"(worst deviation {violation:.3e})"
        )

    cols = np.arange(n)
    weights: dict[tuple[int, ...], float] = {}
    while float(m.sum(axis=1).max()) >= tol:
        row_of_col = _perfect_matching(m > tol)
        if row_of_col is None:
            raise RuntimeError(
                f"no perfect matching on entries above {tol:g} while "
                f"{float(m.sum(axis=1).max()):.3e} mass remains per row; "
                "the input was not doubly stochastic within tolerance"
            )
        theta = min(float(m[row_of_col, cols].min()), 1.0)
        m[row_of_col, cols] -= theta
        key = tuple(int(i) for i in row_of_col)
        weights[key] = weights.get(key, 0.0) + theta
    residual = max(float(m.sum(axis=1).max()), 0.0)

    thetas = np.array(list(weights.values()))
    rankings = [np.array(key, dtype=int) for key in weights]
    while thetas.size > term_bound(n):
        thetas, rankings = _eliminate_dependent_term(thetas, rankings, n)

    order = sorted(
        range(thetas.size), key=lambda k: (-thetas[k], tuple(rankings[k].tolist()))
    )
    terms = tuple(
        BvnTerm(theta=min(float(thetas[k]), 1.0), ranking=rankings[k]) for k in order
    )
    return BvnDecomposition(terms=terms, residual=residual)


def reconstruct(decomposition: BvnDecomposition, n: int | None = None) -> np.ndarray:
    """Dense matrix ``sum(theta_i * Pi_i)`` of a decomposition."""
    size = decomposition.n
    if n is not None and n != size:
        raise ValueError(f"decomposition is over {size} items, not {n}")
    out = np.zeros((size, size))
    cols = np.arange(size)
    for term in decomposition.terms:
        out[term.ranking, cols] += term.theta
    return out
