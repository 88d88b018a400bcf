"""Classical baselines: Markov chains, entropy rate, KS entropy of finite maps.

Transition matrices here are **column-stochastic**: `entries[x, y]` is the
probability of moving from source `y` to target `x`, so each column sums
to 1. Most libraries use the row convention; the column convention keeps
p_{x,y} indexing direct.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .entropy import ConvergenceReport, Partition, ProbVector, eta, join, limit_estimate
from .errors import NumericError, ResourceLimitError, ValidationError

COLUMN_SUM_TOL = 1e-12
STATIONARY_TOL = 1e-12
STATIONARY_MAX_ITER = 100_000
DEFAULT_PATH_BUDGET = 10_000_000


class TransitionMatrix:
    """Column-stochastic transition matrix over states 0..size-1."""

    __slots__ = ("entries", "size")

    def __init__(self, entries):
        arr = np.asarray(entries, dtype=float)
        if arr.ndim != 2 or arr.shape[0] != arr.shape[1] or arr.shape[0] < 1:
            raise ValidationError(f"transition matrix must be square, got shape {arr.shape}")
        if not np.all(np.isfinite(arr)):
            raise ValidationError("transition matrix has non-finite entries")
        if arr.min() < -COLUMN_SUM_TOL or arr.max() > 1.0 + COLUMN_SUM_TOL:
            raise ValidationError(
                f"transition entries outside [0,1]: min={arr.min()!r}, max={arr.max()!r}")
        colsums = arr.sum(axis=0)
        worst = float(np.abs(colsums - 1.0).max())
        if worst > COLUMN_SUM_TOL:
            raise ValidationError(
                f"columns must sum to 1, worst deviation {worst:.3e} (tol {COLUMN_SUM_TOL:g})")
        arr = np.clip(arr, 0.0, 1.0)
        arr.flags.writeable = False
        self.entries = arr
        self.size = arr.shape[0]

    def __repr__(self) -> str:
        return f"TransitionMatrix(size={self.size})"


@dataclass(frozen=True)
class FiniteMap:
    """A map f on states 0..n-1, stored as image[i] = f(i)."""

    image: tuple[int, ...]

    def __post_init__(self):
        n = len(self.image)
        if n == 0 or any(not 0 <= v < n for v in self.image):
            raise ValidationError("finite map image values must be valid state indices")

    @property
    def size(self) -> int:
        return len(self.image)

    def iterate(self, k: int) -> "FiniteMap":
        """k-fold composition f^k (k >= 0)."""
        if k < 0:
            raise ValidationError(f"iterate needs k >= 0, got {k}")
        current = tuple(range(self.size))
        for _ in range(k):
            current = tuple(self.image[i] for i in current)
        return FiniteMap(current)


def cycle_walk(N: int) -> TransitionMatrix:
    """Unbiased random walk on the N-cycle: p_{v+1,v} = p_{v-1,v} = 1/2 (mod N)."""
    if N < 3:
        raise ValidationError(f"cycle walk needs N >= 3, got {N}")
    P = np.zeros((N, N))
    for v in range(N):
        P[(v + 1) % N, v] += 0.5
        P[(v - 1) % N, v] += 0.5
    return TransitionMatrix(P)


def matrix_power(P: TransitionMatrix, m: int) -> TransitionMatrix:
    """m-step transition matrix P^m (m >= 1)."""
    if m < 1:
        raise ValidationError(f"matrix power needs m >= 1, got {m}")
    return TransitionMatrix(np.linalg.matrix_power(P.entries, m))


def stationary_distribution(P: TransitionMatrix,
                            max_iter: int = STATIONARY_MAX_ITER,
                            tol: float = STATIONARY_TOL) -> ProbVector:
    """A distribution mu with P mu = mu, found by power iteration from uniform.

    Periodic chains can cycle instead of settling, so each step also tests the
    average of two consecutive iterates. If the iteration cap is reached an
    eigenvector solve is attempted before giving up.
    """
    A = P.entries
    n = P.size
    mu = np.full(n, 1.0 / n)
    for _ in range(max_iter):
        nxt = A @ mu
        if np.abs(nxt - mu).sum() < tol:
            return ProbVector(nxt, tol=1e-9)
        avg = 0.5 * (mu + nxt)
        if np.abs(A @ avg - avg).sum() < tol:
            return ProbVector(avg, tol=1e-9)
        mu = nxt

    vals, vecs = np.linalg.eig(A)
    best = int(np.argmin(np.abs(vals - 1.0)))
    vec = np.real(vecs[:, best])
    if abs(vec.sum()) < 1e-300:
        raise NumericError("stationary eigenvector has zero total mass")
    vec = vec / vec.sum()
    residual = float(np.abs(A @ vec - vec).max())
    if residual > 1e-10 or vec.min() < -1e-9:
        raise NumericError(
            f"no stationary distribution found after {max_iter} iterations; "
            f"eigen-solve residual {residual:.3e}")
    return ProbVector(np.clip(vec, 0.0, None) / np.clip(vec, 0.0, None).sum(), tol=1e-9)


def _column_entropies(P: TransitionMatrix) -> np.ndarray:
    return np.array([sum(eta(x) for x in P.entries[:, y]) for y in range(P.size)])


def markov_entropy(P: TransitionMatrix, mu: ProbVector) -> float:
    """Entropy of P under mu: sum_y mu_y sum_x eta(p_{x,y}), in nats."""
    if len(mu) != P.size:
        raise ValidationError(f"distribution of length {len(mu)} for {P.size} states")
    return float(mu.entries @ _column_entropies(P))


def entropy_rate(P: TransitionMatrix, mu0: ProbVector, n_max: int, tol: float,
                 window: int = 3) -> ConvergenceReport:
    """Conditional-entropy sequence of the Markov process started at mu0.

    Entry n is sum_y (P^n mu0)_y sum_x eta(p_{x,y}); the limit (when it
    exists) is the entropy rate.
    """
    if len(mu0) != P.size:
        raise ValidationError(f"distribution of length {len(mu0)} for {P.size} states")
    if n_max < 0:
        raise ValidationError(f"n_max must be >= 0, got {n_max}")
    col_h = _column_entropies(P)
    seq = []
    mu = mu0.entries.copy()
    for _ in range(n_max + 1):
        seq.append(float(col_h @ mu))
        mu = P.entries @ mu
    return limit_estimate(seq, tol=tol, window=window)


def _preimage_partition(f: FiniteMap, k: int, c: Partition) -> Partition:
    """f^{-k}(C): outcomes grouped by which block f^k lands them in."""
    fk = f.iterate(k).image
    blocks: dict[int, list[int]] = {}
    for i, target in enumerate(fk):
        blocks.setdefault(c.block_index_of(target), []).append(i)
    keys = sorted(blocks)
    return Partition([blocks[b] for b in keys],
                     labels=[c.labels[b] for b in keys], size=f.size)


def ks_estimate(f: FiniteMap, mu: ProbVector, c: Partition, n: int) -> float:
    """(1/n) H(join of f^{-k}(C), k=0..n-1): the depth-n KS entropy estimate."""
    if not (f.size == len(mu) == c.size):
        raise ValidationError(
            f"map ({f.size}), measure ({len(mu)}) and partition ({c.size}) "
            "must share one state set")
    if n < 1:
        raise ValidationError(f"ks estimate needs n >= 1, got {n}")
    joined = join([_preimage_partition(f, k, c) for k in range(n)])
    block_masses = [sum(mu[i] for i in block) for block in joined.blocks]
    return float(sum(eta(w) for w in block_masses)) / n


def process_joint_entropy(P: TransitionMatrix, mu0: ProbVector, n: int,
                          path_budget: int = DEFAULT_PATH_BUDGET) -> float:
    """H(X_0,...,X_n) by exact enumeration of nonzero-probability paths.

    Zero-probability transitions are never expanded, so the enumeration is
    exact. Raises ResourceLimitError when more than `path_budget` weighted
    paths would be visited.
    """
    if len(mu0) != P.size:
        raise ValidationError(f"distribution of length {len(mu0)} for {P.size} states")
    if n < 0:
        raise ValidationError(f"process entropy needs n >= 0, got {n}")
    successors = [[(x, P.entries[x, y]) for x in range(P.size) if P.entries[x, y] > 0.0]
                  for y in range(P.size)]
    total = 0.0
    visited = 0
    stack = [(y, float(mu0[y]), 0) for y in range(P.size) if mu0[y] > 0.0]
    while stack:
        state, weight, depth = stack.pop()
        if depth == n:
            visited += 1
            if visited > path_budget:
                raise ResourceLimitError(
                    f"path enumeration exceeded the budget of {path_budget} paths")
            total += eta(weight)
            continue
        for x, p in successors[state]:
            stack.append((x, weight * p, depth + 1))
    return total
