"""Coined unitary quantum walks on a cycle of vertices.

Basis convention, used everywhere: outcome/basis index = c*N + v for coin
c in {R=0, L=1} and vertex v in 0..N-1 (coin-major). Vertex arithmetic is
mod N with nonnegative remainder.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .entropy import Partition
from .errors import NumericError, ValidationError
from .quantum import (DensityState, Instrument, Operator, as_operator, coherent_instrument,
                      lvn_instrument, pure_state)

UNITARY_TOL = 1e-10
POWER_UNITARY_TOL = 1e-8
RECONSTRUCTION_TOL = 1e-12

COIN_R = 0
COIN_L = 1
COIN_NAMES = "RL"


def basis_index(c: int, v: int, N: int) -> int:
    """Index of |c,v> in the coin-major computational basis."""
    if c not in (COIN_R, COIN_L) or not 0 <= v < N:
        raise ValidationError(f"no basis state (c={c}, v={v}) for N={N}")
    return c * N + v


def basis_label(index: int, N: int) -> str:
    c, v = divmod(index, N)
    return f"{COIN_NAMES[c]}{v}"


@dataclass(frozen=True)
class ShiftPermutation:
    """A permutation sigma of the coin-vertex indices, acting as |e> -> |sigma(e)>."""

    sigma: tuple[int, ...]
    coin_count: int
    vertex_count: int

    def __post_init__(self):
        n = self.coin_count * self.vertex_count
        if len(self.sigma) != n or sorted(self.sigma) != list(range(n)):
            raise ValidationError(
                f"sigma must be a permutation of range({n})")

    @property
    def dim(self) -> int:
        return self.coin_count * self.vertex_count

    @property
    def coin_preserving(self) -> bool:
        """True iff sigma never changes the coin component."""
        N = self.vertex_count
        return all(self.sigma[c * N + v] // N == c
                   for c in range(self.coin_count) for v in range(N))

    def operator(self) -> Operator:
        """The permutation matrix S = sum |sigma(e)><e|."""
        S = np.zeros((self.dim, self.dim), dtype=complex)
        for e, target in enumerate(self.sigma):
            S[target, e] = 1.0
        return S


def hadamard_coin() -> Operator:
    """The 2x2 Hadamard coin (1/sqrt2) [[1,1],[1,-1]]."""
    return np.array([[1.0, 1.0], [1.0, -1.0]], dtype=complex) / math.sqrt(2.0)


def integer_shift(N: int) -> ShiftPermutation:
    """Coin-preserving shift: (R,n) -> (R,n+1) and (L,n) -> (L,n-1), mod N."""
    if N < 2:
        raise ValidationError(f"integer shift needs N >= 2, got {N}")
    sigma = [0] * (2 * N)
    for v in range(N):
        sigma[basis_index(COIN_R, v, N)] = basis_index(COIN_R, (v + 1) % N, N)
        sigma[basis_index(COIN_L, v, N)] = basis_index(COIN_L, (v - 1) % N, N)
    return ShiftPermutation(tuple(sigma), coin_count=2, vertex_count=N)


@dataclass(frozen=True)
class CoinedWalk:
    """The walk unitary U = S (sum_v U_v ⊗ |v><v|) with its building blocks."""

    unitary: Operator
    shift: ShiftPermutation
    coins: tuple[Operator, ...]
    coin_preserving: bool
    space_homogeneous: bool

    @property
    def dim(self) -> int:
        return self.unitary.shape[0]

    @property
    def vertex_count(self) -> int:
        return self.shift.vertex_count


def coined_walk(shift: ShiftPermutation, coins) -> CoinedWalk:
    """Assemble and validate a coined walk from its shift and per-vertex coins."""
    coins = tuple(as_operator(c) for c in coins)
    N = shift.vertex_count
    k = shift.coin_count
    if len(coins) != N:
        raise ValidationError(f"need one coin per vertex: got {len(coins)} for {N} vertices")
    for v, c in enumerate(coins):
        if c.shape[0] != k:
            raise ValidationError(f"coin at vertex {v} has dimension {c.shape[0]}, expected {k}")
        res = float(np.abs(c.conj().T @ c - np.eye(k)).max())
        if res > UNITARY_TOL:
            raise ValidationError(f"coin at vertex {v} not unitary: residual {res:.3e}")
    dim = shift.dim
    coin_layer = np.zeros((dim, dim), dtype=complex)
    for v in range(N):
        for c1 in range(k):
            for c2 in range(k):
                coin_layer[c1 * N + v, c2 * N + v] = coins[v][c1, c2]
    U = shift.operator() @ coin_layer
    res = float(np.abs(U.conj().T @ U - np.eye(dim)).max())
    if res > UNITARY_TOL:
        raise NumericError(f"assembled walk not unitary: residual {res:.3e}")
    homogeneous = all(np.abs(c - coins[0]).max() <= RECONSTRUCTION_TOL for c in coins)
    return CoinedWalk(unitary=U, shift=shift, coins=coins,
                      coin_preserving=shift.coin_preserving,
                      space_homogeneous=homogeneous)


def hadamard_walk(N: int) -> CoinedWalk:
    """The Hadamard walk on the N-cycle: integer shift with Hadamard coins."""
    if N < 2:
        raise ValidationError(f"Hadamard walk needs N >= 2, got {N}")
    return coined_walk(integer_shift(N), (hadamard_coin(),) * N)


def unitary_power(w: CoinedWalk, m: int) -> Operator:
    """U^m by repeated multiplication, with unitarity revalidated."""
    if m < 1:
        raise ValidationError(f"unitary power needs m >= 1, got {m}")
    U = w.unitary
    out = U.copy()
    for _ in range(m - 1):
        out = U @ out
    res = float(np.abs(out.conj().T @ out - np.eye(w.dim)).max())
    if res > POWER_UNITARY_TOL:
        raise NumericError(f"unitarity lost after powering: residual {res:.3e}")
    return out


def eigencheck(u: Operator, v) -> complex:
    """Return lambda with u v = lambda v, reading lambda off the largest component.

    Raises NumericError with the residual when v is not an eigenvector.
    """
    u = as_operator(u)
    vec = np.asarray(v, dtype=complex).reshape(-1)
    norm = float(np.linalg.norm(vec))
    if norm == 0.0:
        raise ValidationError("eigencheck on the zero vector")
    vec = vec / norm
    image = u @ vec
    pivot = int(np.argmax(np.abs(vec)))
    lam = complex(image[pivot] / vec[pivot])
    residual = float(np.abs(image - lam * vec).max())
    if residual > 1e-8:
        raise NumericError(f"not an eigenvector: residual {residual:.3e} (tol 1e-08)")
    return lam


# Measurement setups for a cycle walk, in the coin-major basis convention.

def coin_vertex_labels(N: int) -> tuple[str, ...]:
    return tuple(basis_label(e, N) for e in range(2 * N))


def coin_vertex_instrument(N: int) -> Instrument:
    """Coherent-states instrument over the computational basis |c,v>."""
    if N < 1:
        raise ValidationError(f"need N >= 1, got {N}")
    return coherent_instrument(list(np.eye(2 * N, dtype=complex)),
                               labels=coin_vertex_labels(N))


def position_instrument(N: int) -> Instrument:
    """Rank-2 position instrument P_v = 1_C ⊗ |v><v| with one outcome per vertex."""
    if N < 1:
        raise ValidationError(f"need N >= 1, got {N}")
    projections = []
    for v in range(N):
        p = np.zeros((2 * N, 2 * N), dtype=complex)
        p[basis_index(COIN_R, v, N), basis_index(COIN_R, v, N)] = 1.0
        p[basis_index(COIN_L, v, N), basis_index(COIN_L, v, N)] = 1.0
        projections.append(p)
    return lvn_instrument(projections, labels=[f"v{v}" for v in range(N)])


def vertex_partition(N: int) -> Partition:
    """Partition of the coin-vertex outcomes grouping both coins per vertex."""
    if N < 1:
        raise ValidationError(f"need N >= 1, got {N}")
    blocks = [[basis_index(COIN_R, v, N), basis_index(COIN_L, v, N)] for v in range(N)]
    return Partition(blocks, labels=[f"v{v}" for v in range(N)], size=2 * N)


def hadamard_eigenstate(N: int) -> DensityState:
    """Pure state from the walk eigenvector ((1+sqrt2)|R> + |L>) ⊗ sum_v |v>."""
    if N < 1:
        raise ValidationError(f"need N >= 1, got {N}")
    vec = np.zeros(2 * N, dtype=complex)
    for v in range(N):
        vec[basis_index(COIN_R, v, N)] = 1.0 + math.sqrt(2.0)
        vec[basis_index(COIN_L, v, N)] = 1.0
    return pure_state(vec)
