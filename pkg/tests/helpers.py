"""Shared generators and brute-force oracles for the test suite."""

from __future__ import annotations

import numpy as np

from szwalk import (DensityState, Instrument, JointDistribution, Partition, ProbVector,
                    coherent_instrument, cylinder_probability, eta, general_instrument,
                    lvn_instrument)


def random_unitary(rng: np.random.Generator, dim: int) -> np.ndarray:
    z = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    q, r = np.linalg.qr(z)
    phases = np.diagonal(r) / np.abs(np.diagonal(r))
    return q * phases


def random_density(rng: np.random.Generator, dim: int) -> DensityState:
    z = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    m = z @ z.conj().T
    return DensityState(m / np.real(np.trace(m)))


def random_prob_vector(rng: np.random.Generator, n: int) -> ProbVector:
    w = rng.random(n) + 1e-3
    return ProbVector(w / w.sum())


def random_blocks(rng: np.random.Generator, n: int, n_blocks: int) -> list[list[int]]:
    """Split 0..n-1 into n_blocks non-empty groups, uniformly shuffled."""
    idx = rng.permutation(n)
    cuts = np.sort(rng.choice(np.arange(1, n), size=n_blocks - 1, replace=False))
    return [list(map(int, part)) for part in np.split(idx, cuts)]


def random_partition(rng: np.random.Generator, n: int, n_blocks: int) -> Partition:
    return Partition(random_blocks(rng, n, n_blocks), size=n)


def coarsen(rng: np.random.Generator, p: Partition) -> Partition:
    """A random partition strictly coarser than or equal to p."""
    k = len(p.blocks)
    if k == 1:
        return p
    groups = random_blocks(rng, k, int(rng.integers(1, k)))
    merged = [[o for bi in group for o in p.blocks[bi]] for group in groups]
    return Partition(merged, size=p.size)


def random_coherent(rng: np.random.Generator, dim: int) -> Instrument:
    return coherent_instrument(list(random_unitary(rng, dim).T))


def random_lvn(rng: np.random.Generator, dim: int, n_outcomes: int) -> Instrument:
    basis = random_unitary(rng, dim).T
    groups = random_blocks(rng, dim, n_outcomes)
    projections = []
    for group in groups:
        p = np.zeros((dim, dim), dtype=complex)
        for i in group:
            p += np.outer(basis[i], basis[i].conj())
        projections.append(p)
    return lvn_instrument(projections)


def random_general(rng: np.random.Generator, dim: int, n_outcomes: int) -> Instrument:
    gs = [rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
          for _ in range(n_outcomes)]
    total = sum(g.conj().T @ g for g in gs)
    vals, vecs = np.linalg.eigh(total)
    inv_sqrt = vecs @ np.diag(vals ** -0.5) @ vecs.conj().T
    return general_instrument([g @ inv_sqrt for g in gs])


def random_joint(rng: np.random.Generator, nc: int, nd: int) -> JointDistribution:
    w = rng.random((nc, nd)) ** 3
    w[rng.random((nc, nd)) < 0.25] = 0.0
    if w.sum() == 0.0:
        w[0, 0] = 1.0
    w /= w.sum()
    return JointDistribution({(c, d): w[c, d] for c in range(nc) for d in range(nd)
                              if w[c, d] > 0.0})


def cylinder_level_joints(walk_unitary, t, rho, partition, n_max, eps=1e-15):
    """Brute-force block-sequence joints at depths 0..n_max via cylinder_probability.

    Every probability is recomputed from scratch, independently of the
    trajectory engine's incremental evolution.
    """
    levels = []
    frontier = []
    for bi, block in enumerate(partition.blocks):
        w = cylinder_probability(walk_unitary, t, rho, [block])
        if w > eps:
            frontier.append((bi,))
    levels.append({seq: cylinder_probability(walk_unitary, t, rho,
                                             [partition.blocks[s] for s in seq])
                   for seq in frontier})
    for _ in range(n_max):
        new = []
        for seq in frontier:
            for bi in range(len(partition.blocks)):
                candidate = seq + (bi,)
                w = cylinder_probability(walk_unitary, t, rho,
                                         [partition.blocks[s] for s in candidate])
                if w > eps:
                    new.append(candidate)
        frontier = new
        levels.append({seq: cylinder_probability(walk_unitary, t, rho,
                                                 [partition.blocks[s] for s in seq])
                       for seq in frontier})
    return levels


def conditional_sequence_from_levels(levels) -> list[float]:
    """a_n from brute-force level joints via the chain rule H_n - H_{n-1}."""
    entropies = [sum(eta(w) for w in level.values()) for level in levels]
    return [entropies[0]] + [entropies[k] - entropies[k - 1] for k in range(1, len(entropies))]
