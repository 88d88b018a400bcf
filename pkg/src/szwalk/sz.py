"""SZ entropy of measured quantum dynamics via exact trajectory enumeration.

The engine grows the tree of measurement-outcome block sequences one time
step at a time: every branch carries the unnormalized post-measurement
operator T(A_n)∘Θ∘...∘T(A_0)ρ, whose trace is the branch probability.
The entropy estimate is the conditional-entropy sequence
a_n = H(X_n | X_0..X_{n-1}), whose limit (when it exists) equals the
entropy rate of the outcome process.

Two exact reductions keep the tree small:

* branches landing in the same block whose trace-normalized conditional
  operators agree are merged (the normalized operator determines every
  future conditional distribution, so a_n is unchanged);
* branches below `prune_eps` (numerically zero) are dropped, with their
  mass tracked in `pruned_mass`.
"""

from __future__ import annotations

import warnings
from dataclasses import asdict, dataclass
from typing import Sequence

import numpy as np

from .classical import TransitionMatrix
from .entropy import ConvergenceReport, Partition, ProbVector, eta, limit_estimate
from .errors import (AccuracyError, NumericError, ResourceLimitError,
                     UnsupportedConfigurationError, ValidationError)
from .quantum import (DensityState, Instrument, InstrumentKind, Operator, as_operator,
                      apply_instrument, min_eigenvalue, outcome_pmf)

NORMALIZATION_TOL = 1e-8
PRUNED_MASS_LIMIT = 1e-6


@dataclass(frozen=True)
class RunOptions:
    """Knobs for the trajectory engine (defaults suit the desk-scale walks)."""

    n_max: int = 25
    tol: float = 1e-7
    window: int = 3
    prune_eps: float = 1e-14
    merge_tol: float = 1e-10
    merge: bool = True
    track_classes: bool = False
    strict: bool = False
    branch_budget: int = 1_000_000
    min_steps: int = 0


@dataclass(frozen=True)
class RunStats:
    """Terminal-run bookkeeping for one branch.

    `constant` marks an all-one-block sequence; `parity` is the length of the
    terminal constant run mod 2; `entry_block` is the block visited just
    before that run started (None while constant).
    """

    constant: bool
    parity: int
    entry_block: int | None

    def extend(self, same_block: bool, previous_block: int) -> "RunStats":
        if same_block:
            return RunStats(self.constant, self.parity ^ 1, self.entry_block)
        return RunStats(False, 0, previous_block)


@dataclass
class TrajectoryBranch:
    """One live node of the trajectory tree."""

    last_block: int
    weight: float
    conditional_op: np.ndarray
    block_sequence: tuple[int, ...] | None = None
    stats: RunStats | None = None

    def validate(self, tol: float = 1e-10) -> None:
        tr = float(np.real(np.trace(self.conditional_op)))
        if abs(tr - self.weight) > tol:
            raise NumericError(
                f"branch weight {self.weight!r} vs trace {tr!r} differ by {abs(tr - self.weight):.3e}")
        lam = min_eigenvalue(self.conditional_op)
        if lam < -1e-9:
            raise NumericError(f"branch operator not PSD: min eigenvalue {lam:.3e}")


@dataclass(frozen=True)
class ClassMasses:
    """Probability mass by terminal-run class: constant / even / odd."""

    constant: float
    even: float
    odd: float


@dataclass(frozen=True)
class DepthRecord:
    depth: int
    a_n: float
    cesaro: float
    branch_count: int
    merged_count: int
    pruned_mass: float
    classes: ClassMasses | None = None


@dataclass
class SZRun:
    """Result of one trajectory-tree run."""

    branches: list[TrajectoryBranch]
    depth: int
    conditional_entropies: list[float]
    records: list[DepthRecord]
    merged_count: int
    pruned_mass: float
    report: ConvergenceReport
    options: RunOptions


@dataclass(frozen=True)
class EntropyReport:
    """SZ run with dynamics, the identity-dynamics run, and their difference."""

    sz_entropy: ConvergenceReport
    measurement_entropy: ConvergenceReport
    dynamical_entropy: float | None
    settings: dict


@dataclass(frozen=True)
class MarkovReduction:
    """Transition matrix and initial pmf of a coherent-state outcome process."""

    transition_matrix: TransitionMatrix
    initial_distribution: ProbVector


def _check_unitary(u, dim: int) -> Operator:
    u = as_operator(u)
    if u.shape[0] != dim:
        raise ValidationError(
            f"dynamics dimension {u.shape[0]} does not match instrument dimension {dim}")
    res = float(np.abs(u.conj().T @ u - np.eye(dim)).max())
    if res > 1e-8:
        raise ValidationError(f"dynamics not unitary: residual {res:.3e}")
    return u


def cylinder_probability(walk_unitary: Operator | None, t: Instrument, rho: DensityState,
                         blocks: Sequence[Sequence[int]]) -> float:
    """Probability of observing the outcome sets `blocks` at times 0..n.

    Computed as tr(T(A_n)∘Θ∘...∘Θ∘T(A_0)ρ) with Θ the conjugation by the
    walk unitary (identity dynamics when `walk_unitary` is None).
    """
    if len(blocks) == 0:
        raise ValidationError("cylinder needs at least one outcome set")
    if rho.dim != t.dim:
        raise ValidationError(
            f"state dimension {rho.dim} does not match instrument dimension {t.dim}")
    u = None if walk_unitary is None else _check_unitary(walk_unitary, t.dim)
    op = apply_instrument(t, blocks[0], rho.matrix)
    for block in blocks[1:]:
        if u is not None:
            op = u @ op @ u.conj().T
        op = apply_instrument(t, block, op)
    return float(np.real(np.trace(op)))


def cs_transition_matrix(u: Operator, basis: Sequence) -> TransitionMatrix:
    """Markov transition matrix |<a_i|U|a_j>|^2 of a coherent-state measurement."""
    u = as_operator(u)
    vecs = [np.asarray(v, dtype=complex).reshape(-1) for v in basis]
    dim = u.shape[0]
    if len(vecs) != dim or any(v.size != dim for v in vecs):
        raise ValidationError(f"need {dim} basis vectors of dimension {dim}")
    A = np.column_stack(vecs)
    res = float(np.abs(A.conj().T @ A - np.eye(dim)).max())
    if res > 1e-10:
        raise ValidationError(f"basis not orthonormal: max |A†A - 1| = {res:.3e}")
    amps = A.conj().T @ u @ A
    return TransitionMatrix(np.abs(amps) ** 2)


def _fingerprint(op: np.ndarray, weight: float, merge_tol: float) -> bytes:
    normalized = op / weight
    re = np.round(normalized.real / merge_tol).astype(np.int64)
    im = np.round(normalized.imag / merge_tol).astype(np.int64)
    return re.tobytes() + im.tobytes()


def _merge_children(children: list[TrajectoryBranch], opts: RunOptions) -> tuple[list[TrajectoryBranch], int]:
    """Deterministically merge same-block children with matching normalized ops."""
    if not opts.merge:
        return children, 0
    buckets: dict[tuple, TrajectoryBranch] = {}
    for child in children:
        key = (child.last_block, _fingerprint(child.conditional_op, child.weight, opts.merge_tol),
               child.stats)
        kept = buckets.get(key)
        if kept is None:
            buckets[key] = child
        else:
            kept.weight += child.weight
            kept.conditional_op = kept.conditional_op + child.conditional_op
    merged = list(buckets.values())
    return merged, len(children) - len(merged)


def _classes_of(branches: list[TrajectoryBranch], pruned_mass: float) -> ClassMasses:
    c = e = o = 0.0
    for b in branches:
        stats = b.stats if b.stats is not None else _stats_from_sequence(b.block_sequence)
        if stats.constant:
            c += b.weight
        elif stats.parity == 1:
            o += b.weight
        else:
            e += b.weight
    total = c + e + o + pruned_mass
    if abs(total - 1.0) > NORMALIZATION_TOL:
        raise NumericError(f"class masses sum to {total!r}")
    return ClassMasses(constant=c, even=e, odd=o)


def _stats_from_sequence(seq: tuple[int, ...] | None) -> RunStats:
    if seq is None:
        raise UnsupportedConfigurationError(
            "branch histories were merged away; rerun with track_classes=True "
            "(or merge=False) to classify terminal runs")
    n = len(seq) - 1
    run = 0
    while run < n and seq[n - run - 1] == seq[n]:
        run += 1
    if run == n:
        return RunStats(True, run % 2, None)
    return RunStats(False, run % 2, seq[n - run - 1])


def sz_entropy_run(walk_unitary: Operator | None, t: Instrument, rho: DensityState,
                   partition: Partition, opts: RunOptions | None = None) -> SZRun:
    """Expand the trajectory tree and estimate the SZ entropy of (Θ, T, ρ, C).

    Each step conjugates every branch operator by the walk unitary and splits
    it across the partition blocks; a_n is accumulated from the per-branch
    conditional block distributions. The run stops when `limit_estimate`
    declares convergence of a_n (not before `min_steps`) or at `n_max`.
    """
    opts = opts or RunOptions()
    if partition.size != t.n_outcomes:
        raise ValidationError(
            f"partition covers {partition.size} outcomes, instrument has {t.n_outcomes}")
    if rho.dim != t.dim:
        raise ValidationError(
            f"state dimension {rho.dim} does not match instrument dimension {t.dim}")
    u = None if walk_unitary is None else _check_unitary(walk_unitary, t.dim)
    udag = None if u is None else u.conj().T
    keep_history = not opts.merge

    pruned_mass = 0.0
    total_merged = 0
    a_seq: list[float] = []
    records: list[DepthRecord] = []

    # Depth 0: measure rho itself, once per partition block.
    children: list[TrajectoryBranch] = []
    a0 = 0.0
    for bi, block in enumerate(partition.blocks):
        op = apply_instrument(t, block, rho.matrix)
        w = max(float(np.real(np.trace(op))), 0.0)
        a0 += eta(min(w, 1.0))
        if w > opts.prune_eps:
            children.append(TrajectoryBranch(
                last_block=bi, weight=w, conditional_op=op,
                block_sequence=(bi,) if keep_history else None,
                stats=RunStats(True, 0, None) if opts.track_classes else None))
        else:
            pruned_mass += w
    branches, merged = _merge_children(children, opts)
    total_merged += merged
    a_seq.append(a0)

    def snapshot(depth: int) -> None:
        total = sum(b.weight for b in branches) + pruned_mass
        if abs(total - 1.0) > NORMALIZATION_TOL:
            raise NumericError(
                f"branch mass {total!r} at depth {depth} drifted from 1 by {abs(total - 1.0):.3e}")
        classes = _classes_of(branches, pruned_mass) if opts.track_classes else None
        records.append(DepthRecord(
            depth=depth, a_n=a_seq[depth],
            cesaro=float(np.mean(a_seq)),
            branch_count=len(branches), merged_count=merged,
            pruned_mass=pruned_mass, classes=classes))

    snapshot(0)

    depth = 0
    for n in range(1, opts.n_max + 1):
        children = []
        a_n = 0.0
        for parent in branches:
            evolved = parent.conditional_op if u is None else u @ parent.conditional_op @ udag
            for bi, block in enumerate(partition.blocks):
                op = apply_instrument(t, block, evolved)
                w = max(float(np.real(np.trace(op))), 0.0)
                ratio = min(w / parent.weight, 1.0)
                a_n += parent.weight * eta(ratio)
                if w > opts.prune_eps:
                    children.append(TrajectoryBranch(
                        last_block=bi, weight=w, conditional_op=op,
                        block_sequence=parent.block_sequence + (bi,) if keep_history else None,
                        stats=parent.stats.extend(bi == parent.last_block, parent.last_block)
                        if opts.track_classes else None))
                else:
                    pruned_mass += w
        branches, merged = _merge_children(children, opts)
        total_merged += merged
        if len(branches) > opts.branch_budget:
            raise ResourceLimitError(
                f"live branch count {len(branches)} exceeds the budget of {opts.branch_budget}")
        a_seq.append(max(a_n, 0.0))
        depth = n
        snapshot(n)
        report = limit_estimate(a_seq, tol=opts.tol, window=opts.window)
        if report.converged and n >= opts.min_steps:
            break

    report = limit_estimate(a_seq, tol=opts.tol, window=opts.window)
    if pruned_mass > PRUNED_MASS_LIMIT:
        message = (f"pruned mass {pruned_mass:.3e} exceeds {PRUNED_MASS_LIMIT:g}; "
                   "entropies may be inaccurate")
        if opts.strict:
            raise AccuracyError(message)
        warnings.warn(message, stacklevel=2)
    return SZRun(branches=branches, depth=depth, conditional_entropies=list(a_seq),
                 records=records, merged_count=total_merged, pruned_mass=pruned_mass,
                 report=report, options=opts)


def measurement_entropy(t: Instrument, rho: DensityState, partition: Partition,
                        opts: RunOptions | None = None) -> ConvergenceReport:
    """SZ entropy with identity dynamics: randomness due to the instrument alone."""
    return sz_entropy_run(None, t, rho, partition, opts).report


def dynamical_entropy(walk_unitary: Operator, t: Instrument, rho: DensityState,
                      partition: Partition, opts: RunOptions | None = None) -> EntropyReport:
    """Full SZ entropy, measurement entropy, and their difference when defined."""
    opts = opts or RunOptions()
    run = sz_entropy_run(walk_unitary, t, rho, partition, opts)
    meas = measurement_entropy(t, rho, partition, opts)
    value = None
    if run.report.converged and meas.converged:
        value = run.report.converged_value - meas.converged_value
    return EntropyReport(sz_entropy=run.report, measurement_entropy=meas,
                         dynamical_entropy=value, settings=asdict(opts))


def classify_constant_runs(run: SZRun) -> ClassMasses:
    """Mass of the current branches by terminal-run class (constant/even/odd).

    Requires the run to have kept either run statistics (track_classes) or
    full block histories (merge disabled).
    """
    return _classes_of(run.branches, run.pruned_mass)


def markov_reduction(walk_unitary: Operator, t: Instrument, rho: DensityState) -> MarkovReduction:
    """Classical reduction of a coherent-state run: transition matrix plus initial pmf.

    Only coherent-states instruments admit this fast path; the entropy-rate
    computation itself is the classical module's job.
    """
    if t.kind is not InstrumentKind.COHERENT_STATES:
        raise UnsupportedConfigurationError(
            f"Markov reduction needs a coherent-states instrument, got kind={t.kind.value}")
    basis = []
    for b in t.kraus:
        col = int(np.argmax(np.abs(np.diagonal(b))))
        vec = b[:, col]
        basis.append(vec / np.linalg.norm(vec))
    P = cs_transition_matrix(walk_unitary, basis)
    mu0 = outcome_pmf(t, rho)
    return MarkovReduction(transition_matrix=P, initial_distribution=mu0)
