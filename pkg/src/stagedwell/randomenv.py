"""Random environments: i.i.d. draws of the yearly transition matrix.

Each environment sequence drawn from a RandomEnvironmentSpec is itself a
deterministic schedule, so per-sequence occupancy statistics are exact; the
randomness enters only through which sequence is drawn. two_level_stats
averages the exact per-sequence answers over sampled sequences and splits
the variance of the occupancy total into a within-sequence part (mean of the
per-sequence variances) and a between-sequence part (variance of the
per-sequence means). By the law of total variance the two parts sum to the
total, and with the plug-in estimators used here the identity holds exactly
up to roundoff for any finite sample of sequences.
"""

from __future__ import annotations

from dataclasses import dataclass

import math

import numpy as np

from .chain import (
    DEFAULT_MAX_HORIZON,
    DEFAULT_TAIL_TOL,
    Schedule,
    validate_matrix,
)
from .errors import InvalidDistributionError, NonAbsorbingError, StagedwellError
from .occupancy import TargetSet, occupancy_moments

# Mixing probabilities are dimensionless model inputs, not printed data, so
# they are held to a much tighter sum tolerance than matrix columns.
PROBABILITY_SUM_TOL = 1e-12


@dataclass(frozen=True, eq=False)
class RandomEnvironmentSpec:
    """Finite set of environmental conditions with i.i.d. yearly draws.

    labels, matrices and probabilities run in parallel; probabilities must
    sum to 1 within PROBABILITY_SUM_TOL.
    """

    labels: tuple[str, ...]
    matrices: tuple[np.ndarray, ...]
    probabilities: np.ndarray

    def __post_init__(self):
        labels = tuple(str(x) for x in self.labels)
        mats = tuple(validate_matrix(m) for m in self.matrices)
        probs = np.array(self.probabilities, dtype=float)
        if not labels or len(labels) != len(mats) or probs.shape != (len(mats),):
            raise ValueError("labels, matrices and probabilities must have equal nonzero length")
        if len(set(labels)) != len(labels):
            raise ValueError(f"condition labels must be distinct, got {labels}")
        d = mats[0].shape[0]
        if any(m.shape != (d, d) for m in mats):
            raise ValueError("all condition matrices must share one shape")
        if not np.isfinite(probs).all() or (probs < 0).any():
            raise InvalidDistributionError("condition probabilities must be finite and nonnegative")
        total = float(probs.sum())
        if abs(total - 1.0) > PROBABILITY_SUM_TOL:
            raise InvalidDistributionError(f"condition probabilities sum to {total!r}, not 1")
        probs.flags.writeable = False
        object.__setattr__(self, "labels", labels)
        object.__setattr__(self, "matrices", mats)
        object.__setattr__(self, "probabilities", probs)

    @classmethod
    def from_conditions(cls, conditions) -> "RandomEnvironmentSpec":
        """Build from an iterable of (label, matrix, probability) triples."""
        triples = list(conditions)
        return cls(
            labels=tuple(lab for lab, _, _ in triples),
            matrices=tuple(m for _, m, _ in triples),
            probabilities=np.array([p for _, _, p in triples], dtype=float),
        )

    @property
    def n_conditions(self) -> int:
        return len(self.matrices)

    @property
    def d(self) -> int:
        return self.matrices[0].shape[0]


def sample_schedule(spec: RandomEnvironmentSpec, length: int, rng: np.random.Generator) -> Schedule:
    """Draw one environment sequence of the given length (hold-last past it)."""
    length = int(length)
    if length < 1:
        raise ValueError(f"sequence length must be at least 1, got {length}")
    idx = rng.choice(spec.n_conditions, size=length, p=spec.probabilities)
    return Schedule(spec.matrices, idx, "hold_last")


@dataclass(frozen=True)
class TwoLevelStats:
    """Occupancy statistics under sequence-level environmental randomness."""

    n_sequences: int
    mean_of_means: float
    mean_within_variance: float
    between_variance: float
    total_variance: float
    coefficient_of_variation: float


def _seed_entropy(seed) -> tuple[int, ...]:
    if isinstance(seed, (tuple, list)):
        return tuple(int(x) for x in seed)
    return (int(seed),)


def two_level_stats(
    spec: RandomEnvironmentSpec,
    initial,
    target: TargetSet,
    n_sequences: int = 2000,
    seed=0,
    start: int = 0,
    tail_tol: float = DEFAULT_TAIL_TOL,
    max_horizon: int = DEFAULT_MAX_HORIZON,
    sample_length: int | None = None,
) -> TwoLevelStats:
    """Sample environment sequences; combine their exact occupancy statistics.

    Sequence i uses generator np.random.default_rng((*seed, i)). Sampled
    sequences are max_horizon long (overridable via sample_length) so the
    hold-last extension is never reached before truncation. The plug-in
    (divide by n) variance estimators make

        total_variance == mean_within_variance + between_variance

    an algebraic identity, not an approximation.
    """
    n_sequences = int(n_sequences)
    if n_sequences < 2:
        raise ValueError(f"need at least 2 sequences, got {n_sequences}")
    length = int(max_horizon) if sample_length is None else int(sample_length)
    base = _seed_entropy(seed)
    means = np.empty(n_sequences)
    variances = np.empty(n_sequences)
    for i in range(n_sequences):
        rng = np.random.default_rng((*base, i))
        sched = sample_schedule(spec, length, rng)
        try:
            m1, m2 = occupancy_moments(
                sched, initial, target, start=start, order=2,
                tail_tol=tail_tol, max_horizon=max_horizon,
            )
        except NonAbsorbingError as exc:
            raise NonAbsorbingError(
                exc.surviving_mass, exc.horizon, context=f"sequence {i}"
            ) from exc
        means[i] = m1
        variances[i] = max(m2 - m1 * m1, 0.0)
    mean_of_means = float(means.mean())
    mean_within = float(variances.mean())
    between = max(float((means * means).mean()) - mean_of_means**2, 0.0)
    total = max(float((variances + means * means).mean()) - mean_of_means**2, 0.0)
    cv = math.sqrt(total) / mean_of_means if mean_of_means != 0.0 else math.nan
    return TwoLevelStats(
        n_sequences=n_sequences,
        mean_of_means=mean_of_means,
        mean_within_variance=mean_within,
        between_variance=between,
        total_variance=total,
        coefficient_of_variation=cv,
    )


@dataclass(frozen=True)
class SweepPoint:
    """One grid point of a probability-simplex sweep.

    `stats` is None when the point failed; `error` then holds the diagnostic.
    """

    probabilities: tuple[float, float, float]
    stats: TwoLevelStats | None
    error: str | None = None


def simplex_sweep(
    conditions,
    grid_step: float,
    initial,
    target: TargetSet,
    n_sequences: int = 2000,
    seed=0,
    start: int = 0,
    tail_tol: float = DEFAULT_TAIL_TOL,
    max_horizon: int = DEFAULT_MAX_HORIZON,
    sample_length: int | None = None,
) -> list[SweepPoint]:
    """Two-level statistics over a grid of three-condition mixtures.

    `conditions` is a sequence of exactly three (label, matrix) pairs; the
    grid runs over probability triples (i, j, k)/k_steps with grid_step =
    1/k_steps. Point (i, j, l) derives its seed as (*seed, i, j, l), so any
    sub-grid of a sweep reproduces the full sweep's values. A failing point
    (for example a non-absorbing corner) is recorded and skipped rather than
    aborting the sweep.
    """
    pairs = list(conditions)
    if len(pairs) != 3:
        raise ValueError(f"a simplex sweep needs exactly 3 conditions, got {len(pairs)}")
    grid_step = float(grid_step)
    steps = round(1.0 / grid_step) if grid_step > 0 else 0
    if steps < 1 or abs(steps * grid_step - 1.0) > 1e-9:
        raise ValueError(f"grid_step must evenly divide 1, got {grid_step}")
    labels = tuple(lab for lab, _ in pairs)
    matrices = tuple(m for _, m in pairs)
    base = _seed_entropy(seed)
    points: list[SweepPoint] = []
    for i in range(steps, -1, -1):
        for j in range(steps - i, -1, -1):
            l = steps - i - j
            weights = np.array([i, j, l], dtype=float) / steps
            spec = RandomEnvironmentSpec(labels, matrices, weights)
            triple = (weights[0], weights[1], weights[2])
            try:
                stats = two_level_stats(
                    spec, initial, target,
                    n_sequences=n_sequences,
                    seed=(*base, i, j, l),
                    start=start,
                    tail_tol=tail_tol,
                    max_horizon=max_horizon,
                    sample_length=sample_length,
                )
            except StagedwellError as exc:
                points.append(SweepPoint(triple, None, error=f"{type(exc).__name__}: {exc}"))
            else:
                points.append(SweepPoint(triple, stats))
    return points
