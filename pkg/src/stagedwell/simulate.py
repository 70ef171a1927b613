"""Monte Carlo trajectory sampling.

This module is an independent cross-check on the analytic recurrences: it
never touches the occupancy tables, only simulates individuals one step at a
time with inversion sampling. Trajectory i of a run draws from its own
generator seeded with (seed, first_index + i), so results are reproducible
and independent of how a run is split into batches.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass
from typing import Mapping

import math

import numpy as np

from .chain import DiscreteDistribution, Schedule, validate_distribution
from .errors import NonTerminatingError
from .occupancy import TargetSet

# Hard per-trajectory cap; hitting it means the schedule effectively never
# kills, which no amount of further sampling will fix.
STEP_CAP = 10**7


@dataclass(frozen=True)
class TrajectoryOutcome:
    """One simulated individual: steps lived, steps spent in the target set,
    and optionally the visited stage sequence (one entry per step lived)."""

    lifetime: int
    occupancy: int
    path: tuple[int, ...] | None = None


def _cumulative_columns(schedule: Schedule) -> tuple:
    """Per matrix, per stage: cumulative outgoing probabilities.

    A uniform draw u selects the first stage k with u < cum[k]; falling past
    the last entry is absorption (the column's deficit from 1).
    """
    return tuple(
        tuple(tuple(np.cumsum(m[:, j])) for j in range(m.shape[1]))
        for m in schedule.matrices
    )


def _pick(cum, u: float) -> int:
    for k, edge in enumerate(cum):
        if u < edge:
            return k
    return len(cum)


def _run_one(schedule, cums, vcum, in_target, start, rng, step_cap, record_path):
    d = len(in_target)
    state = _pick(vcum, rng.random())
    if state >= d:
        state = d - 1
    path = [] if record_path else None
    occupancy = 0
    steps = 0
    index_at = schedule.index_at
    random = rng.random
    while True:
        if steps >= step_cap:
            raise NonTerminatingError(step_cap)
        if path is not None:
            path.append(state)
        if in_target[state]:
            occupancy += 1
        u = random()
        nxt = d
        for k, edge in enumerate(cums[index_at(start + steps)][state]):
            if u < edge:
                nxt = k
                break
        steps += 1
        if nxt >= d:
            return TrajectoryOutcome(
                lifetime=steps,
                occupancy=occupancy,
                path=tuple(path) if path is not None else None,
            )
        state = nxt


def simulate_trajectory(
    schedule: Schedule,
    initial,
    target: TargetSet,
    rng: np.random.Generator,
    start: int = 0,
    record_path: bool = False,
    step_cap: int = STEP_CAP,
) -> TrajectoryOutcome:
    """Simulate one individual from time `start` until absorption.

    Consumes exactly one uniform for the initial stage and one per step
    lived. Occupancy counts the steps whose pre-transition stage lies in the
    target set, matching the analytic convention.
    """
    v = validate_distribution(initial, schedule.d)
    if target.d != schedule.d:
        raise ValueError(f"target set is over {target.d} stages, schedule over {schedule.d}")
    cums = _cumulative_columns(schedule)
    vcum = tuple(np.cumsum(v))
    in_target = tuple(j in target.members for j in range(schedule.d))
    return _run_one(schedule, cums, vcum, in_target, int(start), rng, int(step_cap), record_path)


@dataclass(frozen=True)
class EmpiricalSummary:
    """Histogram summary of a batch of simulated trajectories.

    Counts are exact integers, and the derived statistics are computed from
    integer histogram sums, so merging two batches and then summarizing gives
    bit-identical results to summarizing the merged run directly.
    """

    n_samples: int
    occupancy_counts: dict[int, int]
    lifetime_counts: dict[int, int]

    def _sums(self) -> tuple[int, int]:
        s1 = sum(a * c for a, c in self.occupancy_counts.items())
        s2 = sum(a * a * c for a, c in self.occupancy_counts.items())
        return s1, s2

    @property
    def mean(self) -> float:
        s1, _ = self._sums()
        return s1 / self.n_samples

    @property
    def variance(self) -> float:
        """Sample variance of the occupancy totals (ddof 1; 0.0 for one sample)."""
        if self.n_samples < 2:
            return 0.0
        s1, s2 = self._sums()
        return (s2 - s1 * s1 / self.n_samples) / (self.n_samples - 1)

    @property
    def std_error(self) -> float:
        return math.sqrt(self.variance / self.n_samples)

    def occupancy_pmf(self) -> dict[int, float]:
        return {a: c / self.n_samples for a, c in sorted(self.occupancy_counts.items())}

    def lifetime_pmf(self) -> dict[int, float]:
        return {n: c / self.n_samples for n, c in sorted(self.lifetime_counts.items())}

    def merge(self, other: "EmpiricalSummary") -> "EmpiricalSummary":
        occ = Counter(self.occupancy_counts)
        occ.update(other.occupancy_counts)
        life = Counter(self.lifetime_counts)
        life.update(other.lifetime_counts)
        return EmpiricalSummary(
            n_samples=self.n_samples + other.n_samples,
            occupancy_counts=dict(occ),
            lifetime_counts=dict(life),
        )


def empirical_distribution(
    schedule: Schedule,
    initial,
    target: TargetSet,
    n_samples: int,
    seed: int = 0,
    start: int = 0,
    first_index: int = 0,
    step_cap: int = STEP_CAP,
) -> EmpiricalSummary:
    """Simulate n_samples trajectories and histogram their outcomes.

    Trajectory i (global index first_index + i) uses its own generator
    np.random.default_rng((seed, index)), so a run split across workers as
    [0, k) and [k, n) merges to exactly the single-run result.
    """
    n_samples = int(n_samples)
    if n_samples < 1:
        raise ValueError(f"n_samples must be at least 1, got {n_samples}")
    v = validate_distribution(initial, schedule.d)
    if target.d != schedule.d:
        raise ValueError(f"target set is over {target.d} stages, schedule over {schedule.d}")
    cums = _cumulative_columns(schedule)
    vcum = tuple(np.cumsum(v))
    in_target = tuple(j in target.members for j in range(schedule.d))
    start = int(start)
    step_cap = int(step_cap)
    occ: Counter = Counter()
    life: Counter = Counter()
    for i in range(int(first_index), int(first_index) + n_samples):
        rng = np.random.default_rng((int(seed), i))
        out = _run_one(schedule, cums, vcum, in_target, start, rng, step_cap, False)
        occ[out.occupancy] += 1
        life[out.lifetime] += 1
    return EmpiricalSummary(
        n_samples=n_samples,
        occupancy_counts=dict(occ),
        lifetime_counts=dict(life),
    )


def total_variation(
    dist: DiscreteDistribution,
    counts: Mapping[int, int],
    n_samples: int,
) -> float:
    """Total variation distance between a truncated analytic distribution and
    an empirical histogram, charging the analytic tail mass as unmatched."""
    n_samples = int(n_samples)
    points = set(dist.probs) | set(counts)
    diff = sum(abs(dist.pmf(a) - counts.get(a, 0) / n_samples) for a in points)
    return 0.5 * (diff + dist.tail_mass)
