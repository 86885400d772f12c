"""Identify instances a hypothesis misclassifies, cheaply, from comparisons.

Each round sorts and labels a small uniform sub-sample, takes the rightmost
negative and leftmost positive as support instances, and subjects every other
instance to a running-majority comparison walk against the supports: an
instance whose majorities place it inside the support interval is retained
for the next round, one whose majority agrees with the hypothesis on its side
is a confirmed agreement, and one that survives the whole walk without either
break is a suspected mistake.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field

import numpy as np

from .compare_label import SortedLabeledSet, compare_and_label
from .geometry import Halfspace
from .oracles import CrowdOracle


class Verdict(enum.Enum):
    INSIDE = "inside"
    AGREE = "agree"
    MISTAKE = "mistake"


# integer codes used by the vectorized walk
_INSIDE, _AGREE, _MISTAKE = 0, 1, 2
_VERDICTS = {_INSIDE: Verdict.INSIDE, _AGREE: Verdict.AGREE, _MISTAKE: Verdict.MISTAKE}


@dataclass(frozen=True)
class SupportPair:
    """Bracketing instances from a labeled sub-sample: ``below`` is the
    rightmost instance labeled -1, ``above`` the leftmost labeled +1; either
    may be absent when the sub-sample is single-labeled."""

    below: np.ndarray | None
    above: np.ndarray | None


@dataclass
class FilterConfig:
    """Knobs of the filtering loop.

    ``subsample_constant`` scales the per-round sub-sample, b = ceil(c *
    log2 |S|).  ``walk_length`` is the odd walk bound N; leave None to let the
    caller derive it from the target error via ``default_walk_length``.
    ``per_round_confidence`` defaults to 0.001 / ceil(log2 |S|) at run time.
    ``early_stop_target`` stops the loop once that many suspects are found.
    """

    subsample_constant: float = 10.0
    walk_length: int | None = None
    per_round_confidence: float | None = None
    early_stop_target: int | None = None

    def __post_init__(self):
        if self.subsample_constant <= 0:
            raise ValueError("filter.subsample_constant must be positive")
        if self.walk_length is not None and (
            self.walk_length < 1 or self.walk_length % 2 == 0
        ):
            raise ValueError("filter.walk_length must be a positive odd count")
        if self.per_round_confidence is not None and not (
            0.0 < self.per_round_confidence < 1.0
        ):
            raise ValueError("filter.per_round_confidence must lie in (0, 1)")
        if self.early_stop_target is not None and self.early_stop_target < 1:
            raise ValueError("filter.early_stop_target must be positive")


def default_walk_length(epsilon: float) -> int:
    """Next odd count >= ceil(4 * log2(1/epsilon))."""
    if not (0.0 < epsilon < 1.0):
        raise ValueError("epsilon must lie in (0, 1)")
    n = max(1, math.ceil(4.0 * math.log2(1.0 / epsilon)))
    return n if n % 2 == 1 else n + 1


@dataclass
class RoundStats:
    active_start: int
    subsample_size: int
    tested: int
    inside: int
    agreed: int
    suspected: int
    label_queries: int
    comparison_queries: int
    walk_comparisons: int  # portion of comparison_queries spent on walks
    small_branch: bool


@dataclass
class FilterOutcome:
    """Partition produced by the filter, with per-round accounting.

    Index arrays refer to rows of the input set; the ``*_instances``
    properties materialize the corresponding rows.  Suspected, confirmed and
    sub-sampled indices are pairwise disjoint subsets of the input.
    """

    source: np.ndarray
    suspected_indices: np.ndarray
    confirmed_indices: np.ndarray
    subsampled_indices: np.ndarray
    rounds: list[RoundStats] = field(default_factory=list)

    @property
    def suspected_mistakes(self) -> np.ndarray:
        return self.source[self.suspected_indices]

    @property
    def confirmed_agreements(self) -> np.ndarray:
        return self.source[self.confirmed_indices]

    @property
    def subsampled(self) -> np.ndarray:
        return self.source[self.subsampled_indices]

    @property
    def round_count(self) -> int:
        return len(self.rounds)

    @property
    def label_queries(self) -> int:
        return sum(r.label_queries for r in self.rounds)

    @property
    def comparison_queries(self) -> int:
        return sum(r.comparison_queries for r in self.rounds)

    @property
    def walk_comparison_queries(self) -> int:
        return sum(r.walk_comparisons for r in self.rounds)


def pick_support(labeled: SortedLabeledSet) -> SupportPair:
    """Support instances straddling the label threshold of a labeled set."""
    if len(labeled) == 0:
        raise ValueError("labeled sub-sample must be nonempty")
    t = labeled.threshold_index
    m = len(labeled)
    below = labeled.instances[t - 2] if t >= 2 else None
    above = labeled.instances[t - 1] if t <= m else None
    return SupportPair(below=below, above=above)


def _walk_verdicts(
    points: np.ndarray,
    support: SupportPair,
    h_labels: np.ndarray,
    walk_length: int,
    oracle: CrowdOracle,
) -> tuple[np.ndarray, np.ndarray]:
    """Vectorized running-majority walk for a batch of instances.

    Worker responses are pre-drawn for all rounds and each instance consumes
    a prefix up to its break round; the ledger is charged exactly for the
    consumed prefix (one comparison per present support side per round).
    Returns (verdict codes, rounds consumed per instance).
    """
    if support.below is None and support.above is None:
        raise ValueError("interval test needs at least one support instance")
    if walk_length < 1 or walk_length % 2 == 0:
        raise ValueError("walk length must be a positive odd count")
    n = len(points)
    if n == 0:
        return np.empty(0, dtype=np.int8), np.empty(0, dtype=np.int64)

    odd_cols = np.arange(0, walk_length, 2)  # odd rounds t=1,3,... (0-based)
    inside = np.ones((n, odd_cols.size), dtype=bool)
    agree = np.zeros((n, odd_cols.size), dtype=bool)
    sides = 0
    if support.below is not None:
        sides += 1
        sums = oracle.presample_comparison_tags(points, support.below, walk_length).cumsum(axis=1)
        at_odd = sums[:, odd_cols]
        inside &= at_odd > 0
        agree |= (at_odd < 0) & (h_labels == -1)[:, None]
    if support.above is not None:
        sides += 1
        sums = oracle.presample_comparison_tags(points, support.above, walk_length).cumsum(axis=1)
        at_odd = sums[:, odd_cols]
        inside &= at_odd < 0
        agree |= (at_odd > 0) & (h_labels == 1)[:, None]

    fired = inside | agree
    any_fired = fired.any(axis=1)
    first = np.argmax(fired, axis=1)
    rows = np.arange(n)
    verdicts = np.full(n, _MISTAKE, dtype=np.int8)
    verdicts[any_fired & inside[rows, first]] = _INSIDE
    verdicts[any_fired & ~inside[rows, first]] = _AGREE
    rounds_used = np.where(any_fired, odd_cols[first] + 1, walk_length)
    oracle.ledger.charge_comparisons(int(rounds_used.sum()) * sides)
    return verdicts, rounds_used


def interval_test(
    x,
    support: SupportPair,
    h_label: int,
    walk_length: int,
    oracle: CrowdOracle,
) -> Verdict:
    """Running-majority walk for a single instance.

    At each odd round the majorities of the comparison tags gathered so far
    are checked: both pointing into the support interval ends the test as
    INSIDE; the majority matching the hypothesis label on its side ends it as
    AGREE; surviving all rounds without a break is a MISTAKE.  An absent
    support side drops its clauses.
    """
    points = np.asarray(x, dtype=float)[None, :]
    codes, _ = _walk_verdicts(
        points, support, np.asarray([h_label]), walk_length, oracle
    )
    return _VERDICTS[int(codes[0])]


def filter_mistakes(
    points,
    hypothesis: Halfspace,
    cfg: FilterConfig,
    oracle: CrowdOracle,
) -> FilterOutcome:
    """Partition a sample into suspected mistakes of ``hypothesis``,
    confirmed agreements, and labeled sub-samples.

    Rounds repeat until nothing is left (instances judged inside the support
    interval stay for the next round) or ``early_stop_target`` suspects are
    collected.  Once the active set is no larger than the sub-sample budget
    it is sorted and labeled outright and mismatches become suspects.
    """
    points = np.asarray(points, dtype=float)
    n0 = len(points)
    if n0 < 1:
        raise ValueError("filter needs at least one instance")
    if cfg.walk_length is None:
        raise ValueError("filter.walk_length must be resolved by the caller")
    walk_length = cfg.walk_length
    budget = max(1, math.ceil(cfg.subsample_constant * math.log2(n0))) if n0 > 1 else 1
    delta_round = cfg.per_round_confidence
    if delta_round is None:
        delta_round = 0.001 / max(1, math.ceil(math.log2(n0)))

    h_labels = np.atleast_1d(hypothesis.predict(points))
    active = np.arange(n0)
    suspected: list[int] = []
    confirmed: list[int] = []
    subsampled: list[int] = []
    rounds: list[RoundStats] = []

    while active.size:
        labels_before = oracle.ledger.label_queries
        comps_before = oracle.ledger.comparison_queries
        if active.size <= budget:
            labeled = compare_and_label(points[active], delta_round, oracle)
            original = active[labeled.order]
            mismatch = labeled.labels != h_labels[original]
            suspected.extend(original[mismatch].tolist())
            confirmed.extend(original[~mismatch].tolist())
            stats = RoundStats(
                active_start=int(active.size),
                subsample_size=int(active.size),
                tested=0,
                inside=0,
                agreed=int(np.count_nonzero(~mismatch)),
                suspected=int(np.count_nonzero(mismatch)),
                label_queries=oracle.ledger.label_queries - labels_before,
                comparison_queries=oracle.ledger.comparison_queries - comps_before,
                walk_comparisons=0,
                small_branch=True,
            )
            active = np.empty(0, dtype=np.intp)
        else:
            chosen = oracle.rng.choice(active.size, size=budget, replace=False)
            mask = np.zeros(active.size, dtype=bool)
            mask[chosen] = True
            sample_idx = active[mask]
            rest_idx = active[~mask]
            labeled = compare_and_label(points[sample_idx], delta_round, oracle)
            support = pick_support(labeled)
            comps_after_sort = oracle.ledger.comparison_queries
            verdicts, _ = _walk_verdicts(
                points[rest_idx], support, h_labels[rest_idx], walk_length, oracle
            )
            suspected.extend(rest_idx[verdicts == _MISTAKE].tolist())
            confirmed.extend(rest_idx[verdicts == _AGREE].tolist())
            subsampled.extend(sample_idx.tolist())
            stats = RoundStats(
                active_start=int(active.size),
                subsample_size=int(budget),
                tested=int(rest_idx.size),
                inside=int(np.count_nonzero(verdicts == _INSIDE)),
                agreed=int(np.count_nonzero(verdicts == _AGREE)),
                suspected=int(np.count_nonzero(verdicts == _MISTAKE)),
                label_queries=oracle.ledger.label_queries - labels_before,
                comparison_queries=oracle.ledger.comparison_queries - comps_before,
                walk_comparisons=oracle.ledger.comparison_queries - comps_after_sort,
                small_branch=False,
            )
            active = rest_idx[verdicts == _INSIDE]
        rounds.append(stats)
        if cfg.early_stop_target is not None and len(suspected) >= cfg.early_stop_target:
            break

    return FilterOutcome(
        source=points,
        suspected_indices=np.asarray(suspected, dtype=np.intp),
        confirmed_indices=np.asarray(confirmed, dtype=np.intp),
        subsampled_indices=np.asarray(subsampled, dtype=np.intp),
        rounds=rounds,
    )
