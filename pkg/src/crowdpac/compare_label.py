"""Sort-then-threshold labeling from noisy majority-vote queries.

All instances are sorted by randomized quicksort where each pairwise test is
a k1-vote majority comparison, then the leftmost positive position is found
by binary search with k2-vote majority labels.  Vote sizes come from
``oracles.vote_sizes`` so the whole procedure labels everything correctly
except with probability delta.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .oracles import CrowdOracle, vote_sizes


@dataclass(frozen=True)
class SortedLabeledSet:
    """Instances in ascending inferred order with a single label threshold.

    ``threshold_index`` is 1-based: positions below it are labeled -1 and
    positions at or above it are labeled +1; m+1 means everything negative.
    ``order`` maps sorted positions back to rows of the input set;
    ``comparison_tests`` and ``probe_count`` record how many pairwise tests
    and binary-search probes were spent.
    """

    instances: np.ndarray
    threshold_index: int
    labels: np.ndarray
    order: np.ndarray
    comparison_tests: int
    probe_count: int

    def __post_init__(self):
        m = len(self.instances)
        if not (1 <= self.threshold_index <= m + 1):
            raise ValueError("threshold_index out of range [1, m+1]")
        if len(self.labels) != m or len(self.order) != m:
            raise ValueError("instances, labels and order must have equal length")
        expected = np.where(np.arange(1, m + 1) < self.threshold_index, -1, 1)
        if not np.array_equal(np.asarray(self.labels), expected):
            raise ValueError("labels must match the threshold rule")

    def __len__(self) -> int:
        return len(self.instances)


def noisy_quicksort(points, k1: int, oracle: CrowdOracle) -> tuple[np.ndarray, int]:
    """Randomized quicksort under a noisy comparator.

    Pivots are uniform over the current segment, fresh per recursion; each
    pairwise test is a k1-vote majority comparison (never cached, so repeated
    tests of the same pair stay independent).  Returns the permutation of row
    indices in ascending inferred order and the number of pairwise tests.
    """
    points = np.asarray(points, dtype=float)
    n = len(points)
    n_tests = 0
    result: list[int] = []
    stack: list[list[int]] = [list(range(n))]
    while stack:
        segment = stack.pop()
        if len(segment) <= 1:
            result.extend(segment)
            continue
        pivot_at = int(oracle.rng.integers(len(segment)))
        pivot = segment[pivot_at]
        others = segment[:pivot_at] + segment[pivot_at + 1 :]
        tags = oracle.majority_compare_batch(points[others], points[pivot], k1)
        n_tests += len(others)
        left = [j for j, tag in zip(others, tags) if tag == -1]
        right = [j for j, tag in zip(others, tags) if tag != -1]
        # LIFO order: left segment is fully emitted before pivot and right
        stack.append(right)
        stack.append([pivot])
        stack.append(left)
    return np.asarray(result, dtype=np.intp), n_tests


def threshold_search(sorted_points, k2: int, oracle: CrowdOracle) -> tuple[int, int]:
    """Leftmost position whose majority label is +1 (1-based), via binary
    search over positions 1..m+1; m+1 means every probe came back negative.

    The caller is responsible for the input being sorted.  Probes at most
    floor(log2 m) + 1 positions, each with a k2-vote majority.
    """
    sorted_points = np.asarray(sorted_points, dtype=float)
    m = len(sorted_points)
    lo, hi = 1, m + 1
    probes = 0
    while lo < hi:
        mid = (lo + hi) // 2
        probes += 1
        if oracle.majority_label(sorted_points[mid - 1], k2) == 1:
            hi = mid
        else:
            lo = mid + 1
    return lo, probes


def compare_and_label(points, delta: float, oracle: CrowdOracle) -> SortedLabeledSet:
    """Sort and label a whole instance set with confidence 1 - delta."""
    points = np.asarray(points, dtype=float)
    m = len(points)
    if m < 1:
        raise ValueError("compare_and_label needs at least one instance")
    k1, k2 = vote_sizes(m, delta, oracle.config)
    order, n_tests = noisy_quicksort(points, k1, oracle)
    ordered = points[order]
    threshold, probes = threshold_search(ordered, k2, oracle)
    labels = np.where(np.arange(1, m + 1) < threshold, -1, 1)
    return SortedLabeledSet(
        instances=ordered,
        threshold_index=threshold,
        labels=labels,
        order=order,
        comparison_tests=n_tests,
        probe_count=probes,
    )
