"""Noisy crowd oracles for labels and pairwise comparisons.

Every response is correct with probability at least 1/2 + margin (alpha for
labels, beta for comparisons).  Workers are memoryless: repeated queries on
the same instance or pair are independent.  A ``QueryLedger`` counts every
label query in ``label_queries`` and every comparison query in
``comparison_queries``; a majority vote of k workers charges exactly k.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from .geometry import Halfspace, sign_pm1


class Adversary(enum.Enum):
    """Behaviour of the unreliable pool fraction."""

    ALWAYS_WRONG = "always_wrong"
    RANDOM_FLIP = "random_flip"


@dataclass(frozen=True)
class PoolModel:
    """Worker pool: a ``reliable_fraction`` answers correctly with probability
    ``reliable_accuracy``; the rest follow the adversary policy."""

    reliable_fraction: float
    reliable_accuracy: float
    adversary: Adversary = Adversary.ALWAYS_WRONG

    def __post_init__(self):
        if not (0.0 < self.reliable_fraction <= 1.0):
            raise ValueError("pool.reliable_fraction must lie in (0, 1]")
        if not (0.5 < self.reliable_accuracy <= 1.0):
            raise ValueError("pool.reliable_accuracy must lie in (1/2, 1]")


@dataclass(frozen=True)
class CrowdConfig:
    """Noise margins and worker model.

    ``pool is None`` selects the default i.i.d.-flip model where each response
    is correct with probability exactly 1/2 + margin.  In pool mode the
    product a*p must cover 1/2 + margin for both oracles, so the effective
    correctness never falls below the advertised margins.
    """

    alpha: float = 0.35
    beta: float = 0.35
    pool: PoolModel | None = None

    def __post_init__(self):
        if not (0.0 < self.alpha <= 0.5):
            raise ValueError("crowd.alpha must lie in (0, 1/2]")
        if not (0.0 < self.beta <= 0.5):
            raise ValueError("crowd.beta must lie in (0, 1/2]")
        if self.pool is not None:
            floor = self.pool.reliable_fraction * self.pool.reliable_accuracy
            if floor < 0.5 + self.alpha:
                raise ValueError(
                    "crowd.pool: reliable_fraction * reliable_accuracy must be "
                    f">= 1/2 + alpha ({0.5 + self.alpha:.4f}), got {floor:.4f}"
                )
            if floor < 0.5 + self.beta:
                raise ValueError(
                    "crowd.pool: reliable_fraction * reliable_accuracy must be "
                    f">= 1/2 + beta ({0.5 + self.beta:.4f}), got {floor:.4f}"
                )


@dataclass
class QueryLedger:
    """Monotone counters of oracle usage."""

    label_queries: int = 0
    comparison_queries: int = 0

    def charge_labels(self, n: int = 1) -> None:
        self.label_queries += n

    def charge_comparisons(self, n: int = 1) -> None:
        self.comparison_queries += n


def next_odd(n: int) -> int:
    return n if n % 2 == 1 else n + 1


def majority(tags) -> int:
    """Majority in {-1, +1} of a sequence of tags (sum tie resolves to +1)."""
    return sign_pm1(int(np.sum(tags)))


def vote_sizes(m: int, delta: float, cfg: CrowdConfig) -> tuple[int, int]:
    """Per-test vote counts (k1 for comparisons, k2 for labels).

    Sized so that, by Hoeffding plus a union bound over at most m^2 pairwise
    tests and floor(log2 m)+1 binary-search probes, every majority is correct
    except with probability delta (half the budget on each oracle).
    """
    if m < 1:
        raise ValueError("m must be at least 1")
    if not (0.0 < delta < 1.0):
        raise ValueError("delta must lie in (0, 1)")
    k1 = next_odd(math.ceil(math.log(2.0 * m * m / delta) / (2.0 * cfg.beta**2)))
    probes = math.floor(math.log2(m)) + 1
    k2 = next_odd(math.ceil(math.log(2.0 * probes / delta) / (2.0 * cfg.alpha**2)))
    return k1, k2


class CrowdOracle:
    """Simulated crowd answering label and comparison queries about one
    ground-truth halfspace.

    Owns the trial's random generator and ledger; a single oracle must not be
    shared across threads.
    """

    def __init__(
        self,
        ground_truth: Halfspace,
        config: CrowdConfig,
        rng: np.random.Generator,
        ledger: QueryLedger | None = None,
    ):
        self.ground_truth = ground_truth
        self.config = config
        self.rng = rng
        self.ledger = ledger if ledger is not None else QueryLedger()

    # -- response model -----------------------------------------------------

    def _correct(self, margin: float, n: int) -> np.ndarray:
        """Boolean array: which of n fresh responses are correct."""
        pool = self.config.pool
        if pool is None:
            return self.rng.random(n) < 0.5 + margin
        reliable = self.rng.random(n) < pool.reliable_fraction
        correct = self.rng.random(n) < pool.reliable_accuracy
        if pool.adversary is Adversary.ALWAYS_WRONG:
            adv = np.zeros(n, dtype=bool)
        else:
            adv = self.rng.random(n) < 0.5
        return np.where(reliable, correct, adv)

    def _label_truth(self, x) -> int:
        return sign_pm1(float(np.asarray(x, dtype=float) @ self.ground_truth.weights))

    def _comparison_truth(self, x, x_other) -> int:
        diff = np.asarray(x, dtype=float) - np.asarray(x_other, dtype=float)
        return sign_pm1(float(diff @ self.ground_truth.weights))

    # -- single queries -----------------------------------------------------

    def query_label(self, x) -> int:
        """One noisy label; charges one label query."""
        self.ledger.charge_labels(1)
        truth = self._label_truth(x)
        return truth if self._correct(self.config.alpha, 1)[0] else -truth

    def query_comparison(self, x, x_other) -> int:
        """One noisy comparison tag; charges one comparison query."""
        self.ledger.charge_comparisons(1)
        truth = self._comparison_truth(x, x_other)
        return truth if self._correct(self.config.beta, 1)[0] else -truth

    # -- majority votes -----------------------------------------------------

    def majority_label(self, x, k: int) -> int:
        """Majority of k independent label queries; charges k."""
        if k < 1 or k % 2 == 0:
            raise ValueError("majority vote size must be a positive odd count")
        self.ledger.charge_labels(k)
        truth = self._label_truth(x)
        n_correct = int(np.count_nonzero(self._correct(self.config.alpha, k)))
        return truth if 2 * n_correct > k else -truth

    def majority_compare(self, x, x_other, k: int) -> int:
        """Majority of k independent comparison queries; charges k."""
        if k < 1 or k % 2 == 0:
            raise ValueError("majority vote size must be a positive odd count")
        self.ledger.charge_comparisons(k)
        truth = self._comparison_truth(x, x_other)
        n_correct = int(np.count_nonzero(self._correct(self.config.beta, k)))
        return truth if 2 * n_correct > k else -truth

    def majority_compare_batch(self, points, reference, k: int) -> np.ndarray:
        """k-vote majority comparison of each row of ``points`` against one
        reference instance; charges k per row.  Identical in distribution to
        looping ``majority_compare``."""
        if k < 1 or k % 2 == 0:
            raise ValueError("majority vote size must be a positive odd count")
        points = np.asarray(points, dtype=float)
        n = len(points)
        if n == 0:
            return np.empty(0, dtype=np.int64)
        self.ledger.charge_comparisons(n * k)
        truths = sign_pm1((points - np.asarray(reference)) @ self.ground_truth.weights)
        n_correct = self._correct(self.config.beta, n * k).reshape(n, k).sum(axis=1)
        return np.where(2 * n_correct > k, truths, -truths)

    # -- batched pre-sampling ------------------------------------------------

    def presample_comparison_tags(self, points, reference, rounds: int) -> np.ndarray:
        """Pre-draw comparison responses for many instances against one
        reference: a (len(points), rounds) matrix of tags.

        Does NOT charge the ledger: callers running sequential early-stopping
        tests consume a prefix of each row and must charge exactly the
        consumed count via ``ledger.charge_comparisons``.
        """
        points = np.asarray(points, dtype=float)
        truths = sign_pm1((points - np.asarray(reference)) @ self.ground_truth.weights)
        n = points.shape[0]
        correct = self._correct(self.config.beta, n * rounds).reshape(n, rounds)
        return np.where(correct, truths[:, None], -truths[:, None])
