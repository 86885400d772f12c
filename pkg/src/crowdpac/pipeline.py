"""Three-phase boosted learning from crowd queries, plus the one-shot
sort-everything baseline, with full query accounting.

Phase 1 learns a weak hypothesis from a small sorted-and-labeled sample.
Phase 2 hunts instances that hypothesis gets wrong (via the filter), labels
them together with a fresh agreement sample, and trains a second hypothesis
on an equal-weight mixture of the disagreeing and agreeing labeled points.
Phase 3 trains a third hypothesis on instances where the first two disagree,
gathered by rejection sampling (which costs no oracle queries).  The returned
classifier is the pointwise majority of the three.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, field, replace

import numpy as np

from .compare_label import compare_and_label
from .filtering import FilterConfig, default_walk_length, filter_mistakes
from .geometry import (
    Halfspace,
    ProblemConfig,
    random_unit_vector,
    sample_instances,
    sample_size,
    sign_pm1,
)
from .learner import learn_consistent
from .oracles import CrowdConfig, CrowdOracle, QueryLedger

# confidence handed to every sort-and-label call inside the pipeline
PHASE_CONFIDENCE = 1e-3

ALGORITHMS = ("boost", "natural")
_ALG_STREAM = {"boost": 0, "natural": 1}


@dataclass(frozen=True)
class PipelineConstants:
    """Explicit constants behind the asymptotic set sizes.

    ``phase2_sample_factor`` (c2) scales the filter input, |S2| = c2 *
    ceil(m_sqrt / sqrt(eps)); ``mixture_size_factor`` (c_w) scales the
    mixture training set, |W| = c_w * m_sqrt; ``rejection_budget_factor``
    caps phase-3 rejection sampling at ceil(factor * m_sqrt / eps) draws.
    ``learner_solver`` picks the consistent-learner route ("feasibility" by
    default: near-boundary training sets give the perceptron pathologically
    thin margins; both routes satisfy the same zero-training-error contract).
    """

    phase2_sample_factor: float = 4.0
    mixture_size_factor: float = 2.0
    rejection_budget_factor: float = 10.0
    learner_solver: str = "feasibility"

    def __post_init__(self):
        if self.phase2_sample_factor <= 0:
            raise ValueError("constants.phase2_sample_factor must be positive")
        if self.mixture_size_factor <= 0:
            raise ValueError("constants.mixture_size_factor must be positive")
        if self.rejection_budget_factor <= 0:
            raise ValueError("constants.rejection_budget_factor must be positive")
        if self.learner_solver not in ("perceptron", "feasibility"):
            raise ValueError("constants.learner_solver must be 'perceptron' or 'feasibility'")


@dataclass
class PhaseReport:
    name: str
    hypothesis: Halfspace
    labels_used: int
    comparisons_used: int
    sample_sizes: dict[str, int] = field(default_factory=dict)
    flags: list[str] = field(default_factory=list)


@dataclass
class RunReport:
    algorithm: str
    seed: int
    phase_reports: list[PhaseReport]
    holdout_error: float
    label_queries: int
    comparison_queries: int
    labeling_overhead: float
    comparison_overhead: float
    reference_sample_size: int
    wall_clock_ms: float

    @property
    def flags(self) -> list[str]:
        return [flag for phase in self.phase_reports for flag in phase.flags]


class MajorityVote:
    """Pointwise majority of an odd number of predictors."""

    def __init__(self, *voters):
        if len(voters) % 2 == 0:
            raise ValueError("majority vote needs an odd number of voters")
        self.voters = voters

    def predict(self, points) -> np.ndarray:
        total = sum(voter.predict(points) for voter in self.voters)
        return sign_pm1(total)


def majority_combine(h1, h2, h3) -> MajorityVote:
    """Combine three hypotheses by pointwise majority vote."""
    dims = {h.dim for h in (h1, h2, h3) if isinstance(h, Halfspace)}
    if len(dims) > 1:
        raise ValueError("hypotheses must share one dimension")
    return MajorityVote(h1, h2, h3)


def weak_sample_size(problem: ProblemConfig) -> int:
    """Training-set size granting error sqrt(eps) at the phase confidence."""
    return sample_size(
        math.sqrt(problem.target_error),
        PHASE_CONFIDENCE,
        problem.dimension,
        problem.vc_constant,
    )


def reference_sample_size(problem: ProblemConfig) -> int:
    """Noiseless sample size m_eps that query totals are normalized by."""
    return sample_size(
        problem.target_error,
        problem.confidence,
        problem.dimension,
        problem.vc_constant,
    )


def overheads(label_queries: int, comparison_queries: int, problem: ProblemConfig) -> tuple[float, float]:
    """Average oracle cost per noiseless-equivalent labeled instance."""
    if label_queries < 0 or comparison_queries < 0:
        raise ValueError("query counts must be nonnegative")
    m_ref = reference_sample_size(problem)
    return label_queries / m_ref, comparison_queries / m_ref


def draw_equal_mixture(
    disagree: tuple[np.ndarray, np.ndarray],
    agree: tuple[np.ndarray, np.ndarray],
    n: int,
    rng: np.random.Generator,
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Draw n labeled points with replacement: a fair coin picks a side per
    draw, then a uniform member of that side.  Returns (points, labels,
    from_disagree mask)."""
    (x_d, y_d), (x_a, y_a) = disagree, agree
    if len(x_d) == 0 or len(x_a) == 0:
        raise ValueError("both mixture sides must be nonempty")
    pick_d = rng.random(n) < 0.5
    idx_d = rng.integers(0, len(x_d), size=n)
    idx_a = rng.integers(0, len(x_a), size=n)
    points = np.where(pick_d[:, None], x_d[idx_d], x_a[idx_a])
    labels = np.where(pick_d, y_d[idx_d], y_a[idx_a])
    return points, labels, pick_d


def phase1(
    problem: ProblemConfig,
    constants: PipelineConstants,
    oracle: CrowdOracle,
) -> PhaseReport:
    """Weak hypothesis from a sorted-and-labeled sample of size m_sqrt."""
    m_sqrt = weak_sample_size(problem)
    labels_before = oracle.ledger.label_queries
    comps_before = oracle.ledger.comparison_queries
    sample = sample_instances(problem, m_sqrt, oracle.rng)
    labeled = compare_and_label(sample, PHASE_CONFIDENCE, oracle)
    fit = learn_consistent(labeled.instances, labeled.labels, solver=constants.learner_solver)
    flags = [] if fit.consistent else ["phase1:inconsistent_training_set"]
    return PhaseReport(
        name="phase1",
        hypothesis=fit.hypothesis,
        labels_used=oracle.ledger.label_queries - labels_before,
        comparisons_used=oracle.ledger.comparison_queries - comps_before,
        sample_sizes={"S1": m_sqrt},
        flags=flags,
    )


def phase2(
    h1: Halfspace,
    problem: ProblemConfig,
    constants: PipelineConstants,
    filter_cfg: FilterConfig,
    oracle: CrowdOracle,
) -> PhaseReport:
    """Hypothesis trained on an equal mixture of suspected mistakes of h1
    and confirmed agreements, all labeled by sorting."""
    eps = problem.target_error
    sqrt_eps = math.sqrt(eps)
    m_sqrt = weak_sample_size(problem)
    labels_before = oracle.ledger.label_queries
    comps_before = oracle.ledger.comparison_queries

    n2 = math.ceil(constants.phase2_sample_factor * math.ceil(m_sqrt / sqrt_eps))
    big_sample = sample_instances(problem, n2, oracle.rng)
    if filter_cfg.walk_length is None:
        filter_cfg = replace(filter_cfg, walk_length=default_walk_length(eps))
    outcome = filter_mistakes(big_sample, h1, filter_cfg, oracle)

    agreement_sample = sample_instances(problem, 2 * m_sqrt, oracle.rng)
    pool = (
        np.vstack([outcome.suspected_mistakes, agreement_sample])
        if len(outcome.suspected_indices)
        else agreement_sample
    )
    labeled = compare_and_label(pool, PHASE_CONFIDENCE, oracle)
    disagrees = labeled.labels != h1.predict(labeled.instances)
    sizes = {
        "S2": n2,
        "S_I": int(len(outcome.suspected_indices)),
        "S_C": 2 * m_sqrt,
        "W_I": int(np.count_nonzero(disagrees)),
        "W_C": int(np.count_nonzero(~disagrees)),
        "W": 0,
        "filter_rounds": outcome.round_count,
    }
    flags: list[str] = []

    if not np.any(disagrees):
        flags.append("phase2:no_mistakes_found")
        hypothesis = h1
    elif np.all(disagrees):
        # cannot happen unless labeling failed wholesale; train on what we have
        flags.append("phase2:agreement_side_empty")
        fit = learn_consistent(labeled.instances, labeled.labels, solver=constants.learner_solver)
        if not fit.consistent:
            flags.append("phase2:inconsistent_training_set")
        hypothesis = fit.hypothesis
        sizes["W"] = len(labeled)
    else:
        n_mix = math.ceil(constants.mixture_size_factor * m_sqrt)
        mix_x, mix_y, _ = draw_equal_mixture(
            (labeled.instances[disagrees], labeled.labels[disagrees]),
            (labeled.instances[~disagrees], labeled.labels[~disagrees]),
            n_mix,
            oracle.rng,
        )
        fit = learn_consistent(mix_x, mix_y, solver=constants.learner_solver)
        if not fit.consistent:
            flags.append("phase2:inconsistent_training_set")
        hypothesis = fit.hypothesis
        sizes["W"] = n_mix

    return PhaseReport(
        name="phase2",
        hypothesis=hypothesis,
        labels_used=oracle.ledger.label_queries - labels_before,
        comparisons_used=oracle.ledger.comparison_queries - comps_before,
        sample_sizes=sizes,
        flags=flags,
    )


def rejection_sample_disagreements(
    h1: Halfspace,
    h2: Halfspace,
    problem: ProblemConfig,
    target: int,
    max_draws: int,
    rng: np.random.Generator,
) -> tuple[np.ndarray, int]:
    """First ``target`` instances with h1(x) != h2(x) among at most
    ``max_draws`` fresh draws; returns (accepted rows, draws consumed up to
    and including the last accept, or max_draws when short)."""
    accepted: list[np.ndarray] = []
    n_accepted = 0
    drawn = 0
    batch_size = 512
    while drawn < max_draws and n_accepted < target:
        batch = min(batch_size, max_draws - drawn)
        points = sample_instances(problem, batch, rng)
        keep = h1.predict(points) != h2.predict(points)
        hits = np.nonzero(keep)[0]
        if n_accepted + hits.size >= target:
            need = target - n_accepted
            accepted.append(points[hits[:need]])
            n_accepted = target
            drawn += int(hits[need - 1]) + 1
            break
        accepted.append(points[hits])
        n_accepted += int(hits.size)
        drawn += batch
    rows = np.vstack(accepted) if accepted else np.empty((0, problem.dimension))
    return rows, drawn


def phase3(
    h1: Halfspace,
    h2: Halfspace,
    problem: ProblemConfig,
    constants: PipelineConstants,
    oracle: CrowdOracle,
) -> PhaseReport:
    """Hypothesis trained on the disagreement region of h1 and h2."""
    if np.array_equal(h1.weights, h2.weights):
        return PhaseReport(
            name="phase3",
            hypothesis=h1,
            labels_used=0,
            comparisons_used=0,
            sample_sizes={"S3": 0, "S3_draws": 0},
            flags=["phase3:negligible_disagreement"],
        )
    eps = problem.target_error
    m_sqrt = weak_sample_size(problem)
    max_draws = math.ceil(constants.rejection_budget_factor * m_sqrt / eps)
    sample, drawn = rejection_sample_disagreements(
        h1, h2, problem, m_sqrt, max_draws, oracle.rng
    )
    if len(sample) < m_sqrt:
        return PhaseReport(
            name="phase3",
            hypothesis=h1,
            labels_used=0,
            comparisons_used=0,
            sample_sizes={"S3": len(sample), "S3_draws": drawn},
            flags=["phase3:negligible_disagreement"],
        )
    labels_before = oracle.ledger.label_queries
    comps_before = oracle.ledger.comparison_queries
    labeled = compare_and_label(sample, PHASE_CONFIDENCE, oracle)
    fit = learn_consistent(labeled.instances, labeled.labels, solver=constants.learner_solver)
    flags = [] if fit.consistent else ["phase3:inconsistent_training_set"]
    return PhaseReport(
        name="phase3",
        hypothesis=fit.hypothesis,
        labels_used=oracle.ledger.label_queries - labels_before,
        comparisons_used=oracle.ledger.comparison_queries - comps_before,
        sample_sizes={"S3": m_sqrt, "S3_draws": drawn},
        flags=flags,
    )


def holdout_error(predictor, ground_truth: Halfspace, problem: ProblemConfig,
                  n: int, rng: np.random.Generator) -> float:
    """Disagreement with the ground truth on n fresh instances (free of
    charge: error measurement is instrumentation, not a crowd query)."""
    points = sample_instances(problem, n, rng)
    return float(np.mean(predictor.predict(points) != ground_truth.predict(points)))


def trial_rng(seed: int, algorithm: str) -> np.random.Generator:
    """Independent stream per (seed, algorithm): adding seeds to an
    experiment never perturbs existing rows."""
    return np.random.default_rng(np.random.SeedSequence([seed, _ALG_STREAM[algorithm]]))


def run_boost(
    problem: ProblemConfig,
    crowd: CrowdConfig,
    constants: PipelineConstants,
    filter_cfg: FilterConfig,
    seed: int,
    holdout_size: int = 20_000,
) -> RunReport:
    """One seeded end-to-end boosted run with a fresh ground truth."""
    start = time.perf_counter()
    rng = trial_rng(seed, "boost")
    ground_truth = Halfspace(random_unit_vector(problem.dimension, rng))
    oracle = CrowdOracle(ground_truth, crowd, rng, QueryLedger())

    p1 = phase1(problem, constants, oracle)
    p2 = phase2(p1.hypothesis, problem, constants, filter_cfg, oracle)
    p3 = phase3(p1.hypothesis, p2.hypothesis, problem, constants, oracle)
    combined = majority_combine(p1.hypothesis, p2.hypothesis, p3.hypothesis)
    error = holdout_error(combined, ground_truth, problem, holdout_size, rng)

    lam_l, lam_c = overheads(
        oracle.ledger.label_queries, oracle.ledger.comparison_queries, problem
    )
    return RunReport(
        algorithm="boost",
        seed=seed,
        phase_reports=[p1, p2, p3],
        holdout_error=error,
        label_queries=oracle.ledger.label_queries,
        comparison_queries=oracle.ledger.comparison_queries,
        labeling_overhead=lam_l,
        comparison_overhead=lam_c,
        reference_sample_size=reference_sample_size(problem),
        wall_clock_ms=(time.perf_counter() - start) * 1e3,
    )


def run_natural(
    problem: ProblemConfig,
    crowd: CrowdConfig,
    constants: PipelineConstants,
    seed: int,
    holdout_size: int = 20_000,
) -> RunReport:
    """Sort-and-label the full m_eps sample in one shot, then learn."""
    start = time.perf_counter()
    rng = trial_rng(seed, "natural")
    ground_truth = Halfspace(random_unit_vector(problem.dimension, rng))
    oracle = CrowdOracle(ground_truth, crowd, rng, QueryLedger())

    m_ref = reference_sample_size(problem)
    sample = sample_instances(problem, m_ref, rng)
    labeled = compare_and_label(sample, PHASE_CONFIDENCE, oracle)
    fit = learn_consistent(labeled.instances, labeled.labels, solver=constants.learner_solver)
    report = PhaseReport(
        name="natural",
        hypothesis=fit.hypothesis,
        labels_used=oracle.ledger.label_queries,
        comparisons_used=oracle.ledger.comparison_queries,
        sample_sizes={"S1": m_ref},
        flags=[] if fit.consistent else ["natural:inconsistent_training_set"],
    )
    error = holdout_error(fit.hypothesis, ground_truth, problem, holdout_size, rng)
    lam_l, lam_c = overheads(
        oracle.ledger.label_queries, oracle.ledger.comparison_queries, problem
    )
    return RunReport(
        algorithm="natural",
        seed=seed,
        phase_reports=[report],
        holdout_error=error,
        label_queries=oracle.ledger.label_queries,
        comparison_queries=oracle.ledger.comparison_queries,
        labeling_overhead=lam_l,
        comparison_overhead=lam_c,
        reference_sample_size=m_ref,
        wall_clock_ms=(time.perf_counter() - start) * 1e3,
    )
