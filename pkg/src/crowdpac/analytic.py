"""Closed-form analytic oracles used by property tests and `crowdpac verify`.

These are independent of the simulation code paths they are used to check:
the ruin probability is the classical biased-walk closed form, the majority
error is an exact binomial tail summation, and the Hoeffding bound is the
plain exponential.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class WalkSpec:
    """A gambler's-ruin walk: win one unit with probability ``step_win_prob``,
    starting with ``start_capital`` against an opponent holding
    ``opponent_capital``."""

    step_win_prob: float
    start_capital: int
    opponent_capital: int

    def __post_init__(self):
        if not (0.0 < self.step_win_prob < 1.0):
            raise ValueError("step_win_prob must lie in (0, 1)")
        if self.start_capital < 1:
            raise ValueError("start_capital must be a positive integer")
        if self.opponent_capital < 1:
            raise ValueError("opponent_capital must be a positive integer")


def ruin_probability(spec: WalkSpec) -> float:
    """Probability the player is ever ruined: (1 - r^N) / (1 - r^(N+i)) with
    r = p/(1-p); the symmetric case p = 1/2 takes the limit N/(N+i)."""
    p, i, n = spec.step_win_prob, spec.start_capital, spec.opponent_capital
    if p == 0.5:
        return n / (n + i)
    r = p / (1.0 - p)
    if r < 1.0:
        return (1.0 - r**n) / (1.0 - r ** (n + i))
    # r > 1: rescale by r^-(N+i) so large exponents cannot overflow
    s = 1.0 / r
    return (s ** (n + i) - s**i) / (s ** (n + i) - 1.0)


def simulate_ruin(spec: WalkSpec, n_walks: int, rng: np.random.Generator,
                  max_steps: int = 1_000_000) -> float:
    """Monte Carlo estimate of the ruin probability over n_walks walks."""
    capital = np.full(n_walks, spec.start_capital, dtype=np.int64)
    total = spec.start_capital + spec.opponent_capital
    ruined = np.zeros(n_walks, dtype=bool)
    alive = np.ones(n_walks, dtype=bool)
    for _ in range(max_steps):
        idx = np.nonzero(alive)[0]
        if idx.size == 0:
            break
        steps = np.where(rng.random(idx.size) < spec.step_win_prob, 1, -1)
        capital[idx] += steps
        newly_ruined = idx[capital[idx] == 0]
        ruined[newly_ruined] = True
        alive[idx] = (capital[idx] > 0) & (capital[idx] < total)
    return float(np.mean(ruined))


def majority_error_exact(k: int, q: float) -> float:
    """Exact probability an odd-k majority of votes, each correct with
    probability q > 1/2, comes out wrong: P(Bin(k, 1-q) >= ceil(k/2))."""
    if k < 1 or k % 2 == 0:
        raise ValueError("k must be a positive odd count")
    if not (0.5 < q <= 1.0):
        raise ValueError("per-vote correctness q must lie in (1/2, 1]")
    p_wrong = 1.0 - q
    total = 0.0
    for j in range(math.ceil(k / 2), k + 1):
        total += math.comb(k, j) * p_wrong**j * q ** (k - j)
    return total


def hoeffding_majority_bound(k: int, margin: float) -> float:
    """Hoeffding upper bound exp(-2 k margin^2) on the majority error of k
    votes each correct with probability 1/2 + margin."""
    if k < 1:
        raise ValueError("k must be at least 1")
    if not (0.0 < margin <= 0.5):
        raise ValueError("margin must lie in (0, 1/2]")
    return math.exp(-2.0 * k * margin**2)


def boosted_majority_error(p: float) -> float:
    """Error of a 3-way majority of independent voters each wrong w.p. p."""
    return 3.0 * p**2 - 2.0 * p**3


# ---------------------------------------------------------------------------
# verification suites (surfaced through the CLI `verify` command)
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class CheckResult:
    name: str
    passed: bool
    detail: str


def _ruin_grid(grid: str):
    if grid == "full":
        ps = (0.5, 0.6, 0.7, 0.8)
        starts = (1, 3)
        opponents = (1, 10, 60)
        walks, tol = 100_000, 0.01
    else:
        ps = (0.5, 0.7)
        starts = (1, 3)
        opponents = (1, 10)
        walks, tol = 20_000, 0.02
    return ps, starts, opponents, walks, tol


def verify_ruin_vs_monte_carlo(grid: str, rng: np.random.Generator) -> list[CheckResult]:
    ps, starts, opponents, walks, tol = _ruin_grid(grid)
    results = []
    worst = 0.0
    for p in ps:
        for i in starts:
            for n in opponents:
                spec = WalkSpec(p, i, n)
                exact = ruin_probability(spec)
                est = simulate_ruin(spec, walks, rng)
                gap = abs(exact - est)
                worst = max(worst, gap)
                results.append(
                    CheckResult(
                        name=f"ruin p={p} i={i} N={n}",
                        passed=gap <= tol,
                        detail=f"closed form {exact:.6f}, monte carlo {est:.6f}, |gap| {gap:.6f} <= {tol}",
                    )
                )
    limit = ruin_probability(WalkSpec(0.7, 1, 60))
    results.append(
        CheckResult(
            name="ruin limit p=0.7 i=1 N=60",
            passed=abs(limit - 3.0 / 7.0) <= 1e-9,
            detail=f"closed form {limit:.12f} vs 3/7 = {3.0 / 7.0:.12f}",
        )
    )
    return results


def verify_hoeffding_domination(grid: str) -> list[CheckResult]:
    max_k = 201 if grid == "full" else 51
    margins = [0.1, 0.2, 0.3, 0.4, 0.5]
    worst_slack = math.inf
    violation = None
    for margin in margins:
        for k in range(1, max_k + 1, 2):
            bound = hoeffding_majority_bound(k, margin)
            exact = majority_error_exact(k, 0.5 + margin)
            worst_slack = min(worst_slack, bound - exact)
            if bound < exact and violation is None:
                violation = (k, margin)
    passed = violation is None
    detail = (
        f"odd k <= {max_k}, margins {margins}: min(bound - exact) = {worst_slack:.3e}"
        if passed
        else f"violated at k={violation[0]}, margin={violation[1]}"
    )
    return [CheckResult(name="hoeffding bound dominates exact majority error", passed=passed, detail=detail)]


def verify_boost_identity(grid: str, rng: np.random.Generator) -> list[CheckResult]:
    n = 100_000 if grid == "full" else 20_000
    tol = 0.01
    results = []
    for p in (0.1, 0.2, 0.3):
        wrong = rng.random((3, n)) < p
        empirical = float(np.mean(np.sum(wrong, axis=0) >= 2))
        expected = boosted_majority_error(p)
        gap = abs(empirical - expected)
        results.append(
            CheckResult(
                name=f"3-voter majority identity p={p}",
                passed=gap <= tol,
                detail=f"closed form {expected:.6f}, monte carlo {empirical:.6f}, |gap| {gap:.6f} <= {tol}",
            )
        )
    return results


def run_verification(grid: str = "small", seed: int = 0) -> list[CheckResult]:
    """All analytic-oracle checks; `grid` is "small" (fast) or "full"."""
    if grid not in ("small", "full"):
        raise ValueError("grid must be 'small' or 'full'")
    rng = np.random.default_rng(np.random.SeedSequence([seed, 0xA11A]))
    results = []
    results += verify_ruin_vs_monte_carlo(grid, rng)
    results += verify_hoeffding_domination(grid)
    results += verify_boost_identity(grid, rng)
    return results
