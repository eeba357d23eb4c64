"""Synthetic Gaussian bandit suite and simple-regret curves."""

from __future__ import annotations

import csv
import math
import statistics
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from typing import Iterable, Sequence, TextIO

import numpy as np

from .bandits import POLICY_KINDS, TimeSequentialHalving, make_policy, simple_regret

__all__ = [
    "C_MAB",
    "BanditProblem",
    "RegretCurve",
    "AggregateRow",
    "BudgetMap",
    "DEFAULT_BUDGET_MAP",
    "DEFAULT_ITERATIONS",
    "generate_suite",
    "sample_reward",
    "run_episode",
    "run_wallclock_episode",
    "aggregate_curves",
    "map_budget",
    "run_suite",
    "write_csv",
]

C_MAB = 1 / math.sqrt(2)

# Policies that need their budget up front are re-run from scratch per checkpoint.
FIXED_BUDGET = frozenset({"sh", "time-sh"})
_POLICY_TAG = {kind: i for i, kind in enumerate(POLICY_KINDS)}


@dataclass(frozen=True)
class BanditProblem:
    mus: tuple[float, ...]
    noise_sigma: float = 1.0
    problem_id: int = 0
    seed: int = 0

    def __post_init__(self):
        if len(self.mus) < 2:
            raise ValueError("a bandit problem needs at least 2 arms")
        if self.noise_sigma <= 0:
            raise ValueError("noise_sigma must be positive")

    @property
    def k(self) -> int:
        return len(self.mus)


@dataclass(frozen=True)
class RegretCurve:
    checkpoints: tuple[tuple[int, float], ...]  # (budget, simple regret)

    def __post_init__(self):
        budgets = [b for b, _ in self.checkpoints]
        if any(b2 <= b1 for b1, b2 in zip(budgets, budgets[1:])):
            raise ValueError("checkpoint budgets must be strictly increasing")
        if any(r < 0 for _, r in self.checkpoints):
            raise ValueError("simple regret cannot be negative")

    @property
    def budgets(self) -> tuple[int, ...]:
        return tuple(b for b, _ in self.checkpoints)


@dataclass(frozen=True)
class AggregateRow:
    budget: int
    mean_regret: float
    ci_half_width: float
    n: int

    @property
    def ci(self) -> tuple[float, float]:
        return (self.mean_regret - self.ci_half_width, self.mean_regret + self.ci_half_width)


@dataclass(frozen=True)
class BudgetMap:
    """Ordered (milliseconds, iterations) pairs."""

    pairs: tuple[tuple[float, int], ...]

    def __post_init__(self):
        if len(self.pairs) < 2:
            raise ValueError("a budget map needs at least two rows")
        for (m1, i1), (m2, i2) in zip(self.pairs, self.pairs[1:]):
            if not (m2 > m1 and i2 > i1):
                raise ValueError("budget map must be strictly increasing in both columns")

    @property
    def iterations(self) -> list[int]:
        return [i for _, i in self.pairs]


# Time/iteration mapping measured for 10-armed problems on the reference machine.
DEFAULT_BUDGET_MAP = BudgetMap((
    (500, 18500), (1000, 37000), (1500, 55500), (2000, 73000), (2500, 93000),
    (3000, 112500), (3500, 131000), (4000, 150500), (4500, 167500), (5000, 186500),
))
DEFAULT_ITERATIONS = DEFAULT_BUDGET_MAP.iterations


def _stream(*words: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence([int(w) for w in words]))


def generate_suite(num_problems: int, k: int, master_seed: int) -> list[BanditProblem]:
    """``num_problems`` problems whose ``k`` means are drawn from N(0, 1)."""
    if num_problems < 1:
        raise ValueError("need at least one problem")
    if k < 2:
        raise ValueError("need at least 2 arms")
    problems = []
    for pid in range(num_problems):
        mus = _stream(master_seed, pid).standard_normal(k)
        problems.append(BanditProblem(tuple(float(m) for m in mus), 1.0, pid, master_seed))
    return problems


def sample_reward(problem: BanditProblem, arm: int, rng: np.random.Generator) -> float:
    if not 0 <= arm < problem.k:
        raise IndexError(f"arm {arm} out of range for K={problem.k}")
    return float(rng.normal(problem.mus[arm], problem.noise_sigma))


def _drive(policy, problem: BanditProblem, steps: int, rng: np.random.Generator,
           probes: Sequence[int] = ()) -> list[float]:
    # One standard-normal draw per step keeps the hot loop in plain floats.
    noise = (rng.standard_normal(steps) * problem.noise_sigma).tolist()
    mus = problem.mus
    select, update = policy.select, policy.update
    out = []
    probe_iter = iter(probes)
    next_probe = next(probe_iter, None)
    for t in range(steps):
        arm = select()
        update(arm, mus[arm] + noise[t])
        if next_probe is not None and t + 1 == next_probe:
            out.append(simple_regret(policy.recommend(), mus))
            next_probe = next(probe_iter, None)
    return out


def run_episode(problem: BanditProblem, policy: str, checkpoints: Sequence[int],
                seed: int, c: float = C_MAB) -> RegretCurve:
    """Simple regret of ``policy`` on ``problem`` at each checkpoint budget.

    ``sh`` and ``time-sh`` are planned for each checkpoint and run fresh with
    their own stream; ``ucb1`` and ``anytime-sh`` run once and are probed.
    """
    checkpoints = list(checkpoints)
    if not checkpoints:
        raise ValueError("no checkpoints")
    if any(b2 <= b1 for b1, b2 in zip(checkpoints, checkpoints[1:])):
        raise ValueError("checkpoints must be strictly increasing")
    if checkpoints[0] < problem.k:
        raise ValueError(f"checkpoint {checkpoints[0]} below K={problem.k}")
    tag = _POLICY_TAG.get(policy)
    if tag is None:
        raise ValueError(f"unknown policy {policy!r}")

    if policy in FIXED_BUDGET:
        regrets = []
        for budget in checkpoints:
            rng = _stream(seed, problem.problem_id, tag, budget)
            p = make_policy(policy, problem.k, budget=budget, c=c)
            regrets += _drive(p, problem, budget, rng, probes=[budget])
    else:
        rng = _stream(seed, problem.problem_id, tag, 0)
        p = make_policy(policy, problem.k, c=c)
        regrets = _drive(p, problem, checkpoints[-1], rng, probes=checkpoints)
    return RegretCurve(tuple(zip(checkpoints, regrets)))


def run_wallclock_episode(problem: BanditProblem, time_budgets_ms: Sequence[float],
                          seed: int) -> list[tuple[float, int, float]]:
    """Time SH against the real clock: (ms, pulls achieved, simple regret) per budget.

    Not reproducible across machines; the iteration-driven mode is the default.
    """
    out = []
    for i, ms in enumerate(time_budgets_ms):
        rng = _stream(seed, problem.problem_id, _POLICY_TAG["time-sh"], 10**9 + i)
        policy = TimeSequentialHalving.wall_clock(problem.k, ms / 1000.0)
        deadline = policy.start + ms / 1000.0
        mus = problem.mus
        chunk = 4096
        while True:
            noise = (rng.standard_normal(chunk) * problem.noise_sigma).tolist()
            for z in noise:
                arm = policy.select()
                policy.update(arm, mus[arm] + z)
            if time.perf_counter() >= deadline and policy.t >= problem.k:
                break
        out.append((ms, policy.t, simple_regret(policy.recommend(), mus)))
    return out


def aggregate_curves(curves: Sequence[RegretCurve], z: float = 1.96) -> list[AggregateRow]:
    """Mean regret and normal-approximation half-width ``z * sd / sqrt(n)`` per checkpoint.

    ``sd`` is the sample standard deviation (ddof=1); a single curve gets width 0.
    """
    if not curves:
        raise ValueError("no curves to aggregate")
    budgets = curves[0].budgets
    for curve in curves[1:]:
        if curve.budgets != budgets:
            raise ValueError("curves do not share checkpoints")
    n = len(curves)
    rows = []
    for j, budget in enumerate(budgets):
        column = [curve.checkpoints[j][1] for curve in curves]
        half = z * statistics.stdev(column) / math.sqrt(n) if n > 1 else 0.0
        rows.append(AggregateRow(int(budget), statistics.fmean(column), half, n))
    return rows


def map_budget(budget_map: BudgetMap, milliseconds: float) -> int:
    """Iterations for a wall-clock budget, linearly interpolated and rounded down."""
    pairs = budget_map.pairs
    if not pairs[0][0] <= milliseconds <= pairs[-1][0]:
        raise ValueError(
            f"{milliseconds} ms outside the map range [{pairs[0][0]}, {pairs[-1][0]}]")
    for (m1, i1), (m2, i2) in zip(pairs, pairs[1:]):
        if m1 <= milliseconds <= m2:
            return math.floor(i1 + (i2 - i1) * (milliseconds - m1) / (m2 - m1))
    raise AssertionError("unreachable")


def _episode_job(args):
    problem, policy, checkpoints, seed, c = args
    return run_episode(problem, policy, checkpoints, seed, c)


def run_suite(problems: Sequence[BanditProblem], policies: Iterable[str],
              checkpoints: Sequence[int], master_seed: int, c: float = C_MAB,
              jobs: int = 1) -> dict[str, list[AggregateRow]]:
    """Aggregate regret curves per policy; results do not depend on ``jobs``."""
    policies = list(policies)
    for policy in policies:
        if policy not in _POLICY_TAG:
            raise ValueError(f"unknown policy {policy!r}")
    tasks = [(p, pol, tuple(checkpoints), master_seed, c) for pol in policies for p in problems]
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            curves = list(pool.map(_episode_job, tasks, chunksize=4))
    else:
        curves = [_episode_job(t) for t in tasks]
    n = len(problems)
    return {pol: aggregate_curves(curves[i * n:(i + 1) * n]) for i, pol in enumerate(policies)}


CSV_FIELDS = ["policy", "budget_iterations", "mean_simple_regret", "ci_half_width",
              "n_problems", "master_seed"]


def write_csv(out: TextIO, results: dict[str, list[AggregateRow]], master_seed: int) -> None:
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(CSV_FIELDS)
    for policy, rows in results.items():
        for row in rows:
            writer.writerow([policy, row.budget, f"{row.mean_regret:.6f}",
                             f"{row.ci_half_width:.6f}", row.n, master_seed])
