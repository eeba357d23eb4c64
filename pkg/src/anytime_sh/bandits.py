"""Bandit policies for simple-regret minimisation.

Four policies share one stepwise interface (``select`` / ``update`` /
``recommend``) so they can be driven either by the synthetic MAB harness or
by the root node of an MCTS search:

* :class:`UCB1`
* :class:`SequentialHalving` (fixed iteration budget, known in advance)
* :class:`TimeSequentialHalving` (fixed clock budget, known in advance)
* :class:`AnytimeSequentialHalving` (no budget; interruptible at any step)

Ties are broken everywhere by (higher mean, higher pull count, lower index).
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass
from typing import Callable, Iterable, Sequence

__all__ = [
    "ArmStats",
    "PullRecord",
    "SHPlan",
    "BudgetTooSmallError",
    "ucb1_value",
    "ucb1_select",
    "best_arm",
    "halve",
    "n_phases",
    "survivor_counts",
    "sh_plan",
    "anytime_pass_rounds",
    "Policy",
    "UCB1",
    "SequentialHalving",
    "TimeSequentialHalving",
    "AnytimeSequentialHalving",
    "POLICY_KINDS",
    "make_policy",
    "simple_regret",
    "cumulative_regret",
    "format_sh_schedule",
    "format_anytime_schedule",
]


class BudgetTooSmallError(ValueError):
    """Raised when an SH budget cannot give every surviving arm one pull per phase."""

    def __init__(self, k: int, budget: int, minimum: int):
        super().__init__(
            f"budget too small: K={k} needs at least {minimum} pulls, got {budget}"
        )
        self.k = k
        self.budget = budget
        self.minimum = minimum


@dataclass(slots=True)
class ArmStats:
    pulls: int = 0
    reward_sum: float = 0.0

    @property
    def mean(self) -> float:
        if self.pulls == 0:
            raise ValueError("mean of an arm that was never pulled")
        return self.reward_sum / self.pulls

    def add(self, reward: float) -> None:
        self.pulls += 1
        self.reward_sum += reward


@dataclass(frozen=True, slots=True)
class PullRecord:
    step: int
    arm: int
    reward: float


def ucb1_value(mean: float, n_arm: int, n_total: int, c: float) -> float:
    """``mean + c * sqrt(ln(n_total) / n_arm)``."""
    if n_arm < 1:
        raise ValueError("UCB1 value undefined for an unvisited arm")
    if n_total < n_arm:
        raise ValueError(f"n_total={n_total} < n_arm={n_arm}")
    if c < 0:
        raise ValueError("exploration constant must be non-negative")
    return mean + c * math.sqrt(math.log(n_total) / n_arm)


def ucb1_select(stats: Sequence[ArmStats], c: float) -> int:
    """Pick the arm maximising UCB1; unvisited arms first, lowest index wins ties."""
    if not stats:
        raise ValueError("no arms to select from")
    total = 0
    for i, s in enumerate(stats):
        if s.pulls == 0:
            return i
        total += s.pulls
    log_total = math.log(total)
    best, best_value = 0, -math.inf
    for i, s in enumerate(stats):
        value = s.reward_sum / s.pulls + c * math.sqrt(log_total / s.pulls)
        if value > best_value:
            best, best_value = i, value
    return best


def _rank_key(stats: Sequence[ArmStats], arm: int) -> tuple[float, int, int]:
    s = stats[arm]
    return (-s.mean, -s.pulls, arm)


def best_arm(arms: Iterable[int], stats: Sequence[ArmStats]) -> int:
    """Highest empirical mean among ``arms``; ties by more pulls, then lower index."""
    return min(arms, key=lambda a: _rank_key(stats, a))


def halve(survivors: Sequence[int], stats: Sequence[ArmStats]) -> list[int]:
    """Keep the ``ceil(len/2)`` best survivors, returned in index order."""
    keep = (len(survivors) + 1) // 2
    ranked = sorted(survivors, key=lambda a: _rank_key(stats, a))
    return sorted(ranked[:keep])


def n_phases(k: int) -> int:
    """``ceil(log2 k)``, computed exactly on integers."""
    return (k - 1).bit_length()


def survivor_counts(k: int) -> list[int]:
    """Arm counts per SH phase: k, ceil(k/2), ... down to 2."""
    counts = []
    s = k
    while s > 1:
        counts.append(s)
        s = (s + 1) // 2
    return counts


@dataclass(frozen=True)
class SHPlan:
    k: int
    budget: int
    phases: tuple[tuple[int, int], ...]  # (survivor_count, pulls_per_arm)

    @property
    def n_phases(self) -> int:
        return len(self.phases)

    @property
    def total_pulls(self) -> int:
        return sum(s * n for s, n in self.phases)

    @property
    def phase_lengths(self) -> list[int]:
        return [s * n for s, n in self.phases]


def sh_plan(k: int, budget: int) -> SHPlan:
    """Per-phase allocation of Sequential Halving with ``budget`` pulls over ``k`` arms.

    Phase ``p`` gives each of its ``s_p`` arms ``floor(T / (s_p * B))`` pulls, at
    least one, and never more than what leaves one pull per arm for every later
    phase. The cap only binds on budgets close to the minimum, where the plain
    floor rule would overspend.
    """
    if k < 2:
        raise ValueError(f"Sequential Halving needs at least 2 arms, got {k}")
    counts = survivor_counts(k)
    minimum = sum(counts)
    if budget < minimum:
        raise BudgetTooSmallError(k, budget, minimum)
    b = len(counts)
    phases = []
    spent = 0
    for p, s in enumerate(counts):
        reserve = sum(counts[p + 1:])
        cap = (budget - spent - reserve) // s
        n = max(1, min(budget // (s * b), cap))
        phases.append((s, n))
        spent += s * n
    plan = SHPlan(k, budget, tuple(phases))
    assert plan.total_pulls <= budget
    return plan


def anytime_pass_rounds(k: int) -> list[tuple[int, int]]:
    """(survivor_count, pulls_per_arm) for each round of one Anytime SH pass."""
    return [(s, 1 << r) for r, s in enumerate(survivor_counts(k))]


class Policy:
    """Common bookkeeping for the stepwise bandit policies.

    ``select`` must be followed by ``update`` for the same arm before the next
    ``select``; subclasses implement ``_next_arm`` and ``_advance``.
    """

    name = "policy"

    def __init__(self, k: int, record_history: bool = False):
        if k < 1:
            raise ValueError("need at least one arm")
        self.k = k
        self.stats = [ArmStats() for _ in range(k)]
        self.t = 0
        self.history: list[PullRecord] | None = [] if record_history else None
        self._pending: int | None = None

    def select(self) -> int:
        arm = self._next_arm()
        self._pending = arm
        return arm

    def update(self, arm: int, reward: float) -> None:
        if not 0 <= arm < self.k:
            raise IndexError(f"arm {arm} out of range for K={self.k}")
        if self._pending is None:
            raise RuntimeError("update() without a preceding select()")
        if arm != self._pending:
            raise RuntimeError(f"update() for arm {arm} but select() returned {self._pending}")
        self._pending = None
        self.stats[arm].add(reward)
        self.t += 1
        if self.history is not None:
            self.history.append(PullRecord(self.t, arm, reward))
        self._advance(arm)

    def recommend(self) -> int:
        self._require_all_pulled()
        return best_arm(range(self.k), self.stats)

    def _require_all_pulled(self) -> None:
        unpulled = [i for i, s in enumerate(self.stats) if s.pulls == 0]
        if unpulled:
            raise RuntimeError(f"cannot recommend: arms {unpulled} never pulled")

    def _next_arm(self) -> int:
        raise NotImplementedError

    def _advance(self, arm: int) -> None:
        pass


class UCB1(Policy):
    """UCB1 with forced first pulls in index order.

    With ``literal=True`` the recommendation is the arm UCB1 would pull next
    rather than the empirical-mean argmax.
    """

    name = "ucb1"

    def __init__(self, k: int, c: float = 1 / math.sqrt(2), literal: bool = False,
                 record_history: bool = False):
        super().__init__(k, record_history)
        if c < 0:
            raise ValueError("exploration constant must be non-negative")
        self.c = c
        self.literal = literal

    def _next_arm(self) -> int:
        return ucb1_select(self.stats, self.c)

    def recommend(self) -> int:
        self._require_all_pulled()
        if self.literal:
            return ucb1_select(self.stats, self.c)
        return best_arm(range(self.k), self.stats)


class SequentialHalving(Policy):
    """Sequential Halving driven one pull at a time.

    Within a phase the survivors are pulled round-robin. Once the plan is
    spent the final phase's pair keeps being pulled round-robin, so the policy
    never runs dry; the recommendation is then the better of that pair, which
    at exact completion is the plan's sole survivor.
    """

    name = "sh"

    def __init__(self, k: int, budget: int, record_history: bool = False):
        super().__init__(k, record_history)
        self.plan = sh_plan(k, budget)
        self.phase = 0
        self.survivors = list(range(k))
        self._pos = 0

    @property
    def complete(self) -> bool:
        return self.phase >= self.plan.n_phases

    def _next_arm(self) -> int:
        return self.survivors[self._pos % len(self.survivors)]

    def _advance(self, arm: int) -> None:
        self._pos += 1
        if self.complete:
            return
        s, n = self.plan.phases[self.phase]
        if self._pos == s * n:
            self.phase += 1
            self._pos = 0
            if not self.complete:
                self.survivors = halve(self.survivors, self.stats)

    def recommend(self) -> int:
        for a in self.survivors:
            if self.stats[a].pulls == 0:
                raise RuntimeError(f"cannot recommend: arm {a} never pulled")
        return best_arm(self.survivors, self.stats)


class TimeSequentialHalving(Policy):
    """Sequential Halving over a clock budget split evenly across phases.

    Phase ``p`` (1-based) closes once ``clock() >= start + p * budget / B`` and
    the current round-robin cycle over its survivors is complete. Without a
    ``clock`` the policy counts its own pulls, which makes it iteration-driven
    and reproducible.
    """

    name = "time-sh"

    def __init__(self, k: int, time_budget: float,
                 clock: Callable[[], float] | None = None,
                 record_history: bool = False):
        super().__init__(k, record_history)
        if k < 2:
            raise ValueError(f"Sequential Halving needs at least 2 arms, got {k}")
        if time_budget <= 0:
            raise ValueError("time budget must be positive")
        self.time_budget = time_budget
        self.n_phases = n_phases(k)
        self.slice = time_budget / self.n_phases
        self._clock = clock if clock is not None else (lambda: float(self.t))
        self.start = self._clock()
        self.phase = 0
        self.survivors = list(range(k))
        self._pos = 0

    @classmethod
    def wall_clock(cls, k: int, seconds: float) -> "TimeSequentialHalving":
        return cls(k, seconds, clock=time.perf_counter)

    @property
    def complete(self) -> bool:
        return self.phase >= self.n_phases

    def _next_arm(self) -> int:
        if (not self.complete and self._pos > 0
                and self._pos % len(self.survivors) == 0
                and self._clock() >= self.start + (self.phase + 1) * self.slice):
            self.phase += 1
            self._pos = 0
            if not self.complete:
                self.survivors = halve(self.survivors, self.stats)
        return self.survivors[self._pos % len(self.survivors)]

    def _advance(self, arm: int) -> None:
        self._pos += 1


class AnytimeSequentialHalving(Policy):
    """Repeated SH passes with quotas 1, 2, 4, ... per round; no budget needed."""

    name = "anytime-sh"

    def __init__(self, k: int, record_history: bool = False):
        super().__init__(k, record_history)
        self.all_arms = list(range(k))
        self.survivors = list(self.all_arms)
        self.quota = 1
        self.passes = 0
        self._pos = 0

    def _next_arm(self) -> int:
        return self.survivors[self._pos % len(self.survivors)]

    def _advance(self, arm: int) -> None:
        self._pos += 1
        if self._pos < len(self.survivors) * self.quota:
            return
        self._pos = 0
        self.survivors = halve(self.survivors, self.stats)
        self.quota *= 2
        if len(self.survivors) == 1:
            self.survivors = list(self.all_arms)
            self.quota = 1
            self.passes += 1


POLICY_KINDS = ("ucb1", "sh", "time-sh", "anytime-sh")


def make_policy(kind: str, k: int, budget: int | None = None,
                c: float = 1 / math.sqrt(2), **kwargs) -> Policy:
    """Build a policy by name; ``sh`` and ``time-sh`` need ``budget``."""
    if kind == "ucb1":
        return UCB1(k, c=c, **kwargs)
    if kind == "anytime-sh":
        return AnytimeSequentialHalving(k, **kwargs)
    if kind in ("sh", "time-sh"):
        if budget is None:
            raise ValueError(f"policy {kind!r} needs a budget known in advance")
        if kind == "sh":
            return SequentialHalving(k, budget, **kwargs)
        return TimeSequentialHalving(k, budget, **kwargs)
    raise ValueError(f"unknown policy {kind!r}; expected one of {', '.join(POLICY_KINDS)}")


def simple_regret(recommended: int, mus: Sequence[float]) -> float:
    if not 0 <= recommended < len(mus):
        raise IndexError(f"arm {recommended} out of range")
    return max(mus) - mus[recommended]


def cumulative_regret(history: Iterable[PullRecord], mus: Sequence[float]) -> float:
    best = max(mus)
    return sum(best - mus[r.arm] for r in history)


def _run_deterministic(policy: Policy, steps: int) -> None:
    for _ in range(steps):
        arm = policy.select()
        policy.update(arm, float(arm))


def format_sh_schedule(k: int, budget: int) -> list[str]:
    """One line per SH phase, with the top arm's running total under stable ordering."""
    plan = sh_plan(k, budget)
    lines = []
    top = 0
    for p, (s, n) in enumerate(plan.phases, start=1):
        top += n
        lines.append(f"phase {p}: survivors={s} pulls_per_arm={n} top_arm_total={top}")
    lines.append(f"total: {plan.total_pulls} of budget {budget}")
    return lines


def format_anytime_schedule(k: int, passes: int = 1) -> list[str]:
    """One line per Anytime SH round, produced by running the policy on stable rewards."""
    if k < 2:
        raise ValueError("need at least 2 arms")
    policy = AnytimeSequentialHalving(k)
    top = k - 1
    lines = []
    for p in range(1, passes + 1):
        pass_total = 0
        for r, (s, n) in enumerate(anytime_pass_rounds(k), start=1):
            _run_deterministic(policy, s * n)
            pass_total += s * n
            lines.append(
                f"pass {p} round {r}: survivors={s} pulls_per_arm={n} "
                f"top_arm_total={policy.stats[top].pulls}"
            )
        lines.append(f"pass {p} total: {pass_total}")
    return lines
