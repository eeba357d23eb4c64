import math
import random

import pytest
from hypothesis import given, settings, strategies as st

from anytime_sh.bandits import (
    AnytimeSequentialHalving,
    ArmStats,
    BudgetTooSmallError,
    PullRecord,
    SequentialHalving,
    TimeSequentialHalving,
    UCB1,
    anytime_pass_rounds,
    best_arm,
    cumulative_regret,
    format_anytime_schedule,
    format_sh_schedule,
    halve,
    make_policy,
    n_phases,
    sh_plan,
    simple_regret,
    survivor_counts,
    ucb1_select,
    ucb1_value,
)

C_MAB = 1 / math.sqrt(2)


def stats_from(means, pulls):
    return [ArmStats(n, m * n) for m, n in zip(means, pulls)]


def drive(policy, steps, reward=lambda arm: float(arm)):
    for _ in range(steps):
        arm = policy.select()
        policy.update(arm, reward(arm))


# Values frozen from a 30-digit mpmath evaluation of the formula.
@pytest.mark.parametrize("mean,n_arm,n_total,c,expected", [
    (0.5, 10, 12, C_MAB, 0.852484513829189),
    (0.4, 2, 12, C_MAB, 1.188179333938032),
    (0.7, 5, 5, 0.0, 0.7),
])
def test_ucb1_value(mean, n_arm, n_total, c, expected):
    assert ucb1_value(mean, n_arm, n_total, c) == pytest.approx(expected, abs=1e-6)


def test_ucb1_value_rejects_unvisited_arm():
    with pytest.raises(ValueError):
        ucb1_value(0.5, 0, 10, 1.0)


def test_ucb1_select_forced_first_pull():
    assert ucb1_select([ArmStats() for _ in range(10)], C_MAB) == 0
    stats = [ArmStats(1, 1.0), ArmStats(1, 0.0), ArmStats(), ArmStats()]
    assert ucb1_select(stats, C_MAB) == 2


def test_ucb1_select_prefers_less_explored_arm():
    stats = stats_from([0.5, 0.4], [10, 2])
    assert ucb1_select(stats, C_MAB) == 1


def test_ucb1_select_tie_breaks_lowest_index():
    assert ucb1_select(stats_from([0.3, 0.3], [4, 4]), C_MAB) == 0


def test_ucb1_select_empty():
    with pytest.raises(ValueError):
        ucb1_select([], 1.0)


def test_arm_stats_mean_requires_pulls():
    s = ArmStats()
    with pytest.raises(ValueError):
        s.mean
    s.add(0.0)
    s.add(1.0)
    assert s.pulls == 2 and s.mean == 0.5


@pytest.mark.parametrize("k,budget,phases", [
    (8, 24, ((8, 1), (4, 2), (2, 4))),
    (10, 186500, ((10, 4662), (5, 9325), (3, 15541), (2, 23312))),
    (2, 2, ((2, 1),)),
])
def test_sh_plan_golden(k, budget, phases):
    plan = sh_plan(k, budget)
    assert plan.phases == phases
    assert plan.n_phases == math.ceil(math.log2(k))


def test_sh_plan_total_for_table_budget():
    assert sh_plan(10, 186500).total_pulls == 186492


def test_sh_plan_budget_too_small():
    with pytest.raises(BudgetTooSmallError, match="at least 2"):
        sh_plan(2, 1)
    with pytest.raises(BudgetTooSmallError) as info:
        sh_plan(10, 19)
    assert info.value.minimum == 20


def test_sh_plan_near_minimum_does_not_overspend():
    # the bare floor rule would plan 64+32+16+16+20+20 = 168 pulls here
    plan = sh_plan(64, 126)
    assert plan.phases == ((64, 1), (32, 1), (16, 1), (8, 1), (4, 1), (2, 1))
    assert plan.total_pulls == 126


@settings(max_examples=300, deadline=None)
@given(k=st.integers(2, 64), extra=st.integers(0, 5000))
def test_sh_plan_budget_safety(k, extra):
    budget = sum(survivor_counts(k)) + extra
    plan = sh_plan(k, budget)
    assert plan.total_pulls <= budget
    assert all(n >= 1 for _, n in plan.phases)
    counts = [s for s, _ in plan.phases]
    assert counts[0] == k and counts[-1] == 2
    assert all(b == (a + 1) // 2 for a, b in zip(counts, counts[1:]))


def test_sh_plan_matches_floor_rule_when_budget_is_ample():
    for k in range(2, 40):
        budget = 1000 * k
        b = math.ceil(math.log2(k))
        expected = tuple((s, budget // (s * b)) for s in survivor_counts(k))
        assert sh_plan(k, budget).phases == expected


def test_n_phases_is_ceil_log2():
    for k in range(2, 300):
        assert n_phases(k) == math.ceil(math.log2(k))


@pytest.mark.parametrize("survivors,means,pulls,expected", [
    ([0, 1, 2, 3], [0.9, 0.1, 0.8, 0.2], [1, 1, 1, 1], [0, 2]),
    ([0, 1, 2], [0.5, 0.5, 0.1], [3, 2, 3], [0, 1]),
    ([0, 1], [0.5, 0.5], [4, 4], [0]),
])
def test_halve(survivors, means, pulls, expected):
    assert halve(survivors, stats_from(means, pulls)) == expected


def test_halve_prefers_more_pulls_on_equal_means():
    assert halve([0, 1], stats_from([0.5, 0.5], [2, 3])) == [1]


def test_anytime_first_round_is_round_robin():
    policy = AnytimeSequentialHalving(8)
    picks = []
    for _ in range(8):
        picks.append(policy.select())
        policy.update(picks[-1], float(picks[-1]))
    assert picks == list(range(8))


def test_anytime_pass_k8():
    policy = AnytimeSequentialHalving(8)
    drive(policy, 24)
    pulls = [s.pulls for s in policy.stats]
    assert pulls == [1, 1, 1, 1, 3, 3, 7, 7]
    assert policy.passes == 1
    assert policy.survivors == list(range(8)) and policy.quota == 1


def test_anytime_pass_k10_decomposition():
    policy = AnytimeSequentialHalving(10)
    rounds = []
    current, start = None, 0
    for step in range(48):
        state = (len(policy.survivors), policy.quota)
        if state != current:
            if current is not None:
                rounds.append((current, step - start))
            current, start = state, step
        drive(policy, 1)
    rounds.append((current, 48 - start))
    assert rounds == [((10, 1), 10), ((5, 2), 10), ((3, 4), 12), ((2, 8), 16)]
    assert policy.passes == 1
    assert policy.survivors == list(range(10)) and policy.quota == 1


def pass_length_by_formula(k):
    total, s, n = 0, k, 1
    while s > 1:
        total += s * n
        s, n = -(-s // 2), 2 * n
    return total


@pytest.mark.parametrize("k", range(2, 65))
def test_anytime_pass_arithmetic(k):
    expected = pass_length_by_formula(k)
    assert sum(s * n for s, n in anytime_pass_rounds(k)) == expected
    policy = AnytimeSequentialHalving(k)
    rng = random.Random(k)
    steps = 0
    while policy.passes == 0:
        drive(policy, 1, reward=lambda arm: rng.gauss(0, 1))
        steps += 1
    assert steps == expected


def test_anytime_quota_is_power_of_two_and_survivors_nonempty():
    policy = AnytimeSequentialHalving(13)
    rng = random.Random(3)
    for _ in range(1000):
        q = policy.quota
        assert q & (q - 1) == 0
        assert policy.survivors and set(policy.survivors) <= set(range(13))
        if len(policy.survivors) == 13:
            assert q == 1
        drive(policy, 1, reward=lambda arm: rng.random())


@pytest.mark.parametrize("k", [2, 4, 8, 16, 32])
def test_first_pass_matches_sh_power_of_two(k):
    length = pass_length_by_formula(k)
    anytime = AnytimeSequentialHalving(k)
    drive(anytime, length)
    sh = SequentialHalving(k, length)
    drive(sh, length)
    assert sh.complete
    assert [s.pulls for s in anytime.stats] == [s.pulls for s in sh.stats]
    assert anytime.recommend() == sh.recommend() == k - 1


def test_first_pass_matches_sh_with_shuffled_rewards():
    # distinct deterministic rewards in a random order: allocation follows the ranking
    k = 16
    rewards = list(range(k))
    random.Random(0).shuffle(rewards)
    length = pass_length_by_formula(k)
    anytime, sh = AnytimeSequentialHalving(k), SequentialHalving(k, length)
    drive(anytime, length, reward=lambda a: rewards[a])
    drive(sh, length, reward=lambda a: rewards[a])
    assert [s.pulls for s in anytime.stats] == [s.pulls for s in sh.stats]


def test_sh_completed_recommends_top_arm():
    policy = SequentialHalving(8, 24)
    drive(policy, 24)
    assert policy.complete
    assert policy.recommend() == 7


def test_sh_select_stays_within_survivors():
    rng = random.Random(1)
    policy = SequentialHalving(11, 500)
    for _ in range(700):  # runs past the plan
        survivors = set(policy.survivors)
        arm = policy.select()
        assert arm in survivors
        policy.update(arm, rng.gauss(0, 1))
    assert policy.complete and len(policy.survivors) == 2


def test_sh_past_plan_round_robins_final_pair():
    policy = SequentialHalving(8, 24)
    drive(policy, 24)
    picks = []
    for _ in range(4):
        picks.append(policy.select())
        policy.update(picks[-1], float(picks[-1]))
    assert picks == [6, 7, 6, 7]
    assert policy.recommend() == 7


def test_sh_interrupted_recommends_among_survivors():
    policy = SequentialHalving(4, 40)
    rewards = [0.9, 0.1, 0.8, 0.2]
    drive(policy, 20, reward=lambda a: rewards[a])  # end of phase 1
    assert policy.survivors == [0, 2]
    drive(policy, 3, reward=lambda a: -5.0 if a == 0 else rewards[a])
    assert policy.recommend() == 2


def test_time_sh_virtual_clock_phases():
    policy = TimeSequentialHalving(8, 24)
    drive(policy, 24)
    assert [s.pulls for s in policy.stats] == [1, 1, 1, 1, 3, 3, 7, 7]
    assert policy.recommend() == 7


def test_time_sh_fake_clock():
    now = [0.0]
    policy = TimeSequentialHalving(4, 2.0, clock=lambda: now[0])
    drive(policy, 10)
    assert policy.phase == 0 and [s.pulls for s in policy.stats] == [3, 3, 2, 2]
    now[0] = 1.0  # first phase deadline; halving waits for the cycle to finish
    drive(policy, 2)
    assert policy.phase == 0
    drive(policy, 1)
    assert policy.phase == 1 and policy.survivors == [2, 3]
    now[0] = 5.0
    drive(policy, 2)
    assert policy.complete
    assert policy.recommend() == 3


def test_policy_update_contract():
    policy = UCB1(3)
    with pytest.raises(RuntimeError):
        policy.update(0, 1.0)
    arm = policy.select()
    with pytest.raises(IndexError):
        policy.update(7, 1.0)
    with pytest.raises(RuntimeError):
        policy.update(arm + 1, 1.0)
    policy.update(arm, 1.0)
    assert policy.stats[arm].pulls == 1


def test_update_fresh_stats():
    policy = AnytimeSequentialHalving(5)
    drive(policy, 3)
    arm = policy.select()
    assert arm == 3
    policy.update(3, 1.0)
    assert policy.stats[3].pulls == 1 and policy.stats[3].mean == 1.0


def test_recommend_requires_all_pulled():
    policy = AnytimeSequentialHalving(10)
    drive(policy, 5)
    with pytest.raises(RuntimeError):
        policy.recommend()
    drive(policy, 5)
    assert policy.recommend() == 9


def test_recommend_two_arms():
    policy = UCB1(2)
    policy.stats = stats_from([0.9, 0.1], [10, 10])
    assert policy.recommend() == 0


def test_ucb1_literal_recommendation():
    policy = UCB1(2, literal=True)
    policy.stats = stats_from([0.5, 0.4], [10, 2])
    assert policy.recommend() == 1
    policy.literal = False
    assert policy.recommend() == 0


@settings(max_examples=100, deadline=None)
@given(data=st.lists(st.tuples(st.integers(-3, 3), st.integers(1, 4)), min_size=2, max_size=8),
       seed=st.integers(0, 10**6))
def test_recommendation_is_relabeling_invariant(data, seed):
    stats = [ArmStats(n, float(m * n)) for m, n in data]
    perm = list(range(len(stats)))
    random.Random(seed).shuffle(perm)
    permuted = [stats[perm[i]] for i in range(len(stats))]
    chosen = best_arm(range(len(stats)), stats)
    chosen_p = perm[best_arm(range(len(stats)), permuted)]
    s, sp = stats[chosen], stats[chosen_p]
    # same (mean, pulls) class; index only matters among exact duplicates
    assert (s.mean, s.pulls) == (sp.mean, sp.pulls)


@pytest.mark.parametrize("kind", ["ucb1", "sh", "time-sh", "anytime-sh"])
def test_statistical_sanity_two_arms(kind):
    correct = 0
    for seed in range(100):
        rng = random.Random(seed)
        policy = make_policy(kind, 2, budget=1000)
        drive(policy, 1000, reward=lambda a: rng.gauss(float(a), 1.0))
        correct += policy.recommend() == 1
    assert correct >= 99


def test_make_policy_errors():
    with pytest.raises(ValueError):
        make_policy("thompson", 3)
    with pytest.raises(ValueError):
        make_policy("sh", 3)


@pytest.mark.parametrize("recommended,mus,expected", [
    (0, [0.9, 0.5], 0.0),
    (1, [0.9, 0.5], 0.4),
    (1, [1.2, 1.2], 0.0),
])
def test_simple_regret(recommended, mus, expected):
    assert simple_regret(recommended, mus) == pytest.approx(expected)


def test_cumulative_regret():
    mus = [0.9, 0.5]
    assert cumulative_regret([], mus) == 0.0
    assert cumulative_regret([PullRecord(t, 0, 1.0) for t in (1, 2, 3)], mus) == 0.0
    history = [PullRecord(1, 1, 0.0), PullRecord(2, 0, 0.0), PullRecord(3, 1, 0.0)]
    assert cumulative_regret(history, mus) == pytest.approx(0.8)


def test_history_records_contiguous_steps():
    policy = UCB1(3, record_history=True)
    drive(policy, 20)
    assert [r.step for r in policy.history] == list(range(1, 21))
    assert cumulative_regret(policy.history, [0.0, 1.0, 2.0]) == pytest.approx(
        sum(2.0 - r.arm for r in policy.history))


def test_schedule_dumps():
    lines = format_sh_schedule(8, 24)
    assert lines[:3] == [
        "phase 1: survivors=8 pulls_per_arm=1 top_arm_total=1",
        "phase 2: survivors=4 pulls_per_arm=2 top_arm_total=3",
        "phase 3: survivors=2 pulls_per_arm=4 top_arm_total=7",
    ]
    lines = format_anytime_schedule(10, passes=2)
    assert lines[3] == "pass 1 round 4: survivors=2 pulls_per_arm=8 top_arm_total=15"
    assert lines[4] == "pass 1 total: 48"
    assert lines[8] == "pass 2 round 4: survivors=2 pulls_per_arm=8 top_arm_total=30"
