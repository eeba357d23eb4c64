"""Seeded agent-versus-agent matches with seat swapping and binomial CIs."""

from __future__ import annotations

import csv
import json
import math
import random
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from typing import IO, Iterable, Sequence

from .bandits import sh_plan
from .games import make_game
from .games.base import GameState, Outcome, Player
from .mcts import C_GAME, NotAnytimeError, RootStrategy, run_search

__all__ = [
    "AGENT_NAMES",
    "AgentSpec",
    "GameRecord",
    "MatchupSpec",
    "MatchupResult",
    "SummaryRow",
    "mix64",
    "game_seed",
    "play_game",
    "run_matchup",
    "agresti_coull",
    "summarize",
    "write_csv",
    "write_game_log",
    "replay",
    "CSV_HEADER",
]

AGENT_NAMES = ("uct", "hmcts", "anytime-sh")
_MASK = (1 << 64) - 1
Z_95 = 1.96


def _splitmix64(x: int) -> int:
    x = (x + 0x9E3779B97F4A7C15) & _MASK
    x = ((x ^ (x >> 30)) * 0xBF58476D1CE4E5B9) & _MASK
    x = ((x ^ (x >> 27)) * 0x94D049BB133111EB) & _MASK
    return x ^ (x >> 31)


def mix64(*values: int) -> int:
    """Fold integers into one 64-bit value with the splitmix64 finaliser."""
    h = 0
    for v in values:
        h = _splitmix64(h ^ (v & _MASK))
    return h


def game_seed(base_seed: int, game_index: int, a_first: bool) -> int:
    return mix64(base_seed, game_index, int(a_first))


@dataclass(frozen=True)
class AgentSpec:
    """An MCTS agent (``uct``, ``hmcts``, ``anytime-sh``) or ``random``."""

    name: str
    c: float = C_GAME
    final_move_rule: str = "robust"

    def __post_init__(self):
        if self.name != "random":
            RootStrategy.parse(self.name)

    @property
    def label(self) -> str:
        return self.name

    def choose(self, state: GameState, iterations: int, rng: random.Random,
               time_ms: float | None = None):
        if self.name == "random":
            moves = state.legal_moves()
            return moves[int(rng.random() * len(moves))]
        budget = {"iterations": iterations} if time_ms is None else {"time_ms": time_ms}
        result = run_search(state, strategy=self.name, c=self.c, seed=rng,
                            final_move_rule=self.final_move_rule, **budget)
        return result.chosen_move


@dataclass
class GameRecord:
    index: int
    seed: int
    a_first: bool
    moves: list[str]
    outcome: str
    score_a: float


def play_game(game: "str | GameState", agent_a: AgentSpec, agent_b: AgentSpec,
              a_first: bool, iterations: int, seed: int, index: int = 0,
              on_move=None, time_ms: float | None = None) -> GameRecord:
    """Play one game to the end; all randomness comes from ``seed``.

    With ``time_ms`` each move gets that much wall-clock time instead of
    ``iterations``, and the game is no longer reproducible.
    ``on_move(state, move_text)`` is called after every move, if given.
    """
    state = make_game(game) if isinstance(game, str) else game
    rng = random.Random(seed)
    seats = {Player.P1: agent_a if a_first else agent_b,
             Player.P2: agent_b if a_first else agent_a}
    moves = []
    while not state.is_terminal():
        agent = seats[state.current_player]
        if time_ms is None:
            move = agent.choose(state, iterations, rng)
        else:
            move = agent.choose(state, iterations, rng, time_ms=time_ms)
        if move not in state.legal_moves():
            raise RuntimeError(f"agent {agent.label} chose illegal move {move!r}")
        text = state.move_to_str(move)
        state = state.apply(move)
        moves.append(text)
        if on_move is not None:
            on_move(state, text)
    outcome = state.outcome()
    a_player = Player.P1 if a_first else Player.P2
    return GameRecord(index, seed, a_first, moves, outcome.value, outcome.utility(a_player))


@dataclass(frozen=True)
class MatchupSpec:
    game: str
    agent_a: AgentSpec
    agent_b: AgentSpec
    iterations: int
    n: int
    base_seed: int
    time_ms: float | None = None

    def __post_init__(self):
        if self.n < 2 or self.n % 2:
            raise ValueError(f"number of games must be even and positive, got {self.n}")
        state = make_game(self.game)
        if self.time_ms is not None:
            for agent in (self.agent_a, self.agent_b):
                if agent.name == "hmcts":
                    raise NotAnytimeError(
                        "hmcts plans its root budget in advance and cannot play on a "
                        "time limit; give an iteration budget instead")
            if not self.time_ms > 0:
                raise ValueError("time per move must be positive")
            return
        if self.iterations < 1:
            raise ValueError("iterations per move must be positive")
        k = len(state.legal_moves())
        for agent in (self.agent_a, self.agent_b):
            if agent.name == "hmcts" and k > 1:
                sh_plan(k, self.iterations)
            elif agent.name == "anytime-sh" and self.iterations < k:
                raise ValueError(f"{agent.name} needs at least {k} iterations per move")


@dataclass
class MatchupResult:
    spec: MatchupSpec
    wins_a: float
    n: int
    records: list[GameRecord] = field(default_factory=list)

    @property
    def budget_label(self) -> int | str:
        if self.spec.time_ms is not None:
            return f"{self.spec.time_ms:g}ms"
        return self.spec.iterations

    @property
    def wins_b(self) -> float:
        return self.n - self.wins_a

    @property
    def fraction_a(self) -> float:
        return self.wins_a / self.n


def _play_indexed(args) -> GameRecord:
    spec, i = args
    a_first = i % 2 == 0
    return play_game(spec.game, spec.agent_a, spec.agent_b, a_first, spec.iterations,
                     game_seed(spec.base_seed, i, a_first), index=i, time_ms=spec.time_ms)


def run_matchup(spec: MatchupSpec, jobs: int = 1) -> MatchupResult:
    """Play ``spec.n`` games, A moving first in the even-numbered ones."""
    tasks = [(spec, i) for i in range(spec.n)]
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            records = list(pool.map(_play_indexed, tasks))
    else:
        records = [_play_indexed(t) for t in tasks]
    wins = sum(r.score_a for r in records)
    return MatchupResult(spec, wins, spec.n, records)


def agresti_coull(wins: float, n: int, z: float = Z_95) -> tuple[float, float]:
    """Adjusted win percentage and its half-width, both in percent."""
    if n < 1:
        raise ValueError("need at least one game")
    if not 0 <= wins <= n:
        raise ValueError(f"wins must lie in [0, {n}], got {wins}")
    n_adj = n + z * z
    p = (wins + z * z / 2) / n_adj
    return 100.0 * p, 100.0 * z * math.sqrt(p * (1.0 - p) / n_adj)


@dataclass
class SummaryRow:
    game: str
    agent_a: str
    agent_b: str
    iters_per_move: int | str
    n: int
    wins_a: float
    center_pct: float
    half_width_pct: float
    base_seed: int | str


def summarize(results: Sequence[MatchupResult]) -> list[SummaryRow]:
    """One row per matchup plus an ``average`` row per pairing over several games.

    The average row's centre is the unweighted mean of the per-game win
    percentages; its half-width comes from the pooled counts.
    """
    rows = []
    groups: dict[tuple, list[MatchupResult]] = {}
    for r in results:
        s = r.spec
        center, half = agresti_coull(r.wins_a, r.n)
        rows.append(SummaryRow(s.game, s.agent_a.label, s.agent_b.label, r.budget_label,
                               r.n, r.wins_a, center, half, s.base_seed))
        groups.setdefault((s.agent_a.label, s.agent_b.label, r.budget_label), []).append(r)
    for (a, b, iters), group in groups.items():
        if len({r.spec.game for r in group}) < 2:
            continue
        wins = sum(r.wins_a for r in group)
        n = sum(r.n for r in group)
        _, half = agresti_coull(wins, n)
        center = 100.0 * sum(r.fraction_a for r in group) / len(group)
        seeds = sorted({r.spec.base_seed for r in group})
        seed = seeds[0] if len(seeds) == 1 else ";".join(map(str, seeds))
        rows.append(SummaryRow("average", a, b, iters, n, wins, center, half, seed))
    return rows


CSV_HEADER = ["game", "agent_a", "agent_b", "iters_per_move", "n", "wins_a",
              "center_pct", "half_width_pct", "base_seed"]


def write_csv(out: IO[str], rows: Iterable[SummaryRow]) -> None:
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(CSV_HEADER)
    for r in rows:
        writer.writerow([r.game, r.agent_a, r.agent_b, r.iters_per_move, r.n,
                         f"{r.wins_a:g}", f"{r.center_pct:.2f}", f"{r.half_width_pct:.2f}",
                         r.base_seed])


def write_game_log(out: IO[str], results: Sequence[MatchupResult], header: str = "") -> None:
    """Full move lists for replay, one entry per matchup."""
    data = {"#": header, "matchups": [{
        "game": r.spec.game,
        "agent_a": r.spec.agent_a.label,
        "agent_b": r.spec.agent_b.label,
        "iters_per_move": r.budget_label,
        "base_seed": r.spec.base_seed,
        "games": [asdict(g) for g in r.records],
    } for r in results]}
    json.dump(data, out, indent=1)
    out.write("\n")


def replay(game: str, moves: Sequence[str]) -> GameState:
    """Apply logged move strings to the initial position of ``game``."""
    state = make_game(game)
    for text in moves:
        state = state.apply(state.parse_move(text))
    return state


def outcome_of(record: GameRecord) -> Outcome:
    return Outcome(record.outcome)
