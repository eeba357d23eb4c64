from __future__ import annotations

import io
import math

import pytest
from hypothesis import given
from hypothesis import strategies as st

from anytime_sh.bandits import BudgetTooSmallError
from anytime_sh.games import TicTacToeState
from anytime_sh.games.base import MinimaxSolver
from anytime_sh.tournament import (
    CSV_HEADER,
    AgentSpec,
    MatchupResult,
    MatchupSpec,
    agresti_coull,
    game_seed,
    mix64,
    play_game,
    replay,
    run_matchup,
    summarize,
    write_csv,
    write_game_log,
)


class LowestMove:
    """Deterministic stub: always plays the first legal move."""

    name = label = "lowest"

    def choose(self, state, iterations, rng):
        return state.legal_moves()[0]


# --- Agresti-Coull -------------------------------------------------------------

@pytest.mark.parametrize("wins,center,half", [
    (75, 50.00, 7.90),
    (97, 64.30, 7.57),
    (120, 79.25, 6.41),
])
def test_agresti_coull_table_values(wins, center, half):
    c, h = agresti_coull(wins, 150)
    assert round(c, 2) == center
    assert round(h, 2) == half


def test_agresti_coull_hand_formula():
    # n~ = 150 + 3.8416, p~ = (97 + 1.9208) / 153.8416
    p = 98.9208 / 153.8416
    c, h = agresti_coull(97, 150)
    assert c == pytest.approx(100 * p, abs=1e-12)
    assert h == pytest.approx(100 * 1.96 * math.sqrt(p * (1 - p) / 153.8416), abs=1e-12)


@given(n=st.integers(1, 2000), data=st.data())
def test_agresti_coull_symmetry(n, data):
    half_wins = data.draw(st.integers(0, 2 * n))
    x = half_wins / 2
    c1, h1 = agresti_coull(x, n)
    c2, h2 = agresti_coull(n - x, n)
    assert c1 + c2 == pytest.approx(100.0, abs=1e-9)
    assert h1 == pytest.approx(h2, abs=1e-12)
    assert 0.0 < c1 < 100.0


def test_agresti_coull_errors():
    with pytest.raises(ValueError):
        agresti_coull(151, 150)
    with pytest.raises(ValueError):
        agresti_coull(-1, 150)
    with pytest.raises(ValueError):
        agresti_coull(0, 0)


# --- seeds -------------------------------------------------------------------

def test_mix64_is_stable_and_spreads():
    # splitmix64 of 0 is a published reference value
    assert mix64(0) == 0xE220A8397B1DCDAF
    seeds = {game_seed(1, i, f) for i in range(200) for f in (False, True)}
    assert len(seeds) == 400
    assert all(0 <= s < 2**64 for s in seeds)
    assert game_seed(1, 3, True) != game_seed(2, 3, True)


# --- single games --------------------------------------------------------------

def test_uct_self_play_tictactoe_terminates():
    uct = AgentSpec("uct")
    rec = play_game("tictactoe", uct, uct, True, 1000, seed=3)
    assert 5 <= len(rec.moves) <= 9
    final = replay("tictactoe", rec.moves)
    assert final.is_terminal()
    assert final.outcome().value == rec.outcome


def test_play_game_is_deterministic():
    a, b = AgentSpec("anytime-sh"), AgentSpec("uct")
    r1 = play_game("hex-5", a, b, False, 200, seed=99)
    r2 = play_game("hex-5", a, b, False, 200, seed=99)
    assert r1 == r2
    assert r1.outcome != "draw"


def test_play_game_reports_moves():
    seen = []
    rec = play_game("tictactoe", LowestMove(), LowestMove(), True, 1, seed=0,
                    on_move=lambda state, text: seen.append(text))
    assert seen == rec.moves == ["a1", "b1", "c1", "a2", "b2", "c2", "a3"]
    assert rec.outcome == "p1"
    assert rec.score_a == 1.0


def test_illegal_agent_move_is_fatal():
    class Cheater:
        name = label = "cheater"

        def choose(self, state, iterations, rng):
            return 99

    with pytest.raises(RuntimeError, match="illegal"):
        play_game("tictactoe", Cheater(), LowestMove(), True, 1, seed=0)


@pytest.mark.slow
def test_uct_10k_never_loses_to_random():
    # a draw is always available in Tic-Tac-Toe, so any loss is a search failure
    assert MinimaxSolver().value(TicTacToeState.initial()) == 0
    spec = MatchupSpec("tictactoe", AgentSpec("uct"), AgentSpec("random"), 10_000, 200, 5)
    result = run_matchup(spec)
    assert all(r.score_a >= 0.5 for r in result.records)


# --- matchups ------------------------------------------------------------------

def test_mirrored_first_player_wins():
    spec = MatchupSpec("tictactoe", LowestMove(), LowestMove(), 1, 2, 0)
    result = run_matchup(spec)
    assert result.wins_a == 1.0
    assert [r.a_first for r in result.records] == [True, False]
    assert [r.score_a for r in result.records] == [1.0, 0.0]


def test_seat_balance_and_score_conservation():
    spec = MatchupSpec("tictactoe", AgentSpec("uct"), AgentSpec("random"), 50, 150, 8)
    result = run_matchup(spec)
    assert sum(r.a_first for r in result.records) == 75
    assert result.wins_a + result.wins_b == 150
    assert (2 * result.wins_a) == int(2 * result.wins_a)
    assert result.wins_a == sum(r.score_a for r in result.records)
    assert [r.seed for r in result.records] == [
        game_seed(8, i, i % 2 == 0) for i in range(150)]


def test_self_play_is_balanced():
    uct = AgentSpec("uct")
    wins = n = 0
    for base in range(4):
        result = run_matchup(MatchupSpec("hex-5", uct, uct, 40, 26, base))
        wins += result.wins_a
        n += result.n
    center, half = agresti_coull(wins, n)
    assert abs(center - 50.0) <= half


def test_matchup_is_reproducible():
    spec = MatchupSpec("clobber-5", AgentSpec("hmcts"), AgentSpec("anytime-sh"), 100, 4, 21)
    outputs = []
    for _ in range(2):
        buf = io.StringIO()
        result = run_matchup(spec)
        write_csv(buf, summarize([result]))
        write_game_log(buf, [result])
        outputs.append(buf.getvalue())
    assert outputs[0] == outputs[1]


def test_parallel_matches_sequential():
    spec = MatchupSpec("tictactoe", AgentSpec("uct"), AgentSpec("anytime-sh"), 60, 4, 2)
    assert run_matchup(spec, jobs=2).records == run_matchup(spec).records


def test_matchup_spec_validation():
    uct = AgentSpec("uct")
    with pytest.raises(ValueError, match="even"):
        MatchupSpec("tictactoe", uct, uct, 100, 3, 0)
    with pytest.raises(ValueError):
        MatchupSpec("tictactoe", uct, uct, 0, 2, 0)
    with pytest.raises(BudgetTooSmallError):
        MatchupSpec("tictactoe", AgentSpec("hmcts"), uct, 10, 2, 0)
    with pytest.raises(ValueError):
        MatchupSpec("hex-5", AgentSpec("anytime-sh"), uct, 20, 2, 0)
    with pytest.raises(ValueError):
        MatchupSpec("go-9", uct, uct, 100, 2, 0)
    with pytest.raises(ValueError, match="unknown agent"):
        AgentSpec("alphazero")


# --- summaries -----------------------------------------------------------------

def _fake(game, wins, n=150, a="anytime-sh", b="uct", iters=1000, seed=0):
    return MatchupResult(MatchupSpec(game, AgentSpec(a), AgentSpec(b), iters, n, seed), wins, n)


def test_summarize_single_matchup():
    rows = summarize([_fake("hex-5", 97)])
    assert len(rows) == 1
    assert (round(rows[0].center_pct, 2), round(rows[0].half_width_pct, 2)) == (64.30, 7.57)


def test_summarize_average_row():
    rows = summarize([_fake("hex-5", 90), _fake("gomoku-9", 60)])
    assert [r.game for r in rows] == ["hex-5", "gomoku-9", "average"]
    avg = rows[-1]
    assert avg.center_pct == pytest.approx(50.0)
    assert avg.n == 300 and avg.wins_a == 150


def test_pooled_half_width_ten_games():
    games = ["tictactoe", "hex-5", "breakthrough-6", "gomoku-9", "clobber-5",
             "hex-4", "breakthrough-5", "gomoku-7", "clobber-4", "hex-6"]
    rows = summarize([_fake(g, 75) for g in games])
    avg = rows[-1]
    assert avg.n == 1500
    z2 = 1.96 ** 2
    expected = 100 * 1.96 * math.sqrt(0.25 / (1500 + z2))
    assert avg.half_width_pct == pytest.approx(expected, abs=1e-12)
    # 2.527..., often quoted as roughly 2.52
    assert avg.half_width_pct == pytest.approx(2.52, abs=0.01)


def test_csv_format():
    buf = io.StringIO()
    write_csv(buf, summarize([_fake("hex-5", 97.5, seed=4)]))
    lines = buf.getvalue().splitlines()
    assert lines[0] == ",".join(CSV_HEADER)
    assert lines[1] == "hex-5,anytime-sh,uct,1000,150,97.5,64.63,7.56,4"
