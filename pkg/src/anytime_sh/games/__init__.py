"""Built-in games, selected by id such as ``hex-5`` or ``clobber-5``."""

from __future__ import annotations

from .base import (
    GameState,
    GameValue,
    IllegalMoveError,
    MinimaxSolver,
    NodeLimitExceeded,
    Outcome,
    Player,
    generic_playout,
    random_playout,
    solve_minimax,
)
from .breakthrough import BreakthroughState
from .clobber import ClobberState
from .hex import HexState
from .inarow import GomokuState, TicTacToeState

__all__ = [
    "GAMES",
    "DEFAULT_GAME_IDS",
    "make_game",
    "GameState",
    "GameValue",
    "IllegalMoveError",
    "MinimaxSolver",
    "NodeLimitExceeded",
    "Outcome",
    "Player",
    "generic_playout",
    "random_playout",
    "solve_minimax",
    "BreakthroughState",
    "ClobberState",
    "GomokuState",
    "HexState",
    "TicTacToeState",
]

# name -> (state class, default board size)
GAMES = {
    "tictactoe": (TicTacToeState, 3),
    "hex": (HexState, 5),
    "breakthrough": (BreakthroughState, 6),
    "gomoku": (GomokuState, 9),
    "clobber": (ClobberState, 5),
}

DEFAULT_GAME_IDS = ("tictactoe", "hex-5", "breakthrough-6", "gomoku-9", "clobber-5")


def make_game(game_id: str) -> GameState:
    """Initial position for ids like ``tictactoe``, ``hex``, ``hex-7`` or ``gomoku-15``."""
    name, _, size = game_id.strip().lower().partition("-")
    if name not in GAMES:
        raise ValueError(f"unknown game {game_id!r}; known: {', '.join(GAMES)}")
    cls, default = GAMES[name]
    if not size:
        return cls.initial(default)
    try:
        n = int(size)
    except ValueError:
        raise ValueError(f"bad board size in {game_id!r}") from None
    if n < 2:
        raise ValueError(f"board size must be at least 2 in {game_id!r}")
    return cls.initial(n)
