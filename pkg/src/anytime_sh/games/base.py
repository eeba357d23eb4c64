"""Two-player, zero-sum, perfect-information game abstraction."""

from __future__ import annotations

import random
from enum import Enum, IntEnum
from typing import Hashable, Sequence

__all__ = [
    "Player",
    "Outcome",
    "GameValue",
    "IllegalMoveError",
    "NodeLimitExceeded",
    "GameState",
    "BoardState",
    "random_playout",
    "generic_playout",
    "MinimaxSolver",
    "solve_minimax",
    "cell_name",
    "parse_cell",
]


class Player(IntEnum):
    P1 = 0
    P2 = 1

    @property
    def opponent(self) -> "Player":
        return Player(1 - self)

    @property
    def stone(self) -> int:
        """Board code used for this player's pieces."""
        return int(self) + 1


class Outcome(Enum):
    P1_WIN = "p1"
    P2_WIN = "p2"
    DRAW = "draw"

    @classmethod
    def win_for(cls, player: Player) -> "Outcome":
        return cls.P1_WIN if player == Player.P1 else cls.P2_WIN

    @property
    def p1_score(self) -> float:
        return _P1_SCORE[self]

    def utility(self, player: Player) -> float:
        """1 for a win, 0.5 for a draw, 0 for a loss."""
        s = _P1_SCORE[self]
        return s if player == Player.P1 else 1.0 - s


_P1_SCORE = {Outcome.P1_WIN: 1.0, Outcome.P2_WIN: 0.0, Outcome.DRAW: 0.5}


class GameValue(IntEnum):
    """Game-theoretic value for the player to move."""

    LOSS = -1
    DRAW = 0
    WIN = 1


class IllegalMoveError(ValueError):
    pass


class NodeLimitExceeded(RuntimeError):
    pass


class GameState:
    """Immutable game position.

    Subclasses provide ``legal_moves``, ``apply``, ``outcome``, ``render`` and
    move (de)serialisation. ``playout`` may be overridden by a faster routine
    as long as it samples outcomes from the same distribution as repeatedly
    applying uniformly random legal moves.
    """

    __slots__ = ()

    game_id = "abstract"

    @property
    def current_player(self) -> Player:
        raise NotImplementedError

    def legal_moves(self) -> list:
        raise NotImplementedError

    def apply(self, move) -> "GameState":
        raise NotImplementedError

    def outcome(self) -> Outcome | None:
        raise NotImplementedError

    def is_terminal(self) -> bool:
        return self.outcome() is not None

    def render(self) -> str:
        raise NotImplementedError

    def move_to_str(self, move) -> str:
        return str(move)

    def parse_move(self, text: str):
        raise NotImplementedError

    def playout(self, rng: random.Random) -> Outcome:
        return generic_playout(self, rng)

    def key(self) -> Hashable:
        return self


def cell_name(index: int, n_cols: int) -> str:
    r, c = divmod(index, n_cols)
    return f"{chr(ord('a') + c)}{r + 1}"


def parse_cell(text: str, n_rows: int, n_cols: int) -> int:
    text = text.strip().lower()
    try:
        c = ord(text[0]) - ord("a")
        r = int(text[1:]) - 1
    except (IndexError, ValueError):
        raise IllegalMoveError(f"cannot parse cell {text!r}") from None
    if not (0 <= r < n_rows and 0 <= c < n_cols):
        raise IllegalMoveError(f"cell {text!r} is off the board")
    return r * n_cols + c


class BoardState(GameState):
    """Shared storage for games on a rectangular board of byte codes.

    ``board`` holds 0 for empty, 1 for P1 pieces and 2 for P2 pieces.
    """

    __slots__ = ("n", "board", "to_move", "_outcome", "_moves")

    symbols = ".XO"

    def __init__(self, n: int, board: bytes, to_move: int, outcome: Outcome | None = None):
        self.n = n
        self.board = board
        self.to_move = to_move
        self._outcome = outcome
        self._moves = None

    @property
    def current_player(self) -> Player:
        return Player(self.to_move)

    def outcome(self) -> Outcome | None:
        return self._outcome

    def __eq__(self, other):
        return (type(other) is type(self) and self.n == other.n
                and self.board == other.board and self.to_move == other.to_move)

    def __hash__(self):
        return hash((type(self).__name__, self.n, self.board, self.to_move))

    def __repr__(self):
        return f"{type(self).__name__}(n={self.n}, to_move={self.current_player.name})"

    def legal_moves(self) -> list:
        if self._moves is None:
            self._moves = [] if self._outcome is not None else self._generate_moves()
        return self._moves

    def _generate_moves(self) -> list:
        raise NotImplementedError

    def _check_legal(self, move) -> None:
        if move not in self.legal_moves():
            raise IllegalMoveError(f"{move!r} is not legal in {self!r}")

    def render(self) -> str:
        rows = []
        for r in range(self.n):
            cells = self.board[r * self.n:(r + 1) * self.n]
            rows.append("".join(self.symbols[v] for v in cells))
        return "\n".join(rows)

    def move_to_str(self, move) -> str:
        if isinstance(move, tuple):
            return "-".join(cell_name(c, self.n) for c in move)
        return cell_name(move, self.n)

    def parse_move(self, text: str):
        if "-" in text:
            a, b = text.split("-", 1)
            return (parse_cell(a, self.n, self.n), parse_cell(b, self.n, self.n))
        return parse_cell(text, self.n, self.n)


def generic_playout(state: GameState, rng: random.Random) -> Outcome:
    """Apply uniformly random legal moves until the game ends."""
    while True:
        result = state.outcome()
        if result is not None:
            return result
        moves = state.legal_moves()
        state = state.apply(moves[int(rng.random() * len(moves))])


def random_playout(state: GameState, rng: random.Random, fast: bool = True) -> Outcome:
    """Outcome of a uniformly random continuation of ``state``.

    ``fast`` uses the game's compiled playout where one exists; the
    distribution of outcomes is the same either way.
    """
    if fast:
        return state.playout(rng)
    return generic_playout(state, rng)


class MinimaxSolver:
    """Exact negamax with a transposition table, for small games."""

    def __init__(self, node_limit: int = 2_000_000):
        self.node_limit = node_limit
        self.nodes = 0
        self._table: dict = {}

    def value(self, state: GameState) -> GameValue:
        key = state.key()
        cached = self._table.get(key)
        if cached is not None:
            return cached
        self.nodes += 1
        if self.nodes > self.node_limit:
            raise NodeLimitExceeded(f"more than {self.node_limit} positions")
        result = state.outcome()
        if result is not None:
            u = result.utility(state.current_player)
            v = GameValue.WIN if u == 1.0 else GameValue.LOSS if u == 0.0 else GameValue.DRAW
        else:
            v = GameValue.LOSS
            for move in state.legal_moves():
                child = -self.value(state.apply(move))
                if child > v:
                    v = GameValue(child)
                    if v == GameValue.WIN:
                        break
        self._table[key] = v
        return v

    def move_values(self, state: GameState) -> dict:
        """Value for the player to move after each legal move."""
        return {m: GameValue(-self.value(state.apply(m))) for m in state.legal_moves()}

    def losing_moves(self, state: GameState) -> Sequence:
        """Moves that turn the current game value into something worse."""
        best = self.value(state)
        return [m for m, v in self.move_values(state).items() if v < best]


def solve_minimax(state: GameState, node_limit: int = 2_000_000) -> GameValue:
    return MinimaxSolver(node_limit).value(state)
