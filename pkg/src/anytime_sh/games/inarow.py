"""k-in-a-row games on an n x n board: Tic-Tac-Toe and Gomoku."""

from __future__ import annotations

import random

import numpy as np

from . import _kernels
from .base import BoardState, Outcome, Player

__all__ = ["InARowState", "TicTacToeState", "GomokuState"]

_DIRECTIONS = ((0, 1), (1, 0), (1, 1), (1, -1))


def _line_through(board: bytes, n: int, cell: int, need: int) -> bool:
    stone = board[cell]
    r0, c0 = divmod(cell, n)
    for dr, dc in _DIRECTIONS:
        length = 1
        for sign in (1, -1):
            r, c = r0 + sign * dr, c0 + sign * dc
            while 0 <= r < n and 0 <= c < n and board[r * n + c] == stone:
                length += 1
                r += sign * dr
                c += sign * dc
        if length >= need:
            return True
    return False


class InARowState(BoardState):
    """Players alternately fill empty cells; ``need`` or more in a line wins.

    A full board without such a line is a draw.
    """

    __slots__ = ()

    need = 3

    @classmethod
    def initial(cls, n: int) -> "InARowState":
        return cls(n, bytes(n * n), 0)

    def _generate_moves(self) -> list:
        return [i for i, v in enumerate(self.board) if v == 0]

    def apply(self, move: int) -> "InARowState":
        self._check_legal(move)
        board = bytearray(self.board)
        board[move] = self.to_move + 1
        board = bytes(board)
        result = None
        if _line_through(board, self.n, move, self.need):
            result = Outcome.win_for(Player(self.to_move))
        elif 0 not in board:
            result = Outcome.DRAW
        return type(self)(self.n, board, 1 - self.to_move, result)

    def playout(self, rng: random.Random) -> Outcome:
        if self._outcome is not None:
            return self._outcome
        board = np.frombuffer(self.board, dtype=np.uint8).copy()
        winner = _kernels.inarow_playout(board, self.n, self.to_move, rng.getrandbits(63),
                                         self.need)
        return _WINNER[winner]


class TicTacToeState(InARowState):
    __slots__ = ()

    game_id = "tictactoe"
    need = 3

    @classmethod
    def initial(cls, n: int = 3) -> "TicTacToeState":
        return cls(n, bytes(n * n), 0)

    @classmethod
    def from_string(cls, rows: str, to_move: int | None = None) -> "TicTacToeState":
        """Build a position from rows like ``"XO./.X./..."``; ``/`` separates rows."""
        cells = rows.replace("/", "").replace("\n", "")
        n = int(round(len(cells) ** 0.5))
        code = {".": 0, "X": 1, "O": 2}
        board = bytes(code[ch] for ch in cells)
        if to_move is None:
            to_move = 0 if board.count(1) == board.count(2) else 1
        result = None
        for cell, v in enumerate(board):
            if v and _line_through(board, n, cell, cls.need):
                result = Outcome.win_for(Player(v - 1))
                break
        if result is None and 0 not in board:
            result = Outcome.DRAW
        return cls(n, board, to_move, result)


class GomokuState(InARowState):
    __slots__ = ()

    game_id = "gomoku"
    need = 5

    @classmethod
    def initial(cls, n: int = 9) -> "GomokuState":
        return cls(n, bytes(n * n), 0)


_WINNER = {0: Outcome.DRAW, 1: Outcome.P1_WIN, 2: Outcome.P2_WIN}
