"""Clobber on an n x n board filled with a checkerboard of stones.

P1 owns the cells with even ``row + col`` and moves first. A move takes one
of your stones onto an orthogonally adjacent enemy stone, removing it. The
player to move with no capture available loses.
"""

from __future__ import annotations

import random

import numpy as np

from . import _kernels
from .base import BoardState, Outcome, Player

__all__ = ["ClobberState"]


def _moves(board: bytes, n: int, player: int) -> list[tuple[int, int]]:
    stone = player + 1
    other = 2 - player
    out = []
    for cell, v in enumerate(board):
        if v != stone:
            continue
        r, c = divmod(cell, n)
        if r > 0 and board[cell - n] == other:
            out.append((cell, cell - n))
        if c > 0 and board[cell - 1] == other:
            out.append((cell, cell - 1))
        if c < n - 1 and board[cell + 1] == other:
            out.append((cell, cell + 1))
        if r < n - 1 and board[cell + n] == other:
            out.append((cell, cell + n))
    return out


class ClobberState(BoardState):
    __slots__ = ()

    game_id = "clobber"

    @classmethod
    def initial(cls, n: int = 5) -> "ClobberState":
        if n < 1:
            raise ValueError("board size must be positive")
        board = bytes(1 if (r + c) % 2 == 0 else 2 for r in range(n) for c in range(n))
        return cls.at(n, board, 0)

    @classmethod
    def at(cls, n: int, board: bytes, to_move: int) -> "ClobberState":
        state = cls(n, board, to_move)
        state._moves = _moves(board, n, to_move)
        if not state._moves:
            state._outcome = Outcome.win_for(Player(1 - to_move))
        return state

    def _generate_moves(self) -> list:
        return _moves(self.board, self.n, self.to_move)

    def apply(self, move: tuple[int, int]) -> "ClobberState":
        self._check_legal(move)
        src, dst = move
        board = bytearray(self.board)
        board[dst] = board[src]
        board[src] = 0
        return ClobberState.at(self.n, bytes(board), 1 - self.to_move)

    def playout(self, rng: random.Random) -> Outcome:
        if self._outcome is not None:
            return self._outcome
        board = np.frombuffer(self.board, dtype=np.uint8).copy()
        winner = _kernels.clobber_playout(board, self.n, self.to_move, rng.getrandbits(63))
        return Outcome.P1_WIN if winner == 1 else Outcome.P2_WIN
