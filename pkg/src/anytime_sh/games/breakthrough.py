"""Breakthrough on an n x n board.

Each side starts with two full rows of pawns: P1 on rows 0-1 moving towards
row n-1, P2 on the last two rows moving towards row 0. A pawn steps one row
forward, straight onto an empty cell or diagonally onto an empty or enemy
cell (capturing it). Reaching the far row or capturing every enemy pawn
wins. A player left without a legal move loses.
"""

from __future__ import annotations

import random

import numpy as np

from . import _kernels
from .base import BoardState, Outcome, Player

__all__ = ["BreakthroughState"]


def _moves(board: bytes, n: int, player: int) -> list[tuple[int, int]]:
    stone = player + 1
    step = 1 if player == 0 else -1
    out = []
    for cell, v in enumerate(board):
        if v != stone:
            continue
        r, c = divmod(cell, n)
        rr = r + step
        if not 0 <= rr < n:
            continue
        for dc in (-1, 0, 1):
            cc = c + dc
            if not 0 <= cc < n:
                continue
            target = board[rr * n + cc]
            if (target == 0) if dc == 0 else (target != stone):
                out.append((cell, rr * n + cc))
    return out


class BreakthroughState(BoardState):
    __slots__ = ()

    game_id = "breakthrough"

    @classmethod
    def initial(cls, n: int = 6) -> "BreakthroughState":
        if n < 4:
            raise ValueError("Breakthrough needs at least 4 rows")
        board = bytes([1] * (2 * n) + [0] * (n * (n - 4)) + [2] * (2 * n))
        return cls(n, board, 0)

    def _generate_moves(self) -> list:
        return _moves(self.board, self.n, self.to_move)

    def apply(self, move: tuple[int, int]) -> "BreakthroughState":
        self._check_legal(move)
        src, dst = move
        n = self.n
        board = bytearray(self.board)
        board[dst] = board[src]
        board[src] = 0
        board = bytes(board)
        mover = self.to_move
        goal = n - 1 if mover == 0 else 0
        result = None
        if dst // n == goal or (2 - mover) not in board:
            result = Outcome.win_for(Player(mover))
        state = BreakthroughState(n, board, 1 - mover, result)
        if result is None:
            state._moves = _moves(board, n, 1 - mover)
            if not state._moves:
                state._outcome = Outcome.win_for(Player(mover))
        return state

    def playout(self, rng: random.Random) -> Outcome:
        if self._outcome is not None:
            return self._outcome
        board = np.frombuffer(self.board, dtype=np.uint8).copy()
        winner = _kernels.breakthrough_playout(board, self.n, self.to_move,
                                               rng.getrandbits(63))
        return Outcome.P1_WIN if winner == 1 else Outcome.P2_WIN
