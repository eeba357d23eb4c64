"""Hex on an n x n rhombus without the swap rule.

P1 (X) joins the top and bottom rows, P2 (O) the left and right columns.
Cell (r, c) touches (r-1, c), (r-1, c+1), (r, c-1), (r, c+1), (r+1, c-1) and
(r+1, c). Draws are impossible.
"""

from __future__ import annotations

import random

import numpy as np

from . import _kernels
from .base import BoardState, Outcome, Player

__all__ = ["HexState", "hex_neighbours"]

_OFFSETS = ((-1, 0), (-1, 1), (0, -1), (0, 1), (1, -1), (1, 0))


def hex_neighbours(cell: int, n: int) -> list[int]:
    r, c = divmod(cell, n)
    return [(r + dr) * n + c + dc for dr, dc in _OFFSETS
            if 0 <= r + dr < n and 0 <= c + dc < n]


def _connects(board: bytes, n: int, cell: int) -> bool:
    """Whether the group containing ``cell`` touches both of its owner's edges."""
    stone = board[cell]
    seen = {cell}
    stack = [cell]
    low = high = False
    while stack:
        x = stack.pop()
        r, c = divmod(x, n)
        pos = r if stone == 1 else c
        low = low or pos == 0
        high = high or pos == n - 1
        if low and high:
            return True
        for nb in hex_neighbours(x, n):
            if nb not in seen and board[nb] == stone:
                seen.add(nb)
                stack.append(nb)
    return False


class HexState(BoardState):
    __slots__ = ()

    game_id = "hex"

    @classmethod
    def initial(cls, n: int = 5) -> "HexState":
        if n < 1:
            raise ValueError("board size must be positive")
        return cls(n, bytes(n * n), 0)

    def _generate_moves(self) -> list:
        return [i for i, v in enumerate(self.board) if v == 0]

    def apply(self, move: int) -> "HexState":
        self._check_legal(move)
        board = bytearray(self.board)
        board[move] = self.to_move + 1
        board = bytes(board)
        result = None
        if _connects(board, self.n, move):
            result = Outcome.win_for(Player(self.to_move))
        return HexState(self.n, board, 1 - self.to_move, result)

    def playout(self, rng: random.Random) -> Outcome:
        if self._outcome is not None:
            return self._outcome
        board = np.frombuffer(self.board, dtype=np.uint8).copy()
        winner = _kernels.hex_playout(board, self.n, self.to_move, rng.getrandbits(63))
        return Outcome.P1_WIN if winner == 1 else Outcome.P2_WIN

    def render(self) -> str:
        rows = []
        for r in range(self.n):
            cells = self.board[r * self.n:(r + 1) * self.n]
            rows.append(" " * r + " ".join(self.symbols[v] for v in cells))
        return "\n".join(rows)
