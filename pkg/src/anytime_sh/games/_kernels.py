"""Compiled uniform random playouts.

Each kernel takes a copy of the board (uint8, row-major, 0 empty / 1 P1 /
2 P2), the player to move (0 or 1) and a 64-bit seed, and returns the
winner's board code, or 0 for a draw. Randomness comes from a private
splitmix64 stream so results depend only on the seed.
"""

import numpy as np
from numba import njit

_GOLDEN = np.uint64(0x9E3779B97F4A7C15)
_MIX1 = np.uint64(0xBF58476D1CE4E5B9)
_MIX2 = np.uint64(0x94D049BB133111EB)
_S30 = np.uint64(30)
_S27 = np.uint64(27)
_S31 = np.uint64(31)
_S11 = np.uint64(11)


@njit(cache=True)
def _splitmix(state):
    state = state + _GOLDEN
    z = state
    z = (z ^ (z >> _S30)) * _MIX1
    z = (z ^ (z >> _S27)) * _MIX2
    return state, z ^ (z >> _S31)


@njit(cache=True)
def _below(state, n):
    """Uniform integer in [0, n) and the advanced state."""
    state, z = _splitmix(state)
    return state, np.int64((z >> _S11) % np.uint64(n))


@njit(cache=True)
def _shuffle(cells, count, state):
    for i in range(count - 1, 0, -1):
        state, j = _below(state, i + 1)
        tmp = cells[i]
        cells[i] = cells[j]
        cells[j] = tmp
    return state


@njit(cache=True)
def hex_p1_connected(board, n):
    """True when P1 stones join row 0 to row n-1."""
    seen = np.zeros(n * n, dtype=np.uint8)
    stack = np.empty(n * n, dtype=np.int64)
    top = 0
    for c in range(n):
        if board[c] == 1:
            seen[c] = 1
            stack[top] = c
            top += 1
    while top > 0:
        top -= 1
        cell = stack[top]
        r = cell // n
        c = cell % n
        if r == n - 1:
            return True
        for k in range(6):
            if k == 0:
                rr, cc = r - 1, c
            elif k == 1:
                rr, cc = r - 1, c + 1
            elif k == 2:
                rr, cc = r, c - 1
            elif k == 3:
                rr, cc = r, c + 1
            elif k == 4:
                rr, cc = r + 1, c - 1
            else:
                rr, cc = r + 1, c
            if 0 <= rr < n and 0 <= cc < n:
                nb = rr * n + cc
                if seen[nb] == 0 and board[nb] == 1:
                    seen[nb] = 1
                    stack[top] = nb
                    top += 1
    return False


@njit(cache=True)
def hex_playout(board, n, to_move, seed):
    # Filling every empty cell in uniformly random order is equivalent to a
    # random playout: the first connection survives and a full board has
    # exactly one winner.
    state = np.uint64(seed)
    cells = np.empty(n * n, dtype=np.int64)
    count = 0
    for i in range(n * n):
        if board[i] == 0:
            cells[count] = i
            count += 1
    state = _shuffle(cells, count, state)
    player = to_move
    for i in range(count):
        board[cells[i]] = player + 1
        player = 1 - player
    return 1 if hex_p1_connected(board, n) else 2


@njit(cache=True)
def _run_length(board, n, cell, dr, dc, stone):
    r = cell // n
    c = cell % n
    length = 1
    rr, cc = r + dr, c + dc
    while 0 <= rr < n and 0 <= cc < n and board[rr * n + cc] == stone:
        length += 1
        rr += dr
        cc += dc
    rr, cc = r - dr, c - dc
    while 0 <= rr < n and 0 <= cc < n and board[rr * n + cc] == stone:
        length += 1
        rr -= dr
        cc -= dc
    return length


@njit(cache=True)
def line_through(board, n, cell, need):
    stone = board[cell]
    if _run_length(board, n, cell, 0, 1, stone) >= need:
        return True
    if _run_length(board, n, cell, 1, 0, stone) >= need:
        return True
    if _run_length(board, n, cell, 1, 1, stone) >= need:
        return True
    return _run_length(board, n, cell, 1, -1, stone) >= need


@njit(cache=True)
def inarow_playout(board, n, to_move, seed, need):
    state = np.uint64(seed)
    cells = np.empty(n * n, dtype=np.int64)
    count = 0
    for i in range(n * n):
        if board[i] == 0:
            cells[count] = i
            count += 1
    state = _shuffle(cells, count, state)
    player = to_move
    for i in range(count):
        board[cells[i]] = player + 1
        if line_through(board, n, cells[i], need):
            return player + 1
        player = 1 - player
    return 0


@njit(cache=True)
def breakthrough_moves(board, n, player, src, dst):
    """Fill src/dst with the legal moves of ``player``; returns the count."""
    stone = player + 1
    direction = 1 if player == 0 else -1
    count = 0
    for cell in range(n * n):
        if board[cell] != stone:
            continue
        r = cell // n
        c = cell % n
        rr = r + direction
        if rr < 0 or rr >= n:
            continue
        for dc in range(-1, 2):
            cc = c + dc
            if cc < 0 or cc >= n:
                continue
            target = board[rr * n + cc]
            if dc == 0:
                ok = target == 0
            else:
                ok = target != stone
            if ok:
                src[count] = cell
                dst[count] = rr * n + cc
                count += 1
    return count


@njit(cache=True)
def breakthrough_playout(board, n, to_move, seed):
    state = np.uint64(seed)
    src = np.empty(3 * n * n, dtype=np.int64)
    dst = np.empty(3 * n * n, dtype=np.int64)
    pieces = np.zeros(2, dtype=np.int64)
    for i in range(n * n):
        if board[i] != 0:
            pieces[board[i] - 1] += 1
    player = to_move
    while True:
        count = breakthrough_moves(board, n, player, src, dst)
        if count == 0:
            return 2 - player  # stalemated player loses
        state, j = _below(state, count)
        a = src[j]
        b = dst[j]
        if board[b] != 0:
            pieces[1 - player] -= 1
        board[b] = player + 1
        board[a] = 0
        goal = n - 1 if player == 0 else 0
        if b // n == goal or pieces[1 - player] == 0:
            return player + 1
        player = 1 - player


@njit(cache=True)
def clobber_moves(board, n, player, src, dst):
    stone = player + 1
    other = 2 - player
    count = 0
    for cell in range(n * n):
        if board[cell] != stone:
            continue
        r = cell // n
        c = cell % n
        if r > 0 and board[cell - n] == other:
            src[count] = cell
            dst[count] = cell - n
            count += 1
        if c > 0 and board[cell - 1] == other:
            src[count] = cell
            dst[count] = cell - 1
            count += 1
        if c < n - 1 and board[cell + 1] == other:
            src[count] = cell
            dst[count] = cell + 1
            count += 1
        if r < n - 1 and board[cell + n] == other:
            src[count] = cell
            dst[count] = cell + n
            count += 1
    return count


@njit(cache=True)
def clobber_playout(board, n, to_move, seed):
    state = np.uint64(seed)
    src = np.empty(4 * n * n, dtype=np.int64)
    dst = np.empty(4 * n * n, dtype=np.int64)
    player = to_move
    while True:
        count = clobber_moves(board, n, player, src, dst)
        if count == 0:
            return 2 - player  # no move: the player to move loses
        state, j = _below(state, count)
        board[dst[j]] = player + 1
        board[src[j]] = 0
        player = 1 - player
