"""Monte Carlo tree search with a pluggable selection strategy at the root.

Below the root every agent is plain UCT. At the root the choice of child is
delegated to a strategy:

* ``uct``: UCB1 like every other node; final move is the most visited child.
* ``hmcts``: Sequential Halving over the root's legal moves with the search's
  iteration budget as its plan; final move is the plan's last survivor.
* ``anytime-sh``: Anytime Sequential Halving; final move is the child with
  the best mean.

Rewards are stored at each node from the point of view of the player who
made the move leading into it, so every level maximises the same quantity.
"""

from __future__ import annotations

import math
import random
import time
from dataclasses import dataclass, field
from enum import Enum
from typing import Callable

from .bandits import AnytimeSequentialHalving, Policy, SequentialHalving
from .games.base import GameState, Outcome, Player

__all__ = [
    "RootStrategy",
    "FinalMoveRule",
    "Node",
    "SearchResult",
    "NotAnytimeError",
    "TreeInvariantError",
    "run_search",
    "descend",
    "expand",
    "backpropagate",
    "final_move",
    "validate_tree",
    "C_GAME",
]

C_GAME = math.sqrt(2)

# Leaf evaluator: returns the outcome or P1's score in [0, 1].
Evaluator = Callable[[GameState, random.Random], "Outcome | float"]


class RootStrategy(Enum):
    UCB1_ROOT = "uct"
    SH_ROOT = "hmcts"
    ANYTIME_SH_ROOT = "anytime-sh"

    @classmethod
    def parse(cls, name: "str | RootStrategy") -> "RootStrategy":
        if isinstance(name, cls):
            return name
        for member in cls:
            if member.value == name:
                return member
        choices = ", ".join(m.value for m in cls)
        raise ValueError(f"unknown agent {name!r}; expected one of {choices}")


class FinalMoveRule(Enum):
    ROBUST = "robust"
    MAX_MEAN = "max-mean"


class NotAnytimeError(ValueError):
    """Raised when a strategy that needs its budget in advance gets a time limit."""


class TreeInvariantError(AssertionError):
    pass


class Node:
    __slots__ = ("state", "move", "mover", "player_to_move", "visits", "reward_sum",
                 "children", "order", "untried", "terminal", "child_visits")

    def __init__(self, state: GameState, move=None, mover: Player | None = None):
        self.state = state
        self.move = move
        self.mover = mover
        self.player_to_move = state.current_player
        self.visits = 0
        self.reward_sum = 0.0
        self.children: dict = {}
        # children in creation order; UCB ties go to the earliest
        self.order: list[Node] = []
        self.terminal = state.outcome()
        self.untried = [] if self.terminal is not None else list(state.legal_moves())
        self.child_visits = 0

    @property
    def mean(self) -> float:
        if self.visits == 0:
            raise ValueError("node has no visits")
        return self.reward_sum / self.visits

    def add_child(self, move) -> "Node":
        if move in self.children:
            raise ValueError(f"child for {move!r} already exists")
        if self.untried and self.untried[-1] != move:
            self.untried.remove(move)
        elif self.untried:
            self.untried.pop()
        child = Node(self.state.apply(move), move, self.player_to_move)
        self.children[move] = child
        self.order.append(child)
        return child

    def __repr__(self):
        return f"Node(move={self.move!r}, visits={self.visits}, reward={self.reward_sum:g})"


def descend(node: Node, c: float) -> list[Node]:
    """Follow UCB1 from ``node`` until a node with untried moves or a terminal one."""
    path = [node]
    log = math.log
    sqrt = math.sqrt
    while not node.untried and node.terminal is None:
        log_n = log(node.child_visits)
        best = None
        best_value = -math.inf
        for child in node.order:
            n = child.visits
            value = child.reward_sum / n + c * sqrt(log_n / n)
            if value > best_value:
                best, best_value = child, value
        node = best
        path.append(node)
    return path


def expand(node: Node, rng: random.Random) -> Node:
    """Create the child for a uniformly random untried move."""
    if not node.untried:
        raise ValueError("node has no untried moves")
    i = int(rng.random() * len(node.untried))
    node.untried[i], node.untried[-1] = node.untried[-1], node.untried[i]
    return node.add_child(node.untried[-1])


def backpropagate(path: list[Node], result: "Outcome | float") -> None:
    """Credit every node on ``path`` with one visit and the mover's utility.

    The root (which has no mover) only gains the visit.
    """
    p1 = result.p1_score if isinstance(result, Outcome) else float(result)
    parent = None
    for node in path:
        node.visits += 1
        if node.mover is not None:
            node.reward_sum += p1 if node.mover == Player.P1 else 1.0 - p1
        if parent is not None:
            parent.child_visits += 1
        parent = node


def _default_evaluator(state: GameState, rng: random.Random) -> Outcome:
    return state.playout(rng)


@dataclass
class SearchResult:
    chosen_move: object
    children: list[tuple[object, int, float]]
    iterations_used: int
    root: Node = field(repr=False, compare=False)
    strategy: RootStrategy = RootStrategy.UCB1_ROOT

    def to_dict(self) -> dict:
        state = self.root.state
        return {
            "move": state.move_to_str(self.chosen_move),
            "iterations": self.iterations_used,
            "children": [{"move": state.move_to_str(m), "visits": v, "mean": round(x, 6)}
                         for m, v, x in self.children],
        }


def _root_policy(strategy: RootStrategy, k: int, iterations: int | None) -> Policy | None:
    if strategy is RootStrategy.UCB1_ROOT:
        return None
    if k == 1:
        # a single legal move needs no allocation; this pulls arm 0 forever
        return AnytimeSequentialHalving(1)
    if strategy is RootStrategy.SH_ROOT:
        return SequentialHalving(k, iterations)
    return AnytimeSequentialHalving(k)


def final_move(root: Node, strategy: RootStrategy, policy: Policy | None = None,
               rule: FinalMoveRule = FinalMoveRule.ROBUST):
    """Pick the move to play once the search has stopped."""
    moves = root.state.legal_moves()
    if policy is not None:
        return moves[policy.recommend()]
    visited = [(i, root.children[m]) for i, m in enumerate(moves) if m in root.children]
    if not visited:
        raise RuntimeError("no root child has been visited")
    if rule is FinalMoveRule.ROBUST:
        key = lambda item: (-item[1].visits, -item[1].mean, item[0])  # noqa: E731
    else:
        key = lambda item: (-item[1].mean, -item[1].visits, item[0])  # noqa: E731
    return moves[min(visited, key=key)[0]]


def run_search(root_state: GameState, iterations: int | None = None,
               time_ms: float | None = None,
               strategy: "RootStrategy | str" = RootStrategy.UCB1_ROOT,
               c: float = C_GAME, seed: "int | random.Random | None" = None,
               final_move_rule: "FinalMoveRule | str" = FinalMoveRule.ROBUST,
               evaluator: Evaluator | None = None,
               clock: Callable[[], float] = time.perf_counter) -> SearchResult:
    """Search ``root_state`` and return the chosen move with root statistics.

    Exactly one of ``iterations`` and ``time_ms`` must be given. Under a time
    limit the root strategies still complete one pull per root move before
    the clock is consulted, so a recommendation always exists.
    """
    strategy = RootStrategy.parse(strategy)
    final_move_rule = FinalMoveRule(final_move_rule)
    if (iterations is None) == (time_ms is None):
        raise ValueError("give exactly one of iterations and time_ms")
    if root_state.is_terminal():
        raise ValueError("cannot search from a terminal position")
    if time_ms is not None and strategy is RootStrategy.SH_ROOT:
        raise NotAnytimeError(
            "Sequential Halving at the root needs an iteration budget fixed in "
            "advance and cannot run against a time limit")
    rng = seed if isinstance(seed, random.Random) else random.Random(seed)
    evaluate = evaluator or _default_evaluator

    root = Node(root_state)
    moves = root_state.legal_moves()
    k = len(moves)
    if iterations is not None:
        if iterations < 1:
            raise ValueError("need at least one iteration")
        if strategy is RootStrategy.ANYTIME_SH_ROOT and iterations < k:
            raise ValueError(f"budget of {iterations} iterations is below the {k} root moves")
    policy = _root_policy(strategy, k, iterations)
    min_iterations = k if policy is not None else 1
    deadline = None if time_ms is None else clock() + time_ms / 1000.0

    done = 0
    while True:
        if iterations is not None:
            if done >= iterations:
                break
        elif done >= min_iterations and clock() >= deadline:
            break

        expanded = False
        if policy is None:
            path = descend(root, c)
        else:
            arm = policy.select()
            child = root.children.get(moves[arm])
            if child is None:
                # the root child itself is this iteration's new node
                path = [root, root.add_child(moves[arm])]
                expanded = True
            else:
                path = [root] + descend(child, c)
        leaf = path[-1]
        if leaf.untried and not expanded:
            leaf = expand(leaf, rng)
            path.append(leaf)
        result = leaf.terminal if leaf.terminal is not None else evaluate(leaf.state, rng)
        backpropagate(path, result)
        if policy is not None:
            p1 = result.p1_score if isinstance(result, Outcome) else float(result)
            policy.update(arm, p1 if root.player_to_move == Player.P1 else 1.0 - p1)
        done += 1

    chosen = final_move(root, strategy, policy, final_move_rule)
    children = [(m, root.children[m].visits, root.children[m].mean)
                for m in moves if m in root.children]
    return SearchResult(chosen, children, done, root, strategy)


def validate_tree(root: Node, iterations: int | None = None) -> int:
    """Walk the tree and raise :class:`TreeInvariantError` on any broken invariant.

    Returns the number of nodes checked.
    """
    if iterations is not None and root.visits != iterations:
        raise TreeInvariantError(f"root has {root.visits} visits, expected {iterations}")
    count = 0
    stack = [root]
    while stack:
        node = stack.pop()
        count += 1
        total = sum(ch.visits for ch in node.order)
        if total != node.child_visits:
            raise TreeInvariantError(f"{node!r}: cached child visits {node.child_visits} != {total}")
        if node is root:
            if node.visits != total:
                raise TreeInvariantError(f"root visits {node.visits} != child visit sum {total}")
        elif node.terminal is None and node.visits != total + 1:
            raise TreeInvariantError(f"{node!r}: visits != child visit sum {total} + 1")
        if total > node.visits:
            raise TreeInvariantError(f"{node!r}: children have more visits than the node")
        if not -1e-9 <= node.reward_sum <= node.visits + 1e-9:
            raise TreeInvariantError(f"{node!r}: reward outside [0, visits]")
        legal = node.state.legal_moves()
        keys = set(node.children)
        if not keys <= set(legal):
            raise TreeInvariantError(f"{node!r}: child for an illegal move")
        if keys & set(node.untried) or len(keys) + len(node.untried) != len(legal):
            raise TreeInvariantError(f"{node!r}: children and untried moves do not cover the legal moves")
        if len(node.order) != len(keys):
            raise TreeInvariantError(f"{node!r}: child order list out of sync")
        for child in node.order:
            if child.visits < 1:
                raise TreeInvariantError(f"{child!r}: child without a visit")
            if child.mover != node.player_to_move:
                raise TreeInvariantError(f"{child!r}: mover is not the parent's player to move")
            stack.append(child)
    return count
