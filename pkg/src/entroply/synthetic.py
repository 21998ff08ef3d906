"""Uniform synthetic game trees for checking alpha-beta against minimax.

A tree of branching ``b`` and depth ``n`` has ``b**n`` leaves holding
distinct negamax values (from the point of view of the side to move at the
leaf).  Children are visited best-first, in a seeded shuffle, or in the
worst case: there the leaf values are laid out in nested intervals so that
every child improves on its elder siblings and nothing can be pruned.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass, field
from typing import NamedTuple

__all__ = [
    "SyntheticTree", "AlphaBetaCount", "TreeTooLargeError",
    "knuth_best_case", "brute_minimax", "synthetic_alphabeta",
]

MAX_LEAVES = 10**7


class TreeTooLargeError(ValueError):
    pass


class AlphaBetaCount(NamedTuple):
    value: int
    leaf_count: int
    node_count: int


@dataclass(frozen=True)
class SyntheticTree:
    branching: int
    depth: int
    seed: int = 0
    ordering: str = "random"
    _levels: tuple = field(init=False, repr=False, compare=False)
    _orders: tuple = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        if self.branching < 2:
            raise ValueError("branching must be >= 2")
        if self.depth < 0:
            raise ValueError("depth must be >= 0")
        if self.ordering not in ("perfect", "worst", "random"):
            raise ValueError(f"unknown ordering {self.ordering!r}")
        if self.branching ** self.depth > MAX_LEAVES:
            raise TreeTooLargeError(f"{self.branching}**{self.depth} leaves exceeds {MAX_LEAVES}")
        rng = random.Random(self.seed)
        b = self.branching
        if self.ordering == "worst":
            leaves = _no_cutoff_leaves(b, self.depth)
        else:
            leaves = list(range(b ** self.depth))
            rng.shuffle(leaves)
        # levels[d][i]: negamax value of node i at level d.
        levels = [leaves]
        for _ in range(self.depth):
            below = levels[0]
            levels.insert(0, [max(-v for v in below[i * b:(i + 1) * b])
                              for i in range(len(below) // b)])
        orders = []
        for d in range(self.depth):
            children = levels[d + 1]
            level_orders = []
            for i in range(len(levels[d])):
                idx = list(range(b))
                if self.ordering == "perfect":
                    idx.sort(key=lambda j: children[i * b + j])
                elif self.ordering == "random":
                    rng.shuffle(idx)
                level_orders.append(tuple(idx))
            orders.append(tuple(level_orders))
        object.__setattr__(self, "_levels", tuple(tuple(lv) for lv in levels))
        object.__setattr__(self, "_orders", tuple(orders))

    def leaf_value(self, index: int) -> int:
        return self._levels[-1][index]

    def children(self, level: int, index: int) -> list[int]:
        b = self.branching
        return [index * b + j for j in self._orders[level][index]]


def _no_cutoff_leaves(b: int, n: int) -> list[int]:
    # Root-perspective rank: ascending blocks under the maximiser, descending
    # under the minimiser, so each later child is strictly better for the mover.
    leaves = []
    for index in range(b ** n):
        rank = 0
        digits = [(index // b ** (n - 1 - lv)) % b for lv in range(n)]
        for lv, j in enumerate(digits):
            block = j if lv % 2 == 0 else b - 1 - j
            rank = rank * b + block
        leaves.append(rank if n % 2 == 0 else -rank)
    return leaves


def knuth_best_case(b: int, n: int) -> int:
    """Leaves examined by alpha-beta on a perfectly ordered uniform tree."""
    if b < 2 or n < 1:
        raise ValueError("need b >= 2 and n >= 1")
    return b ** (n // 2) + b ** math.ceil(n / 2) - 1


def brute_minimax(t: SyntheticTree) -> int:
    """Full negamax value with no pruning."""
    def value(level: int, index: int) -> int:
        if level == t.depth:
            return t.leaf_value(index)
        return max(-value(level + 1, c) for c in t.children(level, index))

    return value(0, 0)


def synthetic_alphabeta(t: SyntheticTree) -> AlphaBetaCount:
    """Fail-soft alpha-beta over ``t`` in its configured child order."""
    leaves = nodes = 0

    def search(level: int, index: int, alpha: float, beta: float) -> int:
        nonlocal leaves, nodes
        nodes += 1
        if level == t.depth:
            leaves += 1
            return t.leaf_value(index)
        best = -math.inf
        for c in t.children(level, index):
            v = -search(level + 1, c, -beta, -alpha)
            if v > best:
                best = v
                if v > alpha:
                    alpha = v
                    if alpha >= beta:
                        break
        return best

    value = search(0, 0, -math.inf, math.inf)
    return AlphaBetaCount(int(value), leaves, nodes)
