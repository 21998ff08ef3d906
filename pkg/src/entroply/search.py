"""Fractional-depth negamax alpha-beta over chess positions.

Each move consumes a policy-dependent amount of *virtual* depth.  A node is
a leaf once its virtual depth reaches the budget or its real ply count
reaches the extension cap.  There is no transposition table, quiescence
search or null move: node counts measure the depth policy alone.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from operator import itemgetter
from typing import Optional

from .chesscore import (
    Move, Position, _apply, _attacked, _category, _VALUE, PieceKind,
    generate_legal_moves, has_legal_move, in_check, material_eval,
)
from .depthpolicy import (
    CHECK_BONUS, DepthPolicy, PolicyContext, RealizationProbability, Uniform,
)

__all__ = [
    "SearchParams", "SearchResult", "SearchAborted", "Searcher",
    "search_root", "fractional_node", "order_moves", "mate_in",
]

_PIECE_KINDS = (None,) + tuple(PieceKind)
# Log-space slack so that k moves at p and a threshold of p**k compare equal.
_RP_EPS = 1e-9


class SearchAborted(Exception):
    """Raised inside the search when the node budget is exhausted."""


@dataclass(frozen=True)
class SearchParams:
    policy: DepthPolicy = field(default_factory=Uniform)
    max_virtual_depth: float = 24.0
    max_extension: int = 32
    step_scale: float = 6.0
    mate_score: int = 100_000
    node_budget: Optional[int] = None

    def __post_init__(self):
        if self.max_virtual_depth <= 0:
            raise ValueError("max_virtual_depth must be positive")
        if self.max_extension < 1:
            raise ValueError("max_extension must be >= 1")
        if self.step_scale <= 0:
            raise ValueError("step_scale must be positive")
        if self.node_budget is not None and self.node_budget < 1:
            raise ValueError("node_budget must be >= 1")

    @classmethod
    def for_depth(cls, depth: float, policy: DepthPolicy | None = None,
                  step_scale: float = 6.0, **kw) -> SearchParams:
        """Params whose budget equals ``depth`` quiet plies."""
        return cls(policy or Uniform(), depth * step_scale, step_scale=step_scale, **kw)

    @property
    def max_uniform_depth(self) -> float:
        return self.max_virtual_depth / self.step_scale


@dataclass(frozen=True)
class SearchResult:
    value: int
    best_move: Optional[Move]
    pv: tuple[Move, ...]
    nodes: int
    max_depth_attained: int
    solved_mate_in: Optional[int]
    cutoffs: int
    aborted: bool = False


def mate_in(value: int, mate_score: int, horizon: int) -> Optional[int]:
    """Moves to a forced mate for the side to move, if ``value`` encodes one."""
    plies = mate_score - value
    if 0 < plies <= horizon:
        return (plies + 1) // 2
    return None


class Searcher:
    """One search: parameters plus the mutable node and cutoff counters."""

    def __init__(self, params: SearchParams):
        self.params = params
        self.policy = params.policy
        self.nodes = 0
        self.cutoffs = 0
        self.max_ply = 0
        self.root_best: Optional[tuple[int, list[Move]]] = None
        self._gate = isinstance(params.policy, RealizationProbability)
        self._log_threshold = math.log(params.policy.threshold) if self._gate else 0.0
        self._budget = params.node_budget if params.node_budget is not None else math.inf

    def expand(self, pos: Position, eval_stm: int) -> list[tuple]:
        """Children of ``pos`` in search order.

        Entries are ``(score, move, child, delta, gives_check, victim)``,
        sorted by descending score with generation order breaking ties.
        """
        us = int(pos.side_to_move)
        board = pos.board
        entries = []
        for m in generate_legal_moves(pos):
            child = _apply(pos, m)
            cb = child.board
            check = _attacked(cb, cb.index(-6 * us), us)
            if m.is_en_passant:
                victim = 1
            elif m.is_capture:
                victim = -board[m.to_sq] * us
            else:
                victim = 0
            delta = _VALUE[victim]
            if m.promotion:
                delta += _VALUE[m.promotion] - 100
            score = delta + CHECK_BONUS if check else delta
            entries.append((score, m, child, delta, check, victim))
        entries.sort(key=itemgetter(0), reverse=True)
        return entries

    def search(self, pos: Position, eval_stm: int, checked: bool, alpha: float, beta: float,
               ply: int, vdepth: float, log_rp: float, pv: list) -> int:
        if self.nodes >= self._budget:
            raise SearchAborted
        self.nodes += 1
        if ply > self.max_ply:
            self.max_ply = ply
        params = self.params
        mate = params.mate_score

        if (vdepth >= params.max_virtual_depth or ply >= params.max_extension
                or (self._gate and log_rp <= self._log_threshold + _RP_EPS)):
            return eval_stm

        entries = self.expand(pos, eval_stm)
        if not entries:
            return -(mate - ply) if checked else 0

        policy = self.policy
        step = params.step_scale
        n = len(entries)
        best = -math.inf
        for score, m, child, delta, check, victim in entries:
            category = _category(_PIECE_KINDS[victim], m.promotion, check)
            inc = policy.increment(PolicyContext(category, score, n), step)
            if inc < 0.0:
                inc = 0.0
            child_rp = log_rp
            if self._gate:
                child_rp += math.log(policy.transition_probability(category))
            child_pv: list = []
            v = -self.search(child, -(eval_stm + delta), check, -beta, -alpha,
                             ply + 1, vdepth + inc, child_rp, child_pv)
            if v > best:
                best = v
                if v > alpha:
                    alpha = v
                    pv[:] = [m] + child_pv
                    if ply == 0:
                        self.root_best = (v, list(pv))
                    if alpha >= beta:
                        self.cutoffs += 1
                        break
        return best


def fractional_node(searcher: Searcher, position: Position, alpha: float, beta: float,
                    real_depth: int = 0, virtual_depth: float = 0.0,
                    pv: Optional[list] = None) -> int:
    """Run the recursive kernel on one node with an explicit window."""
    if not alpha < beta:
        raise ValueError("alpha must be below beta")
    return searcher.search(position, material_eval(position),
                           in_check(position, position.side_to_move),
                           alpha, beta, real_depth, virtual_depth, 0.0,
                           pv if pv is not None else [])


def search_root(p: Position, params: SearchParams) -> SearchResult:
    """Search ``p`` to the fractional depth described by ``params``.

    When the node budget runs out the result is marked ``aborted`` and
    carries the best fully searched root move, if any.
    """
    if not has_legal_move(p):
        raise ValueError("search_root needs a position with at least one legal move")
    s = Searcher(params)
    pv: list[Move] = []
    inf = params.mate_score + 1
    aborted = False
    try:
        value = fractional_node(s, p, -inf, inf, 0, 0.0, pv)
    except SearchAborted:
        aborted = True
        if s.root_best is not None:
            value, pv = s.root_best
        else:
            value, pv = material_eval(p), []
    solved = None if aborted else mate_in(value, params.mate_score, params.max_extension)
    return SearchResult(
        value=int(value),
        best_move=pv[0] if pv else None,
        pv=tuple(pv),
        nodes=s.nodes,
        max_depth_attained=s.max_ply,
        solved_mate_in=solved,
        cutoffs=s.cutoffs,
        aborted=aborted,
    )


def order_moves(p: Position, moves: list[Move], prev_eval: int) -> list[Move]:
    """Sort by ``|child eval - prev_eval| + CHECK_BONUS * gives_check``, stable.

    Both evaluations are taken from the mover's point of view.
    """
    us = int(p.side_to_move)
    scored = []
    for m in moves:
        child = _apply(p, m)
        cb = child.board
        score = abs(-material_eval(child) - prev_eval)
        if _attacked(cb, cb.index(-6 * us), us):
            score += CHECK_BONUS
        scored.append((score, m))
    scored.sort(key=itemgetter(0), reverse=True)
    return [m for _, m in scored]
