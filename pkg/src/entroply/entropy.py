"""Entropy rates of chess pieces and positions.

A piece moving at random on an empty board is a random walk on its mobility
graph.  For an undirected graph the stationary distribution is proportional
to node degree, and the entropy rate is the stationary average of the
per-node transition entropies.  All quantities are in bits.
"""

from __future__ import annotations

import csv
import math
import sys
from dataclasses import dataclass, field
from typing import Mapping, Optional, Sequence, TextIO, Union

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import connected_components

from .chesscore import PieceKind, Position

__all__ = [
    "MobilityGraph", "EntropyModel", "PawnRateError", "DisconnectedGraphError",
    "DEFAULT_PAWN_RATE", "DEFAULT_BEST_GAIN",
    "build_mobility_graph", "transition_matrix", "stationary_distribution",
    "entropy_rate", "piece_entropy_rate", "asymptotic_rate",
    "position_entropy", "info_gain", "heuristic_efficiency",
    "graph_table", "write_graph_csv",
]

# Forward push plus two capture diagonals.
DEFAULT_PAWN_RATE = math.log2(3)
DEFAULT_BEST_GAIN = math.log2(30)

_ASYMPTOTIC_MOVES = {
    PieceKind.KING: 8,
    PieceKind.KNIGHT: 8,
    PieceKind.BISHOP: 14,
    PieceKind.ROOK: 14,
    PieceKind.QUEEN: 28,
}


class PawnRateError(ValueError):
    """Pawn moves are one-directional, so they have no undirected mobility graph."""


class DisconnectedGraphError(ValueError):
    """A stationary distribution was requested on a graph with several components."""


@dataclass(frozen=True)
class MobilityGraph:
    """Undirected weighted graph on the ``n * n`` squares of a board."""

    n: int
    edges: tuple[tuple[int, int, float], ...]
    kind: Optional[PieceKind] = None

    @property
    def n_nodes(self) -> int:
        return self.n * self.n

    def weights(self) -> np.ndarray:
        w = np.zeros((self.n_nodes, self.n_nodes))
        for i, j, wt in self.edges:
            w[i, j] = wt
            w[j, i] = wt
        return w

    def degrees(self) -> np.ndarray:
        """Total edge weight at each node."""
        return self.weights().sum(axis=1)

    def components(self) -> list[list[int]]:
        """Connected components with at least one edge, ordered by lowest node."""
        w = self.weights()
        n_comp, labels = connected_components(csr_matrix(w), directed=False)
        deg = w.sum(axis=1)
        comps = [[int(i) for i in np.flatnonzero(labels == c)] for c in range(n_comp)]
        comps = [c for c in comps if deg[c].sum() > 0]
        return sorted(comps, key=min)


def _piece_targets(kind: PieceKind, n: int, f: int, r: int):
    if kind == PieceKind.KNIGHT:
        deltas = [(1, 2), (2, 1), (2, -1), (1, -2), (-1, -2), (-2, -1), (-2, 1), (-1, 2)]
        steps = 1
    elif kind == PieceKind.KING:
        deltas = [(a, b) for a in (-1, 0, 1) for b in (-1, 0, 1) if a or b]
        steps = 1
    elif kind == PieceKind.ROOK:
        deltas, steps = [(1, 0), (-1, 0), (0, 1), (0, -1)], n
    elif kind == PieceKind.BISHOP:
        deltas, steps = [(1, 1), (1, -1), (-1, 1), (-1, -1)], n
    else:
        deltas = [(a, b) for a in (-1, 0, 1) for b in (-1, 0, 1) if a or b]
        steps = n
    for df, dr in deltas:
        for k in range(1, steps + 1):
            ff, rr = f + df * k, r + dr * k
            if not (0 <= ff < n and 0 <= rr < n):
                break
            yield rr * n + ff


def build_mobility_graph(kind: PieceKind, n: int = 8) -> MobilityGraph:
    """Unit-weight edge between two squares iff ``kind`` moves between them on an empty board."""
    kind = PieceKind(kind)
    if kind == PieceKind.PAWN:
        raise PawnRateError(
            "pawn moves are not symmetric; use the model's configured pawn rate instead"
        )
    if n < 3:
        raise ValueError(f"board size must be >= 3, got {n}")
    edges = []
    for sq in range(n * n):
        for t in _piece_targets(kind, n, sq % n, sq // n):
            if sq < t:
                edges.append((sq, t, 1.0))
    return MobilityGraph(n, tuple(edges), kind)


def transition_matrix(g: MobilityGraph) -> np.ndarray:
    """Row-stochastic matrix ``P[i, j] = w[i, j] / sum_k w[i, k]``.

    Isolated nodes get an all-zero row.
    """
    w = g.weights()
    deg = w.sum(axis=1, keepdims=True)
    with np.errstate(invalid="ignore", divide="ignore"):
        p = np.where(deg > 0, w / deg, 0.0)
    return p


def stationary_distribution(g: MobilityGraph, component: Optional[int] = None) -> np.ndarray:
    """Degree-proportional stationary distribution over all ``n * n`` nodes.

    On a disconnected graph a ``component`` index (into ``g.components()``)
    must be given; nodes outside it get probability zero.
    """
    deg = g.degrees()
    comps = g.components()
    if component is None:
        if len(comps) != 1:
            sizes = ", ".join(f"#{i}: {len(c)} nodes" for i, c in enumerate(comps))
            raise DisconnectedGraphError(
                f"graph has {len(comps)} components ({sizes}); select one with component="
            )
        nodes = comps[0]
    else:
        nodes = comps[component]
    mu = np.zeros(g.n_nodes)
    mu[nodes] = deg[nodes] / deg[nodes].sum()
    return mu


def _row_entropies(p: np.ndarray) -> np.ndarray:
    with np.errstate(divide="ignore", invalid="ignore"):
        terms = np.where(p > 0, -p * np.log2(p), 0.0)
    return terms.sum(axis=1)


def entropy_rate(g: MobilityGraph, component: Optional[int] = None) -> float:
    """Entropy rate ``sum_i mu_i H(P[i, :])`` of the random walk on ``g``."""
    mu = stationary_distribution(g, component)
    return float(mu @ _row_entropies(transition_matrix(g)))


def piece_entropy_rate(kind: PieceKind, n: int = 8) -> float:
    """Exact entropy rate of ``kind`` on an empty ``n x n`` board.

    Components (the two bishop colour classes) are combined by their share of
    total edge weight, which is the degree-proportional stationary mixture.
    """
    g = build_mobility_graph(kind, n)
    deg = g.degrees()
    total = deg.sum()
    rate = 0.0
    for idx, comp in enumerate(g.components()):
        rate += deg[comp].sum() / total * entropy_rate(g, idx)
    return float(rate)


def asymptotic_rate(kind: PieceKind) -> float:
    """Tabulated rate ``log2(moves)`` for king, knight, bishop, rook and queen."""
    kind = PieceKind(kind)
    if kind == PieceKind.PAWN:
        raise PawnRateError("no asymptotic pawn rate; the model uses a configurable default")
    return math.log2(_ASYMPTOTIC_MOVES[kind])


@dataclass(frozen=True)
class EntropyModel:
    """Per-piece entropy rates plus the reference reduction of the best move category."""

    rates: Mapping[PieceKind, float]
    best_gain: float = DEFAULT_BEST_GAIN
    mode: str = "asymptotic"
    board_size: int = 8
    _lookup: tuple = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        missing = [k for k in PieceKind if k not in self.rates]
        if missing:
            raise ValueError(f"missing rates for {[k.name for k in missing]}")
        if any(v <= 0 for v in self.rates.values()):
            raise ValueError("all entropy rates must be positive")
        if self.best_gain < max(self.rates.values()):
            raise ValueError("best_gain must be at least the largest piece rate")
        object.__setattr__(self, "_lookup", (0.0,) + tuple(self.rates[k] for k in PieceKind))

    @classmethod
    def asymptotic(cls, pawn_rate: float = DEFAULT_PAWN_RATE,
                   best_gain: float = DEFAULT_BEST_GAIN) -> EntropyModel:
        rates = {k: asymptotic_rate(k) for k in PieceKind if k != PieceKind.PAWN}
        rates[PieceKind.PAWN] = pawn_rate
        return cls(rates, best_gain, "asymptotic", 8)

    @classmethod
    def exact(cls, n: int = 8, pawn_rate: float = DEFAULT_PAWN_RATE,
              best_gain: float = DEFAULT_BEST_GAIN) -> EntropyModel:
        rates = {k: piece_entropy_rate(k, n) for k in PieceKind if k != PieceKind.PAWN}
        rates[PieceKind.PAWN] = pawn_rate
        return cls(rates, best_gain, "exact", n)

    def rate(self, kind: PieceKind) -> float:
        return self._lookup[kind]


def position_entropy(p: Position, model: EntropyModel) -> float:
    """Sum of the model rates of every piece on the board."""
    lookup = model._lookup
    return math.fsum(lookup[abs(code)] for code in p.board if code)


def info_gain(before: Position, after: Position, model: EntropyModel) -> float:
    """Entropy removed by a move: ``H(before) - H(after)``.

    Summed over per-kind piece count changes, so a plain capture yields the
    victim's rate exactly rather than a difference of two rounded totals.
    """
    counts = [0] * 7
    for code in before.board:
        if code:
            counts[abs(code)] += 1
    for code in after.board:
        if code:
            counts[abs(code)] -= 1
    lookup = model._lookup
    return math.fsum(c * lookup[k] for k, c in enumerate(counts) if c)


def heuristic_efficiency(delta_h: float, delta_nodes: int) -> float:
    """Information gained per searched node."""
    if delta_nodes < 1:
        raise ValueError("delta_nodes must be >= 1")
    return delta_h / delta_nodes


def graph_table(g: MobilityGraph) -> list[tuple[int, float, float, float]]:
    """Rows of ``(node, degree, mu, row_entropy)``; mu is degree over total degree."""
    deg = g.degrees()
    mu = deg / deg.sum()
    h = _row_entropies(transition_matrix(g))
    return [(i, float(deg[i]), float(mu[i]), float(h[i])) for i in range(g.n_nodes)]


def write_graph_csv(g: MobilityGraph, dest: Union[str, TextIO, None] = None) -> None:
    rows = graph_table(g)
    if dest is None or dest == "-":
        _write_rows(sys.stdout, rows)
    elif isinstance(dest, str):
        with open(dest, "w", newline="") as fh:
            _write_rows(fh, rows)
    else:
        _write_rows(dest, rows)


def _write_rows(fh: TextIO, rows: Sequence[tuple]) -> None:
    w = csv.writer(fh, lineterminator="\n")
    w.writerow(["node", "degree", "mu", "row_entropy"])
    for node, deg, mu, h in rows:
        w.writerow([node, f"{deg:g}", repr(mu), repr(h)])
