import csv
import io
import math
import random

import numpy as np
import pytest

import oracles
from entroply.chesscore import START_FEN, PieceKind, apply_move, generate_legal_moves, parse_fen
from entroply.entropy import (
    DEFAULT_BEST_GAIN, DisconnectedGraphError, EntropyModel, PawnRateError, asymptotic_rate,
    build_mobility_graph, entropy_rate, graph_table, heuristic_efficiency, info_gain,
    piece_entropy_rate, position_entropy, stationary_distribution, transition_matrix,
    write_graph_csv,
)

SLIDERS_AND_LEAPERS = [PieceKind.KING, PieceKind.KNIGHT, PieceKind.BISHOP, PieceKind.ROOK, PieceKind.QUEEN]


def test_asymptotic_table():
    expected = {PieceKind.KING: 8, PieceKind.KNIGHT: 8, PieceKind.BISHOP: 14,
                PieceKind.ROOK: 14, PieceKind.QUEEN: 28}
    for kind, moves in expected.items():
        assert asymptotic_rate(kind) == math.log2(moves)
    assert asymptotic_rate(PieceKind.QUEEN) == pytest.approx(4.8074, abs=1e-4)
    with pytest.raises(PawnRateError):
        asymptotic_rate(PieceKind.PAWN)


@pytest.mark.parametrize("kind,edges", [
    (PieceKind.KNIGHT, 168), (PieceKind.KING, 210), (PieceKind.ROOK, 448),
    (PieceKind.BISHOP, 280), (PieceKind.QUEEN, 728),
])
def test_edge_counts(kind, edges):
    # Counted from the oracle's attack sets on an otherwise empty board.
    g = build_mobility_graph(kind, 8)
    assert g.n_nodes == 64
    assert len(g.edges) == edges


def _oracle_edges(kind):
    letter = "KNBRQ"[SLIDERS_AND_LEAPERS.index(kind)]
    total = 0
    for f in range(8):
        for r in range(8):
            b = oracles.Board("8/8/8/8/8/8/8/8 w - - 0 1")
            b.sq = {(f, r): letter}
            total += len(oracles.attacks(b, f, r))
    return total // 2


@pytest.mark.parametrize("kind", SLIDERS_AND_LEAPERS)
def test_edge_counts_match_oracle(kind):
    assert len(build_mobility_graph(kind, 8).edges) == _oracle_edges(kind)


def test_rook_rate_is_log14():
    assert abs(piece_entropy_rate(PieceKind.ROOK, 8) - math.log2(14)) < 1e-12


def test_king_rate_matches_degree_oracle():
    rate, total_degree = oracles.king_rate_oracle()
    assert total_degree == 420
    assert abs(piece_entropy_rate(PieceKind.KING, 8) - rate) < 1e-10


@pytest.mark.parametrize("kind", [PieceKind.KING, PieceKind.KNIGHT, PieceKind.ROOK, PieceKind.QUEEN])
@pytest.mark.parametrize("n", [3, 5, 8])
def test_stationary_distribution_is_invariant(kind, n):
    g = build_mobility_graph(kind, n)
    if len(g.components()) != 1:
        pytest.skip("disconnected")
    mu = stationary_distribution(g)
    p = transition_matrix(g)
    assert np.allclose(mu @ p, mu, atol=1e-10)
    assert abs(mu.sum() - 1) < 1e-12
    # An isolated square (the 3x3 knight's centre) has an empty row.
    live = g.degrees() > 0
    assert np.allclose(p.sum(axis=1)[live], 1.0)
    assert np.all(mu[~live] == 0)


def test_bishop_graph_splits_by_colour():
    g = build_mobility_graph(PieceKind.BISHOP, 8)
    comps = g.components()
    assert [len(c) for c in comps] == [32, 32]
    with pytest.raises(DisconnectedGraphError):
        stationary_distribution(g)
    # Both colour classes are mirror images, so the rates agree.
    assert entropy_rate(g, 0) == pytest.approx(entropy_rate(g, 1), abs=1e-12)
    assert piece_entropy_rate(PieceKind.BISHOP, 8) == pytest.approx(entropy_rate(g, 0), abs=1e-12)


def test_pawn_graph_rejected():
    with pytest.raises(PawnRateError):
        build_mobility_graph(PieceKind.PAWN, 8)


def test_small_board_rejected():
    with pytest.raises(ValueError):
        build_mobility_graph(PieceKind.KING, 2)


@pytest.mark.parametrize("kind", SLIDERS_AND_LEAPERS)
def test_rates_rise_with_board_size(kind):
    rates = [piece_entropy_rate(kind, n) for n in range(3, 11)]
    assert all(a < b for a, b in zip(rates, rates[1:]))


@pytest.mark.parametrize("kind", SLIDERS_AND_LEAPERS)
def test_exact_rate_bounded_by_table_on_8x8(kind):
    assert piece_entropy_rate(kind, 8) <= asymptotic_rate(kind) + 1e-12


def test_exact_rates_8x8_frozen():
    frozen = {PieceKind.KING: 2.7658, PieceKind.KNIGHT: 2.4946, PieceKind.BISHOP: 3.1605,
              PieceKind.ROOK: 3.8074, PieceKind.QUEEN: 4.5125}
    for kind, value in frozen.items():
        assert piece_entropy_rate(kind, 8) == pytest.approx(value, abs=5e-5)


def test_model_validation():
    with pytest.raises(ValueError):
        EntropyModel.asymptotic(pawn_rate=0.0)
    with pytest.raises(ValueError):
        EntropyModel.asymptotic(best_gain=4.0)  # below the queen's rate
    m = EntropyModel.asymptotic()
    assert m.best_gain == DEFAULT_BEST_GAIN
    assert m.rate(PieceKind.PAWN) == pytest.approx(math.log2(3))
    exact = EntropyModel.exact(8)
    assert exact.rate(PieceKind.ROOK) == pytest.approx(math.log2(14))


def test_position_entropy_start():
    m = EntropyModel.asymptotic()
    expected = (16 * math.log2(3) + 4 * 3 + 4 * math.log2(14) + 4 * math.log2(14)
                + 2 * math.log2(28) + 2 * 3)
    assert position_entropy(parse_fen(START_FEN), m) == pytest.approx(expected, abs=1e-12)


def test_info_gain_over_random_playout():
    model = EntropyModel.asymptotic()
    rng = random.Random(1)
    p = parse_fen(START_FEN)
    for _ in range(1000):
        moves = generate_legal_moves(p)
        if not moves:
            p = parse_fen(START_FEN)
            continue
        m = rng.choice(moves)
        child = apply_move(p, m)
        gain = info_gain(p, child, model)
        if m.promotion:
            extra = model.rate(PieceKind.PAWN) - model.rate(m.promotion)
        else:
            extra = 0.0
        if m.is_en_passant:
            assert gain == model.rate(PieceKind.PAWN) + extra
        elif m.is_capture:
            victim = model.rate(PieceKind(abs(p.board[m.to_sq])))
            if m.promotion:
                assert gain == pytest.approx(victim + extra, abs=1e-12)
            else:
                assert gain == victim
        elif not m.promotion:
            assert gain == 0.0
        p = child


def test_heuristic_efficiency():
    assert heuristic_efficiency(3.0, 6) == 0.5
    with pytest.raises(ValueError):
        heuristic_efficiency(1.0, 0)


def test_graph_table_and_csv():
    g = build_mobility_graph(PieceKind.KING, 8)
    rows = graph_table(g)
    assert len(rows) == 64
    corner = rows[0]
    assert corner[1] == 3 and corner[2] == pytest.approx(3 / 420)
    assert corner[3] == pytest.approx(math.log2(3))
    buf = io.StringIO()
    write_graph_csv(g, buf)
    parsed = list(csv.reader(io.StringIO(buf.getvalue())))
    assert parsed[0] == ["node", "degree", "mu", "row_entropy"]
    assert len(parsed) == 65
    assert float(parsed[1][2]) == corner[2]
