"""Chess search lab for entropy-guided fractional-ply alpha-beta."""

from .chesscore import (
    START_FEN, Color, GameStatus, Move, MoveCategory, PieceKind, Position,
    apply_move, classify_move, game_status, generate_legal_moves, material_eval,
    parse_fen, perft, to_fen,
)
from .depthpolicy import (
    AppendixHeuristic, DepthPolicy, EntropyReduction, RealizationProbability, Uniform,
    WinandsTable, ers_fraction, make_policy,
)
from .entropy import EntropyModel, build_mobility_graph, entropy_rate, piece_entropy_rate
from .harness import (
    EpdRecord, ExperimentRow, SweepSpec, compare_policies, emit_csv, load_epd, run_case,
    run_sweep,
)
from .search import SearchParams, SearchResult, search_root

__version__ = "0.1.0"
