"""Chess positions, legal move generation and material evaluation.

Squares are integers 0..63 with a1 = 0, b1 = 1, ..., h8 = 63.  Board cells
hold signed piece codes: ``+kind`` for White, ``-kind`` for Black, 0 for an
empty square.  Positions and moves are immutable tuples.
"""

from __future__ import annotations

import enum
from typing import Iterator, NamedTuple, Optional

__all__ = [
    "Color", "PieceKind", "Piece", "Position", "Move", "GameStatus",
    "MoveCategory", "CategoryKind", "CHECK", "PROMOTION", "QUIET",
    "capture", "check_capture",
    "FenError", "MalformedFen", "IllegalPlacement", "OppositeKingInCheck",
    "IllegalMoveError",
    "START_FEN", "PIECE_VALUES",
    "square", "square_file", "square_rank", "square_name", "parse_square",
    "parse_fen", "to_fen", "generate_legal_moves", "has_legal_move",
    "apply_move", "in_check", "gives_check", "game_status", "classify_move",
    "material_eval", "material_delta", "perft", "san", "parse_move",
    "flip_turn",
]

START_FEN = "rnbqkbnr/pppppppp/8/8/8/8/PPPPPPPP/RNBQKBNR w KQkq - 0 1"


class Color(enum.IntEnum):
    WHITE = 1
    BLACK = -1

    @property
    def other(self) -> Color:
        return Color(-self.value)

    def __neg__(self) -> Color:  # type: ignore[override]
        return Color(-self.value)

    __invert__ = __neg__  # type: ignore[assignment]


class PieceKind(enum.IntEnum):
    PAWN = 1
    KNIGHT = 2
    BISHOP = 3
    ROOK = 4
    QUEEN = 5
    KING = 6

    @property
    def symbol(self) -> str:
        return "pnbrqk"[self - 1]


class Piece(NamedTuple):
    color: Color
    kind: PieceKind


class GameStatus(enum.Enum):
    ONGOING = "ongoing"
    CHECKMATE = "checkmate"
    STALEMATE = "stalemate"


# Centipawn weights; the king carries no material value.
PIECE_VALUES = {
    PieceKind.PAWN: 100,
    PieceKind.KNIGHT: 300,
    PieceKind.BISHOP: 300,
    PieceKind.ROOK: 500,
    PieceKind.QUEEN: 900,
    PieceKind.KING: 0,
}
_VALUE = (0, 100, 300, 300, 500, 900, 0)
# Indexed by signed code + 6.
_SIGNED_VALUE = tuple(
    (1 if code > 0 else -1) * _VALUE[abs(code)] if code else 0 for code in range(-6, 7)
)

WK, WQ, BK, BQ = 1, 2, 4, 8


class FenError(ValueError):
    """Base class for FEN parse failures."""


class MalformedFen(FenError):
    """The text is not syntactically valid FEN."""


class IllegalPlacement(FenError):
    """The FEN parses but describes an impossible piece arrangement."""


class OppositeKingInCheck(FenError):
    """The side that just moved has left its own king in check."""


class IllegalMoveError(ValueError):
    """A move was applied to a position in which it is not legal."""


# --- squares ---------------------------------------------------------------

def square(file: int, rank: int) -> int:
    if not (0 <= file < 8 and 0 <= rank < 8):
        raise ValueError(f"square out of bounds: file={file} rank={rank}")
    return rank * 8 + file


def square_file(sq: int) -> int:
    return sq & 7


def square_rank(sq: int) -> int:
    return sq >> 3


def square_name(sq: int) -> str:
    return "abcdefgh"[sq & 7] + str((sq >> 3) + 1)


def parse_square(name: str) -> int:
    if len(name) != 2 or name[0] not in "abcdefgh" or name[1] not in "12345678":
        raise ValueError(f"bad square name {name!r}")
    return square("abcdefgh".index(name[0]), int(name[1]) - 1)


# --- precomputed geometry ----------------------------------------------------

def _ray(sq: int, df: int, dr: int) -> tuple[int, ...]:
    f, r = sq & 7, sq >> 3
    out = []
    f += df
    r += dr
    while 0 <= f < 8 and 0 <= r < 8:
        out.append(r * 8 + f)
        f += df
        r += dr
    return tuple(out)


def _steps(sq: int, deltas) -> tuple[int, ...]:
    f, r = sq & 7, sq >> 3
    return tuple(
        (r + dr) * 8 + f + df
        for df, dr in deltas
        if 0 <= f + df < 8 and 0 <= r + dr < 8
    )


_ORTHO = ((1, 0), (-1, 0), (0, 1), (0, -1))
_DIAG = ((1, 1), (-1, 1), (1, -1), (-1, -1))
_KNIGHT_D = ((1, 2), (2, 1), (2, -1), (1, -2), (-1, -2), (-2, -1), (-2, 1), (-1, 2))

ORTHO_RAYS = tuple(tuple(r for r in (_ray(s, *d) for d in _ORTHO) if r) for s in range(64))
DIAG_RAYS = tuple(tuple(r for r in (_ray(s, *d) for d in _DIAG) if r) for s in range(64))
KNIGHT_TARGETS = tuple(_steps(s, _KNIGHT_D) for s in range(64))
KING_TARGETS = tuple(_steps(s, _ORTHO + _DIAG) for s in range(64))
# Squares from which a pawn of the given colour attacks the indexed square.
_PAWN_ATTACKERS = {
    1: tuple(_steps(s, ((-1, -1), (1, -1))) for s in range(64)),
    -1: tuple(_steps(s, ((-1, 1), (1, 1))) for s in range(64)),
}
_PAWN_CAPTURES = {
    1: tuple(_steps(s, ((-1, 1), (1, 1))) for s in range(64)),
    -1: tuple(_steps(s, ((-1, -1), (1, -1))) for s in range(64)),
}
# ALIGNED[k][s]: s lies on a queen line through k.
ALIGNED = tuple(
    tuple(
        s != k and ((s & 7) == (k & 7) or (s >> 3) == (k >> 3)
                    or abs((s & 7) - (k & 7)) == abs((s >> 3) - (k >> 3)))
        for s in range(64)
    )
    for k in range(64)
)
_CASTLE_MASK = [0] * 64
_CASTLE_MASK[4] = WK | WQ
_CASTLE_MASK[7] = WK
_CASTLE_MASK[0] = WQ
_CASTLE_MASK[60] = BK | BQ
_CASTLE_MASK[63] = BK
_CASTLE_MASK[56] = BQ
_PROMOS = (PieceKind.KNIGHT, PieceKind.BISHOP, PieceKind.ROOK, PieceKind.QUEEN)


def _attacked(board, sq: int, by: int) -> bool:
    """True when any piece of sign ``by`` attacks ``sq``."""
    for t in KNIGHT_TARGETS[sq]:
        if board[t] == 2 * by:
            return True
    for t in _PAWN_ATTACKERS[by][sq]:
        if board[t] == by:
            return True
    rook, queen = 4 * by, 5 * by
    for ray in ORTHO_RAYS[sq]:
        for t in ray:
            v = board[t]
            if v:
                if v == rook or v == queen:
                    return True
                break
    bishop = 3 * by
    for ray in DIAG_RAYS[sq]:
        for t in ray:
            v = board[t]
            if v:
                if v == bishop or v == queen:
                    return True
                break
    king = 6 * by
    for t in KING_TARGETS[sq]:
        if board[t] == king:
            return True
    return False


# --- value types -------------------------------------------------------------

class Move(NamedTuple):
    from_sq: int
    to_sq: int
    promotion: Optional[PieceKind] = None
    is_capture: bool = False
    is_en_passant: bool = False
    is_castle: bool = False

    def uci(self) -> str:
        promo = self.promotion.symbol if self.promotion else ""
        return square_name(self.from_sq) + square_name(self.to_sq) + promo

    def __str__(self) -> str:
        return self.uci()


class Position(NamedTuple):
    board: tuple[int, ...]
    side_to_move: Color
    castling_rights: int
    en_passant: Optional[int]
    halfmove_clock: int
    fullmove_number: int

    def piece_at(self, sq: int) -> Optional[Piece]:
        code = self.board[sq]
        if not code:
            return None
        return Piece(Color.WHITE if code > 0 else Color.BLACK, PieceKind(abs(code)))

    def pieces(self) -> Iterator[tuple[int, Piece]]:
        for sq, code in enumerate(self.board):
            if code:
                yield sq, Piece(Color.WHITE if code > 0 else Color.BLACK, PieceKind(abs(code)))

    def king_square(self, color: Color) -> int:
        return self.board.index(6 * int(color))

    def has_castling(self, right: str) -> bool:
        return bool(self.castling_rights & {"K": WK, "Q": WQ, "k": BK, "q": BQ}[right])

    def __str__(self) -> str:
        return to_fen(self)


# --- move categories ---------------------------------------------------------

class CategoryKind(enum.Enum):
    CHECK = "check"
    CHECK_CAPTURE = "check_capture"
    CAPTURE = "capture"
    PROMOTION = "promotion"
    QUIET = "quiet"


class MoveCategory(NamedTuple):
    kind: CategoryKind
    victim: Optional[PieceKind] = None

    def __str__(self) -> str:
        if self.victim is None:
            return self.kind.value
        return f"{self.kind.value}:{self.victim.name.lower()}"


CHECK = MoveCategory(CategoryKind.CHECK)
PROMOTION = MoveCategory(CategoryKind.PROMOTION)
QUIET = MoveCategory(CategoryKind.QUIET)
_CAPTURES = {k: MoveCategory(CategoryKind.CAPTURE, k) for k in PieceKind}
_CHECK_CAPTURES = {k: MoveCategory(CategoryKind.CHECK_CAPTURE, k) for k in PieceKind}


def capture(kind: PieceKind) -> MoveCategory:
    return _CAPTURES[PieceKind(kind)]


def check_capture(kind: PieceKind) -> MoveCategory:
    return _CHECK_CAPTURES[PieceKind(kind)]


# --- FEN -----------------------------------------------------------------------

_FEN_CODES = {c: (i + 1) for i, c in enumerate("PNBRQK")}
_FEN_CODES.update({c: -(i + 1) for i, c in enumerate("pnbrqk")})
_CODE_FEN = {v: k for k, v in _FEN_CODES.items()}


def parse_fen(text: str) -> Position:
    """Parse a six-field FEN string into a validated :class:`Position`.

    Raises :class:`MalformedFen` for syntax problems, :class:`IllegalPlacement`
    for impossible arrangements and :class:`OppositeKingInCheck` when the side
    not to move is in check.
    """
    fields = text.split()
    if len(fields) != 6:
        raise MalformedFen(f"expected 6 fields, got {len(fields)}: {text!r}")
    placement, turn, castling, ep, half, full = fields

    ranks = placement.split("/")
    if len(ranks) != 8:
        raise MalformedFen(f"expected 8 ranks in placement {placement!r}")
    board = [0] * 64
    for i, row in enumerate(ranks):
        rank = 7 - i
        f = 0
        for ch in row:
            if ch in "12345678":
                f += int(ch)
            elif ch in _FEN_CODES:
                if f > 7:
                    raise MalformedFen(f"rank {rank + 1} overflows: {row!r}")
                board[rank * 8 + f] = _FEN_CODES[ch]
                f += 1
            else:
                raise MalformedFen(f"bad placement character {ch!r}")
        if f != 8:
            raise MalformedFen(f"rank {rank + 1} does not have 8 files: {row!r}")

    if turn not in ("w", "b"):
        raise MalformedFen(f"bad side to move {turn!r}")
    side = Color.WHITE if turn == "w" else Color.BLACK

    rights = 0
    if castling != "-":
        for ch in castling:
            bit = {"K": WK, "Q": WQ, "k": BK, "q": BQ}.get(ch)
            if bit is None or rights & bit:
                raise MalformedFen(f"bad castling field {castling!r}")
            rights |= bit

    ep_sq = None
    if ep != "-":
        try:
            ep_sq = parse_square(ep)
        except ValueError:
            raise MalformedFen(f"bad en-passant field {ep!r}") from None

    try:
        halfmove, fullmove = int(half), int(full)
    except ValueError:
        raise MalformedFen(f"bad move counters {half!r} {full!r}") from None
    if halfmove < 0 or fullmove < 1:
        raise MalformedFen(f"move counters out of range: {half} {full}")

    _validate_placement(board, side, rights, ep_sq)
    pos = Position(tuple(board), side, rights, ep_sq, halfmove, fullmove)
    them = -int(side)
    if _attacked(pos.board, pos.board.index(6 * them), int(side)):
        raise OppositeKingInCheck(f"side not to move is in check: {text!r}")
    return pos


def _validate_placement(board, side: Color, rights: int, ep_sq: Optional[int]) -> None:
    for code, name in ((6, "white"), (-6, "black")):
        n = board.count(code)
        if n != 1:
            raise IllegalPlacement(f"expected exactly one {name} king, found {n}")
    for sq in list(range(8)) + list(range(56, 64)):
        if abs(board[sq]) == 1:
            raise IllegalPlacement(f"pawn on back rank at {square_name(sq)}")
    for bit, king_sq, rook_sq, code in ((WK, 4, 7, 1), (WQ, 4, 0, 1), (BK, 60, 63, -1), (BQ, 60, 56, -1)):
        if rights & bit and (board[king_sq] != 6 * code or board[rook_sq] != 4 * code):
            raise IllegalPlacement("castling rights inconsistent with king/rook placement")
    if ep_sq is not None:
        us = int(side)
        expected_rank = 5 if us == 1 else 2
        pawn_sq = ep_sq - 8 * us
        if (ep_sq >> 3) != expected_rank or board[ep_sq] or board[pawn_sq] != -us:
            raise IllegalPlacement(f"inconsistent en-passant square {square_name(ep_sq)}")


def to_fen(p: Position) -> str:
    rows = []
    for rank in range(7, -1, -1):
        row, empty = "", 0
        for f in range(8):
            code = p.board[rank * 8 + f]
            if code:
                if empty:
                    row += str(empty)
                    empty = 0
                row += _CODE_FEN[code]
            else:
                empty += 1
        if empty:
            row += str(empty)
        rows.append(row)
    castling = "".join(c for c, bit in (("K", WK), ("Q", WQ), ("k", BK), ("q", BQ))
                       if p.castling_rights & bit) or "-"
    ep = square_name(p.en_passant) if p.en_passant is not None else "-"
    turn = "w" if p.side_to_move == Color.WHITE else "b"
    return f"{'/'.join(rows)} {turn} {castling} {ep} {p.halfmove_clock} {p.fullmove_number}"


# --- move generation ---------------------------------------------------------

def _pseudo_moves(p: Position, us: int, checked: bool) -> Iterator[Move]:
    board = p.board
    for sq in range(64):
        code = board[sq] * us
        if code <= 0:
            continue
        if code == 1:
            yield from _pawn_moves(p, sq, us)
        elif code == 2:
            for t in KNIGHT_TARGETS[sq]:
                v = board[t] * us
                if v <= 0:
                    yield Move(sq, t, None, v < 0)
        elif code == 6:
            for t in KING_TARGETS[sq]:
                v = board[t] * us
                if v <= 0:
                    yield Move(sq, t, None, v < 0)
            if not checked and p.castling_rights:
                yield from _castles(p, sq, us)
        else:
            if code == 3:
                rays = DIAG_RAYS[sq]
            elif code == 4:
                rays = ORTHO_RAYS[sq]
            else:
                rays = ORTHO_RAYS[sq] + DIAG_RAYS[sq]
            for ray in rays:
                for t in ray:
                    v = board[t] * us
                    if v == 0:
                        yield Move(sq, t)
                    else:
                        if v < 0:
                            yield Move(sq, t, None, True)
                        break


def _pawn_moves(p: Position, sq: int, us: int) -> Iterator[Move]:
    board = p.board
    rank = sq >> 3
    last = (rank == 6) if us == 1 else (rank == 1)
    one = sq + 8 * us
    if board[one] == 0:
        if last:
            for k in _PROMOS:
                yield Move(sq, one, k)
        else:
            yield Move(sq, one)
            if rank == (1 if us == 1 else 6):
                two = one + 8 * us
                if board[two] == 0:
                    yield Move(sq, two)
    for t in _PAWN_CAPTURES[us][sq]:
        if board[t] * us < 0:
            if last:
                for k in _PROMOS:
                    yield Move(sq, t, k, True)
            else:
                yield Move(sq, t, None, True)
        elif t == p.en_passant:
            yield Move(sq, t, None, True, True)


def _castles(p: Position, ksq: int, us: int) -> Iterator[Move]:
    board, rights = p.board, p.castling_rights
    short, long_ = (WK, WQ) if us == 1 else (BK, BQ)
    them = -us
    if rights & short and board[ksq + 1] == 0 and board[ksq + 2] == 0:
        if not _attacked(board, ksq + 1, them):
            yield Move(ksq, ksq + 2, None, False, False, True)
    if rights & long_ and board[ksq - 1] == 0 and board[ksq - 2] == 0 and board[ksq - 3] == 0:
        if not _attacked(board, ksq - 1, them):
            yield Move(ksq, ksq - 2, None, False, False, True)


def _make_board(board, m: Move, us: int) -> list[int]:
    b = list(board)
    fr, to = m.from_sq, m.to_sq
    piece = b[fr]
    b[fr] = 0
    if m.is_en_passant:
        b[to - 8 * us] = 0
    if m.promotion:
        piece = int(m.promotion) * us
    b[to] = piece
    if m.is_castle:
        if to > fr:
            b[fr + 1], b[fr + 3] = b[fr + 3], 0
        else:
            b[fr - 1], b[fr - 4] = b[fr - 4], 0
    return b


def generate_legal_moves(p: Position) -> list[Move]:
    """All legal moves, sorted by (from-square, to-square, promotion kind)."""
    board = p.board
    us = int(p.side_to_move)
    them = -us
    ksq = board.index(6 * us)
    checked = _attacked(board, ksq, them)
    aligned = ALIGNED[ksq]
    out = []
    for m in _pseudo_moves(p, us, checked):
        fr = m.from_sq
        # A piece off every line through its own king cannot expose it.
        if checked or fr == ksq or m.is_en_passant or aligned[fr]:
            nb = _make_board(board, m, us)
            if _attacked(nb, m.to_sq if fr == ksq else ksq, them):
                continue
        out.append(m)
    out.sort()
    return out


def has_legal_move(p: Position) -> bool:
    board = p.board
    us = int(p.side_to_move)
    them = -us
    ksq = board.index(6 * us)
    checked = _attacked(board, ksq, them)
    for m in _pseudo_moves(p, us, checked):
        nb = _make_board(board, m, us)
        if not _attacked(nb, m.to_sq if m.from_sq == ksq else ksq, them):
            return True
    return False


def _apply(p: Position, m: Move) -> Position:
    board = p.board
    us = int(p.side_to_move)
    fr, to = m.from_sq, m.to_sq
    moved = board[fr]
    b = _make_board(board, m, us)
    rights = p.castling_rights
    if rights:
        rights &= ~(_CASTLE_MASK[fr] | _CASTLE_MASK[to])
    ep = None
    if moved * us == 1:
        if to - fr == 16 * us:
            ep = fr + 8 * us
        half = 0
    elif m.is_capture:
        half = 0
    else:
        half = p.halfmove_clock + 1
    full = p.fullmove_number + (us == -1)
    return Position(tuple(b), Color.BLACK if us == 1 else Color.WHITE, rights, ep, half, full)


def apply_move(p: Position, m: Move, *, validate: bool = True) -> Position:
    """Return the position after ``m``.

    With ``validate`` the move is checked against the legal move list and an
    :class:`IllegalMoveError` is raised on mismatch.
    """
    if validate and m not in generate_legal_moves(p):
        raise IllegalMoveError(f"{m.uci()} is not legal in {to_fen(p)}")
    return _apply(p, m)


def flip_turn(p: Position) -> Position:
    """Same board with the other side to move and no en-passant square."""
    side = Color.BLACK if p.side_to_move == Color.WHITE else Color.WHITE
    return p._replace(side_to_move=side, en_passant=None)


def in_check(p: Position, c: Color) -> bool:
    c = int(c)
    return _attacked(p.board, p.board.index(6 * c), -c)


def gives_check(p: Position, m: Move) -> bool:
    us = int(p.side_to_move)
    nb = _make_board(p.board, m, us)
    return _attacked(nb, nb.index(-6 * us), us)


def game_status(p: Position) -> GameStatus:
    if has_legal_move(p):
        return GameStatus.ONGOING
    if in_check(p, p.side_to_move):
        return GameStatus.CHECKMATE
    return GameStatus.STALEMATE


def _victim(p: Position, m: Move) -> Optional[PieceKind]:
    if m.is_en_passant:
        return PieceKind.PAWN
    if m.is_capture:
        return PieceKind(abs(p.board[m.to_sq]))
    return None


def _category(victim: Optional[PieceKind], promotion, check: bool) -> MoveCategory:
    if check:
        return _CHECK_CAPTURES[victim] if victim else CHECK
    if victim:
        return _CAPTURES[victim]
    if promotion:
        return PROMOTION
    return QUIET


def classify_move(p: Position, m: Move) -> MoveCategory:
    """Category of a legal move; check status dominates, then capture."""
    return _category(_victim(p, m), m.promotion, gives_check(p, m))


# --- evaluation ----------------------------------------------------------------

def material_eval(p: Position) -> int:
    """Material balance in centipawns from the side to move's point of view."""
    total = 0
    for code in p.board:
        if code:
            total += _SIGNED_VALUE[code + 6]
    return total if p.side_to_move == Color.WHITE else -total


def material_delta(p: Position, m: Move) -> int:
    """Material gained by the mover (capture value plus promotion gain)."""
    gain = 0
    if m.is_en_passant:
        gain = 100
    elif m.is_capture:
        gain = _VALUE[abs(p.board[m.to_sq])]
    if m.promotion:
        gain += _VALUE[m.promotion] - 100
    return gain


def perft(p: Position, depth: int) -> int:
    if depth < 0:
        raise ValueError("depth must be >= 0")
    if depth == 0:
        return 1
    moves = generate_legal_moves(p)
    if depth == 1:
        return len(moves)
    return sum(perft(_apply(p, m), depth - 1) for m in moves)


# --- notation ------------------------------------------------------------------

def san(p: Position, m: Move, legal: Optional[list[Move]] = None) -> str:
    """Standard algebraic notation for a legal move, with +/# suffixes."""
    if m.is_castle:
        text = "O-O" if m.to_sq > m.from_sq else "O-O-O"
    else:
        kind = abs(p.board[m.from_sq])
        dest = square_name(m.to_sq)
        if kind == 1:
            text = ("abcdefgh"[m.from_sq & 7] + "x" if m.is_capture else "") + dest
            if m.promotion:
                text += "=" + m.promotion.symbol.upper()
        else:
            if legal is None:
                legal = generate_legal_moves(p)
            rivals = [o.from_sq for o in legal
                      if o.to_sq == m.to_sq and o.from_sq != m.from_sq
                      and abs(p.board[o.from_sq]) == kind]
            disamb = ""
            if rivals:
                if all((r & 7) != (m.from_sq & 7) for r in rivals):
                    disamb = "abcdefgh"[m.from_sq & 7]
                elif all((r >> 3) != (m.from_sq >> 3) for r in rivals):
                    disamb = str((m.from_sq >> 3) + 1)
                else:
                    disamb = square_name(m.from_sq)
            text = "NBRQK"[kind - 2] + disamb + ("x" if m.is_capture else "") + dest
    child = _apply(p, m)
    if in_check(child, child.side_to_move):
        text += "#" if not has_legal_move(child) else "+"
    return text


def parse_move(p: Position, text: str) -> Move:
    """Resolve a SAN or UCI move string against the legal moves of ``p``."""
    legal = generate_legal_moves(p)
    token = text.strip()
    for m in legal:
        if m.uci() == token:
            return m
    want = token.rstrip("+#!?").replace("0-0-0", "O-O-O").replace("0-0", "O-O")
    for m in legal:
        if san(p, m, legal).rstrip("+#") == want:
            return m
    raise IllegalMoveError(f"no legal move matches {text!r} in {to_fen(p)}")
