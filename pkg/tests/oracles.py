"""Independent reference implementations used only by the tests.

The move generator here is deliberately naive: the board is a dict keyed by
(file, rank), legality is checked by making the move and asking whether any
enemy piece's attack set contains our king.  It shares no code with
``entroply.chesscore`` beyond FEN text.
"""

import math

KNIGHT = [(1, 2), (2, 1), (2, -1), (1, -2), (-1, -2), (-2, -1), (-2, 1), (-1, 2)]
KING = [(1, 0), (1, 1), (0, 1), (-1, 1), (-1, 0), (-1, -1), (0, -1), (1, -1)]
ROOK_DIRS = [(1, 0), (-1, 0), (0, 1), (0, -1)]
BISHOP_DIRS = [(1, 1), (1, -1), (-1, 1), (-1, -1)]
VALUES = {"p": 100, "n": 300, "b": 300, "r": 500, "q": 900, "k": 0}
FILES = "abcdefgh"


def on(f, r):
    return 0 <= f < 8 and 0 <= r < 8


class Board:
    def __init__(self, fen):
        parts = fen.split()
        self.sq = {}
        for i, row in enumerate(parts[0].split("/")):
            r, f = 7 - i, 0
            for ch in row:
                if ch.isdigit():
                    f += int(ch)
                else:
                    self.sq[(f, r)] = ch
                    f += 1
        self.white = parts[1] == "w"
        self.castle = set() if parts[2] == "-" else set(parts[2])
        self.ep = None if parts[3] == "-" else (FILES.index(parts[3][0]), int(parts[3][1]) - 1)

    def copy(self):
        b = Board.__new__(Board)
        b.sq, b.white, b.castle, b.ep = dict(self.sq), self.white, set(self.castle), self.ep
        return b


def mine(ch, white):
    return ch.isupper() == white


def attacks(board, f, r):
    """Squares attacked by the piece on (f, r)."""
    ch = board.sq[(f, r)]
    kind = ch.lower()
    out = []
    if kind == "p":
        d = 1 if ch.isupper() else -1
        out = [(f + df, r + d) for df in (-1, 1) if on(f + df, r + d)]
    elif kind == "n":
        out = [(f + a, r + b) for a, b in KNIGHT if on(f + a, r + b)]
    elif kind == "k":
        out = [(f + a, r + b) for a, b in KING if on(f + a, r + b)]
    else:
        dirs = {"r": ROOK_DIRS, "b": BISHOP_DIRS, "q": ROOK_DIRS + BISHOP_DIRS}[kind]
        for a, b in dirs:
            x, y = f + a, r + b
            while on(x, y):
                out.append((x, y))
                if (x, y) in board.sq:
                    break
                x, y = x + a, y + b
    return out


def attacked(board, target, by_white):
    return any(target in attacks(board, f, r)
               for (f, r), ch in board.sq.items() if mine(ch, by_white))


def king_of(board, white):
    k = "K" if white else "k"
    return next(s for s, ch in board.sq.items() if ch == k)


def pseudo_moves(board):
    """(from, to, promo) triples, promo a lowercase letter or None."""
    w = board.white
    out = []
    for (f, r), ch in list(board.sq.items()):
        if not mine(ch, w):
            continue
        kind = ch.lower()
        if kind == "p":
            d = 1 if w else -1
            last = 7 if w else 0
            start = 1 if w else 6
            targets = []
            if (f, r + d) not in board.sq and on(f, r + d):
                targets.append((f, r + d))
                if r == start and (f, r + 2 * d) not in board.sq:
                    targets.append((f, r + 2 * d))
            for df in (-1, 1):
                t = (f + df, r + d)
                if not on(*t):
                    continue
                if (t in board.sq and not mine(board.sq[t], w)) or t == board.ep:
                    targets.append(t)
            for t in targets:
                if t[1] == last:
                    out += [((f, r), t, p) for p in "qrbn"]
                else:
                    out.append(((f, r), t, None))
        else:
            for t in attacks(board, f, r):
                if t not in board.sq or not mine(board.sq[t], w):
                    out.append(((f, r), t, None))
    # castling
    rank = 0 if w else 7
    side = {"K": "K", "Q": "Q"} if w else {"K": "k", "Q": "q"}
    king = "K" if w else "k"
    rook = "R" if w else "r"
    if board.sq.get((4, rank)) == king and not attacked(board, (4, rank), not w):
        if side["K"] in board.castle and board.sq.get((7, rank)) == rook:
            if all((x, rank) not in board.sq for x in (5, 6)) and \
                    not any(attacked(board, (x, rank), not w) for x in (5, 6)):
                out.append(((4, rank), (6, rank), None))
        if side["Q"] in board.castle and board.sq.get((0, rank)) == rook:
            if all((x, rank) not in board.sq for x in (1, 2, 3)) and \
                    not any(attacked(board, (x, rank), not w) for x in (2, 3)):
                out.append(((4, rank), (2, rank), None))
    return out


def make(board, move):
    frm, to, promo = move
    b = board.copy()
    ch = b.sq.pop(frm)
    kind = ch.lower()
    if kind == "p" and to == board.ep and to not in board.sq:
        b.sq.pop((to[0], frm[1]), None)
    if kind == "k" and abs(to[0] - frm[0]) == 2:
        rank = frm[1]
        if to[0] == 6:
            b.sq[(5, rank)] = b.sq.pop((7, rank))
        else:
            b.sq[(3, rank)] = b.sq.pop((0, rank))
    if promo:
        ch = promo.upper() if ch.isupper() else promo
    b.sq[to] = ch
    b.ep = (frm[0], (frm[1] + to[1]) // 2) if kind == "p" and abs(to[1] - frm[1]) == 2 else None
    for sqr, flag in (((4, 0), "KQ"), ((4, 7), "kq"), ((7, 0), "K"), ((0, 0), "Q"),
                      ((7, 7), "k"), ((0, 7), "q")):
        if frm == sqr or to == sqr:
            b.castle -= set(flag)
    b.white = not board.white
    return b


def legal_moves(board):
    out = []
    for m in pseudo_moves(board):
        after = make(board, m)
        if not attacked(after, king_of(after, board.white), after.white):
            out.append(m)
    return out


def uci(move):
    (ff, fr), (tf, tr), promo = move
    return f"{FILES[ff]}{fr + 1}{FILES[tf]}{tr + 1}{promo or ''}"


def perft(board, depth):
    if depth == 0:
        return 1
    moves = legal_moves(board)
    if depth == 1:
        return len(moves)
    return sum(perft(make(board, m), depth - 1) for m in moves)


def material(board):
    """Material balance from the side to move, in centipawns."""
    s = 0
    for ch in board.sq.values():
        v = VALUES[ch.lower()]
        s += v if ch.isupper() else -v
    return s if board.white else -s


def in_check(board):
    return attacked(board, king_of(board, board.white), not board.white)


def classical_alphabeta(board, depth, alpha=-math.inf, beta=math.inf, ply=0,
                        mate=100_000, order=None):
    """Textbook fixed-depth negamax alpha-beta on material, static eval at depth 0.

    ``order`` maps a board to its move list in search order; returns
    ``(value, best_move_uci)``.
    """
    if depth == 0:
        return material(board), None
    moves = order(board) if order else legal_moves(board)
    if not moves:
        return (-(mate - ply) if in_check(board) else 0), None
    best, best_move = -math.inf, None
    for m in moves:
        v, _ = classical_alphabeta(make(board, m), depth - 1, -beta, -alpha, ply + 1, mate, order)
        v = -v
        if v > best:
            best, best_move = v, uci(m)
            if v > alpha:
                alpha = v
                if alpha >= beta:
                    break
    return best, best_move


def generation_key(move):
    """(from index, to index, promotion rank) with a1 = 0, h8 = 63 and n < b < r < q."""
    (ff, fr), (tf, tr), promo = move
    return fr * 8 + ff, tr * 8 + tf, "nbrq".index(promo) if promo else -1


def check_first_order(board):
    """Appendix ordering: |material swing| plus 10000 for checks, stable."""
    before = material(board)
    scored = []
    for m in legal_moves(board):
        child = make(board, m)
        score = abs(-material(child) - before)
        if in_check(child):
            score += 10000
        scored.append((score, m))
    scored.sort(key=lambda sm: generation_key(sm[1]))
    scored.sort(key=lambda sm: sm[0], reverse=True)
    return [m for _, m in scored]


def king_rate_oracle():
    """Sum over squares of mu_i * log2(d_i) with mu_i = d_i / 2|E| for the 8x8 king."""
    degrees = []
    for f in range(8):
        for r in range(8):
            degrees.append(sum(1 for a, b in KING if on(f + a, r + b)))
    total = sum(degrees)
    return sum(d / total * math.log2(d) for d in degrees), total


def fast_alphabeta(p, depth, alpha=-math.inf, beta=math.inf, ply=0, mate=100_000):
    """Classical depth-limited alpha-beta on top of the package's move generator.

    Independent of the fractional search: no virtual depth, its own move
    ordering (material swing plus 10000 for checks, stable on generation order).
    Returns ``(value, best_move)``.
    """
    from entroply.chesscore import (
        apply_move, gives_check, generate_legal_moves, in_check, material_delta, material_eval,
    )

    if depth == 0:
        return material_eval(p), None
    moves = generate_legal_moves(p)
    if not moves:
        return (-(mate - ply) if in_check(p, p.side_to_move) else 0), None
    keyed = [(material_delta(p, m) + (10000 if gives_check(p, m) else 0), i, m)
             for i, m in enumerate(moves)]
    keyed.sort(key=lambda t: (-t[0], t[1]))
    best, best_move = -math.inf, None
    for _, _, m in keyed:
        v, _ = fast_alphabeta(apply_move(p, m, validate=False), depth - 1, -beta, -alpha, ply + 1, mate)
        v = -v
        if v > best:
            best, best_move = v, m
            if v > alpha:
                alpha = v
                if alpha >= beta:
                    break
    return best, best_move


def negamax(p, depth, ply=0, mate=100_000):
    """Full-width negamax, no pruning."""
    from entroply.chesscore import apply_move, generate_legal_moves, in_check, material_eval

    if depth == 0:
        return material_eval(p)
    moves = generate_legal_moves(p)
    if not moves:
        return -(mate - ply) if in_check(p, p.side_to_move) else 0
    return max(-negamax(apply_move(p, m, validate=False), depth - 1, ply + 1, mate) for m in moves)


def random_middlegames(n, seed=0):
    import random

    from entroply.chesscore import START_FEN, apply_move, generate_legal_moves, parse_fen

    rng = random.Random(seed)
    out = []
    while len(out) < n:
        p = parse_fen(START_FEN)
        for _ in range(rng.randrange(10, 40)):
            moves = generate_legal_moves(p)
            if not moves:
                break
            p = apply_move(p, rng.choice(moves), validate=False)
        if generate_legal_moves(p):
            out.append(p)
    return out
