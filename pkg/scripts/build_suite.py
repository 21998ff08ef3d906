#!/usr/bin/env python3
"""Regenerate the bundled mate suite from seeded self-play.

Games between two noisy two-ply material players are scanned for positions
in which the side to move has a forced mate.  Candidates are found with a
checks-only mate search and then labelled with their exact mate length by a
full-width mate prover, which is independent of the fractional search.

    python scripts/build_suite.py --games 400 --out src/entroply/data/mates.epd
"""

import argparse
import random
import sys
import time

from entroply.chesscore import (
    START_FEN, _apply, _attacked, generate_legal_moves, in_check, material_delta,
    material_eval, parse_fen, san, to_fen,
)


def gives_check_fast(pos, m):
    child = _apply(pos, m)
    us = int(pos.side_to_move)
    return child, _attacked(child.board, child.board.index(-6 * us), us)


class MateProver:
    """Exhaustive "can the side to move force mate within n moves" search."""

    def __init__(self, checks_only=False, node_limit=None):
        self.checks_only = checks_only
        self.cache = {}
        self.nodes = 0
        self.node_limit = node_limit

    def _tick(self):
        self.nodes += 1
        if self.node_limit and self.nodes > self.node_limit:
            raise TimeoutError

    def attacker(self, pos, n):
        key = (pos.board, pos.side_to_move, pos.castling_rights, pos.en_passant, n)
        hit = self.cache.get(key)
        if hit is not None:
            return hit
        self._tick()
        children = []
        for m in generate_legal_moves(pos):
            child, check = gives_check_fast(pos, m)
            if (n == 1 or self.checks_only) and not check:
                continue
            children.append((not check, -material_delta(pos, m), m, child))
        children.sort(key=lambda c: c[:2])
        result = False
        for _, _, m, child in children:
            if self.defender(child, n):
                result = True
                break
        self.cache[key] = result
        return result

    def defender(self, pos, n):
        self._tick()
        moves = generate_legal_moves(pos)
        if not moves:
            return in_check(pos, pos.side_to_move)
        if n == 1:
            return False
        for m in moves:
            if not self.attacker(_apply(pos, m), n - 1):
                return False
        return True

    def mating_moves(self, pos, n):
        out = []
        for m in generate_legal_moves(pos):
            child, check = gives_check_fast(pos, m)
            if n == 1 and not check:
                continue
            if self.defender(child, n):
                out.append(m)
        return out


def choose_move(pos, rng, noise):
    """Two-ply material search with random tie-breaking and occasional blunders."""
    moves = generate_legal_moves(pos)
    if rng.random() < noise:
        return rng.choice(moves)
    best, best_moves = None, []
    for m in moves:
        child = _apply(pos, m)
        replies = generate_legal_moves(child)
        if not replies:
            score = 10**6 if in_check(child, child.side_to_move) else 0
        else:
            score = material_delta(pos, m) - max(material_delta(child, r) for r in replies)
        if best is None or score > best:
            best, best_moves = score, [m]
        elif score == best:
            best_moves.append(m)
    return rng.choice(best_moves)


def scan(args):
    rng = random.Random(args.seed)
    found = {3: [], 5: []}
    seen = set()
    t0 = time.time()
    for game in range(args.games):
        pos = parse_fen(START_FEN)
        for ply in range(args.max_plies):
            if not generate_legal_moves(pos):
                break
            if ply >= 12 and sum(1 for c in pos.board if c) >= args.min_pieces:
                key = to_fen(pos).rsplit(" ", 2)[0]
                if key not in seen and abs(material_eval(pos)) <= args.max_imbalance:
                    seen.add(key)
                    label = classify(pos)
                    if label in found and len(found[label]) < args.per_length:
                        found[label].append(pos)
                        print(f"game {game} ply {ply}: mate in {label}  {to_fen(pos)}",
                              file=sys.stderr)
            pos = _apply(pos, choose_move(pos, rng, args.noise))
        if all(len(v) >= args.per_length for v in found.values()):
            break
        if time.time() - t0 > args.time_limit:
            break
    return found


def classify(pos):
    """Exact mate length in {3, 5}, or None."""
    if in_check(pos, pos.side_to_move):
        return None
    quick = MateProver(checks_only=True)
    length = None
    for n in (3, 5):
        if quick.attacker(pos, n):
            length = n
            break
    if length is None:
        return None
    full = MateProver(node_limit=150_000)
    try:
        for shorter in range(1, length):
            if full.attacker(pos, shorter):
                return None
    except TimeoutError:
        return None
    return length


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--games", type=int, default=400)
    ap.add_argument("--seed", type=int, default=20240611)
    ap.add_argument("--max-plies", type=int, default=90)
    ap.add_argument("--min-pieces", type=int, default=16)
    ap.add_argument("--max-imbalance", type=int, default=400)
    ap.add_argument("--noise", type=float, default=0.15)
    ap.add_argument("--per-length", type=int, default=8)
    ap.add_argument("--time-limit", type=float, default=3600)
    ap.add_argument("--out", default="-")
    args = ap.parse_args()

    found = scan(args)
    lines = [
        "# Forced mates from seeded self-play (scripts/build_suite.py,"
        f" seed {args.seed}).",
        "# dm is the exact mate length; bm lists every first move that mates within dm.",
    ]
    prover = MateProver()
    count = 0
    for length in (3, 5):
        for pos in found[length]:
            count += 1
            best = prover.mating_moves(pos, length) if length == 3 else []
            fen4 = " ".join(to_fen(pos).split()[:4])
            ops = []
            if best:
                ops.append("bm " + " ".join(san(pos, m) for m in best) + ";")
            ops.append(f"dm {length};")
            ops.append(f'id "M{length}.{count:03d}";')
            lines.append(fen4 + " " + " ".join(ops))
    text = "\n".join(lines) + "\n"
    if args.out == "-":
        sys.stdout.write(text)
    else:
        with open(args.out, "w") as fh:
            fh.write(text)


if __name__ == "__main__":
    main()
