"""Command-line front end: ``entroply solve|sweep|compare|entropy|perft``.

Exit codes: 0 success, 1 unsolved, 2 usage or input error.

Options may also come from a ``--config`` file of ``key = value`` lines
(keys: policy, divisor, step, best_gain, max_uniform_depth, max_extension,
budget, jobs).  Flags given on the command line win over the file, and the
file wins over built-in defaults.
"""

from __future__ import annotations

import argparse
import configparser
import random
import sys
from typing import Optional, Sequence

from .chesscore import FenError, PieceKind, START_FEN, _apply, parse_fen, perft, san
from .depthpolicy import PolicyConfigError, make_policy
from .entropy import (
    EntropyModel, PawnRateError, build_mobility_graph, entropy_rate, piece_entropy_rate,
    position_entropy, stationary_distribution, write_graph_csv,
)
from .harness import (
    EpdError, SweepSpec, compare_policies, default_suite_path, emit_csv, format_summary,
    load_epd_file, params_for, run_sweep,
)
from .search import SearchParams, search_root

EXIT_OK, EXIT_UNSOLVED, EXIT_USAGE = 0, 1, 2
MAX_PERFT_DEPTH = 6

DEFAULTS = {
    "policy": "ers",
    "divisor": 1.0,
    "step": 6.0,
    "best_gain": None,
    "max_uniform_depth": 4.0,
    "max_extension": 32,
    "budget": 1_000_000,
    "jobs": 1,
}
_CONFIG_TYPES = {
    "policy": str, "divisor": float, "step": float, "best_gain": float,
    "max_uniform_depth": float, "max_extension": int, "budget": int, "jobs": int,
}


class UsageError(Exception):
    pass


def read_config(path: str) -> dict:
    """Parse a ``key = value`` file; an optional ``[entroply]`` header is allowed."""
    try:
        with open(path) as fh:
            text = fh.read()
    except OSError as exc:
        raise UsageError(f"cannot read config {path}: {exc.strerror}") from None
    parser = configparser.ConfigParser()
    if not text.lstrip().startswith("["):
        text = "[entroply]\n" + text
    try:
        parser.read_string(text)
    except configparser.Error as exc:
        raise UsageError(f"bad config {path}: {exc}") from None
    out = {}
    for section in parser.sections():
        for key, raw in parser.items(section):
            key = key.replace("-", "_")
            if key not in _CONFIG_TYPES:
                raise UsageError(f"unknown config key {key!r} in {path}")
            try:
                out[key] = _CONFIG_TYPES[key](raw)
            except ValueError:
                raise UsageError(f"bad value {raw!r} for {key} in {path}") from None
    return out


def _settings(args) -> dict:
    merged = dict(DEFAULTS)
    if getattr(args, "config", None):
        merged.update(read_config(args.config))
    for key in DEFAULTS:
        value = getattr(args, key, None)
        if value is not None:
            merged[key] = value
    return merged


def _float_list(text: str) -> list[float]:
    try:
        values = [float(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from None
    if not values:
        raise argparse.ArgumentTypeError("empty list")
    return values


def _fen(text: str):
    try:
        return parse_fen(START_FEN if text == "startpos" else text)
    except FenError as exc:
        raise UsageError(f"bad FEN: {exc}") from None


def _policy(cfg: dict):
    try:
        return make_policy(cfg["policy"], cfg["divisor"], best_gain=cfg["best_gain"])
    except PolicyConfigError as exc:
        raise UsageError(str(exc)) from None


def _load_suite(path: Optional[str], sample: Optional[int], seed: int):
    path = path or str(default_suite_path())
    try:
        suite = load_epd_file(path)
    except OSError as exc:
        raise UsageError(f"cannot read suite {path}: {exc.strerror}") from None
    except EpdError as exc:
        raise UsageError(f"{path}: {exc}") from None
    if not suite:
        raise UsageError(f"suite {path} is empty")
    if sample is not None and sample < len(suite):
        idx = sorted(random.Random(seed).sample(range(len(suite)), sample))
        suite = [suite[i] for i in idx]
    return suite


def _pv_text(pos, pv) -> str:
    parts = []
    for m in pv:
        parts.append(san(pos, m))
        pos = _apply(pos, m)
    return " ".join(parts)


# --- subcommands ---------------------------------------------------------------

def cmd_solve(args) -> int:
    cfg = _settings(args)
    pos = _fen(args.fen)
    if args.dm is not None and args.dm < 1:
        raise UsageError("--dm must be >= 1")
    params = params_for(_policy(cfg), cfg["max_uniform_depth"], step=cfg["step"],
                        max_extension=cfg["max_extension"], node_budget=cfg["budget"])
    try:
        res = search_root(pos, params)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    print(f"value      {res.value}")
    print(f"pv         {_pv_text(pos, res.pv)}")
    print(f"nodes      {res.nodes}")
    print(f"max depth  {res.max_depth_attained}")
    print(f"mate in    {res.solved_mate_in if res.solved_mate_in is not None else '-'}")
    if res.aborted:
        print("aborted    node budget exhausted")
    if res.solved_mate_in is None:
        return EXIT_UNSOLVED
    if args.dm is not None and res.solved_mate_in > args.dm:
        return EXIT_UNSOLVED
    return EXIT_OK


def cmd_sweep(args) -> int:
    cfg = _settings(args)
    suite = _load_suite(args.suite, args.sample, args.seed)
    _policy(cfg)  # validate the name before dispatching work
    spec = SweepSpec(suite, args.divisors, args.depths, cfg["policy"], cfg["step"],
                     cfg["budget"], cfg["max_extension"], cfg["jobs"])
    rows = run_sweep(spec)
    try:
        emit_csv(rows, args.out)
    except OSError as exc:
        raise UsageError(f"cannot write {args.out}: {exc.strerror}") from None
    solved = sum(r.solved for r in rows)
    report = sys.stderr if args.out == "-" else sys.stdout
    print(f"{len(rows)} rows, {solved} solved", file=report)
    return EXIT_OK


def cmd_compare(args) -> int:
    cfg = _settings(args)
    names = [n.strip() for n in args.policies.split(",") if n.strip()]
    if len(names) < 2:
        raise UsageError("--policies needs at least two policies")
    policies = [_policy(dict(cfg, policy=n)) for n in names]
    suite = _load_suite(args.suite, args.sample, args.seed)
    base = SearchParams(step_scale=cfg["step"], max_extension=cfg["max_extension"])
    summaries = compare_policies(suite, policies, base, args.depths, cfg["budget"])
    print(format_summary(summaries))
    return EXIT_OK


def cmd_entropy(args) -> int:
    if args.board_size < 3:
        raise UsageError("--board-size must be >= 3")
    if args.fen is not None:
        pos = _fen(args.fen)
        if args.mode == "exact":
            model = EntropyModel.exact(args.board_size)
        else:
            model = EntropyModel.asymptotic()
        counts: dict[PieceKind, int] = {}
        for _, piece in pos.pieces():
            counts[piece.kind] = counts.get(piece.kind, 0) + 1
        for kind in PieceKind:
            if kind in counts:
                print(f"{kind.name.lower():<7} x{counts[kind]:<2} {model.rate(kind):.4f}")
        print(f"total   {position_entropy(pos, model):.4f}")
        return EXIT_OK

    kind = PieceKind[args.piece.upper()]
    if args.mode == "asymptotic":
        if args.csv:
            raise UsageError("--csv needs --mode exact")
        print(f"{EntropyModel.asymptotic().rate(kind):.4f}")
        return EXIT_OK
    try:
        graph = build_mobility_graph(kind, args.board_size)
    except PawnRateError as exc:
        raise UsageError(str(exc)) from None
    comps = graph.components()
    print(f"rate       {piece_entropy_rate(kind, args.board_size):.4f}")
    print(f"nodes      {graph.n_nodes}")
    print(f"edges      {len(graph.edges)}")
    print(f"components {len(comps)}")
    if len(comps) == 1:
        mu = stationary_distribution(graph)
        print(f"mu range   {mu.min():.6f} .. {mu.max():.6f}")
    else:
        for i in range(len(comps)):
            print(f"component {i} rate {entropy_rate(graph, i):.4f}")
    if args.csv:
        try:
            write_graph_csv(graph, args.csv)
        except OSError as exc:
            raise UsageError(f"cannot write {args.csv}: {exc.strerror}") from None
    return EXIT_OK


def cmd_perft(args) -> int:
    if not 0 <= args.depth <= MAX_PERFT_DEPTH:
        raise UsageError(f"depth must lie in 0..{MAX_PERFT_DEPTH}")
    print(perft(_fen(args.fen), args.depth))
    return EXIT_OK


# --- parser ----------------------------------------------------------------------

def _add_search_flags(p: argparse.ArgumentParser, depth: bool = True) -> None:
    p.add_argument("--config", help="key = value file with default settings")
    group = p.add_mutually_exclusive_group()
    group.add_argument("--policy", choices=["uniform", "ers", "winands", "rp", "appendix"])
    group.add_argument("--uniform", dest="policy", action="store_const", const="uniform",
                       help="shorthand for --policy uniform")
    p.add_argument("--divisor", type=float)
    p.add_argument("--step", type=float)
    p.add_argument("--best-gain", dest="best_gain", type=float)
    if depth:
        p.add_argument("--max-uniform-depth", dest="max_uniform_depth", type=float)
    p.add_argument("--max-extension", dest="max_extension", type=int)
    p.add_argument("--budget", type=int)


def _add_suite_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--suite", help="EPD file (default: bundled mate suite or $ENTROPLY_SUITE_DIR)")
    p.add_argument("--sample", type=int, help="use a random subset of this many cases")
    p.add_argument("--seed", type=int, default=0, help="seed for --sample")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="entroply", description="Fractional-ply chess search lab.")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("solve", help="search one position")
    p.add_argument("fen", help='FEN string or "startpos"')
    p.add_argument("--dm", type=int, help="required mate length in moves")
    _add_search_flags(p)
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("sweep", help="run a divisor x depth sweep and write CSV")
    _add_suite_flags(p)
    _add_search_flags(p, depth=False)
    p.add_argument("--divisors", type=_float_list, default=[1.0])
    p.add_argument("--depths", type=_float_list, default=[2.0])
    p.add_argument("--jobs", type=int)
    p.add_argument("--out", default="-", help="CSV path, or - for standard output")
    p.set_defaults(func=cmd_sweep, policy=None)

    p = sub.add_parser("compare", help="compare policies on a suite")
    _add_suite_flags(p)
    p.add_argument("--policies", required=True, help="comma-separated policy names")
    p.add_argument("--config")
    p.add_argument("--divisor", type=float)
    p.add_argument("--step", type=float)
    p.add_argument("--best-gain", dest="best_gain", type=float)
    p.add_argument("--max-extension", dest="max_extension", type=int)
    p.add_argument("--budget", type=int)
    p.add_argument("--depths", type=_float_list, default=None,
                   help="depth grid searched for the minimal solving depth"
                        " (default: thirds of a ply up to 7)")
    p.set_defaults(func=cmd_compare)

    p = sub.add_parser("entropy", help="entropy rates of pieces or positions")
    sel = p.add_mutually_exclusive_group(required=True)
    sel.add_argument("--piece", choices=[k.name.lower() for k in PieceKind])
    sel.add_argument("--fen")
    p.add_argument("--board-size", dest="board_size", type=int, default=8)
    p.add_argument("--mode", choices=["exact", "asymptotic"], default="asymptotic")
    p.add_argument("--csv", help="write the node, degree, mu, row_entropy table here")
    p.set_defaults(func=cmd_entropy)

    p = sub.add_parser("perft", help="count leaf nodes of the legal move tree")
    p.add_argument("fen", help='FEN string or "startpos"')
    p.add_argument("depth", type=int)
    p.set_defaults(func=cmd_perft)
    return ap


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_USAGE
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"entroply: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
