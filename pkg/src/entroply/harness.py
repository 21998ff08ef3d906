"""EPD test suites, parameter sweeps and policy comparison.

A sweep runs every (case, divisor, depth) combination and produces rows in
the seven-column layout of the original experiment table::

    experiment,nodes,divisor,max_depth,max_uniform_depth,solved,step
"""

from __future__ import annotations

import csv
import math
import os
import shlex
import statistics
import sys
import warnings
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path
from typing import Iterable, NamedTuple, Optional, Sequence, TextIO, Union

from .chesscore import (
    FenError, GameStatus, IllegalMoveError, Move, Position, _apply, game_status,
    parse_fen, parse_move,
)
from .depthpolicy import (
    DepthPolicy, RealizationProbability, Uniform, make_policy,
)
from .search import SearchParams, SearchResult, search_root

__all__ = [
    "EpdRecord", "EpdError", "EpdWarning", "ExperimentRow", "CaseResult", "SweepSpec",
    "PolicySummary", "CSV_HEADER", "load_epd", "load_epd_file", "default_suite_path",
    "load_default_suite", "solve_case", "run_case", "run_sweep", "minimal_solving_depth",
    "compare_policies", "emit_csv", "read_csv", "format_summary", "params_for",
    "verify_solution", "depth_grid",
]

CSV_HEADER = "experiment,nodes,divisor,max_depth,max_uniform_depth,solved,step"
SUITE_ENV = "ENTROPLY_SUITE_DIR"
DEFAULT_SUITE = "mates.epd"


class EpdError(ValueError):
    def __init__(self, line: int, message: str):
        super().__init__(f"line {line}: {message}")
        self.line = line


class EpdWarning(UserWarning):
    pass


@dataclass(frozen=True)
class EpdRecord:
    position: Position
    best_moves: Optional[tuple[Move, ...]] = None
    direct_mate: Optional[int] = None
    id: str = ""

    def __post_init__(self):
        if self.direct_mate is not None and self.direct_mate < 1:
            raise ValueError("direct_mate must be >= 1")


class ExperimentRow(NamedTuple):
    experiment_number: int
    nodes_searched: int
    divisor: float
    max_depth_attained: int
    max_uniform_depth: float
    solved: bool
    step_size: float

    @property
    def max_virtual_depth(self) -> float:
        return self.max_uniform_depth * self.step_size


@dataclass(frozen=True)
class CaseResult:
    row: ExperimentRow
    search: Optional[SearchResult]
    record: EpdRecord


# --- EPD ---------------------------------------------------------------------

def _split_ops(text: str) -> list[str]:
    ops, cur, quoted = [], [], False
    for ch in text:
        if ch == '"':
            quoted = not quoted
        if ch == ";" and not quoted:
            ops.append("".join(cur).strip())
            cur = []
        else:
            cur.append(ch)
    if quoted:
        raise ValueError("unterminated string in EPD operations")
    tail = "".join(cur).strip()
    if tail:
        raise ValueError(f"operation {tail!r} is missing its terminating ';'")
    return [op for op in ops if op]


def load_epd(source: Union[TextIO, Iterable[str]]) -> list[EpdRecord]:
    """Parse EPD lines; blank lines and ``#`` comments are skipped."""
    records = []
    for lineno, raw in enumerate(source, 1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        fields = line.split(None, 4)
        if len(fields) < 4:
            raise EpdError(lineno, "expected four FEN fields")
        ops_text = fields[4] if len(fields) == 5 else ""
        try:
            ops = _split_ops(ops_text)
        except ValueError as exc:
            raise EpdError(lineno, str(exc)) from None
        opmap = {}
        for op in ops:
            try:
                tokens = shlex.split(op)
            except ValueError as exc:
                raise EpdError(lineno, f"bad operation {op!r}: {exc}") from None
            opmap[tokens[0]] = tokens[1:]
        half = opmap.pop("hmvc", ["0"])[0]
        full = opmap.pop("fmvn", ["1"])[0]
        try:
            pos = parse_fen(" ".join(fields[:4] + [half, full]))
        except FenError as exc:
            raise EpdError(lineno, f"bad position: {exc}") from None

        best = None
        if "bm" in opmap:
            try:
                best = tuple(parse_move(pos, tok) for tok in opmap.pop("bm"))
            except IllegalMoveError as exc:
                raise EpdError(lineno, str(exc)) from None
        dm = None
        if "dm" in opmap:
            try:
                dm = int(opmap.pop("dm")[0])
            except (ValueError, IndexError):
                raise EpdError(lineno, "dm needs an integer operand") from None
            if dm < 1:
                raise EpdError(lineno, "dm must be >= 1")
        ident = " ".join(opmap.pop("id", [f"line{lineno}"]))
        for unknown in opmap:
            warnings.warn(f"line {lineno}: ignoring EPD opcode {unknown!r}", EpdWarning, stacklevel=2)
        records.append(EpdRecord(pos, best, dm, ident))
    return records


def load_epd_file(path: Union[str, os.PathLike]) -> list[EpdRecord]:
    with open(path) as fh:
        return load_epd(fh)


def default_suite_path() -> Path:
    """The bundled mate suite, or ``$ENTROPLY_SUITE_DIR/mates.epd`` when set."""
    env = os.environ.get(SUITE_ENV)
    if env:
        return Path(env) / DEFAULT_SUITE
    return Path(str(resources.files("entroply") / "data" / DEFAULT_SUITE))


def load_default_suite() -> list[EpdRecord]:
    return load_epd_file(default_suite_path())


# --- running cases --------------------------------------------------------------

def params_for(policy: DepthPolicy, uniform_depth: float, *, step: float = 6.0,
               max_extension: int = 32, node_budget: Optional[int] = None) -> SearchParams:
    """Search parameters for a budget of ``uniform_depth`` quiet plies.

    A realization-probability policy gets the threshold ``C**-depth`` so that a
    line of quiet moves stops at the same ply as under the uniform budget.
    """
    if isinstance(policy, RealizationProbability):
        policy = RealizationProbability(policy.probabilities, policy.c ** -uniform_depth, policy.c)
        virtual = (max_extension + 1) * step
    else:
        virtual = uniform_depth * step
    return SearchParams(policy, virtual, max_extension, step, node_budget=node_budget)


def verify_solution(record: EpdRecord, result: SearchResult) -> bool:
    """Replay the PV: a mate claim must end in checkmate, else check the bm list."""
    if record.direct_mate is not None:
        if result.solved_mate_in is None or result.solved_mate_in > record.direct_mate:
            return False
        pos = record.position
        for m in result.pv:
            pos = _apply(pos, m)
        return game_status(pos) is GameStatus.CHECKMATE
    if record.best_moves is not None:
        return result.best_move in record.best_moves
    return False


def solve_case(record: EpdRecord, params: SearchParams, node_budget: Optional[int] = None,
               experiment_number: int = 1) -> CaseResult:
    """Search one record and judge it.

    With ``dm`` the case is solved when a mate within that many moves is
    proven; otherwise when the chosen move is among the ``bm`` moves.
    """
    if record.direct_mate is None and record.best_moves is None:
        raise ValueError(f"record {record.id!r} has neither bm nor dm")
    if node_budget is not None:
        params = SearchParams(params.policy, params.max_virtual_depth, params.max_extension,
                              params.step_scale, params.mate_score, node_budget)
    result = search_root(record.position, params)
    solved = not result.aborted
    if solved:
        if record.direct_mate is not None:
            solved = (result.solved_mate_in is not None
                      and result.solved_mate_in <= record.direct_mate)
        else:
            solved = result.best_move in record.best_moves
    if isinstance(params.policy, RealizationProbability):
        uniform_depth = _rp_depth(params)
    else:
        uniform_depth = params.max_uniform_depth
    row = ExperimentRow(
        experiment_number=experiment_number,
        nodes_searched=result.nodes,
        divisor=float(params.policy.divisor),
        max_depth_attained=result.max_depth_attained,
        max_uniform_depth=_tidy(uniform_depth),
        solved=solved,
        step_size=_tidy(params.step_scale),
    )
    return CaseResult(row, result, record)


def _rp_depth(params: SearchParams) -> float:
    policy = params.policy
    return round(-math.log(policy.threshold) / math.log(policy.c), 6)


def _tidy(x: float):
    return int(x) if float(x).is_integer() else float(x)


def run_case(record: EpdRecord, params: SearchParams, node_budget: Optional[int] = None,
             experiment_number: int = 1) -> ExperimentRow:
    return solve_case(record, params, node_budget, experiment_number).row


# --- sweeps ----------------------------------------------------------------------

@dataclass(frozen=True)
class SweepSpec:
    suite: Sequence[EpdRecord]
    divisors: Sequence[float] = (1.0,)
    uniform_depths: Sequence[float] = (2,)
    policy: str = "appendix"
    step_size: float = 6.0
    node_budget: int = 200_000
    max_extension: int = 32
    jobs: int = 1

    def __post_init__(self):
        if not self.suite or not self.divisors or not self.uniform_depths:
            raise ValueError("suite, divisors and uniform_depths must be non-empty")
        if self.node_budget <= 0:
            raise ValueError("node_budget must be positive")


def _sweep_task(args) -> ExperimentRow:
    number, record, policy_name, divisor, depth, spec_step, max_ext, budget = args
    policy = make_policy(policy_name, divisor)
    params = params_for(policy, depth, step=spec_step, max_extension=max_ext)
    return run_case(record, params, budget, number)


def run_sweep(spec: SweepSpec) -> list[ExperimentRow]:
    """One row per (record, divisor, depth), numbered from 1 in that order."""
    tasks = []
    number = 0
    for record in spec.suite:
        for divisor in spec.divisors:
            for depth in spec.uniform_depths:
                number += 1
                tasks.append((number, record, spec.policy, divisor, depth,
                              spec.step_size, spec.max_extension, spec.node_budget))
    if spec.jobs > 1:
        with ProcessPoolExecutor(max_workers=spec.jobs) as pool:
            return list(pool.map(_sweep_task, tasks))
    return [_sweep_task(t) for t in tasks]


def depth_grid(max_depth: float = 7.0, per_ply: int = 3) -> list[float]:
    """Budgets ``1/per_ply, 2/per_ply, ...`` up to ``max_depth`` plies.

    A step of a third of a ply is two virtual units at the usual step of 6,
    the spacing of the original experiment table.
    """
    if per_ply < 1 or max_depth <= 0:
        raise ValueError("need per_ply >= 1 and max_depth > 0")
    return [k / per_ply for k in range(1, int(round(max_depth * per_ply)) + 1)]


def minimal_solving_depth(record: EpdRecord, policy: DepthPolicy, depths: Iterable[float],
                          *, node_budget: int, step: float = 6.0,
                          max_extension: int = 32) -> Optional[CaseResult]:
    """First depth (in the given order) at which the case is solved.

    Stops early once a run exhausts the node budget, since deeper runs cost more.
    """
    for depth in depths:
        params = params_for(policy, depth, step=step, max_extension=max_extension)
        res = solve_case(record, params, node_budget)
        if res.row.solved:
            return res
        if res.search is not None and res.search.aborted:
            return None
    return None


@dataclass(frozen=True)
class PolicySummary:
    name: str
    solved: int
    total: int
    median_nodes: Optional[float]
    median_nodes_common: Optional[float]
    node_ratio: Optional[float]
    nodes: tuple[Optional[int], ...] = field(default=(), repr=False)
    depths: tuple[Optional[float], ...] = field(default=(), repr=False)

    @property
    def solve_rate(self) -> float:
        return self.solved / self.total if self.total else 0.0


def compare_policies(suite: Sequence[EpdRecord], policies: Sequence[DepthPolicy],
                     base: SearchParams, depths: Optional[Sequence[float]] = None,
                     node_budget: int = 200_000) -> list[PolicySummary]:
    """Solve rate and nodes at the minimal solving depth for each policy.

    The baseline is the first :class:`Uniform` policy in the list, or the
    first policy if none is uniform.  ``node_ratio`` compares medians over the
    cases both the policy and the baseline solve.
    """
    if len(policies) < 2:
        raise ValueError("compare_policies needs at least two policies")
    if depths is None:
        depths = depth_grid()
    per_policy = []
    for policy in policies:
        nodes, found = [], []
        for record in suite:
            res = minimal_solving_depth(record, policy, depths, node_budget=node_budget,
                                        step=base.step_scale, max_extension=base.max_extension)
            nodes.append(res.row.nodes_searched if res else None)
            found.append(res.row.max_uniform_depth if res else None)
        per_policy.append((policy, nodes, found))

    base_idx = next((i for i, p in enumerate(policies) if isinstance(p, Uniform)), 0)
    base_nodes = per_policy[base_idx][1]
    out = []
    for policy, nodes, found in per_policy:
        solved = [n for n in nodes if n is not None]
        common = [(n, b) for n, b in zip(nodes, base_nodes) if n is not None and b is not None]
        med_common = statistics.median(n for n, _ in common) if common else None
        base_common = statistics.median(b for _, b in common) if common else None
        out.append(PolicySummary(
            name=policy.name,
            solved=len(solved),
            total=len(suite),
            median_nodes=statistics.median(solved) if solved else None,
            median_nodes_common=med_common,
            node_ratio=(med_common / base_common) if common else None,
            nodes=tuple(nodes),
            depths=tuple(found),
        ))
    return out


def format_summary(summaries: Sequence[PolicySummary]) -> str:
    lines = [f"{'policy':<10} {'solved':>8} {'rate':>6} {'median_nodes':>13} {'ratio':>7}"]
    for s in summaries:
        med = f"{s.median_nodes:.0f}" if s.median_nodes is not None else "-"
        ratio = f"{s.node_ratio:.3f}" if s.node_ratio is not None else "-"
        lines.append(f"{s.name:<10} {s.solved:>4}/{s.total:<3} {s.solve_rate:>6.2f} {med:>13} {ratio:>7}")
    return "\n".join(lines)


# --- CSV -----------------------------------------------------------------------

def _num(x) -> str:
    if isinstance(x, bool):
        return "1" if x else "0"
    if isinstance(x, int):
        return str(x)
    return f"{x:.6g}"


def _csv_text(rows: Sequence[ExperimentRow]) -> str:
    lines = [CSV_HEADER]
    for r in rows:
        lines.append(",".join(_num(v) for v in r))
    return "\n".join(lines) + "\n"


def emit_csv(rows: Sequence[ExperimentRow], destination: Union[str, os.PathLike, TextIO, None] = None) -> None:
    """Write rows as CSV to a path, an open text stream, or stdout for ``-``/None."""
    text = _csv_text(rows)
    if destination is None or destination == "-":
        sys.stdout.write(text)
    elif isinstance(destination, (str, os.PathLike)):
        with open(destination, "w", newline="") as fh:
            fh.write(text)
    else:
        destination.write(text)


def _parse_num(text: str):
    value = float(text)
    return int(value) if value.is_integer() and "." not in text and "e" not in text else value


def read_csv(source: Union[str, os.PathLike, TextIO]) -> list[ExperimentRow]:
    if isinstance(source, (str, os.PathLike)):
        with open(source, newline="") as fh:
            return read_csv(fh)
    reader = csv.reader(source)
    header = next(reader, None)
    if header is None or ",".join(header) != CSV_HEADER:
        raise ValueError(f"unexpected CSV header {header!r}")
    rows = []
    for rec in reader:
        if not rec:
            continue
        exp, nodes, div, depth, udepth, solved, step = rec
        rows.append(ExperimentRow(int(exp), int(nodes), float(div), int(depth),
                                  _parse_num(udepth), solved == "1", _parse_num(step)))
    return rows
