"""Fractional depth increments for classified moves.

Every policy answers one question: how much virtual depth does this move
consume?  A quiet move costs ``step_scale``; informative moves cost less, so
forcing lines are searched deeper inside the same budget.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Mapping, NamedTuple, Sequence

from .chesscore import CHECK, QUIET, PROMOTION, CategoryKind, MoveCategory, PieceKind, capture, check_capture
from .entropy import EntropyModel

__all__ = [
    "PolicyContext", "DepthPolicy", "Uniform", "EntropyReduction", "WinandsTable",
    "RealizationProbability", "AppendixHeuristic", "PolicyConfigError",
    "CHECK_BONUS", "ers_fraction", "category_reduction", "winands_fraction",
    "rp_update", "rp_should_expand", "selective_extension_score",
    "appendix_increment", "ply_increment", "all_categories", "make_policy",
]

# Added to a move's ordering score when it gives check.
CHECK_BONUS = 10000
# Scores above this carry the check bonus; such moves cost no depth.
CHECK_THRESHOLD = 2000


class PolicyConfigError(ValueError):
    """A policy was built or queried with inconsistent parameters."""


class PolicyContext(NamedTuple):
    category: MoveCategory
    eval_delta: float = 0.0
    reply_count: int = 0
    path_rp: float = 1.0


def all_categories() -> list[MoveCategory]:
    cats = [CHECK, PROMOTION, QUIET]
    cats += [capture(k) for k in PieceKind if k != PieceKind.KING]
    cats += [check_capture(k) for k in PieceKind if k != PieceKind.KING]
    return cats


def category_reduction(category: MoveCategory, model: EntropyModel) -> float:
    """Entropy a move of this category removes from the position, in bits."""
    kind = category.kind
    if kind is CategoryKind.CHECK or kind is CategoryKind.CHECK_CAPTURE:
        return model.best_gain
    if kind is CategoryKind.CAPTURE:
        return model.rate(category.victim)
    if kind is CategoryKind.PROMOTION:
        # Extrapolation: a promotion trades a pawn's rate for a queen's.
        return model.rate(PieceKind.QUEEN) - model.rate(PieceKind.PAWN)
    return 0.0


def ers_fraction(category: MoveCategory, model: EntropyModel) -> float:
    """Fraction of a ply charged to a move: ``1 - reduction / best_gain``."""
    reduction = category_reduction(category, model)
    if reduction > model.best_gain:
        raise PolicyConfigError(
            f"{category} reduces {reduction:.4f} bits, more than best_gain {model.best_gain:.4f}"
        )
    return 1.0 - reduction / model.best_gain


def winands_fraction(p_c: float, c: float) -> float:
    """Fractional ply ``log(p_c) / log(1 / c)`` of a move with transition probability ``p_c``."""
    if not 0.0 < p_c <= 1.0:
        raise PolicyConfigError(f"p_c must lie in (0, 1], got {p_c}")
    if c <= 1:
        raise PolicyConfigError(f"C must exceed 1, got {c}")
    if p_c == 1.0:
        return 0.0
    return math.log(p_c) / math.log(1.0 / c)


def rp_update(parent_rp: float, p_m: float) -> float:
    """Realization probability of a child node (the root has probability 1)."""
    if not (0.0 < parent_rp <= 1.0 and 0.0 < p_m <= 1.0):
        raise PolicyConfigError("probabilities must lie in (0, 1]")
    return math.exp(math.log(parent_rp) + math.log(p_m))


def rp_should_expand(rp: float, threshold: float) -> bool:
    return rp > threshold


def selective_extension_score(path_probs: Sequence[float]) -> float:
    """Sum of log probabilities along a path; 0 for a fully forced line."""
    total = 0.0
    for p in path_probs:
        if not 0.0 < p <= 1.0:
            raise PolicyConfigError(f"path probability must lie in (0, 1], got {p}")
        total += math.log(p)
    return total


def appendix_increment(eval_delta: float, reply_count: int, divisor: float = 1.0,
                       step: float = 6.0) -> float:
    """Virtual depth added for one move by the original search procedure.

    ``eval_delta`` is the move's ordering score (material swing plus the check
    bonus); ``reply_count`` is the number of legal moves at the node being
    expanded.  Checking moves add nothing.  The reduction term is divided by
    ``divisor`` and the result clamped at zero.
    """
    if divisor <= 0:
        raise PolicyConfigError("divisor must be positive")
    if reply_count < 0:
        raise PolicyConfigError("reply_count must be >= 0")
    if eval_delta > CHECK_THRESHOLD:
        return 0.0
    add = math.log10(abs(0.1 + eval_delta / 100.0)) + 5.0 / math.log(reply_count + 2)
    return max(0.0, step - add / divisor)


# --- policies ----------------------------------------------------------------

class DepthPolicy:
    """Base class; subclasses implement :meth:`increment`."""

    name = "policy"
    divisor = 1.0

    def increment(self, ctx: PolicyContext, step_scale: float) -> float:
        raise NotImplementedError

    def transition_probability(self, category: MoveCategory) -> float:
        """Per-move probability used for realization-probability gating."""
        return 1.0


@dataclass(frozen=True)
class Uniform(DepthPolicy):
    """Every move costs one full step: classical fixed-depth search."""

    name = "uniform"

    def increment(self, ctx, step_scale):
        return step_scale


@dataclass(frozen=True, eq=False)
class EntropyReduction(DepthPolicy):
    """Charge ``step * (1 - (reduction / best_gain) / divisor)``.

    With ``divisor = 1`` this is exactly ``step * ers_fraction``.  Larger
    divisors shrink the discount given to informative moves.
    """

    model: EntropyModel = field(default_factory=EntropyModel.asymptotic)
    divisor: float = 1.0
    name = "ers"
    _table: dict = field(init=False, repr=False)

    def __post_init__(self):
        if self.divisor <= 0:
            raise PolicyConfigError("divisor must be positive")
        table = {c: 1.0 - (1.0 - ers_fraction(c, self.model)) / self.divisor
                 for c in all_categories()}
        object.__setattr__(self, "_table", table)

    def increment(self, ctx, step_scale):
        return step_scale * self._table[ctx.category]


def _entropy_probabilities(model: EntropyModel, c: float) -> dict[MoveCategory, float]:
    # P = 2**reduction / C makes log P / log(1/C) equal the ERS fraction.
    return {cat: min(1.0, 2.0 ** category_reduction(cat, model) / c) for cat in all_categories()}


@dataclass(frozen=True, eq=False)
class WinandsTable(DepthPolicy):
    """Fractional ply ``log P_c / log(1/C)`` from a per-category probability table."""

    probabilities: Mapping[MoveCategory, float]
    c: float = 30.0
    name = "winands"

    def __post_init__(self):
        if self.c <= 1:
            raise PolicyConfigError("C must exceed 1")
        for cat, p in self.probabilities.items():
            if not 0.0 < p <= 1.0:
                raise PolicyConfigError(f"probability for {cat} must lie in (0, 1]")

    @classmethod
    def from_entropy(cls, model: EntropyModel | None = None, c: float = 30.0) -> WinandsTable:
        return cls(_entropy_probabilities(model or EntropyModel.asymptotic(), c), c)

    def increment(self, ctx, step_scale):
        try:
            p_c = self.probabilities[ctx.category]
        except KeyError:
            raise PolicyConfigError(f"no probability configured for {ctx.category}") from None
        return step_scale * winands_fraction(p_c, self.c)


@dataclass(frozen=True, eq=False)
class RealizationProbability(DepthPolicy):
    """Expand while the product of move probabilities stays above ``threshold``.

    Depth is still booked one step per move; the search applies the gate.
    """

    probabilities: Mapping[MoveCategory, float]
    threshold: float = 1e-3
    c: float = 30.0
    name = "rp"

    def __post_init__(self):
        if not 0.0 < self.threshold < 1.0:
            raise PolicyConfigError("threshold must lie in (0, 1)")
        for cat, p in self.probabilities.items():
            if not 0.0 < p <= 1.0:
                raise PolicyConfigError(f"probability for {cat} must lie in (0, 1]")

    @classmethod
    def from_entropy(cls, threshold: float, model: EntropyModel | None = None,
                     c: float = 30.0) -> RealizationProbability:
        return cls(_entropy_probabilities(model or EntropyModel.asymptotic(), c), threshold, c)

    def increment(self, ctx, step_scale):
        return step_scale

    def transition_probability(self, category):
        try:
            return self.probabilities[category]
        except KeyError:
            raise PolicyConfigError(f"no probability configured for {category}") from None


@dataclass(frozen=True)
class AppendixHeuristic(DepthPolicy):
    """The original procedure's increment, reduction term divided by ``divisor``."""

    divisor: float = 1.0
    name = "appendix"

    def __post_init__(self):
        if self.divisor <= 0:
            raise PolicyConfigError("divisor must be positive")

    def increment(self, ctx, step_scale):
        return appendix_increment(ctx.eval_delta, ctx.reply_count, self.divisor, step_scale)


def ply_increment(policy: DepthPolicy, ctx: PolicyContext, step_scale: float = 6.0) -> float:
    return max(0.0, policy.increment(ctx, step_scale))


def make_policy(name: str, divisor: float = 1.0, *, best_gain: float | None = None,
                c: float = 30.0, threshold: float | None = None) -> DepthPolicy:
    """Build a policy from its short name: uniform, ers, winands, rp or appendix."""
    model = None
    if best_gain is not None:
        model = EntropyModel.asymptotic(best_gain=best_gain)
    name = name.lower()
    if name == "uniform":
        return Uniform()
    if name == "ers":
        return EntropyReduction(model or EntropyModel.asymptotic(), divisor)
    if name == "winands":
        return WinandsTable.from_entropy(model, c)
    if name == "rp":
        return RealizationProbability.from_entropy(threshold or c ** -4, model, c)
    if name == "appendix":
        return AppendixHeuristic(divisor)
    raise PolicyConfigError(f"unknown policy {name!r}")
