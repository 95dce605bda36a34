"""Closed-form solutions for two-action problems.

Throughout, ``delta`` is the probability of choosing the second action
(``b``); the first action (``a``) gets ``1 - delta``.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

from .mixed import solve_maximin_mixed
from .model import (
    ChoiceDistribution,
    CriterionSolution,
    DecisionProblem,
    InputError,
    resolve_scope,
)

MATCH_TOL = 1e-12


class NotAmbiguousError(InputError):
    """One action weakly dominates on the scope, so the closed forms do not apply."""


class PremiseViolationWarning(UserWarning):
    """The corner welfare pairs assumed by the rectangular formula are not realized."""


@dataclass(frozen=True)
class BinaryRegionSummary:
    alpha_L: float
    alpha_U: float
    beta_L: float
    beta_U: float
    M_a: float | None
    M_b: float | None
    # raw welfare pairs over the scope, kept for premise checks
    w_a: tuple[float, ...]
    w_b: tuple[float, ...]

    @property
    def ambiguous(self) -> bool:
        return self.M_a is not None and self.M_b is not None

    @property
    def dominant(self) -> int | None:
        """0 if a weakly dominates, 1 if b does, None under ambiguity."""
        if self.ambiguous:
            return None
        return 1 if self.M_b is not None else 0


def _require_binary(problem: DecisionProblem) -> None:
    if problem.n_actions != 2:
        raise InputError(f"binary analysis needs exactly 2 actions, got {problem.n_actions}")


def summarize_binary(problem: DecisionProblem, scope=None) -> BinaryRegionSummary:
    _require_binary(problem)
    states = resolve_scope(problem, scope)
    wa = problem.welfare[0, states]
    wb = problem.welfare[1, states]
    diff = wa - wb
    # ties belong to neither superiority set
    a_sup = diff > 0
    b_sup = diff < 0
    return BinaryRegionSummary(
        alpha_L=float(wa.min()),
        alpha_U=float(wa.max()),
        beta_L=float(wb.min()),
        beta_U=float(wb.max()),
        M_a=float(diff[a_sup].max()) if a_sup.any() else None,
        M_b=float((-diff[b_sup]).max()) if b_sup.any() else None,
        w_a=tuple(map(float, wa)),
        w_b=tuple(map(float, wb)),
    )


@dataclass(frozen=True)
class BinaryMMR:
    delta_b: float
    max_regret: float


def _require_ambiguous(summary: BinaryRegionSummary) -> None:
    if not summary.ambiguous:
        raise NotAmbiguousError(
            "no ambiguity on this scope: a vertex is optimal, use the pure or mixed solvers"
        )


def mmr_delta_binary(summary: BinaryRegionSummary) -> BinaryMMR:
    """Minimax-regret probability of b: M_b / (M_a + M_b)."""
    _require_ambiguous(summary)
    ma, mb = summary.M_a, summary.M_b
    return BinaryMMR(mb / (ma + mb), ma * mb / (ma + mb))


def _realized(summary: BinaryRegionSummary, wa: float, wb: float) -> bool:
    return any(
        abs(x - wa) <= MATCH_TOL and abs(y - wb) <= MATCH_TOL
        for x, y in zip(summary.w_a, summary.w_b)
    )


def rectangular_premise_holds(summary: BinaryRegionSummary) -> bool:
    """Both corners (alpha_L, beta_U) and (alpha_U, beta_L) occur in some state."""
    return _realized(summary, summary.alpha_L, summary.beta_U) and _realized(
        summary, summary.alpha_U, summary.beta_L
    )


def mmr_delta_binary_rectangular(summary: BinaryRegionSummary) -> BinaryMMR:
    """MMR probability of b written with the welfare extremes.

    Agrees with :func:`mmr_delta_binary` only when the corner welfare pairs
    are realized; otherwise a :class:`PremiseViolationWarning` is issued and
    the formula's value is returned anyway.
    """
    _require_ambiguous(summary)
    ma = summary.alpha_U - summary.beta_L
    mb = summary.beta_U - summary.alpha_L
    if ma + mb <= 0:
        raise InputError("degenerate welfare ranges: denominator is not positive")
    if not rectangular_premise_holds(summary):
        warnings.warn(
            "corner welfare pairs (alpha_L, beta_U) and (alpha_U, beta_L) are not both "
            "realized on this scope; the rectangular formula may not be the MMR solution",
            PremiseViolationWarning,
            stacklevel=2,
        )
    return BinaryMMR(mb / (ma + mb), ma * mb / (ma + mb))


def lower_corner_feasible(summary: BinaryRegionSummary) -> bool:
    return _realized(summary, summary.alpha_L, summary.beta_L)


def maximin_binary(problem: DecisionProblem, scope=None) -> CriterionSolution:
    """Maximin by case analysis, falling back to the LP when it can randomize.

    If one state attains both minima the answer is the action with the
    larger minimum.  Otherwise the LP decides.
    """
    s = summarize_binary(problem, scope)
    if not lower_corner_feasible(s):
        sol = solve_maximin_mixed(problem, scope)
        return CriterionSolution(sol.delta, sol.value, sol.tied, ("lp-fallback",))
    if s.alpha_L >= s.beta_L - MATCH_TOL:
        tied = abs(s.alpha_L - s.beta_L) <= MATCH_TOL
        return CriterionSolution(ChoiceDistribution([1.0, 0.0]), s.alpha_L, tied, ("lower-corner",))
    return CriterionSolution(ChoiceDistribution([0.0, 1.0]), s.beta_L, False, ("lower-corner",))


@dataclass(frozen=True)
class RegretComparison:
    vertex_best: float
    mixed_best: float

    @property
    def improvement(self) -> float:
        return self.vertex_best - self.mixed_best


def regret_comparison_binary(summary: BinaryRegionSummary) -> RegretComparison:
    """Best max regret with only delta in {0, 1} versus the randomized optimum."""
    _require_ambiguous(summary)
    ma, mb = summary.M_a, summary.M_b
    return RegretComparison(min(ma, mb), ma * mb / (ma + mb))


def binary_problem(w_a, w_b, states=None) -> DecisionProblem:
    """Two-action problem from per-state welfare of a and b."""
    w = np.vstack([np.asarray(w_a, float), np.asarray(w_b, float)])
    if states is None:
        states = [f"s{j}" for j in range(w.shape[1])]
    return DecisionProblem(["a", "b"], states, w)
