"""Randomized-choice criteria over the full probability simplex.

With a rich enough sample space any vector of choice probabilities can be
realized, so each criterion becomes a small LP in (delta, t).
"""

from __future__ import annotations

import numpy as np

from .lp import EQ, GE, LE, LPError, LPResult, solve
from .model import (
    ChoiceDistribution,
    Criterion,
    CriterionSolution,
    DecisionProblem,
    ExAnteSolution,
    IdentificationPartition,
    InputError,
    Prior,
    resolve_scope,
)
from .pure import WELFARE_TOL, _check_exante_inputs, aggregate_exante

# relaxation of the optimal value when probing for other optima
FACE_SLACK = 1e-9
FACE_WIDTH = 1e-6


def _require(res: LPResult, what: str) -> LPResult:
    if not res.optimal:
        raise LPError(f"{what} LP came back {res.status.value}")
    return res


def _simplex_rows(k: int) -> list:
    return [(np.r_[np.ones(k), 0.0], EQ, 1.0)]


def _maximin_rows(w: np.ndarray) -> list:
    # t - sum_d delta_d w(d, s) <= 0 for each state s
    return [(np.r_[-w[:, j], 1.0], LE, 0.0) for j in range(w.shape[1])]


def _mmr_rows(w: np.ndarray) -> list:
    # best(s) - sum_d delta_d w(d, s) <= t
    best = w.max(axis=0)
    return [(np.r_[-w[:, j], -1.0], LE, -best[j]) for j in range(w.shape[1])]


def _bounds(k: int):
    return [(0.0, 1.0)] * k + [(None, None)]


def _face_is_wide(rows: list, k: int, t_row) -> bool:
    """True when delta can move while keeping the objective at its optimum."""
    rows = rows + [t_row]
    for d in range(k):
        obj = np.zeros(k + 1)
        obj[d] = 1.0
        hi = _require(solve(obj, rows, _bounds(k), maximize=True), "face probe")
        lo = _require(solve(obj, rows, _bounds(k), maximize=False), "face probe")
        if hi.value - lo.value > FACE_WIDTH:
            return True
    return False


def solve_bayes_mixed(problem: DecisionProblem, prior: Prior, scope=None) -> CriterionSolution:
    """Maximize posterior expected welfare over the simplex.

    The objective is linear, so a vertex is always optimal; the lowest-index
    optimal action is reported and ``tied`` marks a nontrivial optimal face.
    """
    states = resolve_scope(problem, scope)
    if prior.weights.size != problem.n_states:
        raise InputError("prior length does not match the number of states")
    post = prior.posterior(states)
    g = problem.welfare[:, states] @ post
    k = problem.n_actions
    res = _require(solve(g, [(np.ones(k), EQ, 1.0)], maximize=True), "Bayes")
    near = np.flatnonzero(g >= res.value - WELFARE_TOL)
    choice = int(near[0])
    return CriterionSolution(ChoiceDistribution.vertex(k, choice), float(g[choice]), near.size > 1)


def solve_maximin_mixed(problem: DecisionProblem, scope=None) -> CriterionSolution:
    """max over delta of min over the scope of expected welfare."""
    states = resolve_scope(problem, scope)
    w = problem.welfare[:, states]
    k = problem.n_actions
    rows = _simplex_rows(k) + _maximin_rows(w)
    obj = np.r_[np.zeros(k), 1.0]
    res = _require(solve(obj, rows, _bounds(k), maximize=True), "maximin")
    delta = ChoiceDistribution(res.x[:k])
    value = float((delta.probs @ w).min())
    tied = res.alternative_optima and _face_is_wide(
        rows, k, (obj, GE, res.value - FACE_SLACK)
    )
    return CriterionSolution(delta, value, tied)


def solve_mmr_mixed(problem: DecisionProblem, scope=None) -> CriterionSolution:
    """min over delta of max over the scope of regret."""
    states = resolve_scope(problem, scope)
    w = problem.welfare[:, states]
    k = problem.n_actions
    rows = _simplex_rows(k) + _mmr_rows(w)
    obj = np.r_[np.zeros(k), 1.0]
    res = _require(solve(obj, rows, _bounds(k), maximize=False), "minimax-regret")
    delta = ChoiceDistribution(res.x[:k])
    value = max(0.0, float((w.max(axis=0) - delta.probs @ w).max()))
    tied = res.alternative_optima and _face_is_wide(
        rows, k, (obj, LE, res.value + FACE_SLACK)
    )
    return CriterionSolution(delta, value, tied)


def regret_profile(problem: DecisionProblem, delta: ChoiceDistribution, scope=None) -> np.ndarray:
    """Regret of ``delta`` in each state of ``scope``."""
    states = resolve_scope(problem, scope)
    w = problem.welfare[:, states]
    return np.maximum(w.max(axis=0) - delta.probs @ w, 0.0)


def solve_exante_mixed(
    problem: DecisionProblem,
    partition: IdentificationPartition,
    criterion: Criterion,
    prior: Prior | None = None,
) -> ExAnteSolution:
    """Choice probabilities for every identification region, aggregated ex ante."""
    criterion = Criterion(criterion)
    _check_exante_inputs(problem, partition, criterion, prior)
    solutions = []
    masses = []
    for block in partition.groups:
        if criterion is Criterion.BAYES:
            m = prior.mass(block)
            masses.append(m)
            if m <= 0.0:
                fb = solve_maximin_mixed(problem, block)
                solutions.append(
                    CriterionSolution(
                        fb.delta,
                        fb.value,
                        fb.tied,
                        ("zero prior mass on block; choice taken from in-block maximin",),
                    )
                )
                continue
            solutions.append(solve_bayes_mixed(problem, prior, block))
        elif criterion is Criterion.MAXIMIN:
            solutions.append(solve_maximin_mixed(problem, block))
        else:
            solutions.append(solve_mmr_mixed(problem, block))
    value = aggregate_exante(criterion, [s.value for s in solutions], masses or None)
    return ExAnteSolution(partition, tuple(solutions), value)
