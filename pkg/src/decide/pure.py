"""Non-randomized criteria: Bayes, maximin and minimax regret over a set of states.

Each solver returns a vertex ``ChoiceDistribution``.  Ties are broken toward
the lowest action index and reported through ``CriterionSolution.tied``.
"""

from __future__ import annotations

import numpy as np

from .model import (
    Criterion,
    CriterionSolution,
    ChoiceDistribution,
    DecisionProblem,
    DegeneratePosteriorError,
    ExAnteSolution,
    IdentificationPartition,
    InputError,
    Prior,
    resolve_scope,
)

WELFARE_TOL = 1e-12


def _pick(scores: np.ndarray, maximize: bool, n_actions: int, diagnostics=()) -> CriterionSolution:
    best = scores.max() if maximize else scores.min()
    near = np.flatnonzero(np.abs(scores - best) <= WELFARE_TOL)
    choice = int(near[0])
    return CriterionSolution(
        delta=ChoiceDistribution.vertex(n_actions, choice),
        value=float(scores[choice]),
        tied=near.size > 1,
        diagnostics=tuple(diagnostics),
    )


def bayes_pure(problem: DecisionProblem, prior: Prior, scope=None) -> CriterionSolution:
    """Maximize posterior expected welfare, the prior truncated to ``scope``."""
    states = resolve_scope(problem, scope)
    if prior.weights.size != problem.n_states:
        raise InputError("prior length does not match the number of states")
    post = prior.posterior(states)
    scores = problem.welfare[:, states] @ post
    return _pick(scores, True, problem.n_actions)


def maximin_pure(problem: DecisionProblem, scope=None) -> CriterionSolution:
    states = resolve_scope(problem, scope)
    scores = problem.welfare[:, states].min(axis=1)
    return _pick(scores, True, problem.n_actions)


def regret_table(problem: DecisionProblem, states) -> np.ndarray:
    """Regret of every action (rows) in each of ``states`` (columns)."""
    w = problem.welfare[:, list(states)]
    return w.max(axis=0) - w


def mmr_pure(problem: DecisionProblem, scope=None) -> CriterionSolution:
    states = resolve_scope(problem, scope)
    scores = regret_table(problem, states).max(axis=1)
    return _pick(scores, False, problem.n_actions)


def aggregate_exante(criterion: Criterion, values, masses=None) -> float:
    """Combine block values into the ex-ante value.

    Bayes weighs each block by its prior mass; maximin keeps the worst block,
    minimax regret the largest block regret.
    """
    values = np.asarray(values, dtype=float)
    if criterion is Criterion.BAYES:
        return float(np.dot(masses, values))
    if criterion is Criterion.MAXIMIN:
        return float(values.min())
    return float(values.max())


def exante_pure(
    problem: DecisionProblem,
    partition: IdentificationPartition,
    criterion: Criterion,
    prior: Prior | None = None,
) -> ExAnteSolution:
    """Choose one action per identification region.

    The ex-ante objectives separate across blocks, so each block is solved
    on its own and the block values are aggregated.
    """
    criterion = Criterion(criterion)
    _check_exante_inputs(problem, partition, criterion, prior)
    solutions = []
    masses = []
    for block in partition.groups:
        if criterion is Criterion.BAYES:
            m = prior.mass(block)
            masses.append(m)
            if m <= 0.0:
                fallback = maximin_pure(problem, block)
                solutions.append(
                    CriterionSolution(
                        fallback.delta,
                        fallback.value,
                        fallback.tied,
                        ("zero prior mass on block; action taken from in-block maximin",),
                    )
                )
                continue
            solutions.append(bayes_pure(problem, prior, block))
        elif criterion is Criterion.MAXIMIN:
            solutions.append(maximin_pure(problem, block))
        else:
            solutions.append(mmr_pure(problem, block))
    value = aggregate_exante(criterion, [s.value for s in solutions], masses or None)
    return ExAnteSolution(partition, tuple(solutions), value)


def _check_exante_inputs(problem, partition, criterion, prior) -> None:
    if partition.n_states != problem.n_states:
        raise InputError("partition does not cover the problem's states")
    if criterion is Criterion.BAYES:
        if prior is None:
            raise InputError("the Bayes criterion needs a prior")
        if prior.weights.size != problem.n_states:
            raise InputError("prior length does not match the number of states")
        if prior.weights.sum() <= 0:
            raise DegeneratePosteriorError("prior has no mass")
    elif prior is not None:
        raise InputError(f"a prior is only used by the Bayes criterion, not {criterion.value}")
