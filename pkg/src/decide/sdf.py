"""Explicit statistical decision functions and their evaluation.

Two kinds of SDF are supported:

* ``FiniteTable`` maps every point of a finite sample space to an action.
* ``Threshold`` splits the unit interval into half-open segments
  ``[t_{k-1}, t_k)``; a Uniform[0, 1] draw in segment k selects action k.

Expected welfare depends on an SDF only through the choice probabilities it
induces, which is what ``choice_probabilities`` computes exactly.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Sequence, Union

import numpy as np

from .model import (
    ChoiceDistribution,
    Criterion,
    DecisionProblem,
    InputError,
    Prior,
    SamplingModel,
    resolve_scope,
)

CHUNK = 1 << 16


@dataclass(frozen=True)
class FiniteTable:
    table: tuple[int, ...]
    n_actions: int

    def __init__(self, table: Sequence[int], n_actions: int) -> None:
        t = tuple(int(a) for a in table)
        if not t:
            raise InputError("table SDF needs at least one sample point")
        if n_actions < 1 or any(not 0 <= a < n_actions for a in t):
            raise InputError("table SDF maps a sample point to an unknown action")
        object.__setattr__(self, "table", t)
        object.__setattr__(self, "n_actions", int(n_actions))

    @classmethod
    def from_labels(cls, mapping: dict, model: SamplingModel, problem: DecisionProblem) -> "FiniteTable":
        if not model.is_finite:
            raise InputError("table SDF needs a finite sample space")
        missing = set(model.points) - set(mapping)
        extra = set(mapping) - set(model.points)
        if missing or extra:
            raise InputError(
                f"table must cover every sample point exactly once "
                f"(missing {sorted(missing)}, unknown {sorted(extra)})"
            )
        return cls([problem.action_index(mapping[p]) for p in model.points], problem.n_actions)


@dataclass(frozen=True)
class Threshold:
    cuts: tuple[float, ...]

    def __init__(self, cuts: Sequence[float]) -> None:
        c = tuple(float(x) for x in cuts)
        if any(not 0.0 <= x <= 1.0 for x in c):
            raise InputError("threshold cut-points must lie in [0, 1]")
        if any(b < a for a, b in zip(c, c[1:])):
            raise InputError("threshold cut-points must be nondecreasing")
        object.__setattr__(self, "cuts", c)

    @property
    def n_actions(self) -> int:
        return len(self.cuts) + 1

    def segments(self) -> np.ndarray:
        return np.diff(np.r_[0.0, self.cuts, 1.0])


StatisticalDecisionFunction = Union[FiniteTable, Threshold]


def _check_compatible(sdf, model: SamplingModel, state: int) -> None:
    if isinstance(sdf, FiniteTable):
        if not model.is_finite:
            raise InputError("table SDF used with a unit-interval sample space")
        if len(sdf.table) != len(model.points):
            raise InputError("table SDF does not match the number of sample points")
        if not 0 <= state < model.n_states:
            raise InputError(f"state index {state} out of range")
    elif isinstance(sdf, Threshold):
        if model.is_finite:
            raise InputError("threshold SDF used with a finite sample space")
        if state < 0:
            raise InputError(f"state index {state} out of range")
    else:
        raise InputError(f"not an SDF: {type(sdf).__name__}")


def choice_probabilities(sdf, model: SamplingModel, state: int) -> ChoiceDistribution:
    """Probability that ``sdf`` picks each action when data come from state ``state``."""
    _check_compatible(sdf, model, state)
    if isinstance(sdf, FiniteTable):
        q = model.distributions[state]
        return ChoiceDistribution(np.bincount(sdf.table, weights=q, minlength=sdf.n_actions))
    return ChoiceDistribution(sdf.segments())


def _check_problem(sdf, problem: DecisionProblem) -> None:
    if sdf.n_actions != problem.n_actions:
        raise InputError(f"SDF chooses among {sdf.n_actions} actions, problem has {problem.n_actions}")


def sdf_expected_welfare(sdf, model: SamplingModel, problem: DecisionProblem, state: int) -> float:
    _check_problem(sdf, problem)
    s = problem.check_state(state)
    p = choice_probabilities(sdf, model, s).probs
    return float(p @ problem.welfare[:, s])


def enumerated_expected_welfare(sdf, model: SamplingModel, problem: DecisionProblem, state: int) -> float:
    """Expected welfare by walking (sample point, action, welfare) one at a time.

    Does not form choice probabilities, so it can cross-check
    :func:`sdf_expected_welfare`.
    """
    _check_problem(sdf, problem)
    s = problem.check_state(state)
    _check_compatible(sdf, model, s)
    terms = []
    if isinstance(sdf, FiniteTable):
        for mass, action in zip(model.distributions[s], sdf.table):
            terms.append(float(mass) * float(problem.welfare[action, s]))
    else:
        edges = (0.0, *sdf.cuts, 1.0)
        for action in range(sdf.n_actions):
            terms.append((edges[action + 1] - edges[action]) * float(problem.welfare[action, s]))
    return math.fsum(terms)


def randomization_device(target: ChoiceDistribution) -> Threshold:
    """Threshold SDF on Uniform[0, 1] whose choice probabilities equal ``target``."""
    cuts = np.clip(np.cumsum(target.probs)[:-1], 0.0, 1.0)
    return Threshold(np.maximum.accumulate(cuts) if cuts.size else cuts)


# -- Monte Carlo --------------------------------------------------------------


def _chunk_generator(seed: int, chunk: int) -> np.random.Generator:
    # each chunk owns a disjoint block of the Philox counter space
    return np.random.Generator(np.random.Philox(key=seed, counter=[0, 0, chunk, 0]))


def draw_actions(sdf, model: SamplingModel, state: int, n: int, seed: int, chunk: int) -> np.ndarray:
    """Actions chosen on ``n`` fresh samples from chunk ``chunk`` of the stream."""
    u = _chunk_generator(seed, chunk).random(n)
    if isinstance(sdf, FiniteTable):
        cdf = np.cumsum(model.distributions[state])
        idx = np.searchsorted(cdf, u * cdf[-1], side="right")
        idx = np.minimum(idx, len(sdf.table) - 1)
        return np.asarray(sdf.table)[idx]
    return np.searchsorted(np.asarray(sdf.cuts), u, side="right")


@dataclass(frozen=True)
class MonteCarloEstimate:
    estimate: float
    std_error: float
    reps: int


def _chunk_stats(sdf, model, welfare_col, state, seed, chunk, n):
    x = welfare_col[draw_actions(sdf, model, state, n, seed, chunk)]
    mean = float(x.mean())
    return n, mean, float(((x - mean) ** 2).sum())


def monte_carlo_expected_welfare(
    sdf,
    model: SamplingModel,
    problem: DecisionProblem,
    state: int,
    reps: int,
    seed: int,
    workers: int = 1,
) -> MonteCarloEstimate:
    """Sample-mean welfare of ``sdf`` over ``reps`` simulated data sets.

    Draws are split into fixed-size chunks, each with its own counter range,
    and the per-chunk statistics are merged in chunk order; the result is
    therefore identical for any number of workers.
    """
    if reps < 1:
        raise InputError("reps must be a positive integer")
    if seed < 0:
        raise InputError("seed must be nonnegative")
    _check_problem(sdf, problem)
    s = problem.check_state(state)
    _check_compatible(sdf, model, s)
    col = np.asarray(problem.welfare[:, s])
    sizes = [CHUNK] * (reps // CHUNK) + ([reps % CHUNK] if reps % CHUNK else [])

    def job(j):
        return _chunk_stats(sdf, model, col, s, seed, j, sizes[j])

    if workers > 1 and len(sizes) > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            stats = list(pool.map(job, range(len(sizes))))
    else:
        stats = [job(j) for j in range(len(sizes))]

    n, mean, m2 = stats[0]
    for nb, mb, m2b in stats[1:]:
        tot = n + nb
        d = mb - mean
        mean = mean + d * nb / tot
        m2 = m2 + m2b + d * d * n * nb / tot
        n = tot
    se = math.sqrt(m2 / (n - 1) / n) if n > 1 else math.nan
    return MonteCarloEstimate(mean, se, reps)


# -- families -------------------------------------------------------------------


@dataclass(frozen=True)
class FamilyScore:
    index: int
    score: float
    welfare: tuple[float, ...]


def evaluate_sdf_family(
    sdfs: Sequence,
    model: SamplingModel,
    problem: DecisionProblem,
    scope=None,
    criterion: Criterion = Criterion.MAXIMIN,
    prior: Prior | None = None,
) -> list[FamilyScore]:
    """Score every SDF on the scope and rank them best first.

    Scores are worst-case expected welfare (maximin), worst-case regret (mmr,
    lower is better) or posterior-average welfare (bayes).  Equal scores keep
    family order.
    """
    if not sdfs:
        raise InputError("SDF family is empty")
    criterion = Criterion(criterion)
    states = resolve_scope(problem, scope)
    if criterion is Criterion.BAYES:
        if prior is None:
            raise InputError("the Bayes criterion needs a prior")
        post = prior.posterior(states)
    best = problem.best_welfare()[list(states)]
    scored = []
    for i, sdf in enumerate(sdfs):
        ew = np.array([sdf_expected_welfare(sdf, model, problem, s) for s in states])
        if criterion is Criterion.MAXIMIN:
            score = float(ew.min())
        elif criterion is Criterion.MMR:
            score = float((best - ew).max())
        else:
            score = float(ew @ post)
        scored.append(FamilyScore(i, score, tuple(map(float, ew))))
    sign = 1.0 if criterion is Criterion.MMR else -1.0
    return sorted(scored, key=lambda f: (sign * f.score, f.index))
