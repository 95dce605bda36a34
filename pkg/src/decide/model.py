"""Domain types shared by the solvers.

Welfare is stored dense and action-major: ``welfare[c, s]`` is the welfare of
action ``c`` in state ``s``.  All types are frozen after construction.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

PROB_TOL = 1e-12
DELTA_TOL = 1e-9
PURE_TOL = 1e-9


class InputError(ValueError):
    """Malformed or inconsistent input."""


class DegeneratePosteriorError(InputError):
    """The prior puts no mass on the requested states."""


class UnsupportedOperationError(InputError):
    """The operation is not defined for this kind of input."""


class Criterion(str, enum.Enum):
    BAYES = "bayes"
    MAXIMIN = "maximin"
    MMR = "mmr"


class Identification(str, enum.Enum):
    UNIFORM_POINT = "UniformPoint"
    UNIFORM_PARTIAL = "UniformPartial"
    MIXED = "Mixed"
    # single block equal to all of S; not a *proper* subset, so not partial
    UNIDENTIFIED = "Unidentified"


def _labels(values: Iterable, what: str) -> tuple[str, ...]:
    out = tuple(str(v) for v in values)
    if not out:
        raise InputError(f"need at least one {what}")
    if len(set(out)) != len(out):
        raise InputError(f"{what} labels must be unique")
    return out


def _frozen(arr: np.ndarray) -> np.ndarray:
    arr.setflags(write=False)
    return arr


def _probability_vector(values, n: int, what: str, tol: float) -> np.ndarray:
    p = np.array(values, dtype=float).ravel()
    if p.shape != (n,):
        raise InputError(f"{what} must have length {n}, got {p.size}")
    if not np.all(np.isfinite(p)):
        raise InputError(f"{what} has non-finite entries")
    if np.any(p < -tol):
        raise InputError(f"{what} has negative entries")
    if abs(p.sum() - 1.0) > tol:
        raise InputError(f"{what} sums to {p.sum()!r}, not 1")
    return p


@dataclass(frozen=True)
class DecisionProblem:
    actions: tuple[str, ...]
    states: tuple[str, ...]
    welfare: np.ndarray

    def __init__(self, actions: Sequence, states: Sequence, welfare) -> None:
        actions = _labels(actions, "action")
        states = _labels(states, "state")
        w = np.array(welfare, dtype=float)
        if w.shape != (len(actions), len(states)):
            raise InputError(
                f"welfare must be {len(actions)}x{len(states)} (actions x states), got shape {w.shape}"
            )
        if not np.all(np.isfinite(w)):
            raise InputError("welfare entries must be finite")
        object.__setattr__(self, "actions", actions)
        object.__setattr__(self, "states", states)
        object.__setattr__(self, "welfare", _frozen(w))

    @property
    def n_actions(self) -> int:
        return len(self.actions)

    @property
    def n_states(self) -> int:
        return len(self.states)

    def action_index(self, label: str) -> int:
        try:
            return self.actions.index(label)
        except ValueError:
            raise InputError(f"unknown action {label!r}") from None

    def state_index(self, label: str) -> int:
        try:
            return self.states.index(label)
        except ValueError:
            raise InputError(f"unknown state {label!r}") from None

    def check_state(self, state: int) -> int:
        if not isinstance(state, (int, np.integer)) or not 0 <= state < self.n_states:
            raise InputError(f"state index {state!r} out of range [0, {self.n_states})")
        return int(state)

    def best_welfare(self) -> np.ndarray:
        """max_d w(d, s) for every state."""
        return self.welfare.max(axis=0)

    def __eq__(self, other) -> bool:
        if not isinstance(other, DecisionProblem):
            return NotImplemented
        return (
            self.actions == other.actions
            and self.states == other.states
            and np.array_equal(self.welfare, other.welfare)
        )

    __hash__ = None  # type: ignore[assignment]


@dataclass(frozen=True)
class Prior:
    weights: np.ndarray

    def __init__(self, weights) -> None:
        w = np.array(weights, dtype=float).ravel()
        _probability_vector(w, w.size, "prior", PROB_TOL)
        object.__setattr__(self, "weights", _frozen(w))

    def mass(self, states: Iterable[int]) -> float:
        return float(self.weights[list(states)].sum())

    def posterior(self, states: Sequence[int]) -> np.ndarray:
        """Truncate to ``states`` and renormalize."""
        idx = list(states)
        m = self.weights[idx]
        total = m.sum()
        if total <= 0.0:
            raise DegeneratePosteriorError("prior has zero mass on the scope; posterior undefined")
        return m / total


@dataclass(frozen=True)
class SamplingModel:
    """Sample space shared by all states plus one distribution per state.

    ``points`` is None for the unit interval, in which case every state
    draws from Uniform[0, 1] and ``distributions`` is None.
    """

    points: tuple[str, ...] | None
    distributions: np.ndarray | None

    def __init__(self, points: Sequence | None, distributions=None) -> None:
        if points is None:
            if distributions is not None:
                raise InputError("unit-interval sample space takes no probability vectors")
            object.__setattr__(self, "points", None)
            object.__setattr__(self, "distributions", None)
            return
        pts = _labels(points, "sample point")
        q = np.array(distributions, dtype=float)
        if q.ndim != 2 or q.shape[1] != len(pts):
            raise InputError(f"distributions must be (n_states, {len(pts)}), got shape {q.shape}")
        for s, row in enumerate(q):
            _probability_vector(row, len(pts), f"distribution of state {s}", PROB_TOL)
        object.__setattr__(self, "points", pts)
        object.__setattr__(self, "distributions", _frozen(q))

    @classmethod
    def unit_interval(cls) -> "SamplingModel":
        return cls(None)

    @property
    def is_finite(self) -> bool:
        return self.points is not None

    @property
    def n_states(self) -> int | None:
        return None if self.distributions is None else self.distributions.shape[0]


@dataclass(frozen=True)
class IdentificationPartition:
    """Observational-equivalence classes of S; the block of s is S(Q_s)."""

    groups: tuple[tuple[int, ...], ...]
    group_of: tuple[int, ...] = field(repr=False)

    def __init__(self, groups: Iterable[Iterable[int]], n_states: int | None = None) -> None:
        blocks = [tuple(sorted(int(s) for s in g)) for g in groups]
        if any(not b for b in blocks):
            raise InputError("partition blocks must be nonempty")
        flat = [s for b in blocks for s in b]
        if len(set(flat)) != len(flat):
            raise InputError("partition blocks must be disjoint")
        n = len(flat) if n_states is None else n_states
        if sorted(flat) != list(range(n)):
            raise InputError(f"partition must cover states 0..{n - 1} exactly")
        blocks.sort(key=lambda b: b[0])
        owner = [0] * n
        for k, b in enumerate(blocks):
            for s in b:
                owner[s] = k
        object.__setattr__(self, "groups", tuple(blocks))
        object.__setattr__(self, "group_of", tuple(owner))

    @property
    def n_states(self) -> int:
        return len(self.group_of)

    def region(self, state: int) -> tuple[int, ...]:
        return self.groups[self.group_of[state]]


@dataclass(frozen=True)
class ChoiceDistribution:
    """A point on the probability simplex over actions.

    Entries within ``DELTA_TOL`` of the simplex are accepted, clipped and
    renormalized so downstream sums are exact to rounding.
    """

    probs: np.ndarray

    def __init__(self, probs) -> None:
        p = np.array(probs, dtype=float).ravel()
        _probability_vector(p, p.size, "choice distribution", DELTA_TOL)
        if np.any(p > 1.0 + DELTA_TOL):
            raise InputError("choice probabilities must lie in [0, 1]")
        p = np.clip(p, 0.0, 1.0)
        p = p / p.sum()
        object.__setattr__(self, "probs", _frozen(p))

    @classmethod
    def vertex(cls, n: int, action: int) -> "ChoiceDistribution":
        p = np.zeros(n)
        p[action] = 1.0
        return cls(p)

    def __len__(self) -> int:
        return self.probs.size

    @property
    def is_pure(self) -> bool:
        return bool(self.probs.max() >= 1.0 - PURE_TOL)

    def __eq__(self, other) -> bool:
        if not isinstance(other, ChoiceDistribution):
            return NotImplemented
        return np.array_equal(self.probs, other.probs)

    __hash__ = None  # type: ignore[assignment]


@dataclass(frozen=True)
class CriterionSolution:
    delta: ChoiceDistribution
    value: float
    tied: bool = False
    diagnostics: tuple[str, ...] = ()

    @property
    def is_pure(self) -> bool:
        return self.delta.is_pure

    @property
    def action(self) -> int:
        """Index of the most probable action (lowest index on ties)."""
        return int(np.argmax(self.delta.probs))


@dataclass(frozen=True)
class ExAnteSolution:
    """Per-block solutions of an ex-ante criterion and the aggregate value."""

    partition: IdentificationPartition
    blocks: tuple[CriterionSolution, ...]
    value: float

    def decision_for_state(self, state: int) -> CriterionSolution:
        return self.blocks[self.partition.group_of[state]]


def _check_delta(problem: DecisionProblem, delta: ChoiceDistribution) -> np.ndarray:
    if len(delta) != problem.n_actions:
        raise InputError(f"delta has {len(delta)} entries for {problem.n_actions} actions")
    return delta.probs


def expected_welfare(problem: DecisionProblem, delta: ChoiceDistribution, state: int) -> float:
    """Mixed welfare sum_d delta[d] * w(d, state)."""
    s = problem.check_state(state)
    p = _check_delta(problem, delta)
    return float(p @ problem.welfare[:, s])


def regret(problem: DecisionProblem, delta: ChoiceDistribution, state: int) -> float:
    s = problem.check_state(state)
    p = _check_delta(problem, delta)
    col = problem.welfare[:, s]
    return max(0.0, float(col.max() - p @ col))


def compute_identification_partition(model: SamplingModel, tol: float = 1e-9) -> IdentificationPartition:
    """Group states whose sampling distributions are within ``tol`` in sup norm.

    The closeness relation is closed transitively (single linkage), so
    chains of near-equal distributions end up in one block.
    """
    if not model.is_finite:
        raise UnsupportedOperationError(
            "observational equivalence is only computed for finite sample spaces"
        )
    if tol < 0:
        raise InputError("tol must be nonnegative")
    q = model.distributions
    n = q.shape[0]
    parent = list(range(n))

    def find(i: int) -> int:
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    for i in range(n):
        close = np.abs(q[i + 1 :] - q[i]).max(axis=1, initial=0.0) <= tol
        for j in np.flatnonzero(close) + i + 1:
            ri, rj = find(i), find(int(j))
            if ri != rj:
                parent[max(ri, rj)] = min(ri, rj)

    blocks: dict[int, list[int]] = {}
    for s in range(n):
        blocks.setdefault(find(s), []).append(s)
    return IdentificationPartition(blocks.values(), n)


def classify_identification(partition: IdentificationPartition) -> Identification:
    sizes = [len(g) for g in partition.groups]
    n = partition.n_states
    if all(k == 1 for k in sizes):
        return Identification.UNIFORM_POINT
    if len(sizes) == 1:
        return Identification.UNIDENTIFIED
    if all(2 <= k < n for k in sizes):
        return Identification.UNIFORM_PARTIAL
    return Identification.MIXED


@dataclass(frozen=True)
class RegionScope:
    """Nonempty set of state indices a criterion is evaluated over."""

    states: tuple[int, ...]

    def __init__(self, states: Iterable[int]) -> None:
        idx = tuple(sorted({int(s) for s in states}))
        if not idx:
            raise InputError("scope must contain at least one state")
        object.__setattr__(self, "states", idx)

    def __len__(self) -> int:
        return len(self.states)

    def __iter__(self):
        return iter(self.states)

    @classmethod
    def full(cls, problem: DecisionProblem) -> "RegionScope":
        return cls(range(problem.n_states))


def resolve_scope(problem: DecisionProblem, scope) -> tuple[int, ...]:
    """Accept None (all states), a RegionScope or any iterable of indices."""
    if scope is None:
        return tuple(range(problem.n_states))
    if not isinstance(scope, RegionScope):
        scope = RegionScope(scope)
    for s in scope.states:
        problem.check_state(s)
    return scope.states
