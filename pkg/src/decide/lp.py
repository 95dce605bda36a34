"""Dense two-phase simplex with Bland's anti-cycling rule.

Meant for the tiny LPs of the randomized criteria (a handful of actions and
states), where a plain tableau is both fast enough and easy to audit.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

PIVOT_TOL = 1e-10
FEAS_TOL = 1e-9
OPT_TOL = 1e-9

LE, EQ, GE = "<=", "=", ">="


class LPStatus(str, enum.Enum):
    OPTIMAL = "optimal"
    INFEASIBLE = "infeasible"
    UNBOUNDED = "unbounded"


class LPError(RuntimeError):
    """An LP that should be solvable came back infeasible or unbounded."""


@dataclass(frozen=True)
class Constraint:
    coeffs: tuple[float, ...]
    relation: str
    bound: float

    def __post_init__(self) -> None:
        if self.relation not in (LE, EQ, GE):
            raise ValueError(f"relation must be one of <=, =, >=; got {self.relation!r}")


@dataclass(frozen=True)
class LinearProgram:
    """Optimize ``objective @ x`` subject to ``constraints`` and ``bounds``.

    ``bounds[j]`` is ``(lo, hi)``; None means unbounded on that side.  The
    default bound for every variable is ``(0, None)``.
    """

    objective: tuple[float, ...]
    constraints: tuple[Constraint, ...] = ()
    bounds: tuple[tuple[float | None, float | None], ...] | None = None
    maximize: bool = True

    def __post_init__(self) -> None:
        n = len(self.objective)
        if n == 0:
            raise ValueError("LP needs at least one variable")
        if not all(math.isfinite(c) for c in self.objective):
            raise ValueError("objective coefficients must be finite")
        for con in self.constraints:
            if len(con.coeffs) != n:
                raise ValueError(f"constraint has {len(con.coeffs)} coefficients for {n} variables")
            if not all(math.isfinite(c) for c in con.coeffs) or not math.isfinite(con.bound):
                raise ValueError("constraint coefficients must be finite")
        if self.bounds is not None:
            if len(self.bounds) != n:
                raise ValueError("one (lo, hi) bound pair per variable")
            for lo, hi in self.bounds:
                if lo is not None and hi is not None and lo > hi:
                    raise ValueError(f"empty variable bound ({lo}, {hi})")

    @property
    def n_vars(self) -> int:
        return len(self.objective)

    def variable_bounds(self) -> list[tuple[float | None, float | None]]:
        if self.bounds is None:
            return [(0.0, None)] * self.n_vars
        return [
            (None if lo is None or lo == -math.inf else lo, None if hi is None or hi == math.inf else hi)
            for lo, hi in self.bounds
        ]


@dataclass(frozen=True)
class LPResult:
    status: LPStatus
    x: np.ndarray | None = None
    value: float | None = None
    # some nonbasic column has zero reduced cost: the optimum may not be unique
    alternative_optima: bool = False
    iterations: int = field(default=0, compare=False)

    @property
    def optimal(self) -> bool:
        return self.status is LPStatus.OPTIMAL


def _pivot(T: np.ndarray, row: int, col: int) -> None:
    T[row] /= T[row, col]
    factor = T[:, col].copy()
    factor[row] = 0.0
    T -= np.outer(factor, T[row])


def _run(T: np.ndarray, basis: list[int], cost: np.ndarray, allowed: int) -> tuple[str, int]:
    """Maximize ``cost @ z`` on a canonical tableau in place.

    Only the first ``allowed`` columns may enter.  Returns ("optimal" |
    "unbounded", iterations).
    """
    m = T.shape[0]
    it = 0
    while True:
        reduced = cost[:allowed] - cost[basis] @ T[:, :allowed]
        entering = -1
        for j in range(allowed):
            if reduced[j] > OPT_TOL:
                entering = j
                break
        if entering < 0:
            return "optimal", it
        col = T[:, entering]
        best_row = -1
        best_ratio = math.inf
        for i in range(m):
            if col[i] > PIVOT_TOL:
                ratio = T[i, -1] / col[i]
                if ratio < best_ratio - PIVOT_TOL or (
                    ratio <= best_ratio + PIVOT_TOL and basis[i] < basis[best_row]
                ):
                    best_ratio = ratio
                    best_row = i
        if best_row < 0:
            return "unbounded", it
        _pivot(T, best_row, entering)
        basis[best_row] = entering
        it += 1


def _standardize(lp: LinearProgram):
    """Rewrite variables as x = offset + M @ y with y >= 0.

    Returns (offset, M, extra_rows, twin) where extra_rows are upper-bound
    constraints on y from two-sided variable bounds and ``twin`` maps each
    column of a split free variable to its negated partner.
    """
    n = lp.n_vars
    cols: list[np.ndarray] = []
    offset = np.zeros(n)
    extra: list[tuple[np.ndarray, float]] = []
    twin: dict[int, int] = {}
    for j, (lo, hi) in enumerate(lp.variable_bounds()):
        unit = np.zeros(n)
        unit[j] = 1.0
        if lo is not None:
            offset[j] = lo
            cols.append(unit)
            if hi is not None:
                extra.append((len(cols) - 1, hi - lo))
        elif hi is not None:
            offset[j] = hi
            cols.append(-unit)
        else:
            twin[len(cols)] = len(cols) + 1
            twin[len(cols) + 1] = len(cols)
            cols.append(unit)
            cols.append(-unit)
    M = np.column_stack(cols)
    rows = []
    for k, ub in extra:
        a = np.zeros(M.shape[1])
        a[k] = 1.0
        rows.append((a, LE, ub))
    return offset, M, rows, twin


def solve_lp(lp: LinearProgram) -> LPResult:
    """Solve ``lp``, returning an optimal basic solution or the failure status."""
    offset, M, rows, twin = _standardize(lp)
    c = np.asarray(lp.objective, dtype=float)
    sign = 1.0 if lp.maximize else -1.0
    for con in lp.constraints:
        a = np.asarray(con.coeffs, dtype=float)
        rows.append((a @ M, con.relation, con.bound - float(a @ offset)))

    ny = M.shape[1]
    m = len(rows)
    n_slack = sum(1 for _, rel, _ in rows if rel != EQ)

    # columns: y | slacks | artificials | rhs
    A = np.zeros((m, ny + n_slack))
    b = np.zeros(m)
    basis: list[int] = []
    need_art: list[int] = []
    k = ny
    for i, (a, rel, rhs) in enumerate(rows):
        A[i, :ny] = a
        slack_col = -1
        if rel != EQ:
            A[i, k] = 1.0 if rel == LE else -1.0
            slack_col = k
            k += 1
        b[i] = rhs
        if rhs < 0:
            A[i] *= -1.0
            b[i] = -rhs
        if slack_col >= 0 and A[i, slack_col] > 0:
            basis.append(slack_col)
        else:
            basis.append(-1)
            need_art.append(i)

    n_real = ny + n_slack
    n_art = len(need_art)
    T = np.zeros((m, n_real + n_art + 1))
    T[:, :n_real] = A
    T[:, -1] = b
    for t, i in enumerate(need_art):
        T[i, n_real + t] = 1.0
        basis[i] = n_real + t

    iterations = 0
    if n_art:
        phase1 = np.zeros(n_real + n_art)
        phase1[n_real:] = -1.0
        _, it = _run(T, basis, phase1, n_real + n_art)
        iterations += it
        if -(phase1[basis] @ T[:, -1]) > FEAS_TOL:
            return LPResult(LPStatus.INFEASIBLE, iterations=iterations)
        keep = []
        for i in range(m):
            if basis[i] >= n_real:
                nz = np.flatnonzero(np.abs(T[i, :n_real]) > PIVOT_TOL)
                if nz.size == 0:
                    continue  # redundant row
                _pivot(T, i, int(nz[0]))
                basis[i] = int(nz[0])
            keep.append(i)
        T = np.column_stack([T[keep, :n_real], T[keep, -1]])
        basis = [basis[i] for i in keep]

    cost = np.zeros(n_real)
    cost[:ny] = sign * (c @ M)
    status, it = _run(T, basis, cost, n_real)
    iterations += it
    if status == "unbounded":
        return LPResult(LPStatus.UNBOUNDED, iterations=iterations)

    z = np.zeros(n_real)
    z[basis] = T[:, -1]
    x = offset + M @ z[:ny]
    reduced = cost - cost[basis] @ T[:, :n_real]
    in_basis = set(basis)
    # the negated twin of a basic free-variable column always prices out at zero
    alt = any(
        abs(reduced[j]) <= OPT_TOL
        for j in range(n_real)
        if j not in in_basis and twin.get(j) not in in_basis
    )
    return LPResult(LPStatus.OPTIMAL, x, float(c @ x), alt, iterations)


def solve(objective: Sequence[float], constraints=(), bounds=None, maximize: bool = True) -> LPResult:
    """Convenience wrapper taking ``(coeffs, relation, bound)`` triples."""
    cons = tuple(Constraint(tuple(map(float, a)), rel, float(rhs)) for a, rel, rhs in constraints)
    return solve_lp(LinearProgram(tuple(map(float, objective)), cons, bounds, maximize))
