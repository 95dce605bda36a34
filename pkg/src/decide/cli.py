"""Command-line front end.

Usage::

    decide regions problem.json
    decide solve --criterion mmr --mode mixed --scope block:s0 problem.json
    decide binary --scope full problem.json
    decide simulate --sdf device.json --reps 100000 --seed 42 problem.json

Reports are JSON on stdout; warnings and diagnostics go to stderr.  The
``DECIDE_LOG`` environment variable (error, info or debug) sets the
diagnostic level.

Exit codes:
    0  success
    2  usage error (bad flags, or the file lacks what the command needs)
    3  parse error (unreadable or malformed file)
    4  solver or precondition error
"""

from __future__ import annotations

import argparse
import logging
import os
import sys
import warnings

import numpy as np

from . import binary as bin_
from .io import ParseError, ProblemFile, UsageError, dumps, load_problem, load_sdf
from .lp import LPError
from .mixed import (
    regret_profile,
    solve_bayes_mixed,
    solve_exante_mixed,
    solve_maximin_mixed,
    solve_mmr_mixed,
)
from .model import (
    Criterion,
    CriterionSolution,
    Identification,
    InputError,
    classify_identification,
)
from .pure import bayes_pure, exante_pure, maximin_pure, mmr_pure
from .sdf import (
    choice_probabilities,
    enumerated_expected_welfare,
    monte_carlo_expected_welfare,
    sdf_expected_welfare,
)

EXIT_OK, EXIT_USAGE, EXIT_PARSE, EXIT_SOLVER = 0, 2, 3, 4

log = logging.getLogger("decide")

_LEVELS = {"error": logging.ERROR, "info": logging.INFO, "debug": logging.DEBUG}


def _setup_logging() -> None:
    level = os.environ.get("DECIDE_LOG", "").lower()
    handler = logging.StreamHandler(sys.stderr)
    handler.setFormatter(logging.Formatter("%(levelname)s: %(message)s"))
    log.handlers[:] = [handler]
    log.setLevel(_LEVELS.get(level, logging.WARNING))
    log.propagate = False
    if level and level not in _LEVELS:
        log.warning("ignoring unknown DECIDE_LOG=%s", level)


def _resolve_scope(pf: ProblemFile, scope: str) -> tuple[int, ...] | None:
    """``full`` -> None (all states); ``block:<state>`` -> that state's region."""
    if scope == "full":
        return None
    if scope.startswith("block:"):
        label = scope[len("block:"):]
        if label not in pf.problem.states:
            raise UsageError(f"unknown state {label!r} in --scope")
        partition, _ = pf.partition()
        return partition.region(pf.problem.state_index(label))
    raise UsageError(f"--scope must be 'full', 'block:<state>' or 'exante', got {scope!r}")


def _scope_labels(pf: ProblemFile, states) -> list[str]:
    if states is None:
        return list(pf.problem.states)
    return [pf.problem.states[s] for s in states]


def _ambiguous(w: np.ndarray) -> bool:
    """No single action is best in every state of the block."""
    best = w.max(axis=0)
    return not bool(np.any(np.all(w >= best, axis=1)))


def cmd_regions(pf: ProblemFile, args) -> dict:
    partition, source = pf.partition()
    kind = classify_identification(partition)
    n = len(partition.groups)
    label = "Unidentified (region = S)" if kind is Identification.UNIDENTIFIED else kind.value
    return {
        "classification": kind.value,
        "summary": f"{label}; {n} block{'s' if n != 1 else ''}",
        "source": source,
        "n_blocks": n,
        "blocks": [
            {
                "states": [pf.problem.states[s] for s in block],
                "ambiguous": _ambiguous(pf.problem.welfare[:, list(block)]),
            }
            for block in partition.groups
        ],
    }


_SOLVERS = {
    ("pure", Criterion.BAYES): lambda p, pr, sc: bayes_pure(p, pr, sc),
    ("pure", Criterion.MAXIMIN): lambda p, pr, sc: maximin_pure(p, sc),
    ("pure", Criterion.MMR): lambda p, pr, sc: mmr_pure(p, sc),
    ("mixed", Criterion.BAYES): lambda p, pr, sc: solve_bayes_mixed(p, pr, sc),
    ("mixed", Criterion.MAXIMIN): lambda p, pr, sc: solve_maximin_mixed(p, sc),
    ("mixed", Criterion.MMR): lambda p, pr, sc: solve_mmr_mixed(p, sc),
}


def _solution_report(pf: ProblemFile, sol: CriterionSolution, criterion: Criterion, states) -> dict:
    out = {
        "states": _scope_labels(pf, states),
        "delta": dict(zip(pf.problem.actions, sol.delta.probs)),
        "value": sol.value,
        "is_pure": sol.is_pure,
        "tied": sol.tied,
    }
    if criterion is Criterion.MMR:
        out["regret_profile"] = dict(
            zip(_scope_labels(pf, states), regret_profile(pf.problem, sol.delta, states))
        )
    if sol.diagnostics:
        for msg in sol.diagnostics:
            log.info(msg)
        out["diagnostics"] = list(sol.diagnostics)
    return out


def cmd_solve(pf: ProblemFile, args) -> dict:
    criterion = Criterion(args.criterion)
    if criterion is Criterion.BAYES and pf.prior is None:
        raise UsageError("the bayes criterion needs a 'prior' in the problem file")
    prior = pf.prior if criterion is Criterion.BAYES else None
    header = {"criterion": criterion.value, "mode": args.mode, "scope": args.scope}
    if args.scope == "exante":
        partition, source = pf.partition()
        solver = exante_pure if args.mode == "pure" else solve_exante_mixed
        res = solver(pf.problem, partition, criterion, prior)
        return {
            **header,
            "partition_source": source,
            "value": res.value,
            "blocks": [
                _solution_report(pf, sol, criterion, block)
                for block, sol in zip(partition.groups, res.blocks)
            ],
        }
    states = _resolve_scope(pf, args.scope)
    sol = _SOLVERS[(args.mode, criterion)](pf.problem, prior, states)
    return {**header, **_solution_report(pf, sol, criterion, states)}


def cmd_binary(pf: ProblemFile, args) -> dict:
    if pf.problem.n_actions != 2:
        raise UsageError(f"binary needs exactly 2 actions, the file has {pf.problem.n_actions}")
    states = _resolve_scope(pf, args.scope)
    a, b = pf.problem.actions
    s = bin_.summarize_binary(pf.problem, states)
    mm = bin_.maximin_binary(pf.problem, states)
    report = {
        "scope": args.scope,
        "states": _scope_labels(pf, states),
        "summary": {
            "alpha_L": s.alpha_L,
            "alpha_U": s.alpha_U,
            "beta_L": s.beta_L,
            "beta_U": s.beta_U,
            "M_a": s.M_a,
            "M_b": s.M_b,
            "ambiguous": s.ambiguous,
        },
        "maximin": {
            "delta_b": mm.delta.probs[1],
            "value": mm.value,
            "tied": mm.tied,
            "path": mm.diagnostics[0],
        },
    }
    if not s.ambiguous:
        choice = (a, b)[s.dominant]
        report["choice"] = choice
        report["message"] = f"no ambiguity: choose {choice}; regret 0"
        return report
    mmr = bin_.mmr_delta_binary(s)
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always", bin_.PremiseViolationWarning)
        rect = bin_.mmr_delta_binary_rectangular(s)
    for w in caught:
        log.warning("%s", w.message)
    cmp_ = bin_.regret_comparison_binary(s)
    report["mmr"] = {"delta_b": mmr.delta_b, "max_regret": mmr.max_regret}
    report["rectangular"] = {
        "delta_b": rect.delta_b,
        "max_regret": rect.max_regret,
        "premise_holds": bin_.rectangular_premise_holds(s),
    }
    report["comparison"] = {
        "vertex_best": cmp_.vertex_best,
        "mixed_best": cmp_.mixed_best,
        "improvement": cmp_.improvement,
    }
    return report


def cmd_simulate(pf: ProblemFile, args) -> dict:
    if pf.sampling is None:
        raise UsageError("simulate needs a 'sampling' section in the problem file")
    if args.reps < 1:
        raise UsageError("--reps must be positive")
    if args.seed < 0:
        raise UsageError("--seed must be nonnegative")
    sdf = load_sdf(args.sdf, pf)
    problem, model = pf.problem, pf.sampling
    rows = []
    for s, label in enumerate(problem.states):
        exact = sdf_expected_welfare(sdf, model, problem, s)
        enumerated = enumerated_expected_welfare(sdf, model, problem, s)
        mc = monte_carlo_expected_welfare(sdf, model, problem, s, args.reps, args.seed, args.workers)
        rows.append(
            {
                "state": label,
                "choice_probabilities": dict(
                    zip(problem.actions, choice_probabilities(sdf, model, s).probs)
                ),
                "expected_welfare": exact,
                "enumerated_welfare": enumerated,
                "residual": abs(exact - enumerated),
                "monte_carlo": {"estimate": mc.estimate, "std_error": mc.std_error},
            }
        )
    return {"reps": args.reps, "seed": args.seed, "states": rows}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="decide",
        description="Decision criteria under partial identification, with and without randomized choice.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("regions", help="identification partition and its classification")
    p.add_argument("file")
    p.set_defaults(func=cmd_regions)

    p = sub.add_parser("solve", help="solve a decision criterion")
    p.add_argument("--criterion", required=True, choices=[c.value for c in Criterion])
    p.add_argument("--mode", required=True, choices=["pure", "mixed"])
    p.add_argument("--scope", default="full", help="full | block:<state> | exante (default: full)")
    p.add_argument("file")
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("binary", help="closed-form analysis of a two-action problem")
    p.add_argument("--scope", default="full", help="full | block:<state> (default: full)")
    p.add_argument("file")
    p.set_defaults(func=cmd_binary)

    p = sub.add_parser("simulate", help="exact and Monte Carlo evaluation of an SDF")
    p.add_argument("--sdf", required=True, help="SDF file (table or threshold)")
    p.add_argument("--reps", type=int, default=100_000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("file")
    p.set_defaults(func=cmd_simulate)
    return parser


def main(argv: list[str] | None = None) -> int:
    _setup_logging()
    args = build_parser().parse_args(argv)
    try:
        pf = load_problem(args.file)
        report = args.func(pf, args)
    except UsageError as exc:
        print(f"decide: usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except ParseError as exc:
        print(f"decide: parse error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except (InputError, LPError) as exc:
        print(f"decide: {exc}", file=sys.stderr)
        return EXIT_SOLVER
    sys.stdout.write(dumps(report) + "\n")
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
