"""JSON problem and SDF files.

A problem file looks like::

    {
      "actions": ["a", "b"],
      "states": ["s0", "s1"],
      "welfare": [[1, 0], [0, 1]],
      "prior": [0.5, 0.5],
      "sampling": {
        "sample_space": ["p1", "p2"],
        "distributions": {"s0": [0.3, 0.7], "s1": [0.5, 0.5]},
        "tol": 1e-9
      },
      "regions": [["s0", "s1"]]
    }

``welfare`` is action-major.  ``sampling.sample_space`` may be the string
``"unit_interval"``, in which case every state draws Uniform[0, 1] and no
distributions are given.  ``prior``, ``sampling`` and ``regions`` are
optional; when both ``regions`` and ``sampling`` are present, ``regions``
defines the partition.
"""

from __future__ import annotations

import json
import logging
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .model import (
    DecisionProblem,
    IdentificationPartition,
    InputError,
    Prior,
    SamplingModel,
    compute_identification_partition,
)
from .sdf import FiniteTable, Threshold

log = logging.getLogger("decide")

UNIT_INTERVAL = "unit_interval"


class ParseError(Exception):
    """A file could not be read or does not follow the expected layout."""


class UsageError(Exception):
    """The file is valid but lacks what the requested command needs."""


@dataclass(frozen=True)
class ProblemFile:
    problem: DecisionProblem
    prior: Prior | None = None
    sampling: SamplingModel | None = None
    regions: IdentificationPartition | None = None
    tol: float = 1e-9

    def partition(self) -> tuple[IdentificationPartition, str]:
        """The identification partition and where it came from."""
        if self.regions is not None:
            if self.sampling is not None:
                log.warning("both 'regions' and 'sampling' given; using 'regions'")
            return self.regions, "regions"
        if self.sampling is None:
            raise UsageError("file has neither 'sampling' nor 'regions'; no partition available")
        if not self.sampling.is_finite:
            raise UsageError(
                "a unit-interval sample space does not determine the partition; add 'regions'"
            )
        return compute_identification_partition(self.sampling, self.tol), "sampling"


def _load_json(path: str | Path):
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ParseError(f"{path}: {exc.strerror or exc}") from None
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        lines = text.splitlines()
        context = lines[exc.lineno - 1] if 0 < exc.lineno <= len(lines) else ""
        raise ParseError(
            f"{path}:{exc.lineno}:{exc.colno}: {exc.msg}\n    {context}\n    {' ' * (exc.colno - 1)}^"
        ) from None


def _need(doc: dict, key: str, path) -> object:
    if key not in doc:
        raise ParseError(f"{path}: missing required key '{key}'")
    return doc[key]


def _parse_sampling(raw, problem: DecisionProblem, path) -> SamplingModel:
    if not isinstance(raw, dict):
        raise ParseError(f"{path}: 'sampling' must be an object")
    space = _need(raw, "sample_space", path)
    if space == UNIT_INTERVAL:
        dist = raw.get("distributions", "uniform")
        if dist not in ("uniform", None) and not (
            isinstance(dist, dict) and all(v == "uniform" for v in dist.values())
        ):
            raise ParseError(f"{path}: unit-interval sampling only supports uniform distributions")
        return SamplingModel.unit_interval()
    if not isinstance(space, list):
        raise ParseError(f"{path}: 'sample_space' must be a list of point labels or '{UNIT_INTERVAL}'")
    dist = _need(raw, "distributions", path)
    if isinstance(dist, dict):
        unknown = set(dist) - set(problem.states)
        if unknown:
            raise ParseError(f"{path}: distributions given for unknown states {sorted(unknown)}")
        try:
            rows = [dist[s] for s in problem.states]
        except KeyError as exc:
            raise ParseError(f"{path}: no distribution for state {exc.args[0]!r}") from None
    elif isinstance(dist, list):
        if len(dist) != problem.n_states:
            raise ParseError(f"{path}: need one distribution per state ({problem.n_states})")
        rows = dist
    else:
        raise ParseError(f"{path}: 'distributions' must be an object keyed by state or a list")
    return SamplingModel(space, rows)


def _parse_regions(raw, problem: DecisionProblem, path) -> IdentificationPartition:
    if not isinstance(raw, list) or not all(isinstance(g, list) for g in raw):
        raise ParseError(f"{path}: 'regions' must be a list of lists of state labels")
    return IdentificationPartition(
        [[problem.state_index(str(s)) for s in g] for g in raw], problem.n_states
    )


def load_problem(path: str | Path) -> ProblemFile:
    doc = _load_json(path)
    if not isinstance(doc, dict):
        raise ParseError(f"{path}: top level must be a JSON object")
    try:
        problem = DecisionProblem(
            _need(doc, "actions", path), _need(doc, "states", path), _need(doc, "welfare", path)
        )
        prior = None
        if doc.get("prior") is not None:
            prior = Prior(doc["prior"])
            if prior.weights.size != problem.n_states:
                raise InputError("prior length does not match the number of states")
        sampling = None
        tol = 1e-9
        if doc.get("sampling") is not None:
            sampling = _parse_sampling(doc["sampling"], problem, path)
            tol = float(doc["sampling"].get("tol", tol))
            if not tol >= 0:
                raise InputError("sampling.tol must be nonnegative")
        regions = None
        if doc.get("regions") is not None:
            regions = _parse_regions(doc["regions"], problem, path)
    except (InputError, TypeError, ValueError) as exc:
        raise ParseError(f"{path}: {exc}") from None
    return ProblemFile(problem, prior, sampling, regions, tol)


def load_sdf(path: str | Path, pf: ProblemFile):
    """Read an SDF file: ``{"type": "table", "table": {point: action}}`` or
    ``{"type": "threshold", "thresholds": [t1, ...]}``.

    A table SDF against a unit-interval sample space (or the reverse) is an
    ``InputError``, not a parse error: the file itself is fine.
    """
    doc = _load_json(path)
    if not isinstance(doc, dict):
        raise ParseError(f"{path}: top level must be a JSON object")
    kind = _need(doc, "type", path)
    if kind == "table":
        table = _need(doc, "table", path)
        if not isinstance(table, dict):
            raise ParseError(f"{path}: 'table' must map sample points to actions")
        if pf.sampling is None or not pf.sampling.is_finite:
            raise InputError("table SDF needs a finite 'sampling' section in the problem file")
        try:
            return FiniteTable.from_labels(table, pf.sampling, pf.problem)
        except InputError as exc:
            raise ParseError(f"{path}: {exc}") from None
    if kind == "threshold":
        cuts = _need(doc, "thresholds", path)
        if not isinstance(cuts, list):
            raise ParseError(f"{path}: 'thresholds' must be a list of cut-points")
        try:
            return Threshold(cuts)
        except (InputError, TypeError, ValueError) as exc:
            raise ParseError(f"{path}: {exc}") from None
    raise ParseError(f"{path}: unknown SDF type {kind!r} (expected 'table' or 'threshold')")


def sdf_document(sdf) -> dict:
    if isinstance(sdf, Threshold):
        return {"type": "threshold", "thresholds": list(sdf.cuts)}
    raise TypeError("only threshold SDFs serialize without the problem's labels")


def to_jsonable(obj):
    """Convert numpy scalars/arrays and non-finite floats for ``json.dumps``."""
    if isinstance(obj, dict):
        return {str(k): to_jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [to_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return to_jsonable(obj.tolist())
    if isinstance(obj, (np.bool_, bool)):
        return bool(obj)
    if isinstance(obj, (np.integer, int)):
        return int(obj)
    if isinstance(obj, (np.floating, float)):
        x = float(obj)
        return x if math.isfinite(x) else None
    return obj


def dumps(report: dict) -> str:
    # repr of a float is the shortest string that round-trips exactly
    return json.dumps(to_jsonable(report), indent=2, allow_nan=False)
