"""Exit criteria.  Each test records one PASS/FAIL line (see conftest)."""

import statistics
import time
import warnings

import numpy as np
import pytest

from decide.binary import (
    PremiseViolationWarning,
    binary_problem,
    mmr_delta_binary,
    mmr_delta_binary_rectangular,
    rectangular_premise_holds,
    regret_comparison_binary,
    summarize_binary,
)
from decide.mixed import (
    solve_bayes_mixed,
    solve_exante_mixed,
    solve_maximin_mixed,
    solve_mmr_mixed,
)
from decide.model import (
    ChoiceDistribution,
    DecisionProblem,
    Identification,
    IdentificationPartition,
    Prior,
    SamplingModel,
    classify_identification,
)
from decide.pure import bayes_pure, exante_pure, maximin_pure, mmr_pure
from decide.sdf import (
    FiniteTable,
    enumerated_expected_welfare,
    monte_carlo_expected_welfare,
    randomization_device,
    sdf_expected_welfare,
)

from conftest import random_partition, random_problem, record
from oracles import enumerate_exante_pure, joint_grid_exante_mixed

pytestmark = pytest.mark.acceptance


def _ambiguous_binary(rng, lo=2, hi=6):
    while True:
        n = int(rng.integers(lo, hi + 1))
        prob = binary_problem(rng.uniform(size=n), rng.uniform(size=n))
        s = summarize_binary(prob)
        if s.ambiguous:
            return prob, s


def test_01_maximin_example(p1):
    sol = solve_maximin_mixed(p1)
    times = []
    for _ in range(50):
        t0 = time.perf_counter()
        solve_maximin_mixed(p1)
        times.append(time.perf_counter() - t0)
    runtime = statistics.median(times)
    ok = abs(sol.delta.probs[1] - 0.5) <= 1e-9 and abs(sol.value - 0.5) <= 1e-9 and runtime < 1e-3
    record("AC1 maximin example delta_b=1/2", ok, f"delta_b={float(sol.delta.probs[1])!r} value={sol.value!r} median={runtime * 1e3:.3f}ms")
    assert ok


def test_02_mmr_closed_form_vs_lp():
    rng = np.random.default_rng(2002)
    worst_v = worst_d = 0.0
    t0 = time.perf_counter()
    for _ in range(1000):
        prob, s = _ambiguous_binary(rng)
        cf = mmr_delta_binary(s)
        lp = solve_mmr_mixed(prob)
        worst_v = max(worst_v, abs(cf.max_regret - lp.value))
        worst_d = max(worst_d, abs(cf.delta_b - lp.delta.probs[1]))
    elapsed = time.perf_counter() - t0
    ok = worst_v <= 1e-7 and worst_d <= 1e-6 and elapsed < 5.0
    record("AC2 closed-form MMR vs LP", ok, f"max|dv|={worst_v:.2e} max|dd|={worst_d:.2e} time={elapsed:.2f}s")
    assert ok


def test_03_rectangular_formula():
    rng = np.random.default_rng(2003)
    checked, worst = 0, 0.0
    while checked < 300:
        n = int(rng.integers(2, 6))
        # coarse integer welfare makes the corner pairs realized fairly often
        prob = binary_problem(rng.integers(0, 4, n), rng.integers(0, 4, n))
        s = summarize_binary(prob)
        if not (s.ambiguous and rectangular_premise_holds(s)):
            continue
        checked += 1
        with warnings.catch_warnings():
            warnings.simplefilter("error", PremiseViolationWarning)
            rect = mmr_delta_binary_rectangular(s)
        worst = max(worst, abs(rect.delta_b - mmr_delta_binary(s).delta_b))
    counter = binary_problem([1, 0, 0.5], [0, 0.5, 1])
    cs = summarize_binary(counter)
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        rect = mmr_delta_binary_rectangular(cs)
    warned = any(issubclass(w.category, PremiseViolationWarning) for w in caught)
    gap = abs(rect.delta_b - solve_mmr_mixed(counter).delta.probs[1])
    ok = worst <= 1e-12 and warned and gap > 1e-3
    record("AC3 rectangular formula", ok, f"premise cases={checked} max|diff|={worst:.1e} warned={warned} counterexample gap={gap:.4f}")
    assert ok


def test_04_improvement_orderings():
    rng = np.random.default_rng(2004)
    violations = 0
    slack = 1e-9
    for _ in range(1000):
        prob = random_problem(rng, int(rng.integers(1, 5)), int(rng.integers(1, 7)))
        part = random_partition(rng, prob.n_states)
        full = None
        fm_pure, fr_pure = maximin_pure(prob, full).value, mmr_pure(prob, full).value
        fm_mix, fr_mix = solve_maximin_mixed(prob, full).value, solve_mmr_mixed(prob, full).value
        violations += fm_mix < fm_pure - slack
        violations += fr_mix > fr_pure + slack
        for block in part.groups:
            bm_pure, br_pure = maximin_pure(prob, block).value, mmr_pure(prob, block).value
            bm_mix, br_mix = solve_maximin_mixed(prob, block).value, solve_mmr_mixed(prob, block).value
            violations += bm_mix < bm_pure - slack
            violations += br_mix > br_pure + slack
            violations += bm_pure < fm_pure - slack
            violations += bm_mix < fm_mix - slack
            violations += br_pure > fr_pure + slack
            violations += br_mix > fr_mix + slack
    ok = violations == 0
    record("AC4 improvement orderings", ok, f"violations={violations}")
    assert ok


def test_05_point_identification_collapse():
    rng = np.random.default_rng(2005)
    failures = 0
    worst_regret = 0.0
    for _ in range(200):
        k, n = int(rng.integers(1, 5)), int(rng.integers(1, 7))
        prob = random_problem(rng, k, n)
        part = IdentificationPartition([[s] for s in range(n)])
        assert classify_identification(part) is Identification.UNIFORM_POINT
        prior = Prior(rng.dirichlet(np.ones(n)))
        argmax = prob.welfare.argmax(axis=0)
        for s in range(n):
            for sol in (
                bayes_pure(prob, prior, [s]),
                maximin_pure(prob, [s]),
                mmr_pure(prob, [s]),
                solve_bayes_mixed(prob, prior, [s]),
                solve_maximin_mixed(prob, [s]),
                solve_mmr_mixed(prob, [s]),
            ):
                failures += not (sol.is_pure and sol.action == argmax[s])
        for solver in (exante_pure, solve_exante_mixed):
            for crit in ("bayes", "maximin", "mmr"):
                res = solver(prob, part, crit, prior if crit == "bayes" else None)
                failures += any(
                    not (res.decision_for_state(s).is_pure and res.decision_for_state(s).action == argmax[s])
                    for s in range(n)
                )
                if crit == "mmr":
                    worst_regret = max(worst_regret, abs(res.value))
    ok = failures == 0 and worst_regret <= 1e-12
    record("AC5 point-identification collapse", ok, f"non-argmax choices={failures} max ex-ante MMR={worst_regret:.1e}")
    assert ok


def test_06_regret_comparison():
    rng = np.random.default_rng(2006)
    nonpositive = 0
    for _ in range(1000):
        _, s = _ambiguous_binary(rng)
        c = regret_comparison_binary(s)
        direct = min(s.M_a, s.M_b) - s.M_a * s.M_b / (s.M_a + s.M_b)
        nonpositive += not (direct > 0 and c.improvement > 0)
    worst = 0.0
    for m in rng.uniform(0.01, 10, size=200):
        c = regret_comparison_binary(summarize_binary(binary_problem([m, 0], [0, m])))
        worst = max(worst, abs(c.mixed_best - m / 2), abs(c.mixed_best - c.vertex_best / 2))
    ok = nonpositive == 0 and worst <= 1e-12
    record("AC6 vertex vs randomized regret", ok, f"non-positive improvements={nonpositive} symmetric max|err|={worst:.1e}")
    assert ok


def test_07_choice_probability_identity():
    rng = np.random.default_rng(2007)
    worst = 0.0
    for _ in range(100):
        k, n, npts = int(rng.integers(1, 5)), int(rng.integers(1, 6)), int(rng.integers(1, 10))
        prob = DecisionProblem(range(k), range(n), rng.normal(size=(k, n)))
        model = SamplingModel(range(npts), rng.dirichlet(np.ones(npts), size=n))
        sdf = FiniteTable(rng.integers(0, k, npts), k)
        for s in range(n):
            worst = max(worst, abs(enumerated_expected_welfare(sdf, model, prob, s) - sdf_expected_welfare(sdf, model, prob, s)))
    ok = worst <= 1e-12
    record("AC7 expected welfare via choice probabilities", ok, f"max|diff|={worst:.1e}")
    assert ok


def test_08_monte_carlo(p1):
    model = SamplingModel.unit_interval()
    sdf = randomization_device(ChoiceDistribution([0.5, 0.5]))
    exact = sdf_expected_welfare(sdf, model, p1, 0)
    t0 = time.perf_counter()
    errors = [
        abs(monte_carlo_expected_welfare(sdf, model, p1, 0, 1_000_000, seed).estimate - exact)
        for seed in range(100)
    ]
    elapsed = time.perf_counter() - t0
    one = monte_carlo_expected_welfare(sdf, model, p1, 0, 1_000_000, 7, workers=1)
    eight = monte_carlo_expected_welfare(sdf, model, p1, 0, 1_000_000, 7, workers=8)
    same = one.estimate == eight.estimate and one.std_error == eight.std_error
    mean_err = float(np.mean(errors))
    within = sum(e <= 5e-3 for e in errors)
    ok = mean_err <= 5e-3 and within >= 99 and same and elapsed < 30
    record(
        "AC8 Monte Carlo",
        ok,
        f"mean|err|={mean_err:.2e} seeds within 5e-3={within}/100 bit-identical={same} time={elapsed:.1f}s",
    )
    assert ok


def test_09_exante_separability():
    rng = np.random.default_rng(2009)
    worst_mixed = worst_bayes = 0.0
    inexact = 0
    # joint grids stay within ~1e8 points: |C|=2 up to 4 blocks, |C|=3 up to 2 blocks
    configs = [(2, 1), (2, 2), (2, 3), (2, 4), (3, 1), (3, 2)]
    for i in range(50):
        k, max_blocks = configs[i % len(configs)]
        n = int(rng.integers(max_blocks, 7))
        prob = random_problem(rng, k, n)
        part = random_partition(rng, n, max_blocks=max_blocks)
        prior = Prior(rng.dirichlet(np.ones(n)))
        for crit in ("bayes", "maximin", "mmr"):
            pr = prior if crit == "bayes" else None
            w = prob.welfare
            mixed = solve_exante_mixed(prob, part, crit, pr).value
            grid = joint_grid_exante_mixed(w, part.groups, crit, prior.weights)
            worst_mixed = max(worst_mixed, abs(mixed - grid))
        # pure rules: any |C| <= 3 and up to 4 blocks
        kp = int(rng.integers(1, 4))
        prob = random_problem(rng, kp, int(rng.integers(1, 7)), integer=True)
        part = random_partition(rng, prob.n_states, max_blocks=4)
        prior = Prior(rng.dirichlet(np.ones(prob.n_states)))
        for crit in ("bayes", "maximin", "mmr"):
            pr = prior if crit == "bayes" else None
            got = exante_pure(prob, part, crit, pr).value
            want = enumerate_exante_pure(prob.welfare, part.groups, crit, prior.weights)
            if crit == "bayes":
                worst_bayes = max(worst_bayes, abs(got - want))
            else:
                inexact += got != want
    # Bayes sums block-wise, the enumeration state-wise: only rounding may differ
    ok = worst_mixed <= 2e-2 and inexact == 0 and worst_bayes <= 1e-12
    record(
        "AC9 ex-ante separability",
        ok,
        f"mixed max|diff|={worst_mixed:.2e} pure maximin/mmr mismatches={inexact} pure bayes max|diff|={worst_bayes:.1e}",
    )
    assert ok


def test_10_bayes_vertex():
    rng = np.random.default_rng(2010)
    randomized = 0
    done = 0
    while done < 1000:
        prob = random_problem(rng, int(rng.integers(2, 5)), int(rng.integers(1, 7)))
        prior = Prior(rng.dirichlet(np.ones(prob.n_states)))
        scope = sorted(rng.choice(prob.n_states, size=int(rng.integers(1, prob.n_states + 1)), replace=False))
        g = np.sort(prob.welfare[:, scope] @ prior.posterior(scope))
        if g[-1] - g[-2] <= 1e-9:
            continue  # not generic
        done += 1
        randomized += not solve_bayes_mixed(prob, prior, scope).is_pure
    ok = randomized == 0
    record("AC10 Bayes optimum is a vertex", ok, f"randomized solutions={randomized}/1000")
    assert ok
