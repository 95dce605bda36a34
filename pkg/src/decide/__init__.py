"""Decision criteria under partial identification.

Bayes, maximin and minimax-regret rules over identification regions, with
and without randomized choice, plus tools for checking explicit statistical
decision functions against the choice-probability view.
"""

from .binary import (
    BinaryRegionSummary,
    maximin_binary,
    mmr_delta_binary,
    mmr_delta_binary_rectangular,
    regret_comparison_binary,
    summarize_binary,
)
from .lp import LinearProgram, LPResult, LPStatus, solve_lp
from .mixed import (
    solve_bayes_mixed,
    solve_exante_mixed,
    solve_maximin_mixed,
    solve_mmr_mixed,
)
from .model import (
    ChoiceDistribution,
    Criterion,
    CriterionSolution,
    DecisionProblem,
    ExAnteSolution,
    Identification,
    IdentificationPartition,
    Prior,
    RegionScope,
    SamplingModel,
    classify_identification,
    compute_identification_partition,
    expected_welfare,
    regret,
)
from .pure import bayes_pure, exante_pure, maximin_pure, mmr_pure
from .sdf import (
    FiniteTable,
    Threshold,
    choice_probabilities,
    evaluate_sdf_family,
    monte_carlo_expected_welfare,
    randomization_device,
    sdf_expected_welfare,
)

__version__ = "0.1.0"
