"""Next-symbol-prediction labels, padding and reductions for regular languages."""

from .dfa import (
    BINARY,
    DepthMap,
    Dfa,
    EquivalenceResult,
    canonical,
    co_reachable,
    depth_map,
    empty_dfa,
    equivalent,
    evaluate,
    is_fixed_length,
    isomorphic,
    minimize,
    random_adfa,
    random_dfa,
)
from .errors import *  # noqa: F401,F403
from .labels import (
    NspExample,
    NspLabels,
    NspSample,
    brute_force_phi,
    continuation_bit,
    continuation_vector,
    empirical_nsp_loss,
    nsp_err,
    nsp_label_vector,
)
from .learners import (
    LearnerOutput,
    PrefixTree,
    build_prefix_tree,
    learn_conjunction,
    nsp_consistent,
    prefix_tree_learn,
    state_merge_learn,
)
from .padding import (
    Monomial,
    PaddedDfa,
    PaddedFormula,
    eval_monomial,
    formula_nsp_labels,
    monomial_to_adfa,
    pad_adfa,
    pad_formula,
    verify_padding,
)
from .reduction import (
    DistributionSpec,
    LabeledExample,
    ReductionReport,
    extract_classifier,
    lift_distribution,
    lift_example,
    run_reduction,
    sample_positive,
)

__version__ = "0.1.0"
