"""Games played against a noisy state sensor.

Exact play measures, reductions to partial-observation models, and
qualitative winners, all over rational arithmetic.
"""

from .core import (
    ALL_POWERFUL,
    ORDINARY,
    DepthExceededError,
    Distribution,
    DomainError,
    Objective,
    PrefixG,
    StrategyG1,
    StrategyG2,
    UncertaintyGame,
    ValidationReport,
    eval_objective_on_lasso,
    eval_parity_on_lasso,
    parity_form,
    parity_form_lasso,
    validate_game,
)
from .measure import ConeMeasure, cone_prob, enumerate_act_mt, event_prob_at_depth, obs_seq
from .pog import (
    POMDP_ACTION2,
    ObsBasedStrategy,
    PartialObsGame,
    Pomdp,
    PrefixH,
    cone_prob_pog,
    cone_prob_pomdp,
    observation_seq,
    validate_pog,
)
from .reduce_forward import (
    MODE_ALL_POWERFUL,
    MODE_STANDARD,
    ReducedGame,
    map_strategies_g_to_h,
    map_strategies_h_to_g,
    pair_prefix,
    project_prefix,
    reduce_game,
)
from .knowledge import (
    BeliefSupportMdp,
    Branch,
    KnowledgeGame,
    as_one_sided,
    belief_support_mdp,
    knowledge_construction,
    post1,
    post2_union,
    split_by_block,
)
from .parity import ParityGame, solve_parity_raw
from .solvers import (
    MODE_ALMOST,
    MODE_POSITIVE,
    MODE_SURE,
    ActionWordWitness,
    FiniteMemoryWitness,
    UniformWitness,
    Unsupported,
    WinningRegion,
    almost_sure_buchi,
    almost_sure_reach,
    almost_sure_safety,
    positive_reach,
    positive_safety,
    solve_uncertainty_game,
    sure_winning,
    zielonka_solve,
)
from .reduce_pomdp import (
    PomdpReduction,
    prefix_g_to_pomdp,
    prefix_pomdp_to_g,
    reduce_pomdp,
    strategy_g_to_pomdp,
    strategy_pomdp_to_g,
)

from .gamefiles import (
    FileFormatError,
    frac_str,
    parse_frac,
    read_game,
    read_pog,
    read_pomdp,
    read_strategy1,
    read_strategy2,
    write_game,
    write_pog,
    write_pomdp,
    write_region,
    write_strategy1,
    write_strategy2,
)
from .simulate import (
    MUTATIONS,
    LemmaInstance,
    MonteCarloEstimate,
    SampleTrace,
    child_seed,
    monte_carlo_cone,
    mutate_reduction,
    random_game,
    random_instance,
    random_pog_strategy,
    random_pomdp,
    random_strategy1,
    random_strategy2,
    sample_play,
)
from .lemmas import (
    LEMMA_KINDS,
    Counterexample,
    LemmaReport,
    check_lemma,
    check_priority_lift,
    check_reduction_cones,
)
from .report import build_report_doc, write_report_dir

__version__ = "0.1.0"
