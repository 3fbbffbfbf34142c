"""Exact martingale selection on finite scenario trees.

Polyhedral kernel (:mod:`msel.polyhedra`), scenario trees (:mod:`msel.tree`),
the selection recursion (:mod:`msel.selection`) and its two applications:
price bounds under cone constraints (:mod:`msel.pricing`) and consistent
price processes under transaction costs (:mod:`msel.kabanov`).
All arithmetic is over :class:`fractions.Fraction`.
"""

__version__ = "0.1.0"

from .polyhedra import (
    EQ,
    LE,
    LT,
    EmptySetError,
    FaceForm,
    GenForm,
    InvalidInput,
    LiftedSystem,
    PolyCone,
    closed_projection,
    closure,
    conjugate,
    contains,
    conv_union,
    convert_representation,
    eliminate_aux,
    empty_set,
    feasible_point,
    full_space,
    intersect,
    is_empty,
    membership,
    minkowski_sum_cone,
    optimize,
    point_set,
    polar,
    relative_interior,
    same_set,
    to_faceform,
    to_genform,
)
from .tree import ScenarioTree, TreeError, conditional_support, one_step_target, validate_tree
from .selection import (
    KernelInconsistency,
    SelectionProblem,
    SelectionResult,
    backward_recursion,
    forward_select,
    selector_for_measure,
    solve,
    verify_selector,
)
from .pricing import (
    ArbitrageError,
    ConstrainedMarket,
    PriceInterval,
    arbitrage_lp,
    check_na,
    price_bounds,
    superhedge_oracle,
    verify_hedge,
)
from .kabanov import (
    BidAskError,
    CertificateError,
    CurrencyMarket,
    SizeGuardError,
    arbitrage_certificate,
    check_nar,
    consistent_price_process,
    consistent_price_process_lp,
    endowment_check,
    endowment_set_description,
    krs_condition_oracle,
    solvency_cones,
    validate_bidask,
    verify_arbitrage,
    verify_consistent,
)
