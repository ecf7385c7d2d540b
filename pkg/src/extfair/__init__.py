"""Exact fair division of indivisible items when agents care about what others receive."""
from .allocators import (
    bag_fill_half_mms,
    double_round_robin,
    envy_cycle,
    exhaustive_opt,
    round_robin,
    search_predicate,
)
from .checkers import (
    Notion,
    Tag,
    Verdict,
    check,
    check_average_share,
    check_envy,
    check_eq,
    check_mms_family,
    check_pareto,
    check_prop,
    check_prop_e,
    check_welfare_opt,
    search_fullext_gap,
)
from .core import (
    Allocation,
    FullInstance,
    Instance1D,
    Instance2D,
    ItemClass,
    Kind,
    Externality,
    as_rational,
    classify,
    enumerate_allocations,
    utility_1d,
    utility_2d,
    utility_full,
)
from .instances import BuiltinId, builtin
from .mms import best_alpha, mms_decompose, mms_profile, mms_share, verify_shift_identity
from .paperlab import ClaimResult, run_suite
from .transform import check_shift_consistency, transform, verify_lemma1
from .views import Space

__version__ = "0.1.0"
