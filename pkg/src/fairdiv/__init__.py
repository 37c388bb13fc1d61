"""Fair allocation of indivisible goods with subsidies.

Matroidal valuations get the subsidized egalitarian mechanism (``se_mechanism``)
and its completion (``sec_algorithm``); superadditive valuations get VCG with
an upfront grant (``vcg_upfront``). The :mod:`fairdiv.audit` module holds the
brute-force oracles used to check all of them on small instances.
"""
from .allocations import Allocation, is_clean, lorenz_compare, utilitarian_welfare, values
from .envy import build_envy_graph, has_positive_cycle, is_envy_free, max_path_weights, subsidy_for
from .errors import FairDivError, InstanceTooLarge, NotEnvyFreeable, NotMatroidal, SchemaError
from .exchange import lorenz_dominating, max_clean_welfare_allocation, size_vector_membership
from .instance import Instance, dump_instance, parse_instance
from .mechanisms import MECHANISMS, Outcome, sec_algorithm, se_mechanism, se_variant_no_cap, vcg_upfront, winner_takes_all
from .valuations import (
    Profile,
    Valuation,
    additive,
    binary_additive,
    from_function,
    from_table,
    laminar,
    partition,
    rank_table,
    restrict,
    transversal,
    truncate,
    uniform,
    validate_class,
)

__version__ = "0.1.0"

__all__ = [
    "Allocation", "is_clean", "lorenz_compare", "utilitarian_welfare", "values",
    "build_envy_graph", "has_positive_cycle", "is_envy_free", "max_path_weights", "subsidy_for",
    "FairDivError", "InstanceTooLarge", "NotEnvyFreeable", "NotMatroidal", "SchemaError",
    "lorenz_dominating", "max_clean_welfare_allocation", "size_vector_membership",
    "Instance", "dump_instance", "parse_instance",
    "MECHANISMS", "Outcome", "sec_algorithm", "se_mechanism", "se_variant_no_cap", "vcg_upfront", "winner_takes_all",
    "Profile", "Valuation", "additive", "binary_additive", "from_function", "from_table", "laminar",
    "partition", "rank_table", "restrict", "transversal", "truncate", "uniform", "validate_class",
]
