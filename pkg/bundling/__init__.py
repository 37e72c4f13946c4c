"""Bundling package: optimal bundle menus for a multi-good monopolist."""
from bundling.bundle import (
    Bundle,
    StochasticBundle,
    all_bundles,
    bundle_keys,
)
from bundling.distributions import (
    ScalarFunction,
    TypeDistribution,
)
from bundling.model import (
    EndpointProfile,
    ValueCurve,
    VirtualCurve,
    VirtualModel,
    check_monotonic_differences,
    check_scd_star,
    endpoint_profile,
    endpoint_profiles,
    eval_value,
    eval_virtual,
    load_model,
    marginal_revenue,
    model_from_dict,
    normalization_report,
    to_quantile_space,
    validate_model,
    value_table,
    virtual_curve,
    virtual_matrix,
)
from bundling.envelope import (
    DominanceCertificate,
    MenuSolution,
    crossing_point,
    dominance_weight,
    dominated_by_hull,
    eliminate_mixed_dominated,
    intersection_order_check,
    menu_from_dict,
    prune_pure_dominated,
    ratio_condition,
    solve_minimal_menu,
    verify_certificate,
)
from bundling.pricing import (
    Breakpoints,
    PriceSchedule,
    allocation_rows,
    best_response_revenue,
    build_prices,
    compute_breakpoints,
    expected_revenue,
    verify_ic_ir,
)
from bundling.structure import (
    MenuStructureLabel,
    NormalizedCoordinates,
    QuantityTable,
    additive_nested_menu,
    check_full_tree,
    check_least_favorite_tree,
    check_pure_bundling,
    check_robust_ratios,
    check_tree_or_nested_conditions,
    check_union_quantity,
    classify,
    quantity_table,
    sold_alone_quantity,
)
from bundling.oracle import (
    GridEnvelope,
    builtin_fixture,
    compare,
    grid_envelope,
    menu_envelope_integral,
    random_parametric_model,
    strict_best_response_set,
)
from bundling.reports import ConditionReport
from bundling.config import RunConfig, Tolerances
from bundling.errors import (
    BundlingError,
    NumericError,
    RefusalError,
    ValidationError,
)
