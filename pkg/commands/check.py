"""check: every structural condition, each reported as holds / fails / unknown."""
import logging
from typing import Callable

from bundling.config import RunConfig
from bundling.errors import BundlingError
from bundling.model import (
    VirtualModel, check_monotonic_differences, check_scd_star, normalization_report,
)
from bundling.reports import ConditionReport, write_json
from bundling.structure import (
    additive_nested_menu, check_full_tree, check_least_favorite_tree, check_pure_bundling,
    check_robust_ratios, check_tree_or_nested_conditions, check_union_quantity, is_additive,
)

logger = logging.getLogger(__name__)


def _guarded(name: str, check: Callable[[], ConditionReport]) -> ConditionReport:
    """Run one check; a refusal to decide becomes an unknown verdict."""
    try:
        return check()
    except BundlingError as e:
        logger.info(f"{name}: not decidable ({e.kind}: {e})")
        return ConditionReport(name, None).note(f"{e.kind}: {e}")


def _union_and_robust(model: VirtualModel, config: RunConfig) -> list[ConditionReport]:
    union, menu = check_union_quantity(model, config.tolerances)
    reports = [union]
    if menu[-1] == model.grand:
        reports.append(_guarded("robust_ratios", lambda: check_robust_ratios(
            model, menu, tolerances=config.tolerances)))
    return reports


def _additive_report(model: VirtualModel, config: RunConfig) -> ConditionReport:
    if not is_additive(model, config.tolerances, seed=config.seed):
        return ConditionReport("additive_nested", None).note("values are not additive over singletons")
    return additive_nested_menu(model, config.tolerances)[1]


def collect_reports(model: VirtualModel, config: RunConfig) -> list[ConditionReport]:
    tol = config.tolerances
    reports = [
        _guarded("monotonic_differences", lambda: check_monotonic_differences(model, tol=tol.monotone)),
        _guarded("scd_star", lambda: check_scd_star(model, tol.convexity)),
        normalization_report(model),
        _guarded("tree_or_nested", lambda: check_tree_or_nested_conditions(model, tol)),
        _guarded("full_tree", lambda: check_full_tree(model, tol)),
        _guarded("least_favorite_tree", lambda: check_least_favorite_tree(model, tol)),
        _guarded("pure_bundling", lambda: check_pure_bundling(model, tol)),
    ]
    try:
        reports.extend(_union_and_robust(model, config))
    except BundlingError as e:
        logger.info(f"union_quantity: not decidable ({e.kind}: {e})")
        reports.append(ConditionReport("union_quantity", None).note(f"{e.kind}: {e}"))
    reports.append(_guarded("additive_nested", lambda: _additive_report(model, config)))
    return reports


def run_check_command(model: VirtualModel, config: RunConfig) -> dict:
    reports = collect_reports(model, config)
    document = {"model": model.describe(), "conditions": [r.to_dict() for r in reports]}
    write_json(config.output_dir / "conditions.json", document, config.no_clobber)
    return {r.name: r.holds for r in reports}
