"""Breakpoints, telescoping prices, IC/IR verification and expected revenue."""
import logging
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from bundling.bundle import Bundle
from bundling.config import DEFAULT_GRID_SIZE, DEFAULT_TOLERANCES, Tolerances
from bundling.envelope import MenuSolution, crossing_point
from bundling.errors import ArgumentError, ConsistencyError
from bundling.model import VirtualModel, eval_value, integrate, value_table, virtual_matrix
from bundling.reports import ConditionReport

logger = logging.getLogger(__name__)


@dataclass
class Breakpoints:
    """cuts[i] separates the types assigned to bundles[i] and bundles[i + 1]."""

    cuts: list[float]
    bundles: list[Bundle]

    @property
    def assignment(self) -> dict[int, Bundle]:
        return dict(enumerate(self.bundles))

    def interval_index(self, ts) -> np.ndarray:
        """Interval of each type; a type sitting on a cut goes to the upper bundle."""
        return np.searchsorted(np.asarray(self.cuts, dtype=float), np.atleast_1d(ts), side="right")

    def bundle_at(self, t: float) -> Bundle:
        return self.bundles[int(self.interval_index(t)[0])]


@dataclass
class PriceSchedule:
    prices: dict[Bundle, float]
    base_bundle: Bundle
    base_utility: float
    breakpoints: list[float] = field(default_factory=list)

    def price(self, b: Bundle) -> float:
        return self.prices[b]

    def to_dict(self) -> dict:
        return {
            "prices": {b.key: p for b, p in self.prices.items()},
            "breakpoints": list(self.breakpoints),
            "base_bundle": self.base_bundle.key,
            "base_utility": self.base_utility,
        }


def compute_breakpoints(model: VirtualModel, menu: MenuSolution,
                        tol: float = DEFAULT_TOLERANCES.crossing) -> Breakpoints:
    kept = list(menu.kept)
    cuts = [crossing_point(model, a, b, tol) for a, b in zip(kept, kept[1:])]
    for i, (left, right) in enumerate(zip(cuts, cuts[1:])):
        if not right > left:
            raise ConsistencyError(
                f"Breakpoints not increasing at {kept[i + 1].key}: {left:.12g} then {right:.12g}"
            )
    return Breakpoints(cuts, kept)


def build_prices(model: VirtualModel, menu: MenuSolution, cuts: Breakpoints) -> PriceSchedule:
    """Prices making each pair of adjacent bundles indifferent at their breakpoint.

    The empty bundle costs 0 when offered; otherwise the lowest type pays its
    full value for the bottom bundle.
    """
    kept = cuts.bundles
    if not kept:
        raise ArgumentError("Menu keeps no bundles")
    values_at_cut = [
        value_table(model, [a, b], [t])[:, 0] for a, b, t in zip(kept, kept[1:], cuts.cuts)
    ]
    increments = [float(vb - va) for va, vb in values_at_cut]

    anchor = next((i for i, b in enumerate(kept) if b.is_empty), None)
    prices = [0.0] * len(kept)
    if anchor is None:
        anchor = 0
        prices[0] = eval_value(model, kept[0], model.t_lo)
    for i in range(anchor + 1, len(kept)):
        prices[i] = prices[i - 1] + increments[i - 1]
    for i in range(anchor - 1, -1, -1):
        prices[i] = prices[i + 1] - increments[i]

    base_utility = eval_value(model, kept[0], model.t_lo) - prices[0]
    return PriceSchedule(dict(zip(kept, prices)), kept[0], base_utility, list(cuts.cuts))


def _utilities(model: VirtualModel, schedule: PriceSchedule, grid: np.ndarray):
    bundles = list(schedule.prices)
    values = value_table(model, bundles, grid)
    prices = np.array([schedule.prices[b] for b in bundles])
    return bundles, values - prices[:, None]


def verify_ic_ir(model: VirtualModel, menu: MenuSolution, schedule: PriceSchedule,
                 grid_size: int = DEFAULT_GRID_SIZE, tol: float = DEFAULT_TOLERANCES.ic) -> ConditionReport:
    """Check on a grid that each type's interval bundle is a best, individually rational choice."""
    if grid_size < 2:
        raise ArgumentError(f"grid_size must be >= 2, got {grid_size}")
    report = ConditionReport("ic_ir", True, method="grid")
    grid = np.linspace(model.t_lo, model.t_hi, grid_size)
    cuts = Breakpoints(list(schedule.breakpoints), list(menu.kept))
    bundles, utilities = _utilities(model, schedule, grid)
    row_of = {b: i for i, b in enumerate(bundles)}
    assigned = np.array([row_of[cuts.bundles[k]] for k in cuts.interval_index(grid)])
    columns = np.arange(grid.size)
    own = utilities[assigned, columns]
    best_row = np.argmax(utilities, axis=0)
    ic_gap = utilities[best_row, columns] - own

    worst = int(np.argmax(ic_gap))
    lowest = int(np.argmin(own))
    report.details.update(
        worst_ic_gap=float(ic_gap[worst]), worst_ic_type=float(grid[worst]),
        min_utility=float(own[lowest]), min_utility_type=float(grid[lowest]),
        bottom_utility=float(own[0]),
    )
    violations = np.flatnonzero(ic_gap > tol)
    if violations.size:
        report.holds = False
        k = int(violations[0])
        report.add_witness("ic_violation", [bundles[assigned[k]], bundles[best_row[k]]],
                           t=float(grid[k]), gap=float(ic_gap[k]))
        if worst != k:
            report.add_witness("worst_ic_violation", [bundles[assigned[worst]], bundles[best_row[worst]]],
                               t=float(grid[worst]), gap=float(ic_gap[worst]))
    elif ic_gap[worst] > 0:
        report.note(f"IC slack below tolerance: {ic_gap[worst]:.3g} at t={grid[worst]:.6g}")
    if own[lowest] < -tol:
        report.holds = False
        report.add_witness("ir_violation", [bundles[assigned[lowest]]],
                           t=float(grid[lowest]), utility=float(own[lowest]))
    elif own[lowest] < 0:
        report.note(f"IR slack below tolerance: {own[lowest]:.3g} at t={grid[lowest]:.6g}")
    return report


def expected_revenue(model: VirtualModel, menu: MenuSolution, schedule: PriceSchedule,
                     quadrature_tol: float = DEFAULT_TOLERANCES.quadrature) -> tuple[float, float]:
    """(integral of the menu's virtual value envelope, sum of price times interval mass)."""
    kept = list(menu.kept)
    edges = [model.t_lo] + list(schedule.breakpoints) + [model.t_hi]
    non_empty = [b for b in kept if not b.is_empty]
    envelope = 0.0
    if non_empty:
        def integrand(t: float) -> float:
            best = float(np.max(virtual_matrix(model, non_empty, [t])[:, 0]))
            if len(non_empty) < len(kept):
                best = max(best, 0.0)
            return best * float(model.dist.density(t))
        for a, b in zip(edges, edges[1:]):
            envelope += integrate(integrand, a, b, quadrature_tol)
    masses = np.diff(np.asarray(model.dist.cdf(np.asarray(edges))))
    price_integral = float(sum(schedule.prices[b] * m for b, m in zip(kept, masses)))
    return envelope, price_integral


def revenue_identity_holds(envelope: float, price_integral: float) -> bool:
    return abs(envelope - price_integral) <= max(1e-7, 1e-6 * abs(envelope))


def best_response_revenue(model: VirtualModel, schedule: PriceSchedule,
                          grid_size: int = DEFAULT_GRID_SIZE, outside_option: bool = True) -> float:
    """Grid revenue when every type picks its favourite bundle at the posted prices.

    Ties go to the bundle listed first; types with negative utility buy nothing.
    """
    grid = np.linspace(model.t_lo, model.t_hi, grid_size)
    bundles, utilities = _utilities(model, schedule, grid)
    choice = np.argmax(utilities, axis=0)
    paid = np.array([schedule.prices[bundles[c]] for c in choice])
    if outside_option:
        paid = np.where(utilities[choice, np.arange(grid.size)] < 0, 0.0, paid)
    cdf = np.asarray(model.dist.cdf(grid))
    mids = np.concatenate([[0.0], 0.5 * (cdf[1:] + cdf[:-1]), [1.0]])
    return float(np.sum(paid * np.diff(mids)))


def allocation_rows(model: VirtualModel, menu: MenuSolution, schedule: PriceSchedule,
                    grid_size: int = DEFAULT_GRID_SIZE) -> list[tuple]:
    """(t, assigned bundle key, utility, payment) per grid type."""
    grid = np.linspace(model.t_lo, model.t_hi, grid_size)
    cuts = Breakpoints(list(schedule.breakpoints), list(menu.kept))
    bundles, utilities = _utilities(model, schedule, grid)
    row_of = {b: i for i, b in enumerate(bundles)}
    rows = []
    for j, k in enumerate(cuts.interval_index(grid)):
        b = cuts.bundles[k]
        rows.append((float(grid[j]), b.key, float(utilities[row_of[b], j]), float(schedule.prices[b])))
    return rows


def price_report(model: VirtualModel, menu: MenuSolution,
                 tolerances: Tolerances = DEFAULT_TOLERANCES) -> tuple[Breakpoints, PriceSchedule]:
    cuts = compute_breakpoints(model, menu, tolerances.crossing)
    return cuts, build_prices(model, menu, cuts)
