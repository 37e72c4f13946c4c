"""Brute-force grid envelope of virtual values, used as ground truth for the solver."""
import logging
from dataclasses import dataclass, field
from typing import Iterable, Optional, Sequence

import numpy as np
from scipy.optimize import minimize_scalar

from bundling.bundle import Bundle, all_bundles
from bundling.config import DEFAULT_TOLERANCES, MAX_GOODS, ORACLE_GRID_SIZE, Tolerances
from bundling.distributions import TypeDistribution
from bundling.envelope import MenuSolution
from bundling.errors import ArgumentError
from bundling.fixtures import FIXTURES
from bundling.model import VirtualModel, model_from_dict, validate_model, virtual_matrix
from bundling.reports import ConditionReport

logger = logging.getLogger(__name__)


@dataclass
class GridEnvelope:
    grid: np.ndarray
    bundles: list[Bundle]
    values: np.ndarray
    winners: list[tuple[Bundle, ...]] = field(default_factory=list)
    support: set[Bundle] = field(default_factory=set)
    measure: dict[Bundle, float] = field(default_factory=dict)
    model: Optional[VirtualModel] = None

    @property
    def envelope(self) -> np.ndarray:
        return self.values.max(axis=0)

    def _rival_margin(self, b: Bundle) -> np.ndarray:
        i = self.bundles.index(b)
        if len(self.bundles) == 1:
            return np.full(self.grid.size, -np.inf)
        rivals = np.delete(self.values, i, axis=0).max(axis=0)
        return rivals - self.values[i]

    def gap(self, b: Bundle) -> float:
        """Smallest signed distance of phi(b) below the best other bundle; negative where b wins."""
        return float(np.min(self._rival_margin(b)))

    def wins_between_samples(self, b: Bundle, tie_tol: float = DEFAULT_TOLERANCES.tie) -> bool:
        """Does b strictly win inside the grid cell pair around its closest approach?"""
        if self.model is None or len(self.bundles) == 1:
            return False
        j = int(np.argmin(self._rival_margin(b)))
        lo = self.grid[max(j - 1, 0)]
        hi = self.grid[min(j + 1, self.grid.size - 1)]
        others = [c for c in self.bundles if c != b]
        model = self.model

        def margin(t: float) -> float:
            rows = virtual_matrix(model, others + [b], [t])[:, 0]
            return float(rows[:-1].max() - rows[-1])
        best = minimize_scalar(margin, bounds=(lo, hi), method="bounded", options={"xatol": 1e-13})
        return bool(best.fun < -tie_tol)

    def rows(self) -> list[tuple]:
        """(t, winning bundle key, envelope value) per grid type."""
        best = self.envelope
        return [(float(t), w[0].key, float(v)) for t, w, v in zip(self.grid, self.winners, best)]


def _cell_masses(model: VirtualModel, grid: np.ndarray) -> np.ndarray:
    cdf = np.asarray(model.dist.cdf(grid))
    edges = np.concatenate([[0.0], 0.5 * (cdf[1:] + cdf[:-1]), [1.0]])
    return np.diff(edges)


def grid_envelope(model: VirtualModel, grid_size: int = ORACLE_GRID_SIZE,
                  tie_tol: float = DEFAULT_TOLERANCES.tie) -> GridEnvelope:
    """Winners of max_b phi(b, t) on an equally spaced grid."""
    if grid_size < 11:
        raise ArgumentError(f"grid_size must be >= 11, got {grid_size}")
    if model.n > MAX_GOODS:
        raise ArgumentError(f"Grid envelope limited to {MAX_GOODS} goods")
    grid = np.linspace(model.t_lo, model.t_hi, grid_size)
    bundles = model.bundles
    values = virtual_matrix(model, bundles, grid)
    best = values.max(axis=0)
    winning = values >= best - tie_tol
    env = GridEnvelope(grid, bundles, values, model=model)
    masses = _cell_masses(model, grid)
    measure = np.zeros(len(bundles))
    for j in range(grid.size):
        rows = np.flatnonzero(winning[:, j])
        env.winners.append(tuple(bundles[i] for i in rows))
        # rows are in mask order: ties go to the smallest mask
        measure[rows[0]] += masses[j]
    env.measure = {b: float(m) for b, m in zip(bundles, measure) if m > 0}
    env.support = _unique_winners(bundles, values, tie_tol)
    return env


def _unique_winners(bundles: Sequence[Bundle], values: np.ndarray, tie_tol: float) -> set[Bundle]:
    if len(bundles) == 1:
        return {bundles[0]}
    top_two = np.partition(values, -2, axis=0)[-2:]
    margin = top_two[1] - top_two[0]
    leaders = np.argmax(values, axis=0)
    return {bundles[i] for i in np.unique(leaders[margin > tie_tol])}


def strict_best_response_set(model: VirtualModel, grid_size: int = ORACLE_GRID_SIZE,
                             tie_tol: float = DEFAULT_TOLERANCES.tie) -> set[Bundle]:
    if grid_size < 11:
        raise ArgumentError(f"grid_size must be >= 11, got {grid_size}")
    grid = np.linspace(model.t_lo, model.t_hi, grid_size)
    bundles = model.bundles
    return _unique_winners(bundles, virtual_matrix(model, bundles, grid), tie_tol)


def compare(menu: MenuSolution, env: GridEnvelope,
            borderline: float = DEFAULT_TOLERANCES.borderline) -> ConditionReport:
    """Kept set against the grid support; near-envelope bundles count as borderline."""
    report = ConditionReport("oracle_agreement", True, method="grid")
    kept = set(menu.kept)
    support = set(env.support)
    report.details.update(kept=sorted(kept), support=sorted(support), grid_size=int(env.grid.size))
    for b in sorted(kept ^ support):
        side = "kept_not_in_support" if b in kept else "support_not_kept"
        gap = env.gap(b) if b in env.bundles else float("inf")
        narrow = side == "kept_not_in_support" and b in env.bundles and env.wins_between_samples(b)
        if not menu.forced and (abs(gap) < borderline or narrow):
            report.add_witness("borderline", [b], side=side, envelope_gap=gap, narrower_than_grid=narrow)
            continue
        report.holds = False
        report.add_witness(side, [b], envelope_gap=gap)
    if menu.forced and not report.holds:
        report.note("mismatch on a forced solve: algorithm assumptions violated")
    return report


def menu_envelope_integral(model: VirtualModel, bundles: Iterable[Bundle],
                           grid_size: int = ORACLE_GRID_SIZE) -> float:
    """Grid estimate of E[max over the given bundles of phi(b, t)]."""
    bundles = list(bundles)
    if not bundles:
        raise ArgumentError("Need at least one bundle")
    grid = np.linspace(model.t_lo, model.t_hi, grid_size)
    best = virtual_matrix(model, bundles, grid).max(axis=0)
    return float(np.sum(best * _cell_masses(model, grid)))


# ============================================
# MODEL GENERATORS
# ============================================

def random_parametric_model(seed: int, n: int, include_empty: bool = True,
                            tolerances: Tolerances = DEFAULT_TOLERANCES) -> VirtualModel:
    """Uniform types, h1(t) = t; g1 grows with bundle size plus noise, g2 ~ U(-2, 2)."""
    if not 1 <= n <= MAX_GOODS:
        raise ArgumentError(f"n must be in 1..{MAX_GOODS}, got {n}")
    rng = np.random.default_rng(seed)
    g1, g2 = {}, {}
    for b in all_bundles(n, include_empty=False):
        g1[b.mask] = b.size + float(rng.uniform(0.0, 0.9))
        g2[b.mask] = float(rng.uniform(-2.0, 2.0))
    model = VirtualModel(n, "parametric", TypeDistribution.uniform(0.0, 1.0), include_empty,
                         g1=g1, g2=g2, name=f"random-{seed}-{n}")
    return validate_model(model, tolerances)


def builtin_fixture(name: str, tolerances: Tolerances = DEFAULT_TOLERANCES) -> VirtualModel:
    if name not in FIXTURES:
        raise ArgumentError(f"Unknown fixture '{name}'; choose from {sorted(FIXTURES)}")
    data = dict(FIXTURES[name])
    data.setdefault("name", name)
    return model_from_dict(data, tolerances)
