"""Menu shapes (pure, nested, tree) and sufficient conditions that predict them."""
import itertools
import logging
from dataclasses import dataclass, field
from typing import Iterable, Optional, Sequence

import numpy as np
from scipy.optimize import brentq

from bundling.bundle import Bundle, bundle_keys
from bundling.config import DEFAULT_TOLERANCES, PROBE_GRID_SIZE, QUANTITY_GRID_SIZE, Tolerances
from bundling.errors import AmbiguityError, ArgumentError, DegeneracyError, MissingParameterError
from bundling.model import (
    VirtualModel, endpoint_profiles, eval_virtual, probe_grid, value_table, virtual_curve,
)
from bundling.reports import ConditionReport

logger = logging.getLogger(__name__)

LABELS = ("pure", "nested", "tree", "other")
Q_CONVENTION = "Q(b) = 1 - F(t_b) for increasing phi, F(t_b) for decreasing phi"


@dataclass
class MenuStructureLabel:
    label: str
    root: Optional[Bundle] = None
    incomparable_witness: Optional[tuple[Bundle, Bundle]] = None

    def to_dict(self) -> dict:
        return {
            "label": self.label,
            "root": self.root.key if self.root is not None else None,
            "incomparable_witness": bundle_keys(self.incomparable_witness) if self.incomparable_witness else None,
        }


@dataclass(frozen=True)
class NormalizedCoordinates:
    """Where phi(b) sits between the root and the grand bundle: lam at t_hi, mu at t_lo."""

    bundle: Bundle
    lam: float
    mu: float


@dataclass(frozen=True)
class QuantityRank:
    q: float
    tiebreak: float


@dataclass
class QuantityTable:
    q: dict[Bundle, float] = field(default_factory=dict)
    root_type: dict[Bundle, Optional[float]] = field(default_factory=dict)
    rank: dict[Bundle, QuantityRank] = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "q": {b.key: v for b, v in self.q.items()},
            "root_type": {b.key: v for b, v in self.root_type.items()},
            "convention": Q_CONVENTION,
        }


# ============================================
# CLASSIFICATION
# ============================================

def classify(menu: Iterable[Bundle]) -> MenuStructureLabel:
    menu = sorted(set(menu))
    if not menu:
        raise ArgumentError("Cannot classify an empty menu")
    members = [b for b in menu if not b.is_empty]
    n = menu[0].n
    if members == [Bundle.full(n)]:
        return MenuStructureLabel("pure", root=members[0])
    incomparable = next(((a, b) for a, b in itertools.combinations(members, 2) if not a.nested_with(b)), None)
    roots = [r for r in members if all(r.issubset(b) for b in members)]
    root = roots[0] if roots else None
    if incomparable is None:
        return MenuStructureLabel("nested", root=root)
    if root is not None:
        return MenuStructureLabel("tree", root=root, incomparable_witness=incomparable)
    return MenuStructureLabel("other", incomparable_witness=incomparable)


# ============================================
# SOLD-ALONE QUANTITIES
# ============================================

def sold_alone_quantity(model: VirtualModel, b: Bundle,
                        tol_root: float = DEFAULT_TOLERANCES.root) -> tuple[float, Optional[float]]:
    """Quantity a seller offering only ``b`` would sell, and the zero t_b of phi(b, .)."""
    if b.is_empty:
        raise ArgumentError("Sold-alone quantity is undefined for the empty bundle")
    grid = probe_grid(model, QUANTITY_GRID_SIZE)
    values = virtual_curve(model, b, grid)
    signs = np.sign(values)
    nonzero = np.flatnonzero(signs)
    if nonzero.size == 0:
        return 0.0, None
    changes = np.flatnonzero(np.diff(signs[nonzero]))
    if changes.size == 0:
        return (1.0, None) if signs[nonzero[0]] > 0 else (0.0, None)
    if changes.size > 1:
        raise AmbiguityError(f"phi({b.key}, .) changes sign {changes.size} times")
    left, right = grid[nonzero[changes[0]]], grid[nonzero[changes[0] + 1]]
    root = float(brentq(lambda t: eval_virtual(model, b, t), left, right,
                        xtol=1e-15, rtol=4 * np.finfo(float).eps, maxiter=200))
    residual = abs(eval_virtual(model, b, root))
    if residual >= tol_root * max(1.0, float(np.max(np.abs(values)))):
        raise AmbiguityError(f"Root of phi({b.key}, .) has residual {residual:.3g}")
    increasing = signs[nonzero[0]] < 0
    cdf = float(model.dist.cdf(root))
    return (1.0 - cdf if increasing else cdf), root


def quantity_table(model: VirtualModel, tol_root: float = DEFAULT_TOLERANCES.root) -> QuantityTable:
    table = QuantityTable()
    for profile in endpoint_profiles(model):
        b = profile.bundle
        if b.is_empty:
            continue
        q, t_b = sold_alone_quantity(model, b, tol_root)
        table.q[b] = q
        table.root_type[b] = t_b
        # Saturated quantities are ranked by how far phi sits from zero at the saturated end
        tiebreak = 0.0
        if t_b is None:
            tiebreak = profile.phi_lo if q == 1.0 else profile.phi_hi
        table.rank[b] = QuantityRank(q, tiebreak)
    return table


def _rank_cmp(a: QuantityRank, b: QuantityRank, tol: float) -> int:
    if abs(a.q - b.q) > tol:
        return 1 if a.q > b.q else -1
    if abs(a.tiebreak - b.tiebreak) > tol:
        return 1 if a.tiebreak > b.tiebreak else -1
    return 0


def top_values(model: VirtualModel) -> dict[Bundle, float]:
    """v(b, t_hi) for the whole universe (equal to phi at the top type)."""
    bundles = model.bundles
    row = value_table(model, bundles, [model.t_hi])[:, 0]
    return dict(zip(bundles, (float(v) for v in row)))


def find_root(model: VirtualModel, table: Optional[QuantityTable] = None,
              tol: float = DEFAULT_TOLERANCES.tie) -> tuple[Optional[Bundle], Optional[tuple[Bundle, Bundle]]]:
    """Unique maximizer of the quantity rank, or the tied pair."""
    table = table or quantity_table(model)
    if not table.rank:
        return None, None
    ordered = sorted(table.rank, key=lambda b: b.mask)
    best = ordered[0]
    for b in ordered[1:]:
        if _rank_cmp(table.rank[b], table.rank[best], tol) > 0:
            best = b
    ties = [b for b in ordered if b != best and _rank_cmp(table.rank[b], table.rank[best], tol) == 0]
    if ties:
        return None, (best, ties[0])
    return best, None


# ============================================
# TREE AND NESTED CONDITIONS
# ============================================

def _monotone_top_premise(universe: Sequence[Bundle], top: dict[Bundle, float], tol: float,
                          strict: bool = True) -> Optional[tuple[Bundle, Bundle]]:
    for small, big in itertools.permutations(universe, 2):
        if small.is_proper_subset(big):
            if (strict and not top[small] < top[big] - tol) or (not strict and top[big] < top[small] - tol):
                return small, big
    return None


def check_tree_or_nested_conditions(model: VirtualModel,
                                    tolerances: Tolerances = DEFAULT_TOLERANCES) -> ConditionReport:
    """Does a root exist whose non-supersets are worth less at the top type, or a union-quantity root?"""
    report = ConditionReport("tree_or_nested", False)
    report.note(Q_CONVENTION)
    table = quantity_table(model, tolerances.root)
    root, tie = find_root(model, table, tolerances.tie)
    if root is None:
        if tie is not None:
            report.add_witness("quantity_tie", list(tie), q=[table.q[tie[0]], table.q[tie[1]]])
        else:
            report.note("no non-empty bundle")
        return report
    report.details["root"] = root.key
    report.details["quantities"] = table.to_dict()["q"]
    universe = model.bundles
    top = top_values(model)

    cheaper = [b for b in universe if not b.issuperset(root) and not top[b] < top[root] - tolerances.tie]
    prop_top = not cheaper
    if cheaper:
        report.add_witness("non_superset_not_cheaper", [cheaper[0], root],
                           v_top=[top[cheaper[0]], top[root]])

    premise = _monotone_top_premise(universe, top, tolerances.tie)
    prop_union = premise is None
    if premise is not None:
        report.add_witness("top_value_not_monotone", list(premise), v_top=[top[premise[0]], top[premise[1]]])
    else:
        for b in universe:
            if b.is_empty or b.issuperset(root):
                continue
            joined = b.union(root)
            if joined not in table.q:
                report.note(f"union {joined.key} not in the universe; skipped")
                continue
            floor = min(table.q[b], table.q[root])
            if table.q[joined] < floor - tolerances.tie:
                prop_union = False
                report.add_witness("union_quantity_below_min", [b, root, joined],
                                   q=[table.q[b], table.q[root], table.q[joined]])
                break
    report.details["top_value_condition"] = prop_top
    report.details["union_quantity_condition"] = prop_union
    report.holds = prop_top or prop_union
    return report


def _normalizer(model: VirtualModel, root: Bundle):
    grand = model.grand
    if not model.has_bundle(grand):
        raise MissingParameterError(f"Grand bundle {grand.key} is not in the universe")
    profiles = {p.bundle: p for p in endpoint_profiles(model)}
    r, g = profiles[root], profiles[grand]
    span_hi = g.phi_hi - r.phi_hi
    span_lo = g.phi_lo - r.phi_lo
    if abs(span_hi) < 1e-12 or abs(span_lo) < 1e-12:
        raise DegeneracyError(f"phi of {root.key} and {grand.key} coincide at an endpoint")

    def coords(b: Bundle) -> NormalizedCoordinates:
        p = profiles[b]
        return NormalizedCoordinates(b, (p.phi_hi - r.phi_hi) / span_hi, (p.phi_lo - r.phi_lo) / span_lo)
    return coords


def _strict_intermediates(model: VirtualModel, root: Bundle) -> list[Bundle]:
    grand = model.grand
    return [b for b in model.bundles if root.is_proper_subset(b) and b.is_proper_subset(grand)]


def _premise_root(model: VirtualModel, report: ConditionReport, tolerances: Tolerances) -> Optional[Bundle]:
    prior = check_tree_or_nested_conditions(model, tolerances)
    root = prior.details.get("root")
    if root is None or not prior.details.get("top_value_condition"):
        report.holds = False
        report.note("no root satisfying the top-value condition")
        report.witnesses.extend(prior.witnesses)
        return None
    return Bundle.from_key(root, model.n)


def check_full_tree(model: VirtualModel, tolerances: Tolerances = DEFAULT_TOLERANCES) -> ConditionReport:
    """Normalized points of all intermediates must lie on an increasing, strictly convex curve."""
    report = ConditionReport("full_tree", False)
    root = _premise_root(model, report, tolerances)
    if root is None:
        return report
    report.details["root"] = root.key
    middles = _strict_intermediates(model, root)
    if len(middles) < 2:
        return report.note(f"need at least 2 bundles strictly between root and grand bundle, found {len(middles)}")
    coords = _normalizer(model, root)
    points = sorted((coords(b) for b in middles), key=lambda c: (c.lam, c.mu))
    report.details["points"] = {c.bundle.key: [c.lam, c.mu] for c in points}

    xs = np.array([0.0] + [c.lam for c in points] + [1.0])
    ys = np.array([0.0] + [c.mu for c in points] + [1.0])
    tol = tolerances.convexity
    dx = np.diff(xs)
    if np.any(dx <= tol):
        k = int(np.argmax(dx <= tol))
        report.add_witness("repeated_lambda", _labels(points, k), lam=[xs[k], xs[k + 1]])
        return report
    if np.any(np.diff(ys) <= tol):
        k = int(np.argmax(np.diff(ys) <= tol))
        report.add_witness("mu_not_increasing", _labels(points, k), mu=[ys[k], ys[k + 1]])
        return report
    slopes = np.diff(ys) / dx
    bends = np.diff(slopes)
    if np.any(bends <= tol):
        k = int(np.argmax(bends <= tol))
        report.add_witness("not_strictly_convex", _labels(points, k + 1), slopes=[slopes[k], slopes[k + 1]])
        return report
    top = top_values(model)
    chain = [b for b in model.bundles if root.issubset(b)]
    premise = _monotone_top_premise(chain, top, tolerances.tie)
    if premise is not None:
        report.add_witness("top_value_not_monotone", list(premise), v_top=[top[premise[0]], top[premise[1]]])
        return report
    report.holds = True
    report.details["predicted_menu"] = [root.key] + [c.bundle.key for c in points] + [model.grand.key]
    return report


def _labels(points: Sequence[NormalizedCoordinates], k: int) -> list:
    """Bundles around position k of the padded point list (virtual ends are omitted)."""
    inner = [k - 1, k]
    return [points[i].bundle for i in inner if 0 <= i < len(points)]


def _unique_extreme(scores: dict[int, float], tol: float, largest: bool) -> list[int]:
    target = max(scores.values()) if largest else min(scores.values())
    return sorted(j for j, s in scores.items() if abs(s - target) <= tol)


def check_least_favorite_tree(model: VirtualModel, tolerances: Tolerances = DEFAULT_TOLERANCES) -> ConditionReport:
    """Tree menu built around the least-favorite good i: root, root+i, grand-i, grand."""
    if model.n < 3:
        raise ArgumentError("Least-favorite tree condition needs at least 3 goods")
    report = ConditionReport("least_favorite_tree", False)
    root = _premise_root(model, report, tolerances)
    if root is None:
        return report
    grand = model.grand
    if root == grand:
        raise ArgumentError("Root equals the grand bundle")
    report.details["root"] = root.key
    top = top_values(model)
    tol = tolerances.tie

    drop_scores = {j: top[grand.without_good(j)] for j in range(1, model.n + 1)
                   if model.has_bundle(grand.without_good(j))}
    if not drop_scores:
        raise MissingParameterError("No bundle of the form grand minus one good in the universe")
    leaders = _unique_extreme(drop_scores, tol, largest=True)
    if len(leaders) > 1:
        raise AmbiguityError(f"Goods {leaders} tie as least favorite")
    good = leaders[0]
    report.details["least_favorite"] = good
    add_scores = {j: top[root.with_good(j)] for j in range(1, model.n + 1)
                  if not root.contains_good(j) and model.has_bundle(root.with_good(j))}
    if good not in _unique_extreme(add_scores, tol, largest=False):
        report.add_witness("least_favorite_mismatch", [root.with_good(good)], good=good,
                           v_top=add_scores.get(good))
        return report

    coords = _normalizer(model, root)
    first = coords(root.with_good(good))
    second = coords(grand.without_good(good))
    l1, m1, l2, m2 = first.lam, first.mu, second.lam, second.mu
    report.details.update(lambda1=l1, mu1=m1, lambda2=l2, mu2=m2)
    pair = [first.bundle, second.bundle]
    outside = [name for name, v in (("lambda1", l1), ("mu1", m1), ("lambda2", l2), ("mu2", m2))
               if not 0.0 < v < 1.0]
    if outside:
        report.add_witness("coordinate_outside_unit_interval", pair, coordinates=outside)
        return report
    if not l1 < l2:
        report.add_witness("lambda1_not_below_lambda2", pair, lam=[l1, l2])
        return report
    slopes = [m1 / l1, (m2 - m1) / (l2 - l1), (1.0 - m2) / (1.0 - l2)]
    report.details["slope_chain"] = slopes
    if not slopes[0] < slopes[1] - tolerances.convexity:
        report.add_witness("first_slope_not_below_middle", pair, slopes=slopes)
        return report
    if not slopes[1] < slopes[2] - tolerances.convexity:
        report.add_witness("middle_slope_not_below_last", pair, slopes=slopes)
        return report

    intercept = (m2 - l2) / (1.0 - l2)
    for b in _strict_intermediates(model, root):
        if b in pair:
            continue
        c = coords(b)
        failed = []
        if not c.mu - slopes[0] * c.lam > tolerances.convexity:
            failed.append("above_first_ray")
        if not c.mu - (slopes[2] * c.lam + intercept) > tolerances.convexity:
            failed.append("above_last_line")
        if c.lam < l1 - tolerances.convexity:
            failed.append("lambda_at_least_lambda1")
        if c.mu > m2 + tolerances.convexity:
            failed.append("mu_at_most_mu2")
        if failed:
            report.add_witness("outside_region", [b], lam=c.lam, mu=c.mu, failed=failed)
            return report
    report.holds = True
    report.details["predicted_members"] = [root.key, first.bundle.key, second.bundle.key, grand.key]
    return report


# ============================================
# ADDITIVE, PURE AND NESTED MENUS
# ============================================

def _singletons(model: VirtualModel) -> list[Bundle]:
    singles = [Bundle.from_goods([j], model.n) for j in range(1, model.n + 1)]
    missing = [s.key for s in singles if not model.has_bundle(s)]
    if missing:
        raise ArgumentError(f"Additive check needs every singleton; missing {missing}")
    return singles


def is_additive(model: VirtualModel, tolerances: Tolerances = DEFAULT_TOLERANCES, seed: int = 0) -> bool:
    singles = _singletons(model)
    bundles = [b for b in model.bundles if b.size > 1]
    if model.form == "parametric":
        if not model.h2.is_zero:
            return False
        for b in bundles:
            for table in (model.g1, model.g2):
                total = sum(table[s.mask] for s in singles if s.issubset(b))
                if abs(table[b.mask] - total) > tolerances.additivity * max(1.0, abs(total)):
                    return False
        return True
    if not bundles:
        return True
    rng = np.random.default_rng(seed)
    for _ in range(50):
        b = bundles[int(rng.integers(len(bundles)))]
        goods = list(b.goods)
        cut = int(rng.integers(1, len(goods)))
        rng.shuffle(goods)
        left = Bundle.from_goods(goods[:cut], model.n)
        right = b.difference(left)
        if not (model.has_bundle(left) and model.has_bundle(right)):
            return False
        t = float(rng.uniform(model.t_lo, model.t_hi))
        v = value_table(model, [b, left, right], [t])[:, 0]
        if abs(v[0] - v[1] - v[2]) > tolerances.additivity * max(1.0, abs(v[0])):
            return False
    return True


def additive_nested_menu(model: VirtualModel,
                         tolerances: Tolerances = DEFAULT_TOLERANCES) -> tuple[list[Bundle], ConditionReport]:
    """Nested menu of an additive model: add goods in increasing order of phi(t_hi)/phi(t_lo)."""
    if not is_additive(model, tolerances):
        raise ArgumentError(f"{model.describe()} is not additive over singletons")
    report = ConditionReport("additive_nested", True)
    singles = _singletons(model)
    profiles = {p.bundle: p for p in endpoint_profiles(model, singles)}
    positive = [s for s in singles if not profiles[s].phi_lo < 0]
    if positive:
        report.holds = False
        report.add_witness("singleton_profitable_at_bottom", positive[:1], phi_lo=profiles[positive[0]].phi_lo)
    ratios = {s: profiles[s].phi_hi / profiles[s].phi_lo for s in singles if profiles[s].phi_lo != 0}
    order = sorted(singles, key=lambda s: (ratios.get(s, np.inf), s.mask))
    report.details["ratios"] = {s.key: ratios.get(s) for s in order}
    for a, b in zip(order, order[1:]):
        ra, rb = ratios.get(a, np.inf), ratios.get(b, np.inf)
        if not rb - ra > tolerances.ratio * max(1.0, abs(ra)):
            report.holds = False
            report.add_witness("ratio_tie", [a, b], ratios=[ra, rb])
            break
    menu = [model.empty]
    current = model.empty
    for s in order:
        current = current.union(s)
        menu.append(current)
    report.details["menu"] = bundle_keys(menu)
    return menu, report


def check_pure_bundling(model: VirtualModel, tolerances: Tolerances = DEFAULT_TOLERANCES) -> ConditionReport:
    """Grand bundle has the unique highest top value and a weakly largest sold-alone quantity."""
    report = ConditionReport("pure_bundling", False)
    grand = model.grand
    if not model.has_bundle(grand):
        raise MissingParameterError(f"Grand bundle {grand.key} is not in the universe")
    top = top_values(model)
    tol = tolerances.tie
    rivals = [b for b in top if b != grand and not top[b] < top[grand] - tol]
    if rivals:
        report.add_witness("top_value_not_unique_max", [grand, rivals[0]], v_top=[top[grand], top[rivals[0]]])
        return report
    table = quantity_table(model, tolerances.root)
    for b in sorted(table.rank, key=lambda b: b.mask):
        if b != grand and _rank_cmp(table.rank[grand], table.rank[b], tol) < 0:
            report.add_witness("quantity_below_rival", [grand, b],
                               q=[table.q[grand], table.q[b]],
                               tiebreak=[table.rank[grand].tiebreak, table.rank[b].tiebreak])
            report.note(Q_CONVENTION)
            return report
    report.holds = True
    report.details["predicted_menu"] = [model.empty.key, grand.key]
    return report


def check_union_quantity(model: VirtualModel,
                         tolerances: Tolerances = DEFAULT_TOLERANCES) -> tuple[ConditionReport, list[Bundle]]:
    """Q(b1 | b2) >= min(Q(b1), Q(b2)) with top values monotone under inclusion; builds the nested menu."""
    report = ConditionReport("union_quantity", True)
    report.note(Q_CONVENTION)
    universe = model.bundles
    top = top_values(model)
    tol = tolerances.tie
    premise = _monotone_top_premise(universe, top, tol, strict=False)
    if premise is not None:
        report.holds = False
        report.add_witness("top_value_not_monotone", list(premise), v_top=[top[premise[0]], top[premise[1]]])
    table = quantity_table(model, tolerances.root)
    members = sorted(table.q, key=lambda b: b.mask)
    for a, b in itertools.combinations(members, 2):
        joined = a.union(b)
        if joined not in table.q or joined in (a, b):
            continue
        if table.q[joined] < min(table.q[a], table.q[b]) - tol:
            report.holds = False
            report.add_witness("union_quantity_below_min", [a, b, joined],
                               q=[table.q[a], table.q[b], table.q[joined]])
            break
    ordered = sorted(members, key=lambda b: (-table.q[b], b.mask))
    menu = [model.empty]
    current = model.empty
    for b in ordered:
        joined = current.union(b)
        if joined != current:
            menu.append(joined)
            current = joined
    report.details["menu"] = bundle_keys(menu)
    return report, menu


def check_robust_ratios(model: VirtualModel, menu: Sequence[Bundle],
                        grid_size: int = PROBE_GRID_SIZE,
                        tolerances: Tolerances = DEFAULT_TOLERANCES) -> ConditionReport:
    """Value-ratio conditions under which an inclusion chain is optimal for every distribution."""
    menu = list(menu)
    if not menu or menu[-1] != model.grand:
        raise ArgumentError("Menu must end with the grand bundle")
    for a, b in zip(menu, menu[1:]):
        if not a.is_proper_subset(b):
            raise ArgumentError(f"Menu is not inclusion-ordered at {a.key} -> {b.key}")
    report = ConditionReport("robust_ratios", True, method="grid")
    grid = np.linspace(model.t_lo, model.t_hi, grid_size)
    universe = model.bundles
    values = dict(zip(universe, value_table(model, universe, grid)))
    for b in menu:
        if b not in values:
            values[b] = value_table(model, [b], grid)[0]
    tol = tolerances.monotone
    grand = values[model.grand]

    def ratio(num: np.ndarray, den: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        ok = np.abs(den) > 1e-12
        return grid[ok], num[ok] / den[ok]

    above = [b for b in universe if np.any(values[b] > grand + tol * max(1.0, float(np.max(np.abs(grand)))))]
    if above:
        report.holds = False
        report.add_witness("value_above_grand_bundle", [above[0], model.grand])

    members = set(menu)
    for b in universe:
        if b in members or b.is_empty:
            continue
        ts, r = ratio(values[b], grand)
        drops = np.flatnonzero(np.diff(r) < -tol * max(1.0, float(np.max(np.abs(r)))))
        if drops.size:
            report.holds = False
            k = int(drops[0])
            report.add_witness("outside_ratio_decreasing", [b, model.grand], t=[ts[k], ts[k + 1]], ratio=[r[k], r[k + 1]])
            break

    for a, b in zip(menu, menu[1:]):
        if a.is_empty:
            continue
        ts, r = ratio(values[a], values[b])
        rises = np.flatnonzero(np.diff(r) >= 0)
        if rises.size:
            report.holds = False
            k = int(rises[0])
            report.add_witness("adjacent_ratio_not_decreasing", [a, b], t=[ts[k], ts[k + 1]], ratio=[r[k], r[k + 1]])
            break

    for lower, mid, upper in zip(menu, menu[1:], menu[2:]):
        ts, r = ratio(values[lower] - values[upper], values[mid])
        falls = np.flatnonzero(np.diff(r) <= 0)
        if falls.size:
            report.holds = False
            k = int(falls[0])
            report.add_witness("gap_ratio_not_increasing", [lower, mid, upper], t=[ts[k], ts[k + 1]],
                               ratio=[r[k], r[k + 1]])
            break
    return report
