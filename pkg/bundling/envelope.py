"""Minimal optimal menus from endpoint virtual values.

Bundles are pruned when another bundle is weakly better at both endpoint
types, then middle bundles of the remaining frontier are removed while a
mixture of their two neighbours dominates them.
"""
import logging
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np
from scipy.optimize import brentq

from bundling.bundle import Bundle, StochasticBundle, bundle_keys
from bundling.config import DEFAULT_TOLERANCES, PROBE_GRID_SIZE, Tolerances
from bundling.errors import (
    ArgumentError, BracketError, ConsistencyError, LogicError, RefusalError, ValidationError,
)
from bundling.model import (
    EndpointProfile, VirtualModel, check_monotonic_differences, check_scd_star,
    endpoint_profiles, eval_virtual, is_structural,
)
from bundling.reports import ConditionReport

logger = logging.getLogger(__name__)

STAGES = ("endpoint", "mixture")


@dataclass(frozen=True)
class DominanceCertificate:
    """Why a bundle left the menu: ``weight`` is the mass on the first dominator."""

    removed: Bundle
    dominators: tuple[Bundle, ...]
    weight: float
    stage: str

    def to_dict(self) -> dict:
        return {
            "bundle": self.removed.key,
            "dominators": bundle_keys(self.dominators),
            "weight": self.weight,
            "stage": self.stage,
        }


def verify_certificate(cert: DominanceCertificate, profiles: dict[int, EndpointProfile],
                       tol: float = DEFAULT_TOLERANCES.dominance) -> bool:
    """Re-check the certificate's inequality at both endpoint types."""
    target = profiles[cert.removed.mask]
    mixture = StochasticBundle.mix(cert.dominators[0], cert.dominators[-1], cert.weight)
    lo = mixture.expectation({b: profiles[b.mask].phi_lo for b in cert.dominators})
    hi = mixture.expectation({b: profiles[b.mask].phi_hi for b in cert.dominators})
    return lo >= target.phi_lo - tol and hi >= target.phi_hi - tol


@dataclass
class MenuSolution:
    """Kept bundles, ordered by decreasing phi at t_lo (increasing at t_hi)."""

    kept: list[Bundle]
    removed: list[DominanceCertificate] = field(default_factory=list)
    iterations: int = 0
    forced: bool = False
    reports: list[ConditionReport] = field(default_factory=list)

    @property
    def n(self) -> int:
        return self.kept[0].n

    @property
    def kept_keys(self) -> list[str]:
        return bundle_keys(self.kept)

    def to_dict(self) -> dict:
        data = {
            "n": self.n,
            "kept": self.kept_keys,
            "removed": [c.to_dict() for c in self.removed],
            "iterations": self.iterations,
            "forced": self.forced,
        }
        if self.forced:
            data["warning"] = "assumption checks failed; optimality guarantees are void"
        return data


def menu_from_dict(data: dict, n: Optional[int] = None) -> MenuSolution:
    """Rebuild a MenuSolution from its JSON form."""
    try:
        n = int(data.get("n", n))
        kept = [Bundle.from_key(k, n) for k in data["kept"]]
        removed = [
            DominanceCertificate(
                Bundle.from_key(c["bundle"], n),
                tuple(Bundle.from_key(k, n) for k in c["dominators"]),
                float(c["weight"]),
                c["stage"],
            )
            for c in data.get("removed", [])
        ]
    except (KeyError, TypeError, ValueError) as e:
        raise ValidationError(f"Malformed menu document: {e!r}")
    if not kept:
        raise ValidationError("Menu document keeps no bundles")
    return MenuSolution(kept, removed, int(data.get("iterations", 0)), bool(data.get("forced", False)))


# ============================================
# STEP 1: ENDPOINT DOMINANCE
# ============================================

def _dominates(a: EndpointProfile, b: EndpointProfile, tol: float) -> bool:
    return a.phi_lo >= b.phi_lo - tol and a.phi_hi >= b.phi_hi - tol


def prune_pure_dominated(profiles: Sequence[EndpointProfile],
                         tol: float = DEFAULT_TOLERANCES.dominance) -> tuple[list, list]:
    """Keep the strict Pareto frontier of endpoint pairs."""
    if not profiles:
        raise ArgumentError("prune_pure_dominated needs at least one profile")
    order = sorted(profiles, key=lambda p: (-p.phi_hi, -p.phi_lo, p.bundle.mask))
    frontier: list[EndpointProfile] = []
    for p in order:
        if any(_dominates(q, p, tol) for q in frontier):
            continue
        frontier = [q for q in frontier if not _dominates(p, q, tol)]
        frontier.append(p)

    kept_masks = {p.bundle.mask for p in frontier}
    removed = []
    for p in sorted(profiles, key=lambda p: p.bundle.mask):
        if p.bundle.mask in kept_masks:
            continue
        witnesses = [q for q in frontier if _dominates(q, p, tol)]
        if not witnesses:
            witnesses = [q for q in profiles if q.bundle != p.bundle and _dominates(q, p, tol)]
        best = min(witnesses, key=lambda q: q.bundle.mask)
        removed.append(DominanceCertificate(p.bundle, (best.bundle,), 1.0, "endpoint"))
    kept = sorted(frontier, key=lambda p: (-p.phi_lo, p.phi_hi))
    return kept, removed


# ============================================
# STEP 2: MIXTURE DOMINANCE
# ============================================

def _gaps(prev: EndpointProfile, mid: EndpointProfile, nxt: EndpointProfile) -> tuple[float, float, float, float]:
    if not (prev.phi_lo > mid.phi_lo > nxt.phi_lo):
        raise ArgumentError(
            f"phi at t_lo must strictly decrease along ({prev.bundle.key}, {mid.bundle.key}, {nxt.bundle.key})"
        )
    if not (prev.phi_hi < mid.phi_hi < nxt.phi_hi):
        raise ArgumentError(
            f"phi at t_hi must strictly increase along ({prev.bundle.key}, {mid.bundle.key}, {nxt.bundle.key})"
        )
    return (
        nxt.phi_hi - mid.phi_hi,
        mid.phi_hi - prev.phi_hi,
        mid.phi_lo - nxt.phi_lo,
        prev.phi_lo - mid.phi_lo,
    )


def ratio_condition(prev: EndpointProfile, mid: EndpointProfile, nxt: EndpointProfile,
                    tol: float = DEFAULT_TOLERANCES.ratio) -> bool:
    """True when ``mid`` lies on or below the segment joining its neighbours."""
    up_next, up_mid, down_next, down_mid = _gaps(prev, mid, nxt)
    lhs = up_next * down_mid
    rhs = up_mid * down_next
    return lhs - rhs >= -tol * max(1.0, abs(lhs), abs(rhs))


def dominance_weight(prev: EndpointProfile, mid: EndpointProfile, nxt: EndpointProfile,
                     tol: float = DEFAULT_TOLERANCES.ratio) -> float:
    """Weight on ``nxt`` of a mixture with ``prev`` that dominates ``mid``.

    Returns the midpoint of the feasible interval.
    """
    if not ratio_condition(prev, mid, nxt, tol):
        raise LogicError(f"Bundle {mid.bundle.key} is not dominated by its neighbours")
    up_next, up_mid, down_next, down_mid = _gaps(prev, mid, nxt)
    low = up_mid / (up_next + up_mid)
    high = down_mid / (down_next + down_mid)
    low, high = min(low, high), max(low, high)
    return float(np.clip(0.5 * (low + high), 0.0, 1.0))


def eliminate_mixed_dominated(kept: Sequence[EndpointProfile],
                              tol: float = DEFAULT_TOLERANCES.ratio) -> tuple[list, list, int]:
    """Sweep left to right removing mixture-dominated middles until a sweep removes nothing.

    Returns (kept, certificates, sweeps).
    """
    current = list(kept)
    removed: list[DominanceCertificate] = []
    sweeps = 0
    while True:
        sweeps += 1
        changed = False
        i = 1
        while i < len(current) - 1:
            prev, mid, nxt = current[i - 1], current[i], current[i + 1]
            if ratio_condition(prev, mid, nxt, tol):
                lam = dominance_weight(prev, mid, nxt, tol)
                removed.append(DominanceCertificate(mid.bundle, (prev.bundle, nxt.bundle), 1.0 - lam, "mixture"))
                logger.debug(f"Sweep {sweeps}: {mid.bundle.key} dominated by "
                             f"{prev.bundle.key}/{nxt.bundle.key} (weight on next {lam:.6g})")
                del current[i]
                changed = True
            else:
                i += 1
        if not changed:
            return current, removed, sweeps


def check_frontier(kept: Sequence[EndpointProfile], tol: float = DEFAULT_TOLERANCES.ratio) -> None:
    """Every interior kept bundle must fail the removal test."""
    for i in range(1, len(kept) - 1):
        if ratio_condition(kept[i - 1], kept[i], kept[i + 1], tol):
            raise ConsistencyError(f"Kept bundle {kept[i].bundle.key} is still mixture-dominated")


def assumption_reports(model: VirtualModel, tolerances: Tolerances = DEFAULT_TOLERANCES) -> list[ConditionReport]:
    return [
        check_monotonic_differences(model, 2 * PROBE_GRID_SIZE - 1, tolerances.monotone),
        check_scd_star(model, tolerances.convexity),
    ]


def solve_minimal_menu(model: VirtualModel, force: bool = False,
                       tolerances: Tolerances = DEFAULT_TOLERANCES) -> MenuSolution:
    """Run both elimination steps over the model's bundle universe."""
    reports = assumption_reports(model, tolerances)
    failed = [r for r in reports if not r.passed]
    if failed and not force:
        names = ", ".join(f"{r.name}={r.holds}" for r in failed)
        logger.warning(f"Refusing to solve {model.describe()}: {names}")
        raise RefusalError(f"Assumption checks did not pass: {names}", report=failed[0])
    if failed:
        logger.warning(f"Solving {model.describe()} despite failed checks; guarantees are void")

    profiles = endpoint_profiles(model)
    by_mask = {p.bundle.mask: p for p in profiles}
    frontier, removed = prune_pure_dominated(profiles, tolerances.dominance)
    kept, mixed, sweeps = eliminate_mixed_dominated(frontier, tolerances.ratio)
    check_frontier(kept, tolerances.ratio)
    certificates = removed + mixed
    for cert in certificates:
        if not verify_certificate(cert, by_mask, tolerances.dominance):
            raise ConsistencyError(f"Certificate for {cert.removed.key} does not verify")
    return MenuSolution([p.bundle for p in kept], certificates, sweeps, forced=bool(failed), reports=reports)


# ============================================
# CROSSINGS
# ============================================

def crossing_point(model: VirtualModel, b: Bundle, b2: Bundle,
                   tol: float = DEFAULT_TOLERANCES.crossing) -> float:
    """Type where phi(b, .) and phi(b2, .) cross."""
    gap = lambda t: eval_virtual(model, b, t) - eval_virtual(model, b2, t)
    g_lo, g_hi = gap(model.t_lo), gap(model.t_hi)
    if g_lo == 0.0:
        return model.t_lo
    if g_hi == 0.0:
        return model.t_hi
    if g_lo * g_hi > 0:
        raise BracketError(f"phi({b.key}) - phi({b2.key}) keeps sign {np.sign(g_lo):+.0f} on the support")
    scale = max(1.0, abs(g_lo), abs(g_hi))
    if is_structural(model) and not b.is_empty and not b2.is_empty:
        slope = model.g1[b.mask] - model.g1[b2.mask]
        if slope != 0.0:
            t = model.h1.inverse(-(model.g2[b.mask] - model.g2[b2.mask]) / slope)
            if t is not None and model.t_lo <= t <= model.t_hi and abs(gap(t)) <= tol * scale:
                return t
    return float(brentq(gap, model.t_lo, model.t_hi, xtol=1e-15, rtol=4 * np.finfo(float).eps, maxiter=200))


def intersection_order_check(model: VirtualModel, prev: Bundle, mid: Bundle, nxt: Bundle,
                             tol: float = DEFAULT_TOLERANCES.crossing) -> bool:
    """Crossing-order form of the removal test for ``mid``."""
    profiles = endpoint_profiles(model, [prev, mid, nxt])
    _gaps(*profiles)
    return crossing_point(model, prev, mid) >= crossing_point(model, mid, nxt) - tol


def dominated_by_hull(target: EndpointProfile, others: Sequence[EndpointProfile],
                      tol: float = DEFAULT_TOLERANCES.dominance) -> Optional[DominanceCertificate]:
    """Certificate that ``target`` is weakly below the convex hull of ``others``, if it is."""
    if not others:
        raise ArgumentError("dominated_by_hull needs at least one other profile")
    pool = [p for p in others if p.bundle != target.bundle]
    if not pool:
        return None
    singles = [p for p in pool if _dominates(p, target, tol)]
    if singles:
        best = min(singles, key=lambda p: (-(p.phi_lo - target.phi_lo + p.phi_hi - target.phi_hi), p.bundle.mask))
        return DominanceCertificate(target.bundle, (best.bundle,), 1.0, "endpoint")

    frontier, _ = prune_pure_dominated(pool, tol)
    hull, _, _ = eliminate_mixed_dominated(frontier)
    for left, right in zip(hull, hull[1:]):
        # weight w on left: w*left + (1-w)*right >= target
        low, high = 0.0, 1.0
        if left.phi_lo > right.phi_lo:
            low = max(low, (target.phi_lo - right.phi_lo) / (left.phi_lo - right.phi_lo))
        if right.phi_hi > left.phi_hi:
            high = min(high, (right.phi_hi - target.phi_hi) / (right.phi_hi - left.phi_hi))
        slack = tol / max(1e-300, min(left.phi_lo - right.phi_lo, right.phi_hi - left.phi_hi))
        if low <= high + slack:
            weight = float(np.clip(0.5 * (low + high), 0.0, 1.0))
            return DominanceCertificate(target.bundle, (left.bundle, right.bundle), weight, "mixture")
    return None
