"""Virtual value models: evaluation of phi, v and MR, plus assumption checks."""
import logging
import warnings
from dataclasses import dataclass, field, replace
from pathlib import Path
from types import MappingProxyType
from typing import Callable, Mapping, Optional, Sequence

import numpy as np
from scipy.integrate import IntegrationWarning, quad
from scipy.interpolate import PchipInterpolator

from bundling.bundle import Bundle
from bundling.config import DEFAULT_TOLERANCES, PROBE_GRID_SIZE, Tolerances
from bundling.distributions import IDENTITY, ZERO, ScalarFunction, TypeDistribution
from bundling.errors import (
    ArgumentError, DomainError, MissingParameterError, NumericError,
    QuadratureError, ValidationError,
)
from bundling.reports import ConditionReport, read_json

logger = logging.getLogger(__name__)

FORMS = ("parametric", "direct", "virtual", "quantile")
DERIVATIVE_MODES = ("analytic", "finite-difference")

# Step for central finite differences, relative to the support width
FD_STEP = 1e-5

# Largest universe the triple search of check_scd_star walks through
SCD_FALSIFICATION_LIMIT = 64


# ============================================
# CURVES
# ============================================

@dataclass(frozen=True)
class ValueCurve:
    """Value v(b, .) of one bundle: polynomial coefficients or tabulated samples."""

    poly: tuple[float, ...] = ()
    t: tuple[float, ...] = ()
    v: tuple[float, ...] = ()
    _spline: Optional[PchipInterpolator] = field(default=None, init=False, repr=False, compare=False)

    def __post_init__(self):
        if self.poly:
            return
        ts = np.asarray(self.t, dtype=float)
        if ts.size < 2 or ts.size != len(self.v):
            raise ValidationError("Tabulated values need matching t and v samples (at least 2)")
        if np.any(np.diff(ts) <= 0):
            raise ValidationError("Tabulated value samples must be strictly increasing in t")
        object.__setattr__(self, "_spline", PchipInterpolator(ts, np.asarray(self.v, dtype=float)))

    @classmethod
    def from_dict(cls, data: dict) -> "ValueCurve":
        if "poly" in data:
            return cls(poly=tuple(float(c) for c in data["poly"]))
        return cls(t=tuple(float(x) for x in data["t"]), v=tuple(float(x) for x in data["v"]))

    def covers(self, dist: TypeDistribution) -> bool:
        return bool(self.poly) or (self.t[0] <= dist.t_lo and self.t[-1] >= dist.t_hi)

    def value(self, ts: np.ndarray) -> np.ndarray:
        if self.poly:
            return np.polynomial.polynomial.polyval(ts, self.poly)
        return self._spline(ts)

    def derivative(self, ts: np.ndarray) -> np.ndarray:
        if self.poly:
            return np.polynomial.polynomial.polyval(ts, np.polynomial.polynomial.polyder(self.poly))
        return self._spline.derivative()(ts)


@dataclass(frozen=True)
class VirtualCurve:
    """Virtual value phi(b, .) given directly as piecewise-linear samples."""

    t: tuple[float, ...]
    phi: tuple[float, ...]

    def __post_init__(self):
        if len(self.t) < 2 or len(self.t) != len(self.phi):
            raise ValidationError("Virtual curves need matching t and phi samples (at least 2)")
        if np.any(np.diff(self.t) <= 0):
            raise ValidationError("Virtual curve samples must be strictly increasing in t")

    @classmethod
    def from_dict(cls, data: dict) -> "VirtualCurve":
        return cls(tuple(float(x) for x in data["t"]), tuple(float(x) for x in data["phi"]))

    def covers(self, dist: TypeDistribution) -> bool:
        return self.t[0] <= dist.t_lo and self.t[-1] >= dist.t_hi

    def __call__(self, ts: np.ndarray) -> np.ndarray:
        return np.interp(ts, self.t, self.phi)


# ============================================
# MODEL
# ============================================

@dataclass(frozen=True)
class EndpointProfile:
    bundle: Bundle
    phi_lo: float
    phi_hi: float

    def __post_init__(self):
        if not (np.isfinite(self.phi_lo) and np.isfinite(self.phi_hi)):
            raise NumericError(f"Non-finite endpoint virtual values for bundle {self.bundle.key}")

    @property
    def point(self) -> tuple[float, float]:
        return (self.phi_lo, self.phi_hi)

    def to_dict(self) -> dict:
        return {"bundle": self.bundle.key, "phi_lo": self.phi_lo, "phi_hi": self.phi_hi}


@dataclass(frozen=True)
class VirtualModel:
    """A screening model over n goods.

    ``form`` selects how phi is defined: parametric (g1*h1 + g2 + h2),
    direct (values v with phi from the information-rent formula), virtual
    (phi given as curves), or quantile (a view of ``base`` on [0, 1]).
    Maps are keyed by bundle mask.
    """

    n: int
    form: str
    dist: TypeDistribution
    include_empty: bool = True
    g1: Mapping[int, float] = field(default_factory=dict)
    g2: Mapping[int, float] = field(default_factory=dict)
    h1: ScalarFunction = IDENTITY
    h2: ScalarFunction = ZERO
    values: Mapping[int, ValueCurve] = field(default_factory=dict)
    derivative: str = "analytic"
    curves: Mapping[int, VirtualCurve] = field(default_factory=dict)
    base: Optional["VirtualModel"] = None
    goods: tuple[str, ...] = ()
    name: str = ""
    _universe: frozenset = field(default=frozenset(), init=False, repr=False, compare=False)

    def __post_init__(self):
        if self.form not in FORMS:
            raise ValidationError(f"Unknown model form '{self.form}'")
        if self.derivative not in DERIVATIVE_MODES:
            raise ValidationError(f"Unknown derivative mode '{self.derivative}'")
        if (self.form == "quantile") != (self.base is not None):
            raise ValidationError("Quantile-form models wrap exactly one base model")
        if self.form == "parametric" and set(self.g1) != set(self.g2):
            missing = sorted(set(self.g1) ^ set(self.g2))
            raise MissingParameterError(f"Bundles {missing} lack g1 or g2")
        for name in ("g1", "g2", "values", "curves"):
            table = dict(getattr(self, name))
            for mask in table:
                if not 0 <= mask < (1 << self.n):
                    raise ValidationError(f"Bundle mask {mask} out of range for n={self.n}")
            if 0 in table:
                if name in ("g1", "g2") and table[0] != 0:
                    logger.warning(f"Overriding {name} of the empty bundle with 0")
                del table[0]
            object.__setattr__(self, name, MappingProxyType(table))
        if self.form == "quantile":
            masks = set(self.base._masks())
        else:
            masks = set(self.g1 or self.values or self.curves)
            if self.include_empty:
                masks.add(0)
        object.__setattr__(self, "_universe", frozenset(masks))

    @property
    def t_lo(self) -> float:
        return self.dist.t_lo

    @property
    def t_hi(self) -> float:
        return self.dist.t_hi

    @property
    def grand(self) -> Bundle:
        return Bundle.full(self.n)

    @property
    def empty(self) -> Bundle:
        return Bundle.empty(self.n)

    def _masks(self) -> frozenset:
        return self._universe

    @property
    def bundles(self) -> list[Bundle]:
        """The bundle universe in increasing mask order."""
        return [Bundle(m, self.n) for m in sorted(self._masks())]

    def has_bundle(self, b: Bundle) -> bool:
        return b.n == self.n and b.mask in self._masks()

    def require_bundle(self, b: Bundle) -> None:
        if b.n != self.n:
            raise ArgumentError(f"Bundle over {b.n} goods used with a {self.n}-good model")
        if b.mask != 0 and b.mask not in self._masks():
            raise MissingParameterError(f"Bundle {b.key} has no parameters in the model")

    @property
    def is_partial(self) -> bool:
        return len(self._masks() - {0}) < (1 << self.n) - 1

    def describe(self) -> str:
        return self.name or f"{self.form} model over {self.n} goods"


# ============================================
# QUADRATURE
# ============================================

def integrate(func: Callable[[float], float], a: float, b: float,
              tol: float = DEFAULT_TOLERANCES.quadrature,
              points: Optional[Sequence[float]] = None) -> float:
    """Adaptive quadrature with non-convergence turned into QuadratureError."""
    if b <= a:
        return 0.0
    inner = None
    if points is not None:
        inner = sorted({float(p) for p in points if a < p < b}) or None
    with warnings.catch_warnings():
        warnings.simplefilter("error", IntegrationWarning)
        try:
            value, abserr = quad(func, a, b, epsabs=1e-13, epsrel=1e-11, limit=200, points=inner)
        except IntegrationWarning as e:
            raise QuadratureError(f"Quadrature on [{a}, {b}] did not converge: {e}")
    if not np.isfinite(value) or abserr > tol * max(1.0, abs(value)):
        raise QuadratureError(f"Quadrature on [{a}, {b}] error estimate {abserr:.3g} too large",
                              residual=float(abserr))
    return float(value)


def _knots(model: VirtualModel) -> list[float]:
    if model.form == "virtual":
        return sorted({t for c in model.curves.values() for t in c.t})
    if model.form == "quantile":
        return [float(model.base.dist.cdf(t)) for t in _knots(model.base)
                if model.base.dist.contains(t)]
    return []


def probe_grid(model: VirtualModel, size: int = PROBE_GRID_SIZE) -> np.ndarray:
    """Equally spaced types plus any curve knots inside the support."""
    grid = model.dist.probe_grid(size)
    knots = [t for t in _knots(model) if model.t_lo < t < model.t_hi]
    if knots:
        grid = np.unique(np.concatenate([grid, knots]))
    return grid


# ============================================
# EVALUATION
# ============================================

def _as_grid(model: VirtualModel, t) -> np.ndarray:
    ts = np.atleast_1d(np.asarray(t, dtype=float))
    model.dist.require_support(ts)
    return np.clip(ts, model.t_lo, model.t_hi)


def _phi(model: VirtualModel, b: Bundle, ts: np.ndarray) -> np.ndarray:
    model.require_bundle(b)
    if b.mask == 0:
        return np.zeros_like(ts)
    if model.form == "parametric":
        return model.g1[b.mask] * np.asarray(model.h1(ts)) + model.g2[b.mask] + np.asarray(model.h2(ts))
    if model.form == "virtual":
        return model.curves[b.mask](ts)
    if model.form == "quantile":
        return _phi(model.base, b, np.atleast_1d(model.base.dist.quantile(ts)))
    curve = model.values[b.mask]
    rent = np.asarray(model.dist.information_rent_factor(ts))
    return curve.value(ts) - rent * _value_derivative(model, curve, ts)


def _value_derivative(model: VirtualModel, curve: ValueCurve, ts: np.ndarray) -> np.ndarray:
    if model.derivative == "analytic":
        return curve.derivative(ts)
    step = FD_STEP * model.dist.width
    left = np.maximum(ts - step, model.t_lo)
    right = np.minimum(ts + step, model.t_hi)
    return (curve.value(right) - curve.value(left)) / (right - left)


def virtual_curve(model: VirtualModel, b: Bundle, ts) -> np.ndarray:
    """phi(b, t) on an array of types."""
    return _phi(model, b, _as_grid(model, ts))


def virtual_matrix(model: VirtualModel, bundles: Sequence[Bundle], ts) -> np.ndarray:
    """Rows of phi, one per bundle, over the types ``ts``."""
    grid = _as_grid(model, ts)
    if not bundles:
        return np.zeros((0, grid.size))
    return np.vstack([_phi(model, b, grid) for b in bundles])


def eval_virtual(model: VirtualModel, b: Bundle, t: float) -> float:
    return float(virtual_curve(model, b, t)[0])


def value_table(model: VirtualModel, bundles: Sequence[Bundle], ts,
                tol: float = DEFAULT_TOLERANCES.quadrature) -> np.ndarray:
    """Rows of v(b, t), one per bundle.

    Parametric and virtual forms rebuild v from phi through
    v(b, t) (1 - F(t)) = integral of phi(b, s) f(s) over [t, t_hi].
    """
    grid = _as_grid(model, ts)
    for b in bundles:
        model.require_bundle(b)
    table = np.zeros((len(bundles), grid.size))
    active = [(i, b) for i, b in enumerate(bundles) if b.mask != 0]
    if not active:
        return table
    if model.form == "quantile":
        base_ts = np.atleast_1d(model.base.dist.quantile(grid))
        return value_table(model.base, bundles, base_ts, tol)
    if model.form == "direct":
        for i, b in active:
            table[i] = model.values[b.mask].value(grid)
        return table

    dist = model.dist
    top = virtual_matrix(model, [b for _, b in active], [model.t_hi])[:, 0]
    points = _knots(model) + (list(dist.knots_t) if dist.kind == "piecewise-linear-cdf" else [])
    for j, t in enumerate(grid):
        survival = 1.0 - float(dist.cdf(t))
        if survival <= 0.0:
            for row, (i, _) in enumerate(active):
                table[i, j] = top[row]
            continue
        if model.form == "parametric":
            i1 = integrate(lambda s: dist.density(s) * model.h1(s), t, model.t_hi, tol, points)
            i2 = 0.0
            if not model.h2.is_zero:
                i2 = integrate(lambda s: dist.density(s) * model.h2(s), t, model.t_hi, tol, points)
            for i, b in active:
                table[i, j] = model.g1[b.mask] * i1 / survival + model.g2[b.mask] + i2 / survival
        else:
            for i, b in active:
                curve = model.curves[b.mask]
                mass = integrate(lambda s: dist.density(s) * float(curve(s)), t, model.t_hi, tol, points)
                table[i, j] = mass / survival
    return table


def eval_value(model: VirtualModel, b: Bundle, t: float,
               tol: float = DEFAULT_TOLERANCES.quadrature) -> float:
    return float(value_table(model, [b], [t], tol)[0, 0])


def endpoint_profile(model: VirtualModel, b: Bundle) -> EndpointProfile:
    lo, hi = virtual_curve(model, b, [model.t_lo, model.t_hi])
    return EndpointProfile(b, float(lo), float(hi))


def endpoint_profiles(model: VirtualModel, bundles: Optional[Sequence[Bundle]] = None) -> list[EndpointProfile]:
    bundles = model.bundles if bundles is None else list(bundles)
    matrix = virtual_matrix(model, bundles, [model.t_lo, model.t_hi])
    return [EndpointProfile(b, float(row[0]), float(row[1])) for b, row in zip(bundles, matrix)]


def marginal_revenue(model: VirtualModel, b: Bundle, q: float) -> float:
    """MR(b, q): the virtual value at the type whose upper tail has mass q."""
    if not 0.0 <= q <= 1.0:
        raise DomainError(f"Quantity {q} outside [0, 1]")
    return eval_virtual(model, b, model.dist.quantile(1.0 - q))


# ============================================
# ASSUMPTION CHECKS
# ============================================

def is_structural(model: VirtualModel) -> bool:
    """Parametric with monotone h1, and no empty bundle paired with a non-zero h2."""
    if model.form != "parametric" or not model.h1.is_monotone_on(model.dist.probe_grid()):
        return False
    return model.h2.is_zero or not model.include_empty


def _peak_or_valley(diffs: np.ndarray, tol: float):
    """Return (row, i1, i2, i3, pattern) for the first non-monotone row, else None."""
    prefix_min = np.minimum.accumulate(diffs, axis=1)
    prefix_max = np.maximum.accumulate(diffs, axis=1)
    suffix_min = np.minimum.accumulate(diffs[:, ::-1], axis=1)[:, ::-1]
    suffix_max = np.maximum.accumulate(diffs[:, ::-1], axis=1)[:, ::-1]
    peak = np.minimum(diffs - prefix_min, diffs - suffix_min)
    valley = np.minimum(prefix_max - diffs, suffix_max - diffs)
    bad = (peak.max(axis=1) > tol) | (valley.max(axis=1) > tol)
    if not bad.any():
        return None
    row = int(np.argmax(bad))
    d = diffs[row]
    if peak[row].max() > tol:
        mid = int(np.argmax(peak[row]))
        first = int(np.argmin(d[:mid + 1]))
        last = mid + int(np.argmin(d[mid:]))
        return row, first, mid, last, "rise-fall"
    mid = int(np.argmax(valley[row]))
    first = int(np.argmax(d[:mid + 1]))
    last = mid + int(np.argmax(d[mid:]))
    return row, first, mid, last, "fall-rise"


def check_monotonic_differences(model: VirtualModel, grid_size: int = 201,
                                tol: float = DEFAULT_TOLERANCES.monotone) -> ConditionReport:
    """phi(b, .) - phi(b', .) must be monotone for every pair of bundles."""
    if grid_size < 3:
        raise ArgumentError(f"grid_size must be >= 3, got {grid_size}")
    report = ConditionReport("monotonic_differences", True)
    if is_structural(model):
        report.method = "structural"
        return report.note("differences are affine in a monotone h1")
    bundles = model.bundles
    grid = probe_grid(model, grid_size)
    phi = virtual_matrix(model, bundles, grid)
    scaled_tol = tol * max(1.0, float(np.max(np.abs(phi))) if phi.size else 1.0)
    for i in range(len(bundles) - 1):
        diffs = phi[i] - phi[i + 1:]
        hit = _peak_or_valley(diffs, scaled_tol)
        if hit is None:
            continue
        row, k1, k2, k3, pattern = hit
        other = bundles[i + 1 + row]
        report.holds = False
        report.add_witness(
            "non_monotone_difference", [bundles[i], other],
            t1=float(grid[k1]), t2=float(grid[k2]), t3=float(grid[k3]), pattern=pattern,
            d1=float(diffs[row, k1]), d2=float(diffs[row, k2]), d3=float(diffs[row, k3]),
        )
        return report
    report.method = "grid"
    return report


def _sign_pattern(values: np.ndarray, tol: float) -> np.ndarray:
    signs = np.sign(values)
    signs[np.abs(values) <= tol] = 0
    return signs


def _single_crossing(values: np.ndarray, tol: float) -> bool:
    steps = np.diff(_sign_pattern(values, tol))
    return bool(np.all(steps >= 0) or np.all(steps <= 0))


def check_scd_star(model: VirtualModel, tol: float = DEFAULT_TOLERANCES.convexity,
                   grid_size: int = PROBE_GRID_SIZE) -> ConditionReport:
    """Single crossing of virtual value differences across stochastic bundles.

    Parametric models pass structurally. Otherwise the curves are tested for
    an affine representation phi = g1 w(t) + g2 + z(t) with monotone w; failing
    that, pairs and two-atom mixtures are searched for a double crossing.
    """
    report = ConditionReport("scd_star", None)
    if is_structural(model):
        report.holds = True
        report.method = "structural"
        return report.note("multiplicative-additive form with monotone h1")

    bundles = model.bundles
    if len(bundles) < 2:
        report.holds = True
        report.method = "trivial"
        return report.note("fewer than two bundles")
    grid = probe_grid(model, grid_size)
    phi = virtual_matrix(model, bundles, grid)
    scale = max(1.0, float(np.max(np.abs(phi))))
    sign_tol = tol * scale

    diffs = phi - phi[0]
    centered = diffs - diffs.mean(axis=1, keepdims=True)
    u, singular, vt = np.linalg.svd(centered, full_matrices=False)
    if singular[0] <= 1e-12 * scale:
        residual = float(np.max(np.abs(centered)))
        direction = np.zeros(grid.size)
    else:
        direction = vt[0]
        residual = float(np.max(np.abs(centered - singular[0] * np.outer(u[:, 0], direction))))
    report.details["affine_residual"] = residual
    steps = np.diff(direction)
    monotone = bool(np.all(steps >= -sign_tol) or np.all(steps <= sign_tol))
    if residual < 1e-8 * scale and monotone:
        report.holds = True
        report.method = "affine"
        weights = centered @ direction
        report.details["g1"] = {b.key: float(w) for b, w in zip(bundles, weights)}
        report.details["g2"] = {b.key: float(m) for b, m in zip(bundles, diffs.mean(axis=1))}
        return report.note("curves share one monotone direction up to additive shifts")

    report.method = "falsification"
    for i in range(len(bundles)):
        for j in range(i + 1, len(bundles)):
            if not _single_crossing(phi[i] - phi[j], sign_tol):
                report.holds = False
                return report.add_witness("pair_crossings", [bundles[i], bundles[j]],
                                          residual=residual)
    if len(bundles) == 2:
        report.holds = True
        report.method = "exhaustive"
        return report.note("two bundles: mixtures reduce to the single pair")
    if len(bundles) > SCD_FALSIFICATION_LIMIT:
        return report.note(f"affine detection failed (residual {residual:.3g}); universe too large to search")
    weights = np.linspace(0.0, 1.0, 21)[1:-1]
    for i in range(len(bundles)):
        for j in range(i + 1, len(bundles)):
            mixtures = weights[:, None] * phi[i] + (1.0 - weights[:, None]) * phi[j]
            for k in range(len(bundles)):
                if k in (i, j):
                    continue
                gaps = phi[k] - mixtures
                for w, gap in zip(weights, gaps):
                    if not _single_crossing(gap, sign_tol):
                        report.holds = False
                        return report.add_witness(
                            "mixture_crossings", [bundles[k], bundles[i], bundles[j]],
                            weight=float(w), residual=residual,
                        )
    return report.note(f"no affine representation (residual {residual:.3g}) and no crossing found")


def normalization_report(model: VirtualModel) -> ConditionReport:
    """Informational: is every non-empty bundle unprofitable at the lowest type?"""
    report = ConditionReport("normalization", True, method="informational")
    profiles = [p for p in endpoint_profiles(model) if not p.bundle.is_empty]
    if not profiles:
        return report
    top = max(profiles, key=lambda p: (p.phi_lo, -p.bundle.mask))
    report.details["max_phi_lo"] = top.phi_lo
    if top.phi_lo >= 0:
        report.holds = False
        report.add_witness("profitable_at_bottom", [top.bundle], phi_lo=top.phi_lo)
        report.note("the algorithm does not rely on this normalization")
    return report


# ============================================
# QUANTILE SPACE
# ============================================

def to_quantile_space(model: VirtualModel) -> VirtualModel:
    """Equivalent model on [0, 1] with uniform types: phi~(b, q) = phi(b, quantile(q))."""
    if model.dist.is_standard_uniform:
        return model
    probe = model.dist.probe_grid()
    back = np.asarray(model.dist.quantile(np.asarray(model.dist.cdf(probe))))
    worst = float(np.max(np.abs(back - probe)))
    if worst > 1e-9 * max(1.0, abs(model.t_lo), abs(model.t_hi)):
        raise NumericError("Quantile inversion failed on the probe grid", residual=worst)
    unit = TypeDistribution.uniform(0.0, 1.0)
    if model.form == "parametric":
        h2 = model.h2 if model.h2.is_zero else model.h2.composed(model.dist)
        return replace(model, dist=unit, h1=model.h1.composed(model.dist), h2=h2)
    if model.form == "quantile":
        return to_quantile_space(model.base)
    return VirtualModel(model.n, "quantile", unit, model.include_empty, base=model,
                        goods=model.goods, name=model.name)


# ============================================
# LOADING AND VALIDATION
# ============================================

def _drop_duplicates(model: VirtualModel, tol: float) -> VirtualModel:
    profiles = sorted(endpoint_profiles(model), key=lambda p: (p.phi_lo, p.bundle.mask))
    dropped: set[int] = set()
    for i, p in enumerate(profiles):
        if p.bundle.mask in dropped:
            continue
        for q in profiles[i + 1:]:
            if q.phi_lo - p.phi_lo >= tol:
                break
            if q.bundle.mask in dropped or abs(q.phi_hi - p.phi_hi) >= tol:
                continue
            loser, keeper = (q, p) if q.bundle.mask > p.bundle.mask else (p, q)
            logger.warning(f"Bundle {loser.bundle.key} duplicates {keeper.bundle.key} at both endpoints; dropped")
            dropped.add(loser.bundle.mask)
            if loser is p:
                break
    if not dropped:
        return model
    keep = lambda table: {m: v for m, v in table.items() if m not in dropped}
    if model.form == "quantile":
        return replace(model, base=replace(model.base, g1=keep(model.base.g1), g2=keep(model.base.g2),
                                           values=keep(model.base.values), curves=keep(model.base.curves)))
    return replace(model, g1=keep(model.g1), g2=keep(model.g2),
                   values=keep(model.values), curves=keep(model.curves))


def validate_model(model: VirtualModel, tolerances: Tolerances = DEFAULT_TOLERANCES) -> VirtualModel:
    """Check the model and return it with duplicate bundles removed."""
    model.dist.validate()
    if not model.bundles:
        raise ValidationError("Model defines no bundles")
    if model.form == "parametric":
        if not model.h1.is_monotone_on(model.dist.probe_grid()):
            raise ValidationError("h1 must be monotone on the support")
        for table in (model.g1, model.g2):
            if not all(np.isfinite(v) for v in table.values()):
                raise ValidationError("g1 and g2 must be finite")
    elif model.form == "direct":
        for mask, curve in model.values.items():
            if not curve.covers(model.dist):
                raise ValidationError(f"Value samples of bundle {Bundle(mask, model.n).key} do not cover the support")
    elif model.form == "virtual":
        for mask, curve in model.curves.items():
            if not curve.covers(model.dist):
                raise ValidationError(f"Virtual curve of bundle {Bundle(mask, model.n).key} does not cover the support")
    if model.is_partial:
        logger.info(f"{model.describe()}: bundle universe is a strict subset of all bundles")
    model = _drop_duplicates(model, tolerances.duplicate)
    norm = normalization_report(model)
    logger.info(f"Normalization max phi(b, t_lo) < 0 holds: {norm.holds}")
    return model


def _section(data: dict, field: str) -> Optional[dict]:
    section = data.get(field)
    if section is not None and not isinstance(section, dict):
        raise ValidationError(f"Model field '{field}' must be a JSON object, got {type(section).__name__}")
    return section


def _bundle_table(data: dict, field: str, n: int, parse) -> dict:
    return {Bundle.from_key(key, n).mask: parse(value) for key, value in (_section(data, field) or {}).items()}


def model_from_dict(data: dict, tolerances: Tolerances = DEFAULT_TOLERANCES) -> VirtualModel:
    """Build and validate a model from its JSON document."""
    try:
        n = int(data["n"])
        if not 1 <= n <= 20:
            raise ValidationError(f"n must be in 1..20, got {n}")
        form = data.get("form", "parametric")
        dist = TypeDistribution.from_dict(_section(data, "distribution") or {"kind": "uniform"})
        common = dict(
            include_empty=bool(data.get("include_empty", True)),
            goods=tuple(str(g) for g in data.get("goods", ())),
            name=str(data.get("name", "")),
        )
        if form == "parametric":
            model = VirtualModel(
                n, form, dist,
                g1=_bundle_table(data, "g1", n, float),
                g2=_bundle_table(data, "g2", n, float),
                h1=ScalarFunction.from_dict(_section(data, "h1"), "identity"),
                h2=ScalarFunction.from_dict(_section(data, "h2"), "zero"),
                **common,
            )
        elif form == "direct":
            model = VirtualModel(
                n, form, dist,
                values=_bundle_table(data, "values", n, ValueCurve.from_dict),
                derivative=data.get("derivative", "analytic"),
                **common,
            )
        elif form == "virtual":
            model = VirtualModel(n, form, dist, curves=_bundle_table(data, "curves", n, VirtualCurve.from_dict),
                                 **common)
        else:
            raise ValidationError(f"Unknown model form '{form}'")
    except (AttributeError, KeyError, TypeError, ValueError) as e:
        raise ValidationError(f"Malformed model document: {e!r}")
    return validate_model(model, tolerances)


def load_model(path: Path, tolerances: Tolerances = DEFAULT_TOLERANCES) -> VirtualModel:
    path = Path(path)
    if not path.exists():
        raise ValidationError(f"Model file not found: {path}")
    data = read_json(path)
    if not isinstance(data, dict):
        raise ValidationError(f"{path} must hold a JSON object")
    data.setdefault("name", path.stem)
    return model_from_dict(data, tolerances)
