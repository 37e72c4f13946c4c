"""Type distributions on a compact support, and scalar function specs."""
import logging
from dataclasses import dataclass
from typing import Optional

import numpy as np

from bundling.config import PROBE_GRID_SIZE
from bundling.errors import DomainError, ValidationError

logger = logging.getLogger(__name__)

DISTRIBUTION_KINDS = ("uniform", "power", "piecewise-linear-cdf")
FUNCTION_KINDS = ("identity", "power", "zero", "linear")

# Slack when testing that a type lies in the support
SUPPORT_SLACK = 1e-12


@dataclass(frozen=True)
class TypeDistribution:
    """Distribution F of the buyer's type on [t_lo, t_hi].

    ``power`` has cdf ((t - t_lo) / (t_hi - t_lo)) ** k. ``piecewise-linear-cdf``
    interpolates the cdf linearly between the knots.
    """

    kind: str
    t_lo: float = 0.0
    t_hi: float = 1.0
    k: float = 1.0
    knots_t: tuple[float, ...] = ()
    knots_cdf: tuple[float, ...] = ()

    def __post_init__(self):
        if self.kind not in DISTRIBUTION_KINDS:
            raise ValidationError(f"Unknown distribution kind '{self.kind}'")
        if not (np.isfinite(self.t_lo) and np.isfinite(self.t_hi)) or not self.t_lo < self.t_hi:
            raise ValidationError(f"Support must satisfy t_lo < t_hi, got [{self.t_lo}, {self.t_hi}]")
        if self.kind == "power" and not self.k > 0:
            raise ValidationError(f"Power distribution needs k > 0, got {self.k}")
        if self.kind == "piecewise-linear-cdf":
            self._check_knots()

    def _check_knots(self) -> None:
        ts = np.asarray(self.knots_t, dtype=float)
        cs = np.asarray(self.knots_cdf, dtype=float)
        if ts.size < 2 or ts.size != cs.size:
            raise ValidationError("Piecewise cdf needs matching t and cdf samples (at least 2)")
        if ts[0] != self.t_lo or ts[-1] != self.t_hi:
            raise ValidationError("Piecewise cdf knots must start at t_lo and end at t_hi")
        if cs[0] != 0.0 or cs[-1] != 1.0:
            raise ValidationError("Piecewise cdf must run from 0 to 1")
        if np.any(np.diff(ts) <= 0):
            raise ValidationError("Piecewise cdf knots must be strictly increasing in t")
        # A flat piece would be a zero-density interval
        if np.any(np.diff(cs) <= 0):
            raise ValidationError("Piecewise cdf must be strictly increasing (positive density)")

    # ============================================
    # FACTORIES
    # ============================================

    @classmethod
    def uniform(cls, t_lo: float = 0.0, t_hi: float = 1.0) -> "TypeDistribution":
        return cls("uniform", float(t_lo), float(t_hi))

    @classmethod
    def power(cls, k: float, t_lo: float = 0.0, t_hi: float = 1.0) -> "TypeDistribution":
        return cls("power", float(t_lo), float(t_hi), k=float(k))

    @classmethod
    def piecewise(cls, ts, cdfs) -> "TypeDistribution":
        ts = tuple(float(x) for x in ts)
        cdfs = tuple(float(x) for x in cdfs)
        if not ts:
            raise ValidationError("Piecewise cdf needs samples")
        return cls("piecewise-linear-cdf", ts[0], ts[-1], knots_t=ts, knots_cdf=cdfs)

    @classmethod
    def from_dict(cls, data: dict) -> "TypeDistribution":
        """Build from {kind, params, support}."""
        kind = data.get("kind", "uniform")
        params = data.get("params") or {}
        support = data.get("support", [0.0, 1.0])
        if kind == "piecewise-linear-cdf":
            return cls.piecewise(params.get("t", []), params.get("cdf", []))
        if len(support) != 2:
            raise ValidationError(f"Support must be [t_lo, t_hi], got {support}")
        if kind == "uniform":
            return cls.uniform(*support)
        if kind == "power":
            return cls.power(params.get("k", 1.0), *support)
        raise ValidationError(f"Unknown distribution kind '{kind}'")

    def to_dict(self) -> dict:
        data = {"kind": self.kind, "support": [self.t_lo, self.t_hi], "params": {}}
        if self.kind == "power":
            data["params"] = {"k": self.k}
        elif self.kind == "piecewise-linear-cdf":
            data["params"] = {"t": list(self.knots_t), "cdf": list(self.knots_cdf)}
        return data

    # ============================================
    # EVALUATION
    # ============================================

    @property
    def width(self) -> float:
        return self.t_hi - self.t_lo

    @property
    def is_standard_uniform(self) -> bool:
        return self.kind == "uniform" and self.t_lo == 0.0 and self.t_hi == 1.0

    def contains(self, t) -> bool:
        t = np.asarray(t, dtype=float)
        return bool(np.all((t >= self.t_lo - SUPPORT_SLACK) & (t <= self.t_hi + SUPPORT_SLACK)))

    def require_support(self, t) -> None:
        if not self.contains(t):
            raise DomainError(f"Type {t} outside support [{self.t_lo}, {self.t_hi}]")

    def _unit(self, t) -> np.ndarray:
        return np.clip((np.asarray(t, dtype=float) - self.t_lo) / self.width, 0.0, 1.0)

    def cdf(self, t):
        if self.kind == "uniform":
            out = self._unit(t)
        elif self.kind == "power":
            out = self._unit(t) ** self.k
        else:
            out = np.interp(np.asarray(t, dtype=float), self.knots_t, self.knots_cdf)
        return out if np.ndim(out) else float(out)

    def density(self, t):
        t_arr = np.asarray(t, dtype=float)
        if self.kind == "uniform":
            out = np.full_like(t_arr, 1.0 / self.width)
        elif self.kind == "power":
            x = self._unit(t_arr)
            with np.errstate(divide="ignore", invalid="ignore"):
                out = self.k * np.power(x, self.k - 1.0) / self.width
        else:
            ts = np.asarray(self.knots_t)
            slopes = np.diff(self.knots_cdf) / np.diff(ts)
            idx = np.clip(np.searchsorted(ts, t_arr, side="right") - 1, 0, slopes.size - 1)
            out = slopes[idx]
        return out if np.ndim(out) else float(out)

    def quantile(self, q):
        q_arr = np.asarray(q, dtype=float)
        if np.any((q_arr < -SUPPORT_SLACK) | (q_arr > 1 + SUPPORT_SLACK)):
            raise DomainError(f"Quantile level {q} outside [0, 1]")
        q_arr = np.clip(q_arr, 0.0, 1.0)
        if self.kind == "uniform":
            out = self.t_lo + self.width * q_arr
        elif self.kind == "power":
            out = self.t_lo + self.width * np.power(q_arr, 1.0 / self.k)
        else:
            out = np.interp(q_arr, self.knots_cdf, self.knots_t)
        # Endpoints map exactly onto the support endpoints
        out = np.where(q_arr <= 0.0, self.t_lo, np.where(q_arr >= 1.0, self.t_hi, out))
        return out if np.ndim(out) else float(out)

    def information_rent_factor(self, t):
        """(1 - F(t)) / f(t); raises when the density vanishes at t."""
        f = np.asarray(self.density(t), dtype=float)
        survival = 1.0 - np.asarray(self.cdf(t), dtype=float)
        at_top = survival <= 0.0
        if np.any((f <= 0.0) & ~at_top) or np.any(~np.isfinite(f) & ~at_top):
            raise DomainError(f"Density vanishes or diverges at t={t}; virtual value undefined")
        with np.errstate(divide="ignore", invalid="ignore"):
            out = np.where(at_top, 0.0, survival / f)
        return out if np.ndim(out) else float(out)

    def probe_grid(self, size: int = PROBE_GRID_SIZE) -> np.ndarray:
        return np.linspace(self.t_lo, self.t_hi, size)

    def validate(self, size: int = PROBE_GRID_SIZE) -> "TypeDistribution":
        """Check cdf endpoints, monotonicity, interior density and quantile inversion."""
        grid = self.probe_grid(size)
        cdf = np.asarray(self.cdf(grid))
        if cdf[0] != 0.0 or abs(cdf[-1] - 1.0) > 1e-12:
            raise ValidationError(f"cdf must be 0 at t_lo and 1 at t_hi, got {cdf[0]}, {cdf[-1]}")
        if np.any(np.diff(cdf) < 0):
            raise ValidationError("cdf must be nondecreasing")
        interior = grid[1:-1]
        if np.any(np.asarray(self.density(interior)) <= 0):
            raise ValidationError("Density must be positive on the interior of the support")
        back = np.asarray(self.quantile(cdf))
        worst = float(np.max(np.abs(back - grid)))
        if worst > 1e-9 * max(1.0, abs(self.t_lo), abs(self.t_hi)):
            raise ValidationError(f"Quantile does not invert cdf (worst error {worst:.3g})")
        return self


@dataclass(frozen=True)
class ScalarFunction:
    """A scalar function of the type: identity, t**alpha, zero, or slope*t + intercept.

    ``inner`` composes the function with a distribution's quantile, so the
    function is evaluated at inner.quantile(t). This is how models move to
    quantile space.
    """

    kind: str = "identity"
    alpha: float = 1.0
    slope: float = 1.0
    intercept: float = 0.0
    inner: Optional[TypeDistribution] = None

    def __post_init__(self):
        if self.kind not in FUNCTION_KINDS:
            raise ValidationError(f"Unknown function kind '{self.kind}'")

    @classmethod
    def from_dict(cls, data: Optional[dict], default: str = "identity") -> "ScalarFunction":
        if not data:
            return cls(default)
        kind = data.get("kind", default)
        return cls(
            kind,
            alpha=float(data.get("alpha", 1.0)),
            slope=float(data.get("slope", 1.0)),
            intercept=float(data.get("intercept", 0.0)),
        )

    def to_dict(self) -> dict:
        data = {"kind": self.kind}
        if self.kind == "power":
            data["alpha"] = self.alpha
        elif self.kind == "linear":
            data.update(slope=self.slope, intercept=self.intercept)
        if self.inner is not None:
            data["inner"] = self.inner.to_dict()
        return data

    @property
    def is_zero(self) -> bool:
        return self.kind == "zero" or (self.kind == "linear" and self.slope == 0 and self.intercept == 0)

    def composed(self, dist: TypeDistribution) -> "ScalarFunction":
        if self.inner is not None:
            raise ValidationError("Function is already composed with a quantile map")
        return ScalarFunction(self.kind, self.alpha, self.slope, self.intercept, inner=dist)

    def _base(self, x: np.ndarray) -> np.ndarray:
        if self.kind == "identity":
            return x
        if self.kind == "zero":
            return np.zeros_like(x)
        if self.kind == "linear":
            return self.slope * x + self.intercept
        with np.errstate(invalid="ignore"):
            out = np.power(x, self.alpha)
        if np.any(~np.isfinite(out)):
            raise DomainError(f"t**{self.alpha} undefined on part of the support")
        return out

    def __call__(self, t):
        x = np.asarray(t, dtype=float)
        if self.inner is not None:
            x = np.asarray(self.inner.quantile(x), dtype=float)
        out = self._base(x)
        return out if np.ndim(out) else float(out)

    def inverse(self, y: float) -> Optional[float]:
        """Closed-form preimage of y, or None when there is none."""
        if self.kind == "identity":
            x = y
        elif self.kind == "linear" and self.slope != 0:
            x = (y - self.intercept) / self.slope
        elif self.kind == "power" and self.alpha != 0 and y >= 0:
            x = y ** (1.0 / self.alpha)
        else:
            return None
        if self.inner is not None:
            if not self.inner.contains(x):
                return None
            return float(self.inner.cdf(x))
        return float(x)

    def is_monotone_on(self, grid: np.ndarray, tol: float = 1e-12) -> bool:
        """Weak monotonicity (either direction) on the given grid."""
        values = np.asarray(self(grid), dtype=float)
        steps = np.diff(values)
        scale = max(1.0, float(np.max(np.abs(values))))
        return bool(np.all(steps >= -tol * scale) or np.all(steps <= tol * scale))


IDENTITY = ScalarFunction("identity")
ZERO = ScalarFunction("zero")
