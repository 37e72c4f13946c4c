"""Bundles of goods as bitmasks, and stochastic bundles over them."""
from dataclasses import dataclass, field
from typing import Iterable, Iterator, Mapping

from bundling.config import MAX_GOODS
from bundling.errors import ArgumentError, ValidationError

EMPTY_KEY = "{}"


@dataclass(frozen=True, order=True)
class Bundle:
    """A set of goods; bit i of ``mask`` stands for good i + 1."""

    mask: int
    n: int

    def __post_init__(self):
        if not 1 <= self.n <= MAX_GOODS:
            raise ValidationError(f"Good count must be in 1..{MAX_GOODS}, got {self.n}")
        if not 0 <= self.mask < (1 << self.n):
            raise ValidationError(f"Bundle mask {self.mask} out of range for n={self.n}")

    # ============================================
    # CONSTRUCTORS
    # ============================================

    @classmethod
    def from_goods(cls, goods: Iterable[int], n: int) -> "Bundle":
        mask = 0
        for good in goods:
            if not 1 <= good <= n:
                raise ValidationError(f"Good index {good} outside 1..{n}")
            mask |= 1 << (good - 1)
        return cls(mask, n)

    @classmethod
    def from_key(cls, key: str, n: int) -> "Bundle":
        """Parse a bundle key such as "1,3" (or "{}" for the empty bundle)."""
        key = key.strip()
        if key in (EMPTY_KEY, ""):
            return cls(0, n)
        try:
            goods = [int(part) for part in key.split(",")]
        except ValueError:
            raise ValidationError(f"Malformed bundle key '{key}'")
        if len(set(goods)) != len(goods):
            raise ValidationError(f"Bundle key '{key}' repeats a good")
        return cls.from_goods(goods, n)

    @classmethod
    def full(cls, n: int) -> "Bundle":
        return cls((1 << n) - 1, n)

    @classmethod
    def empty(cls, n: int) -> "Bundle":
        return cls(0, n)

    # ============================================
    # SET QUERIES
    # ============================================

    @property
    def goods(self) -> tuple[int, ...]:
        return tuple(i + 1 for i in range(self.n) if self.mask >> i & 1)

    @property
    def key(self) -> str:
        if self.mask == 0:
            return EMPTY_KEY
        return ",".join(str(g) for g in self.goods)

    @property
    def size(self) -> int:
        return bin(self.mask).count("1")

    @property
    def is_empty(self) -> bool:
        return self.mask == 0

    @property
    def is_full(self) -> bool:
        return self.mask == (1 << self.n) - 1

    def contains_good(self, good: int) -> bool:
        return 1 <= good <= self.n and bool(self.mask >> (good - 1) & 1)

    def issubset(self, other: "Bundle") -> bool:
        self._check_same_n(other)
        return self.mask & other.mask == self.mask

    def issuperset(self, other: "Bundle") -> bool:
        return other.issubset(self)

    def is_proper_subset(self, other: "Bundle") -> bool:
        return self.issubset(other) and self.mask != other.mask

    def union(self, other: "Bundle") -> "Bundle":
        self._check_same_n(other)
        return Bundle(self.mask | other.mask, self.n)

    def intersection(self, other: "Bundle") -> "Bundle":
        self._check_same_n(other)
        return Bundle(self.mask & other.mask, self.n)

    def difference(self, other: "Bundle") -> "Bundle":
        self._check_same_n(other)
        return Bundle(self.mask & ~other.mask, self.n)

    def with_good(self, good: int) -> "Bundle":
        return self.union(Bundle.from_goods([good], self.n))

    def without_good(self, good: int) -> "Bundle":
        return self.difference(Bundle.from_goods([good], self.n))

    def nested_with(self, other: "Bundle") -> bool:
        return self.issubset(other) or other.issubset(self)

    def _check_same_n(self, other: "Bundle") -> None:
        if self.n != other.n:
            raise ArgumentError(f"Bundles over different good counts: {self.n} vs {other.n}")

    def __str__(self) -> str:
        return self.key


def all_bundles(n: int, include_empty: bool = True) -> Iterator[Bundle]:
    """Enumerate 2^n bundles in increasing mask order."""
    start = 0 if include_empty else 1
    for mask in range(start, 1 << n):
        yield Bundle(mask, n)


def bundle_keys(bundles: Iterable[Bundle]) -> list[str]:
    return [b.key for b in bundles]


@dataclass(frozen=True)
class StochasticBundle:
    """A lottery over deterministic bundles."""

    weights: Mapping[Bundle, float] = field(default_factory=dict)

    def __post_init__(self):
        if not self.weights:
            raise ValidationError("Stochastic bundle needs at least one atom")
        if any(w < 0 for w in self.weights.values()):
            raise ValidationError("Stochastic bundle weights must be non-negative")
        total = sum(self.weights.values())
        if abs(total - 1.0) > 1e-12:
            raise ValidationError(f"Stochastic bundle weights sum to {total}, expected 1")

    @classmethod
    def pure(cls, bundle: Bundle) -> "StochasticBundle":
        return cls({bundle: 1.0})

    @classmethod
    def mix(cls, first: Bundle, second: Bundle, weight: float) -> "StochasticBundle":
        """``weight`` on ``first`` and the rest on ``second``."""
        if first == second:
            return cls.pure(first)
        return cls({first: weight, second: 1.0 - weight})

    @property
    def support(self) -> list[Bundle]:
        return sorted(b for b, w in self.weights.items() if w > 0)

    def expectation(self, values: Mapping[Bundle, float]) -> float:
        """Mixture value sum_b a_b * values[b]."""
        return float(sum(w * values[b] for b, w in self.weights.items()))
