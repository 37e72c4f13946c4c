"""Run configuration and numerical tolerances."""
from dataclasses import dataclass, field, fields, replace
from pathlib import Path
from typing import Optional

from bundling.errors import ValidationError

DEFAULT_GRID_SIZE = 2001
PROBE_GRID_SIZE = 101
ORACLE_GRID_SIZE = 10001
QUANTITY_GRID_SIZE = 201
MAX_GOODS = 20
FIXTURE_PREFIX = "fixture:"
RANDOM_PREFIX = "random"

COMMANDS = ("solve", "classify", "price", "verify", "check", "oracle", "curves", "history")

# Output file names per command
OUTPUT_FILES = {
    "solve": ["menu.json"],
    "classify": ["structure.json"],
    "price": ["prices.json", "allocation.csv"],
    "verify": ["verify.json"],
    "check": ["conditions.json"],
    "oracle": ["envelope.csv", "compare.json"],
    "curves": ["curves.csv"],
    "history": ["history.json"],
}


@dataclass(frozen=True)
class Tolerances:
    duplicate: float = 1e-9
    dominance: float = 1e-9
    ratio: float = 1e-9
    crossing: float = 1e-10
    root: float = 1e-10
    tie: float = 1e-10
    ic: float = 1e-8
    quadrature: float = 1e-9
    borderline: float = 1e-7
    convexity: float = 1e-9
    additivity: float = 1e-8
    monotone: float = 1e-9

    def validate(self) -> "Tolerances":
        for f in fields(self):
            value = getattr(self, f.name)
            if not value > 0:
                raise ValidationError(f"Tolerance '{f.name}' must be positive, got {value}")
        return self

    def with_overrides(self, **overrides) -> "Tolerances":
        """Return a copy with the non-None overrides applied."""
        changes = {k: v for k, v in overrides.items() if v is not None}
        return replace(self, **changes).validate()


DEFAULT_TOLERANCES = Tolerances()


@dataclass(frozen=True)
class RunConfig:
    model_path: str
    command: str
    grid_size: int = DEFAULT_GRID_SIZE
    tolerances: Tolerances = field(default_factory=Tolerances)
    force: bool = False
    output_dir: Path = Path("out")
    seed: int = 0
    goods: int = 4
    menu_path: Optional[Path] = None
    no_clobber: bool = False
    record: bool = True
    run_id: Optional[int] = None

    def validate(self) -> "RunConfig":
        if self.command not in COMMANDS:
            raise ValidationError(f"Unknown command '{self.command}'")
        if self.grid_size < 11:
            raise ValidationError(f"grid_size must be >= 11, got {self.grid_size}")
        if not 1 <= self.goods <= MAX_GOODS:
            raise ValidationError(f"goods must be in 1..{MAX_GOODS}, got {self.goods}")
        self.tolerances.validate()
        return self

    @property
    def is_fixture(self) -> bool:
        return self.model_path.startswith(FIXTURE_PREFIX)

    @property
    def fixture_name(self) -> str:
        return self.model_path[len(FIXTURE_PREFIX):]
