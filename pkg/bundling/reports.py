"""Condition reports and atomic JSON/CSV output."""
import csv
import json
import logging
import math
import os
import tempfile
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Iterable, Optional, Sequence

from bundling.errors import ValidationError

logger = logging.getLogger(__name__)


def fmt(x: float) -> str:
    """Format a number with 12 significant digits."""
    return f"{x:.12g}"


def _clean(value: Any) -> Any:
    """Make numpy scalars, bundles and non-finite floats JSON friendly."""
    if hasattr(value, "key") and hasattr(value, "mask"):
        return value.key
    if isinstance(value, dict):
        return {str(_clean(k)): _clean(v) for k, v in value.items()}
    if isinstance(value, (list, tuple, set, frozenset)):
        items = [_clean(v) for v in value]
        return sorted(items, key=str) if isinstance(value, (set, frozenset)) else items
    if hasattr(value, "item") and not isinstance(value, (str, bytes)):
        value = value.item()
    if isinstance(value, float) and not math.isfinite(value):
        return None
    return value


@dataclass
class Witness:
    kind: str
    bundles: list = field(default_factory=list)
    values: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {"kind": self.kind, "bundles": _clean(self.bundles), "values": _clean(self.values)}


@dataclass
class ConditionReport:
    """Outcome of a hypothesis check: holds is True, False, or None (unknown)."""

    name: str
    holds: Optional[bool]
    witnesses: list[Witness] = field(default_factory=list)
    notes: list[str] = field(default_factory=list)
    method: str = "numeric"
    details: dict = field(default_factory=dict)

    def add_witness(self, kind: str, bundles: Sequence = (), **values) -> "ConditionReport":
        self.witnesses.append(Witness(kind, list(bundles), values))
        return self

    def note(self, text: str) -> "ConditionReport":
        self.notes.append(text)
        return self

    @property
    def passed(self) -> bool:
        return self.holds is True

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "holds": self.holds,
            "method": self.method,
            "witnesses": [w.to_dict() for w in self.witnesses],
            "notes": list(self.notes),
            "details": _clean(self.details),
        }


# ============================================
# ATOMIC WRITERS
# ============================================

def _atomic_write(path: Path, write, no_clobber: bool) -> Path:
    path = Path(path)
    if no_clobber and path.exists():
        raise ValidationError(f"Refusing to overwrite existing file {path} (--no-clobber)")
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp_name = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as handle:
            write(handle)
        os.replace(tmp_name, path)
    except BaseException:
        if os.path.exists(tmp_name):
            os.unlink(tmp_name)
        raise
    logger.info(f"Wrote {path}")
    return path


def dumps(data: Any) -> str:
    return json.dumps(_clean(data), indent=2, ensure_ascii=False)


def write_json(path: Path, data: Any, no_clobber: bool = False) -> Path:
    payload = dumps(data)
    return _atomic_write(path, lambda h: h.write(payload + "\n"), no_clobber)


def write_csv(path: Path, header: Sequence[str], rows: Iterable[Sequence], no_clobber: bool = False) -> Path:
    """Write rows, formatting floats with 12 significant digits."""
    def _write(handle):
        writer = csv.writer(handle)
        writer.writerow(header)
        for row in rows:
            writer.writerow([fmt(v) if isinstance(v, float) else v for v in row])
    return _atomic_write(path, _write, no_clobber)


def read_json(path: Path) -> Any:
    try:
        with open(path, encoding="utf-8") as handle:
            return json.load(handle)
    except json.JSONDecodeError as e:
        raise ValidationError(f"{path} is not valid JSON: {e}")
