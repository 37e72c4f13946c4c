"""Built-in model documents, in the same JSON shape as model files."""

UNIFORM_UNIT = {"kind": "uniform", "support": [0.0, 1.0]}


def _pairs(table: dict) -> tuple[dict, dict]:
    """Split {key: (g1, g2)} into the two parameter maps."""
    return {k: v[0] for k, v in table.items()}, {k: v[1] for k, v in table.items()}


def _parametric(n: int, table: dict, include_empty: bool = True, **extra) -> dict:
    g1, g2 = _pairs(table)
    doc = {
        "n": n,
        "form": "parametric",
        "distribution": UNIFORM_UNIT,
        "g1": g1,
        "g2": g2,
        "h1": {"kind": "identity"},
        "h2": {"kind": "zero"},
        "include_empty": include_empty,
    }
    doc.update(extra)
    return doc


def _line(slope: float, intercept: float) -> dict:
    return {"t": [0.0, 1.0], "phi": [intercept, intercept + slope]}


def _kinked(left: float, middle: float, right: float) -> dict:
    return {"t": [0.0, 0.5, 1.0], "phi": [left, middle, right]}


# ============== THREE-GOOD TREE (root {1}) ==============

F4_TREE3 = {
    "1": (1.0, 4.0),
    "1,2": (2.0, 11 / 3),
    "1,3": (11 / 4, 13 / 4),
    "1,2,3": (6.0, 1.0),
    "2": (1.0, 1.0),
    "3": (1.0, 2.0),
    "2,3": (1.0, 3.0),
}

# ============== FOUR-GOOD TREE (least-favorite good 4) ==============

F4_TREE4 = {
    "1": (1.0, 4.0),
    "1,4": (13 / 6, 7 / 2),
    "1,3": (8 / 3, 3.0),
    "1,2": (29 / 12, 13 / 4),
    "1,2,4": (3.0, 3.0),
    "1,3,4": (23 / 8, 25 / 8),
    "1,2,3": (43 / 12, 11 / 4),
    "1,2,3,4": (6.0, 1.0),
    "2": (1.0, 1.0),
    "3": (1.0, 1.5),
    "4": (1.0, 2.0),
    "2,3": (1.0, 2.5),
    "2,4": (1.0, 3.0),
    "3,4": (1.0, 3.25),
    "2,3,4": (1.0, 3.5),
}

# Intermediates on the diagonal of the normalized square
COLLINEAR_TREE = {
    "1": (1.0, 4.0),
    "1,2": (8 / 3, 3.0),
    "1,3": (3.5, 2.5),
    "1,2,3": (6.0, 1.0),
    "2": (1.0, 1.0),
    "3": (1.0, 2.0),
    "2,3": (1.0, 3.0),
}

# Singletons phi = 2t - 1, 3t - 1.2, 5t - 1.5, summed over bundles
ADDITIVE_SINGLETONS = {1: (2.0, -1.0), 2: (3.0, -1.2), 3: (5.0, -1.5)}


def _additive_table(singletons: dict) -> dict:
    n = len(singletons)
    table = {}
    for mask in range(1, 1 << n):
        goods = [g for g in range(1, n + 1) if mask >> (g - 1) & 1]
        key = ",".join(str(g) for g in goods)
        table[key] = (sum(singletons[g][0] for g in goods), sum(singletons[g][1] for g in goods))
    return table


def _size_scaled_values(n: int) -> dict:
    """v(b, t) = |b| t for every non-empty bundle."""
    values = {}
    for mask in range(1, 1 << n):
        goods = [g for g in range(1, n + 1) if mask >> (g - 1) & 1]
        values[",".join(str(g) for g in goods)] = {"poly": [0.0, float(len(goods))]}
    return values


FIXTURES = {
    "f4_tree3": _parametric(3, F4_TREE3),
    "f4_tree4": _parametric(4, F4_TREE4),
    "collinear_tree": _parametric(3, COLLINEAR_TREE),
    "additive_demo": _parametric(3, _additive_table(ADDITIVE_SINGLETONS)),
    "pure_demo": {
        "n": 3,
        "form": "direct",
        "distribution": UNIFORM_UNIT,
        "values": _size_scaled_values(3),
        "derivative": "analytic",
        "include_empty": True,
    },
    # Virtual curves with a kink; the mixture of {1} and {2} crosses {1,2} twice
    "e2": {
        "n": 2,
        "form": "virtual",
        "distribution": UNIFORM_UNIT,
        "include_empty": False,
        "curves": {
            "1": _line(1.0, 0.0),
            "2": _line(-1.0, 1.0),
            "1,2": _kinked(2 / 3, 0.5, 2 / 3),
        },
    },
    "e5": {
        "n": 3,
        "form": "virtual",
        "distribution": UNIFORM_UNIT,
        "include_empty": False,
        "curves": {
            "1": _line(1.0, 0.0),
            "2": _line(-1.0, 1.0),
            "1,2": _kinked(2 / 3, 0.5, 2 / 3),
            "3": _kinked(7 / 8, 0.5, 7 / 8),
        },
    },
    "e6": {
        "n": 2,
        "form": "virtual",
        "distribution": UNIFORM_UNIT,
        "include_empty": False,
        "curves": {
            "1": _line(1.0, 0.0),
            "2": _line(-1.0, 1.0),
            "1,2": _kinked(1.0, 0.5, 1.0),
        },
    },
    # v = -t^2 + 2t + 1 with F(t) = t / 2 gives phi = -3t^2 + 8t - 3
    "e7": {
        "n": 1,
        "form": "direct",
        "distribution": {"kind": "uniform", "support": [0.0, 2.0]},
        "values": {"1": {"poly": [1.0, 2.0, -1.0]}},
        "derivative": "analytic",
        "include_empty": True,
    },
}

FIXTURE_NAMES = tuple(sorted(FIXTURES))
