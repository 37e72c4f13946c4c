"""Tests for virtual value models and assumption checks."""
import json
import sys
import tempfile
from pathlib import Path

import numpy as np

# Ensure the project root is in the path
sys.path.insert(0, str(Path(__file__).parent.parent))

from bundling.bundle import Bundle
from bundling.errors import DomainError, MissingParameterError, ValidationError
from bundling.fixtures import FIXTURES
from bundling.model import (
    check_monotonic_differences, check_scd_star, endpoint_profiles, eval_value,
    eval_virtual, load_model, marginal_revenue, model_from_dict, normalization_report,
    to_quantile_space, value_table,
)
from bundling.oracle import builtin_fixture


def _key(model, key):
    return Bundle.from_key(key, model.n)


def _two_good_parametric(table, **extra):
    doc = {
        "n": 2,
        "form": "parametric",
        "distribution": {"kind": "uniform", "support": [0.0, 1.0]},
        "g1": {k: v[0] for k, v in table.items()},
        "g2": {k: v[1] for k, v in table.items()},
    }
    doc.update(extra)
    return model_from_dict(doc)


def test_parametric_virtual_values():
    """phi = g1 * t + g2 for the three-good tree fixture."""
    model = builtin_fixture("f4_tree3")
    assert abs(eval_virtual(model, _key(model, "1,2"), 0.5) - (1.0 + 11 / 3)) < 1e-12
    assert eval_virtual(model, Bundle.empty(3), 0.7) == 0.0
    profiles = {p.bundle.key: p.point for p in endpoint_profiles(model)}
    assert profiles["1"] == (4.0, 5.0)
    assert abs(profiles["1,3"][1] - 6.0) < 1e-12
    assert len(model.bundles) == 8
    print("  PASS: test_parametric_virtual_values")


def test_parametric_values_from_quadrature():
    """v(b, t) = g1 (1 + t) / 2 + g2 under uniform types, and v = phi at the top."""
    model = builtin_fixture("f4_tree3")
    b = _key(model, "1,3")
    for t in (0.0, 0.25, 0.6):
        expected = 2.75 * (1.0 + t) / 2.0 + 3.25
        assert abs(eval_value(model, b, t) - expected) < 1e-9
    assert abs(eval_value(model, b, 1.0) - 6.0) < 1e-12
    table = value_table(model, [Bundle.empty(3), b], [0.0, 0.5])
    assert table.shape == (2, 2)
    assert np.all(table[0] == 0.0)
    print("  PASS: test_parametric_values_from_quadrature")


def test_direct_model_virtual_value():
    """v = 1 + 2t - t^2 with F(t) = t / 2 gives phi = -3t^2 + 8t - 3."""
    model = builtin_fixture("e7")
    b = _key(model, "1")
    for t in (0.0, 0.5, 4 / 3, 2.0):
        assert abs(eval_virtual(model, b, t) - (-3 * t * t + 8 * t - 3)) < 1e-9
    assert abs(eval_value(model, b, 1.0) - 2.0) < 1e-12
    try:
        eval_virtual(model, b, 2.5)
        assert False, "type outside the support should fail"
    except DomainError:
        pass
    print("  PASS: test_direct_model_virtual_value")


def test_finite_difference_derivative():
    """Tabulated values with finite differences approximate the analytic phi."""
    ts = np.linspace(0.0, 1.0, 201)
    doc = {
        "n": 1,
        "form": "direct",
        "values": {"1": {"t": ts.tolist(), "v": (ts ** 2).tolist()}},
        "derivative": "finite-difference",
    }
    model = model_from_dict(doc)
    # v = t^2 under uniform types: phi = t^2 - (1 - t) 2t = 3t^2 - 2t
    for t in (0.2, 0.5, 0.8):
        assert abs(eval_virtual(model, _key(model, "1"), t) - (3 * t * t - 2 * t)) < 1e-3
    print("  PASS: test_finite_difference_derivative")


def test_marginal_revenue():
    """MR(b, q) is phi at the type with upper-tail mass q."""
    model = builtin_fixture("f4_tree3")
    b = _key(model, "1")
    assert abs(marginal_revenue(model, b, 0.25) - 4.75) < 1e-12
    assert abs(marginal_revenue(model, b, 1.0) - 4.0) < 1e-12
    try:
        marginal_revenue(model, b, 1.5)
        assert False, "quantity above one should fail"
    except DomainError:
        pass
    print("  PASS: test_marginal_revenue")


def test_empty_bundle_parameters_ignored():
    """Parameters given for '{}' are overridden with zero."""
    model = _two_good_parametric({"{}": (1.0, 2.0), "1": (1.0, 0.0), "2": (2.0, -1.0), "1,2": (3.0, -1.5)})
    assert eval_virtual(model, Bundle.empty(2), 0.5) == 0.0
    assert 0 not in model.g1
    print("  PASS: test_empty_bundle_parameters_ignored")


def test_duplicate_bundles_dropped():
    """Bundles with equal endpoint virtual values keep only the smallest mask."""
    model = builtin_fixture("pure_demo")
    assert [b.key for b in model.bundles] == ["{}", "1", "1,2", "1,2,3"]
    print("  PASS: test_duplicate_bundles_dropped")


def test_model_document_errors():
    """Malformed documents raise validation errors."""
    bad_docs = [
        {"form": "parametric"},
        {"n": 2, "form": "parametric", "g1": {"1": 1.0}, "g2": {}},
        {"n": 2, "form": "unknown"},
        {"n": 2, "form": "parametric", "g1": {"5": 1.0}, "g2": {"5": 1.0}},
        {"n": 1, "form": "virtual", "curves": {"1": {"t": [0.0, 0.5], "phi": [0.0, 1.0]}}},
    ]
    for doc in bad_docs:
        try:
            model_from_dict(doc)
            assert False, f"document should fail: {doc}"
        except ValidationError:
            pass
    try:
        model_from_dict({"n": 2, "form": "parametric", "g1": {"1": 1.0}, "g2": {}})
        assert False, "unpaired g1 should fail"
    except MissingParameterError:
        pass
    print("  PASS: test_model_document_errors")


def test_load_model_from_file():
    """Model files use the fixture document shape; the name defaults to the file stem."""
    tmpdir = Path(tempfile.mkdtemp())
    path = tmpdir / "tree3.json"
    path.write_text(json.dumps(FIXTURES["f4_tree3"]))
    model = load_model(path)
    assert model.name == "tree3"
    assert model.n == 3
    (tmpdir / "broken.json").write_text("{not json")
    for missing in (tmpdir / "broken.json", tmpdir / "absent.json"):
        try:
            load_model(missing)
            assert False, "unreadable model should fail"
        except ValidationError:
            pass
    print("  PASS: test_load_model_from_file")


def test_monotonic_differences_structural():
    """Parametric models with monotone h1 pass without sampling."""
    report = check_monotonic_differences(builtin_fixture("f4_tree4"))
    assert report.holds is True
    assert report.method == "structural"
    print("  PASS: test_monotonic_differences_structural")


def test_monotonic_differences_witness():
    """The direct counterexample has a non-monotone difference inside (0, 2)."""
    report = check_monotonic_differences(builtin_fixture("e7"))
    assert report.holds is False
    witness = report.witnesses[0]
    assert witness.kind == "non_monotone_difference"
    assert 0.0 < witness.values["t2"] < 2.0
    assert witness.values["pattern"] == "fall-rise"
    print("  PASS: test_monotonic_differences_witness")


def test_scd_star_counterexamples():
    """Kinked curves that a mixture crosses twice fail single crossing."""
    for name in ("e2", "e6"):
        report = check_scd_star(builtin_fixture(name))
        assert report.holds is False, name
        assert report.witnesses[0].kind == "mixture_crossings"
    print("  PASS: test_scd_star_counterexamples")


def test_scd_star_affine_detection():
    """Virtual curves that are lines in t are recognized as affine."""
    doc = {
        "n": 2,
        "form": "virtual",
        "include_empty": False,
        "curves": {
            "1": {"t": [0.0, 1.0], "phi": [4.0, 5.0]},
            "2": {"t": [0.0, 1.0], "phi": [1.0, 3.0]},
            "1,2": {"t": [0.0, 1.0], "phi": [1.0, 7.0]},
        },
    }
    report = check_scd_star(model_from_dict(doc))
    assert report.holds is True
    assert report.method == "affine"
    assert report.details["affine_residual"] < 1e-8
    print("  PASS: test_scd_star_affine_detection")


def test_scd_star_two_bundles_exhaustive():
    """With one bundle and the empty bundle the pair check is exhaustive."""
    report = check_scd_star(builtin_fixture("e7"))
    assert report.holds is True
    assert report.method == "exhaustive"
    print("  PASS: test_scd_star_two_bundles_exhaustive")


def test_normalization_report():
    """Informational check of phi(b, t_lo) < 0."""
    assert normalization_report(builtin_fixture("additive_demo")).holds is True
    report = normalization_report(builtin_fixture("f4_tree3"))
    assert report.holds is False
    assert report.witnesses[0].bundles == [Bundle.from_key("1", 3)]
    print("  PASS: test_normalization_report")


def test_quantile_space_equivalence():
    """Moving to quantile space keeps phi(b, quantile(q))."""
    doc = dict(FIXTURES["f4_tree3"])
    doc["distribution"] = {"kind": "power", "params": {"k": 2.0}, "support": [0.0, 1.0]}
    model = model_from_dict(doc)
    unit = to_quantile_space(model)
    assert unit.dist.is_standard_uniform
    b = Bundle.from_key("1,2", 3)
    for q in (0.1, 0.5, 0.9):
        assert abs(eval_virtual(unit, b, q) - eval_virtual(model, b, model.dist.quantile(q))) < 1e-12
    virtual = to_quantile_space(model_from_dict(dict(FIXTURES["e7"])))
    assert virtual.form == "quantile"
    assert abs(eval_virtual(virtual, Bundle.from_key("1", 1), 0.5) - 2.0) < 1e-9
    assert to_quantile_space(builtin_fixture("f4_tree3")).form == "parametric"
    print("  PASS: test_quantile_space_equivalence")


def test_marginal_revenue_duality():
    """phi = v - (1 - F) / f * v' and MR(q) = d/dq [q v(t(q))] at random types."""
    model = _two_good_parametric(
        {"1": (1.0, -0.5), "2": (2.0, -1.5), "1,2": (3.5, -2.5)},
        distribution={"kind": "power", "params": {"k": 2.0}, "support": [0.0, 1.0]},
    )
    h = 1e-4
    rng = np.random.default_rng(7)
    for t in rng.uniform(0.2, 0.8, 8):
        q = 1.0 - t ** 2
        rent = (1.0 - t ** 2) / (2.0 * t)
        for b in model.bundles:
            if b.is_empty:
                continue
            v = eval_value(model, b, t)
            slope = (eval_value(model, b, t + h) - eval_value(model, b, t - h)) / (2 * h)
            phi = eval_virtual(model, b, t)
            assert abs(phi - (v - rent * slope)) < 1e-3, (b.key, t)

            revenue = lambda x: x * eval_value(model, b, model.dist.quantile(1.0 - x))
            mr = marginal_revenue(model, b, q)
            assert abs(mr - phi) < 1e-9, (b.key, t)
            assert abs(mr - (revenue(q + h) - revenue(q - h)) / (2 * h)) < 1e-3, (b.key, q)
    print("  PASS: test_marginal_revenue_duality")


def _tent_model(swap):
    tent = {"t": [0.0, 0.5, 1.0], "phi": [0.0, 1.0, 0.2]}
    flat = {"t": [0.0, 1.0], "phi": [0.5, 0.5]}
    first, second = (flat, tent) if swap else (tent, flat)
    return model_from_dict({
        "n": 2,
        "form": "virtual",
        "include_empty": False,
        "curves": {"1": first, "2": second, "1,2": {"t": [0.0, 1.0], "phi": [5.0, 15.0]}},
    })


def test_monotonic_differences_pair_symmetry():
    """Swapping the curves of a pair flips the pattern but keeps the verdict and the types."""
    a = check_monotonic_differences(_tent_model(False))
    b = check_monotonic_differences(_tent_model(True))
    assert a.holds is False and b.holds is False
    wa, wb = a.witnesses[0], b.witnesses[0]
    assert wa.bundles == wb.bundles == [Bundle.from_key("1", 2), Bundle.from_key("2", 2)]
    assert wa.values["pattern"] == "rise-fall" and wb.values["pattern"] == "fall-rise"
    for key in ("t1", "t2", "t3"):
        assert wa.values[key] == wb.values[key], key
    assert abs(wa.values["t2"] - 0.5) < 1e-12
    assert abs(wa.values["d2"] + wb.values["d2"]) < 1e-12

    doc = {
        "n": 2, "form": "virtual", "include_empty": False,
        "curves": {
            "1": {"t": [0.0, 0.5, 1.0], "phi": [0.0, 0.4, 2.0]},
            "2": {"t": [0.0, 1.0], "phi": [1.0, 1.5]},
            "1,2": {"t": [0.0, 1.0], "phi": [-1.0, 4.0]},
        },
    }
    swapped = json.loads(json.dumps(doc))
    swapped["curves"]["1"], swapped["curves"]["2"] = doc["curves"]["2"], doc["curves"]["1"]
    assert check_monotonic_differences(model_from_dict(doc)).holds is True
    assert check_monotonic_differences(model_from_dict(swapped)).holds is True
    print("  PASS: test_monotonic_differences_pair_symmetry")


if __name__ == "__main__":
    print("Running model tests...")
    test_parametric_virtual_values()
    test_parametric_values_from_quadrature()
    test_direct_model_virtual_value()
    test_finite_difference_derivative()
    test_marginal_revenue()
    test_empty_bundle_parameters_ignored()
    test_duplicate_bundles_dropped()
    test_model_document_errors()
    test_load_model_from_file()
    test_monotonic_differences_structural()
    test_monotonic_differences_witness()
    test_scd_star_counterexamples()
    test_scd_star_affine_detection()
    test_scd_star_two_bundles_exhaustive()
    test_normalization_report()
    test_quantile_space_equivalence()
    test_marginal_revenue_duality()
    test_monotonic_differences_pair_symmetry()
    print("\nAll model tests passed!")
