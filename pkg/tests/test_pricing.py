"""Tests for breakpoints, prices, IC/IR verification and revenue."""
import sys
from pathlib import Path

# Ensure the project root is in the path
sys.path.insert(0, str(Path(__file__).parent.parent))

from bundling.bundle import Bundle
from bundling.envelope import MenuSolution, solve_minimal_menu
from bundling.errors import ConsistencyError
from bundling.oracle import builtin_fixture
from bundling.pricing import (
    PriceSchedule, allocation_rows, best_response_revenue, build_prices, compute_breakpoints,
    expected_revenue, price_report, revenue_identity_holds, verify_ic_ir,
)


def _priced(name):
    model = builtin_fixture(name)
    menu = solve_minimal_menu(model)
    cuts, schedule = price_report(model, menu)
    return model, menu, cuts, schedule


def _shifted(schedule, shift):
    """Copy of a schedule with shift(bundle) added to each price."""
    prices = {b: p + shift(b) for b, p in schedule.prices.items()}
    return PriceSchedule(prices, schedule.base_bundle, schedule.base_utility, list(schedule.breakpoints))


def test_three_good_breakpoints_and_prices():
    """Cuts at 1/3, 5/9, 9/13 and telescoping prices 4.5, 29/6, 5, 5.5."""
    _, menu, cuts, schedule = _priced("f4_tree3")
    for got, want in zip(cuts.cuts, [1 / 3, 5 / 9, 9 / 13]):
        assert abs(got - want) < 1e-10
    expected = [4.5, 29 / 6, 5.0, 5.5]
    for b, want in zip(menu.kept, expected):
        assert abs(schedule.prices[b] - want) < 1e-9, b.key
    assert schedule.base_bundle.key == "1"
    assert abs(schedule.base_utility) < 1e-9
    assert cuts.bundle_at(0.5).key == "1,2"
    assert cuts.bundle_at(1 / 3 + 1e-12).key == "1,2"
    print("  PASS: test_three_good_breakpoints_and_prices")


def test_four_good_prices():
    """Each step up the four-good menu costs 1/3 more."""
    _, menu, cuts, schedule = _priced("f4_tree4")
    for got, want in zip(cuts.cuts, [3 / 7, 9 / 17, 21 / 29]):
        assert abs(got - want) < 1e-10
    for b, want in zip(menu.kept, [4.5, 29 / 6, 31 / 6, 33 / 6]):
        assert abs(schedule.prices[b] - want) < 1e-9, b.key
    print("  PASS: test_four_good_prices")


def test_empty_bundle_anchors_prices():
    """When the empty bundle is kept it costs 0 and the rest telescope from it."""
    _, menu, _, schedule = _priced("additive_demo")
    assert menu.kept_keys == ["{}", "3", "2,3", "1,2,3"]
    for b, want in zip(menu.kept, [0.0, 1.75, 2.65, 3.15]):
        assert abs(schedule.prices[b] - want) < 1e-9, b.key
    assert schedule.base_bundle.is_empty
    assert schedule.to_dict()["prices"]["{}"] == 0.0
    print("  PASS: test_empty_bundle_anchors_prices")


def test_ic_ir_hold_at_optimal_prices():
    """No type envies another interval's bundle and nobody pays above value."""
    for name in ("f4_tree3", "f4_tree4", "additive_demo"):
        model, menu, _, schedule = _priced(name)
        report = verify_ic_ir(model, menu, schedule, grid_size=2001)
        assert report.holds is True, (name, [w.to_dict() for w in report.witnesses])
        assert report.details["min_utility"] > -1e-8
    print("  PASS: test_ic_ir_hold_at_optimal_prices")


def test_ic_violation_detected():
    """A cheaper grand bundle tempts types assigned below its interval."""
    model, menu, _, schedule = _priced("f4_tree3")
    grand = Bundle.full(3)
    cheap = _shifted(schedule, lambda b: -0.5 if b == grand else 0.0)
    report = verify_ic_ir(model, menu, cheap, grid_size=401)
    assert report.holds is False
    assert report.witnesses[0].kind == "ic_violation"
    assert report.witnesses[0].bundles[1] == grand
    print("  PASS: test_ic_violation_detected")


def test_ir_violation_detected():
    """Raising every price by 1 leaves the lowest type with negative utility."""
    model, menu, _, schedule = _priced("f4_tree3")
    report = verify_ic_ir(model, menu, _shifted(schedule, lambda b: 1.0), grid_size=201)
    assert report.holds is False
    kinds = [w.kind for w in report.witnesses]
    assert kinds == ["ir_violation"]
    assert abs(report.details["bottom_utility"] + 1.0) < 1e-9
    print("  PASS: test_ir_violation_detected")


def test_revenue_identity():
    """Integral of the virtual value envelope equals the collected prices."""
    for name in ("f4_tree3", "f4_tree4", "additive_demo"):
        model, menu, _, schedule = _priced(name)
        envelope, collected = expected_revenue(model, menu, schedule)
        assert abs(envelope - collected) < 1e-7, name
        assert revenue_identity_holds(envelope, collected)
    assert not revenue_identity_holds(1.0, 1.1)
    print("  PASS: test_revenue_identity")


def test_price_perturbation_lowers_revenue():
    """Moving any single price by 0.05 does not beat the optimal schedule."""
    model, menu, _, schedule = _priced("f4_tree3")
    best = best_response_revenue(model, schedule, grid_size=4001)
    envelope, _ = expected_revenue(model, menu, schedule)
    assert abs(best - envelope) < 1e-3
    for target in menu.kept:
        for eps in (-0.05, 0.05):
            moved = _shifted(schedule, lambda b: eps if b == target else 0.0)
            assert best_response_revenue(model, moved, grid_size=4001) <= best + 1e-3, (target.key, eps)
    print("  PASS: test_price_perturbation_lowers_revenue")


def test_allocation_rows():
    """Types are assigned by interval; payment is the bundle price."""
    model, menu, _, schedule = _priced("f4_tree3")
    rows = allocation_rows(model, menu, schedule, grid_size=11)
    assert len(rows) == 11
    assert rows[0][1] == "1" and rows[-1][1] == "1,2,3"
    assert rows[5][1] == "1,2"
    assert abs(rows[5][3] - 29 / 6) < 1e-9
    assert abs(rows[0][2]) < 1e-9
    print("  PASS: test_allocation_rows")


def test_breakpoints_must_increase():
    """A menu listed out of order has decreasing cuts."""
    model = builtin_fixture("f4_tree3")
    wrong = MenuSolution([Bundle.from_key(k, 3) for k in ("1,3", "1", "1,2")])
    try:
        compute_breakpoints(model, wrong)
        assert False, "decreasing cuts should fail"
    except ConsistencyError:
        pass
    single = MenuSolution([Bundle.full(3)])
    schedule = build_prices(model, single, compute_breakpoints(model, single))
    assert abs(schedule.prices[Bundle.full(3)] - 4.0) < 1e-9
    print("  PASS: test_breakpoints_must_increase")


if __name__ == "__main__":
    print("Running pricing tests...")
    test_three_good_breakpoints_and_prices()
    test_four_good_prices()
    test_empty_bundle_anchors_prices()
    test_ic_ir_hold_at_optimal_prices()
    test_ic_violation_detected()
    test_ir_violation_detected()
    test_revenue_identity()
    test_price_perturbation_lowers_revenue()
    test_allocation_rows()
    test_breakpoints_must_increase()
    print("\nAll pricing tests passed!")
