"""Tests for the brute-force grid envelope and model generators."""
import sys
from pathlib import Path

# Ensure the project root is in the path
sys.path.insert(0, str(Path(__file__).parent.parent))

from bundling.bundle import Bundle
from bundling.envelope import solve_minimal_menu
from bundling.errors import ArgumentError
from bundling.oracle import (
    builtin_fixture, compare, grid_envelope, menu_envelope_integral,
    random_parametric_model, strict_best_response_set,
)


def test_random_models_agree_with_solver():
    """Kept sets match the grid support on random affine models."""
    for seed in range(200):
        n = 2 + seed % 5
        model = random_parametric_model(seed, n)
        menu = solve_minimal_menu(model)
        env = grid_envelope(model, 10001)
        report = compare(menu, env)
        assert report.holds is True, (seed, n, [w.to_dict() for w in report.witnesses])
        kept = menu_envelope_integral(model, menu.kept)
        full = menu_envelope_integral(model, model.bundles)
        assert abs(kept - full) < 1e-9, (seed, n)
    print("  PASS: test_random_models_agree_with_solver")


def test_additive_support_and_measure():
    """The nested additive menu is exactly the grid support with interval masses."""
    model = builtin_fixture("additive_demo")
    menu = solve_minimal_menu(model)
    env = grid_envelope(model, 10001)
    assert env.support == set(menu.kept)
    assert compare(menu, env).holds is True
    masses = {b.key: m for b, m in env.measure.items()}
    for key, want in {"{}": 0.3, "3": 0.1, "2,3": 0.1, "1,2,3": 0.5}.items():
        assert abs(masses[key] - want) < 1e-3, key
    rows = env.rows()
    assert len(rows) == 10001
    assert rows[0][1] == "{}" and rows[-1][1] == "1,2,3"
    print("  PASS: test_additive_support_and_measure")


def test_tied_envelope_has_no_strict_winner():
    """{1,2} equals max({1}, {2}) everywhere, so no bundle wins strictly."""
    model = builtin_fixture("e6")
    assert strict_best_response_set(model, 2001) == set()
    singles = [Bundle.from_key("1", 2), Bundle.from_key("2", 2)]
    both = menu_envelope_integral(model, singles, 2001)
    everything = menu_envelope_integral(model, model.bundles, 2001)
    assert abs(both - everything) < 1e-9
    assert abs(everything - 0.75) < 1e-6
    print("  PASS: test_tied_envelope_has_no_strict_winner")


def test_forced_solve_mismatch():
    """Forcing past failed assumptions keeps a bundle that never wins strictly."""
    model = builtin_fixture("e5")
    menu = solve_minimal_menu(model, force=True)
    assert "3" in menu.kept_keys
    report = compare(menu, grid_envelope(model, 2001))
    assert report.holds is False
    witness = report.witnesses[0]
    assert witness.kind == "kept_not_in_support"
    assert witness.bundles[0].key == "3"
    assert any("forced" in note for note in report.notes)
    print("  PASS: test_forced_solve_mismatch")


def test_generators_reject_bad_input():
    """Unknown fixtures, tiny grids and out-of-range good counts."""
    for build in (
        lambda: builtin_fixture("nope"),
        lambda: random_parametric_model(0, 0),
        lambda: grid_envelope(builtin_fixture("f4_tree3"), 5),
        lambda: strict_best_response_set(builtin_fixture("f4_tree3"), 5),
        lambda: menu_envelope_integral(builtin_fixture("f4_tree3"), []),
    ):
        try:
            build()
            assert False, "expected ArgumentError"
        except ArgumentError:
            pass
    print("  PASS: test_generators_reject_bad_input")


def test_random_model_is_reproducible():
    """The same seed gives the same parameters."""
    a = random_parametric_model(42, 3)
    b = random_parametric_model(42, 3)
    assert a.g1 == b.g1 and a.g2 == b.g2
    assert a.name == "random-42-3"
    assert random_parametric_model(43, 3).g2 != a.g2
    print("  PASS: test_random_model_is_reproducible")


def test_support_stable_under_grid_refinement():
    """Finer grids find the same winners, and the interval masses settle."""
    for name in ("f4_tree3", "f4_tree4", "additive_demo"):
        model = builtin_fixture(name)
        kept = set(solve_minimal_menu(model).kept)
        finest = grid_envelope(model, 10001)
        for size in (1001, 4001):
            env = grid_envelope(model, size)
            assert env.support == finest.support == kept, (name, size)
            for b, mass in finest.measure.items():
                assert abs(env.measure.get(b, 0.0) - mass) < 2e-3, (name, size, b.key)
        assert strict_best_response_set(model, 1001) == strict_best_response_set(model, 10001)
    print("  PASS: test_support_stable_under_grid_refinement")


if __name__ == "__main__":
    print("Running oracle tests...")
    test_random_models_agree_with_solver()
    test_additive_support_and_measure()
    test_tied_envelope_has_no_strict_winner()
    test_forced_solve_mismatch()
    test_generators_reject_bad_input()
    test_random_model_is_reproducible()
    test_support_stable_under_grid_refinement()
    print("\nAll oracle tests passed!")
