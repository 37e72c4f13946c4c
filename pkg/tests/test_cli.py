"""Tests for the command-line surface: outputs, exit codes and the run ledger."""
import contextlib
import csv
import io
import json
import sys
import tempfile
from pathlib import Path

# Ensure the project root is in the path
sys.path.insert(0, str(Path(__file__).parent.parent))

from cli import main


def _run(*argv):
    """Run the CLI; returns (exit code, stdout, stderr)."""
    out, err = io.StringIO(), io.StringIO()
    with contextlib.redirect_stdout(out), contextlib.redirect_stderr(err):
        code = main(list(argv))
    return code, out.getvalue(), err.getvalue()


def _outdir():
    return Path(tempfile.mkdtemp())


def _read_csv(path):
    with open(path, newline="") as handle:
        return list(csv.reader(handle))


def test_solve_writes_menu():
    """solve prints a summary and writes menu.json with its assumption reports."""
    out = _outdir()
    code, stdout, _ = _run("solve", "--model", "fixture:f4_tree4", "--out", str(out), "--no-record")
    assert code == 0
    summary = json.loads(stdout)
    assert summary["kept"] == ["1", "1,4", "1,2,3", "1,2,3,4"]
    assert summary["outputs"] == [str(out / "menu.json")]
    menu = json.loads((out / "menu.json").read_text())
    assert menu["kept"] == summary["kept"]
    assert {r["name"] for r in menu["assumptions"]} >= {"monotonic_differences", "scd_star"}
    print("  PASS: test_solve_writes_menu")


def test_solve_refusal_exit_code():
    """A failed assumption exits 2 with the failing report on stderr; --force overrides."""
    out = _outdir()
    code, stdout, stderr = _run("solve", "--model", "fixture:e6", "--out", str(out), "--no-record")
    assert code == 2
    assert stdout == ""
    payload = json.loads(stderr.strip().splitlines()[-1])
    assert payload["error"] == "refusal"
    assert payload["exit_code"] == 2
    assert payload["report"]["holds"] is False
    assert not (out / "menu.json").exists()
    code, _, _ = _run("solve", "--model", "fixture:e6", "--force", "--out", str(out), "--no-record")
    assert code == 0
    assert "warning" in json.loads((out / "menu.json").read_text())
    print("  PASS: test_solve_refusal_exit_code")


def test_classify_reuses_menu():
    """classify --menu reads an earlier solve instead of solving again."""
    out = _outdir()
    assert _run("solve", "--model", "fixture:f4_tree3", "--out", str(out), "--no-record")[0] == 0
    code, _, _ = _run("classify", "--model", "fixture:f4_tree3", "--menu", str(out / "menu.json"),
                      "--out", str(out), "--no-record")
    assert code == 0
    structure = json.loads((out / "structure.json").read_text())
    assert structure["label"] == "tree"
    assert structure["root"] == "1"
    assert structure["kept"] == ["1", "1,2", "1,3", "1,2,3"]
    code, _, _ = _run("classify", "--model", "fixture:f4_tree4", "--menu", str(out / "menu.json"),
                      "--out", str(out), "--no-record")
    assert code == 3
    print("  PASS: test_classify_reuses_menu")


def test_price_outputs():
    """prices.json holds the telescoping prices; allocation.csv one row per grid type."""
    out = _outdir()
    code, _, _ = _run("price", "--model", "fixture:f4_tree3", "--grid", "101", "--out", str(out), "--no-record")
    assert code == 0
    prices = json.loads((out / "prices.json").read_text())
    assert abs(prices["prices"]["1,2,3"] - 5.5) < 1e-9
    assert len(prices["breakpoints"]) == 3
    revenue = prices["revenue"]
    assert revenue["identity_holds"] is True
    assert abs(revenue["envelope"] - revenue["collected"]) < 1e-7
    assert revenue["best_response_gap"] < 0.1
    rows = _read_csv(out / "allocation.csv")
    assert rows[0] == ["t", "bundle", "utility", "payment"]
    assert len(rows) == 102
    assert rows[1][1] == "1" and rows[-1][1] == "1,2,3"
    print("  PASS: test_price_outputs")


def test_verify_outputs():
    """IC/IR and the revenue identity both hold on the tree fixture."""
    out = _outdir()
    code, stdout, _ = _run("verify", "--model", "fixture:f4_tree3", "--grid", "501", "--out", str(out), "--no-record")
    assert code == 0
    assert json.loads(stdout)["ic_ir"] is True
    report = json.loads((out / "verify.json").read_text())
    assert report["ic_ir"]["holds"] is True
    assert report["revenue"]["holds"] is True
    assert abs(report["revenue"]["difference"]) < 1e-7
    print("  PASS: test_verify_outputs")


def test_check_outputs():
    """check reports every condition, undecidable ones as null."""
    out = _outdir()
    code, stdout, _ = _run("check", "--model", "fixture:f4_tree3", "--out", str(out), "--no-record")
    assert code == 0
    verdicts = json.loads(stdout)
    assert verdicts["full_tree"] is True
    assert verdicts["tree_or_nested"] is True
    assert verdicts["least_favorite_tree"] is True
    assert verdicts["pure_bundling"] is False
    assert verdicts["additive_nested"] is None
    document = json.loads((out / "conditions.json").read_text())
    assert [c["name"] for c in document["conditions"]][:3] == ["monotonic_differences", "scd_star", "normalization"]
    print("  PASS: test_check_outputs")


def test_oracle_outputs():
    """The grid envelope agrees with the additive menu."""
    out = _outdir()
    code, stdout, _ = _run("oracle", "--model", "fixture:additive_demo", "--grid", "2001",
                           "--out", str(out), "--no-record")
    assert code == 0
    summary = json.loads(stdout)
    assert summary["agrees"] is True
    assert summary["support"] == sorted(summary["kept"])
    rows = _read_csv(out / "envelope.csv")
    assert rows[0] == ["t", "winner", "envelope"]
    assert len(rows) == 2002
    compare = json.loads((out / "compare.json").read_text())
    assert compare["holds"] is True
    assert abs(compare["details"]["kept_envelope_integral"] - compare["details"]["full_envelope_integral"]) < 1e-12
    print("  PASS: test_oracle_outputs")


def test_curves_outputs():
    """One column per kept bundle plus t and the envelope."""
    out = _outdir()
    code, _, _ = _run("curves", "--model", "fixture:f4_tree3", "--grid", "101", "--out", str(out), "--no-record")
    assert code == 0
    rows = _read_csv(out / "curves.csv")
    assert len(rows) == 102
    assert rows[0] == ["t", "phi[1]", "phi[1,2]", "phi[1,3]", "phi[1,2,3]", "envelope"]
    out = _outdir()
    assert _run("curves", "--model", "fixture:f4_tree4", "--grid", "11", "--out", str(out), "--no-record")[0] == 0
    rows = _read_csv(out / "curves.csv")
    assert rows[-1][0] == "1" and rows[-1][-1] == "7"
    print("  PASS: test_curves_outputs")


def test_random_model():
    """--model random builds a seeded parametric model."""
    out = _outdir()
    code, stdout, _ = _run("solve", "--model", "random", "--seed", "3", "--goods", "3",
                           "--out", str(out), "--no-record")
    assert code == 0
    assert json.loads((out / "menu.json").read_text())["model"].startswith("random-3-3")
    assert json.loads(stdout)["kept"]
    print("  PASS: test_random_model")


def test_no_clobber():
    """An existing output file is left alone and the run exits 3."""
    out = _outdir()
    args = ("solve", "--model", "fixture:f4_tree3", "--out", str(out), "--no-record", "--no-clobber")
    assert _run(*args)[0] == 0
    before = (out / "menu.json").read_text()
    code, _, stderr = _run(*args)
    assert code == 3
    assert json.loads(stderr.strip().splitlines()[-1])["error"] == "validation"
    assert (out / "menu.json").read_text() == before
    print("  PASS: test_no_clobber")


def test_bad_arguments():
    """Usage errors, unknown fixtures and bad tolerances exit 3."""
    out = str(_outdir())
    cases = [
        ("explode", "--model", "fixture:f4_tree3"),
        ("solve",),
        ("solve", "--model", "fixture:f4_tree3", "--grid", "5", "--out", out),
        ("solve", "--model", "fixture:nope", "--out", out, "--no-record"),
        ("solve", "--model", "fixture:f4_tree3", "--tol-ic", "-1", "--out", out),
        ("solve", "--model", str(Path(out) / "missing.json"), "--out", out, "--no-record"),
        ("solve", "--model", "random", "--goods", "0", "--out", out),
    ]
    for argv in cases:
        code, _, stderr = _run(*argv)
        assert code == 3, (argv, code, stderr)
        assert json.loads(stderr.strip().splitlines()[-1])["exit_code"] == 3
    print("  PASS: test_bad_arguments")


def test_history_ledger():
    """Recorded runs show up in history.json with counts per command and exit code."""
    out = _outdir()
    _run("solve", "--model", "fixture:f4_tree3", "--out", str(out))
    _run("solve", "--model", "fixture:e6", "--out", str(out))
    code, stdout, _ = _run("history", "--out", str(out))
    assert code == 0
    assert json.loads(stdout)["total"] == 2
    history = json.loads((out / "history.json").read_text())
    assert history["totals"]["by_command"] == {"solve": 2}
    assert history["totals"]["by_exit_code"] == {"0": 1, "2": 1}
    assert [r["exit_code"] for r in history["runs"]] == [2, 0]
    assert history["runs"][1]["summary"]["kept"] == ["1", "1,2", "1,3", "1,2,3"]
    print("  PASS: test_history_ledger")


def test_malformed_model_sections():
    """Model sections of the wrong JSON type exit 3 with a JSON error naming the field."""
    out = _outdir()
    base = {"n": 2, "g1": {"1": 1.0, "2": 1.0, "1,2": 2.0}, "g2": {"1": 0.0, "2": 0.0, "1,2": 0.0}}
    for field, bad in (("g1", [1, 2]), ("distribution", "uniform"), ("h1", "identity")):
        doc = dict(base)
        doc[field] = bad
        path = out / f"bad_{field}.json"
        path.write_text(json.dumps(doc))
        code, stdout, stderr = _run("solve", "--model", str(path), "--out", str(out), "--no-record")
        assert code == 3, (field, stderr)
        assert stdout == ""
        payload = json.loads(stderr.strip().splitlines()[-1])
        assert payload["error"] == "validation" and payload["exit_code"] == 3
        assert field in payload["message"]
    print("  PASS: test_malformed_model_sections")


def test_history_single_run():
    """history --run shows one recorded run; an unknown id exits 3."""
    out = _outdir()
    _run("solve", "--model", "fixture:f4_tree3", "--out", str(out))
    code, stdout, _ = _run("history", "--run", "1", "--out", str(out))
    assert code == 0
    assert json.loads(stdout)["runs"] == 1
    history = json.loads((out / "history.json").read_text())
    assert [r["id"] for r in history["runs"]] == [1]
    assert history["runs"][0]["command"] == "solve"
    assert history["runs"][0]["exit_code"] == 0
    code, _, stderr = _run("history", "--run", "99", "--out", str(out), "--no-record")
    assert code == 3, stderr
    print("  PASS: test_history_single_run")


def test_import_check_keeps_error_classes():
    """The validation runner's import pass leaves exception classes usable by the suites."""
    import bundling.errors as errors
    from bundling.bundle import Bundle
    from tests.validate_all import check_all_imports

    before = errors.ValidationError
    with contextlib.redirect_stdout(io.StringIO()):
        assert check_all_imports() is True
    assert sys.modules["bundling.errors"].ValidationError is before
    try:
        Bundle(8, 3)
        assert False, "expected a validation error"
    except before:
        pass
    print("  PASS: test_import_check_keeps_error_classes")


if __name__ == "__main__":
    print("Running CLI tests...")
    test_solve_writes_menu()
    test_solve_refusal_exit_code()
    test_classify_reuses_menu()
    test_price_outputs()
    test_verify_outputs()
    test_check_outputs()
    test_oracle_outputs()
    test_curves_outputs()
    test_random_model()
    test_no_clobber()
    test_bad_arguments()
    test_history_ledger()
    test_malformed_model_sections()
    test_history_single_run()
    test_import_check_keeps_error_classes()
    print("\nAll CLI tests passed!")
