"""Bundling solver - command-line entry point."""
import argparse
import json
import logging
import sys
from pathlib import Path
from typing import Optional, Sequence

from bundling import database
from bundling.config import (
    COMMANDS, DEFAULT_GRID_SIZE, DEFAULT_TOLERANCES, FIXTURE_PREFIX, ORACLE_GRID_SIZE,
    OUTPUT_FILES, RANDOM_PREFIX, RunConfig,
)
from bundling.errors import ArgumentError, BundlingError, RefusalError, ValidationError
from bundling.model import VirtualModel, load_model
from bundling.oracle import builtin_fixture, random_parametric_model
from bundling.reports import dumps
from commands.check import run_check_command
from commands.classify import run_classify_command
from commands.curves import emit_curves, run_curves_command
from commands.history import run_history_command
from commands.oracle import run_oracle_command
from commands.price import run_price_command
from commands.solve import run_solve_command
from commands.verify import run_verify_command

logger = logging.getLogger("bundling.cli")

EXIT_OK = 0
EXIT_REFUSED = 2
EXIT_INVALID = 3
EXIT_INTERNAL = 4

EXIT_CODES = {
    "ok": EXIT_OK,
    "refusal": EXIT_REFUSED,
    "validation": EXIT_INVALID,
    "numeric": EXIT_INTERNAL,
    "ambiguity": EXIT_INTERNAL,
    "logic": EXIT_INTERNAL,
    "io": EXIT_INTERNAL,
}

__all__ = ["EXIT_CODES", "build_parser", "emit_curves", "exit_code_for", "main", "parse_config", "run"]


# ============================================
# ARGUMENTS
# ============================================

class _Parser(argparse.ArgumentParser):
    """argparse exits with 2 on bad usage, which is the refusal code here."""

    def error(self, message):
        raise ArgumentError(message)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="bundling", description="Minimal optimal bundling menus from virtual value models.")
    parser.add_argument("command", choices=COMMANDS)
    parser.add_argument("--model", default=None,
                        help=f"model JSON path, {FIXTURE_PREFIX}NAME, or '{RANDOM_PREFIX}'")
    parser.add_argument("--grid", type=int, default=None,
                        help=f"grid size (default {DEFAULT_GRID_SIZE}, oracle {ORACLE_GRID_SIZE})")
    parser.add_argument("--force", action="store_true", help="solve even when assumption checks fail")
    parser.add_argument("--out", type=Path, default=Path("out"), help="output directory")
    parser.add_argument("--tol-ic", type=float, default=None)
    parser.add_argument("--tol-root", type=float, default=None)
    parser.add_argument("--seed", type=int, default=0, help="seed for --model random")
    parser.add_argument("--goods", type=int, default=4, help="number of goods for --model random")
    parser.add_argument("--menu", type=Path, default=None, help="reuse a menu.json from an earlier solve")
    parser.add_argument("--no-clobber", action="store_true", help="refuse to overwrite output files")
    parser.add_argument("--no-record", action="store_true", help="skip the run ledger")
    parser.add_argument("--run", type=int, default=None, dest="run_id", help="history: show one recorded run")
    parser.add_argument("-v", "--verbose", action="count", default=0)
    return parser


def parse_config(argv: Optional[Sequence[str]] = None) -> tuple[RunConfig, int]:
    """Parse flags into a validated RunConfig plus the verbosity level."""
    args = build_parser().parse_args(argv)
    if args.model is None and args.command != "history":
        raise ArgumentError(f"--model is required for '{args.command}'")
    grid = args.grid
    if grid is None:
        grid = ORACLE_GRID_SIZE if args.command == "oracle" else DEFAULT_GRID_SIZE
    tolerances = DEFAULT_TOLERANCES.with_overrides(ic=args.tol_ic, root=args.tol_root, crossing=args.tol_root)
    config = RunConfig(
        model_path=args.model or "",
        command=args.command,
        grid_size=grid,
        tolerances=tolerances,
        force=args.force,
        output_dir=args.out,
        seed=args.seed,
        goods=args.goods,
        menu_path=args.menu,
        no_clobber=args.no_clobber,
        record=not args.no_record,
        run_id=args.run_id,
    )
    return config.validate(), args.verbose


def configure_logging(verbosity: int) -> None:
    level = logging.WARNING if verbosity <= 0 else logging.INFO if verbosity == 1 else logging.DEBUG
    logging.basicConfig(level=level, stream=sys.stderr,
                        format="%(asctime)s %(levelname)s %(name)s: %(message)s")


# ============================================
# DISPATCH
# ============================================

def load_run_model(config: RunConfig) -> VirtualModel:
    if config.is_fixture:
        return builtin_fixture(config.fixture_name, config.tolerances)
    if config.model_path == RANDOM_PREFIX:
        return random_parametric_model(config.seed, config.goods, tolerances=config.tolerances)
    return load_model(Path(config.model_path), config.tolerances)


def _check_clobber(config: RunConfig) -> None:
    if not config.no_clobber:
        return
    existing = [name for name in OUTPUT_FILES[config.command] if (config.output_dir / name).exists()]
    if existing:
        raise ValidationError(f"Refusing to overwrite {existing} in {config.output_dir} (--no-clobber)")


def exit_code_for(error: BaseException) -> int:
    if isinstance(error, RefusalError):
        return EXIT_REFUSED
    if isinstance(error, ValidationError):
        return EXIT_INVALID
    return EXIT_INTERNAL


def _error_payload(error: BaseException) -> dict:
    kind = error.kind if isinstance(error, BundlingError) else "io"
    payload = {"error": kind, "message": str(error), "exit_code": exit_code_for(error)}
    if isinstance(error, RefusalError) and error.report is not None:
        payload["report"] = error.report.to_dict()
    residual = getattr(error, "residual", None)
    if residual is not None:
        payload["residual"] = residual
    return payload


def _dispatch(config: RunConfig) -> dict:
    command_map = {
        "solve": run_solve_command,
        "classify": run_classify_command,
        "price": run_price_command,
        "verify": run_verify_command,
        "check": run_check_command,
        "oracle": run_oracle_command,
        "curves": run_curves_command,
    }
    _check_clobber(config)
    if config.command == "history":
        return run_history_command(config)
    model = load_run_model(config)
    logger.info(f"{config.command}: {model.describe()} ({len(model.bundles)} bundles)")
    return command_map[config.command](model, config)


def run(config: RunConfig) -> int:
    """Execute one command; returns the process exit code."""
    database.configure(config.output_dir)
    summary: dict = {}
    try:
        summary = _dispatch(config)
        exit_code = EXIT_OK
        summary["outputs"] = [str(config.output_dir / name) for name in OUTPUT_FILES[config.command]]
        print(dumps(summary))
    except (BundlingError, OSError) as e:
        payload = _error_payload(e)
        exit_code = payload["exit_code"]
        if isinstance(e, RefusalError):
            logger.warning(f"Refused {config.command} on {config.model_path}: {e}")
        else:
            logger.error(f"{config.command} failed: {e}")
        summary = {"error": payload["error"], "message": payload["message"]}
        print(json.dumps(payload, default=str), file=sys.stderr)
    if config.record:
        database.record_run(config.command, config.model_path, exit_code, summary)
    return exit_code


def main(argv: Optional[Sequence[str]] = None) -> int:
    try:
        config, verbosity = parse_config(argv)
    except BundlingError as e:
        print(json.dumps(_error_payload(e)), file=sys.stderr)
        return exit_code_for(e)
    configure_logging(verbosity)
    return run(config)


if __name__ == "__main__":
    sys.exit(main())
