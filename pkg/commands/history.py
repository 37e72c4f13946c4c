"""history: dump the run ledger."""
from bundling import database
from bundling.config import RunConfig
from bundling.errors import ArgumentError
from bundling.reports import write_json

HISTORY_LIMIT = 100


def run_history_command(config: RunConfig) -> dict:
    totals = database.get_run_stats()
    if config.run_id is not None:
        run = database.get_run(config.run_id)
        if run is None:
            raise ArgumentError(f"No recorded run with id {config.run_id}")
        runs = [run]
    else:
        runs = database.get_runs(HISTORY_LIMIT)
    write_json(config.output_dir / "history.json", {"runs": runs, "totals": totals}, config.no_clobber)
    return {"runs": len(runs), "total": totals["total"]}
