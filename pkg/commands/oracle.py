"""oracle: brute-force grid envelope compared with the solver's menu."""
import logging

from bundling.config import RunConfig
from bundling.model import VirtualModel
from bundling.oracle import compare, grid_envelope, menu_envelope_integral
from bundling.reports import write_csv, write_json
from commands.solve import obtain_menu

logger = logging.getLogger(__name__)

ENVELOPE_HEADER = ("t", "winner", "envelope")


def run_oracle_command(model: VirtualModel, config: RunConfig) -> dict:
    menu = obtain_menu(model, config)
    env = grid_envelope(model, config.grid_size, config.tolerances.tie)
    report = compare(menu, env, config.tolerances.borderline)
    report.details["measure"] = {b.key: m for b, m in sorted(env.measure.items())}
    report.details["kept_envelope_integral"] = menu_envelope_integral(model, menu.kept, config.grid_size)
    report.details["full_envelope_integral"] = menu_envelope_integral(model, model.bundles, config.grid_size)
    write_csv(config.output_dir / "envelope.csv", ENVELOPE_HEADER, env.rows(), config.no_clobber)
    write_json(config.output_dir / "compare.json", report.to_dict(), config.no_clobber)
    if not report.holds:
        logger.warning(f"Oracle disagrees with the solver on {model.describe()}")
    return {"agrees": report.holds, "kept": menu.kept_keys, "support": sorted(b.key for b in env.support)}
