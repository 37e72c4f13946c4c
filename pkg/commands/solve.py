"""solve: the minimal optimal menu of a model."""
import logging

from bundling.config import RunConfig
from bundling.errors import ValidationError
from bundling.envelope import MenuSolution, menu_from_dict, solve_minimal_menu
from bundling.model import VirtualModel
from bundling.reports import read_json, write_json

logger = logging.getLogger(__name__)


def obtain_menu(model: VirtualModel, config: RunConfig) -> MenuSolution:
    """Reload the menu given with --menu, or solve the model."""
    if config.menu_path is not None:
        menu = menu_from_dict(read_json(config.menu_path), model.n)
        if menu.n != model.n or not all(model.has_bundle(b) for b in menu.kept):
            raise ValidationError(f"Menu {menu.kept_keys} does not belong to {model.describe()}")
        logger.info(f"Loaded menu {menu.kept_keys} from {config.menu_path}")
        return menu
    return solve_minimal_menu(model, force=config.force, tolerances=config.tolerances)


def run_solve_command(model: VirtualModel, config: RunConfig) -> dict:
    menu = solve_minimal_menu(model, force=config.force, tolerances=config.tolerances)
    document = menu.to_dict()
    document["model"] = model.describe()
    document["assumptions"] = [r.to_dict() for r in menu.reports]
    write_json(config.output_dir / "menu.json", document, config.no_clobber)
    return {"kept": menu.kept_keys, "iterations": menu.iterations, "forced": menu.forced}
