"""classify: label the solved menu as pure, nested, tree or other."""
from bundling.config import RunConfig
from bundling.model import VirtualModel
from bundling.reports import write_json
from bundling.structure import classify
from commands.solve import obtain_menu


def run_classify_command(model: VirtualModel, config: RunConfig) -> dict:
    menu = obtain_menu(model, config)
    label = classify(menu.kept)
    document = label.to_dict()
    document["kept"] = menu.kept_keys
    write_json(config.output_dir / "structure.json", document, config.no_clobber)
    return document
