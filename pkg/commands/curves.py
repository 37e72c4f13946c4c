"""curves: virtual value curves of the menu and their envelope, as CSV plot data."""
from pathlib import Path

import numpy as np

from bundling.config import RunConfig
from bundling.envelope import MenuSolution
from bundling.errors import ArgumentError
from bundling.model import VirtualModel, virtual_matrix
from bundling.reports import write_csv
from commands.solve import obtain_menu


def emit_curves(model: VirtualModel, menu: MenuSolution, grid_size: int, path: Path,
                no_clobber: bool = False) -> Path:
    """One row per grid type: t, phi of each menu bundle, then the pointwise envelope."""
    if grid_size < 2:
        raise ArgumentError(f"grid_size must be >= 2, got {grid_size}")
    grid = np.linspace(model.t_lo, model.t_hi, grid_size)
    values = virtual_matrix(model, menu.kept, grid)
    header = ["t"] + [f"phi[{b.key}]" for b in menu.kept] + ["envelope"]
    rows = np.vstack([grid, values, values.max(axis=0)]).T
    return write_csv(path, header, ([float(x) for x in row] for row in rows), no_clobber)


def run_curves_command(model: VirtualModel, config: RunConfig) -> dict:
    menu = obtain_menu(model, config)
    path = emit_curves(model, menu, config.grid_size, config.output_dir / "curves.csv", config.no_clobber)
    return {"path": str(path), "columns": len(menu.kept) + 2, "rows": config.grid_size}
