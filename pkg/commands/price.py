"""price: breakpoints, telescoping prices and the allocation table."""
from bundling.config import RunConfig
from bundling.model import VirtualModel
from bundling.pricing import (
    allocation_rows, best_response_revenue, expected_revenue, price_report, revenue_identity_holds,
)
from bundling.reports import write_csv, write_json
from commands.solve import obtain_menu

ALLOCATION_HEADER = ("t", "bundle", "utility", "payment")


def run_price_command(model: VirtualModel, config: RunConfig) -> dict:
    menu = obtain_menu(model, config)
    _, schedule = price_report(model, menu, config.tolerances)
    envelope, collected = expected_revenue(model, menu, schedule, config.tolerances.quadrature)
    # grid revenue when buyers pick freely at the posted prices
    chosen = best_response_revenue(model, schedule, config.grid_size)
    document = schedule.to_dict()
    document["revenue"] = {
        "envelope": envelope,
        "collected": collected,
        "identity_holds": revenue_identity_holds(envelope, collected),
        "best_response": chosen,
        "best_response_gap": abs(chosen - envelope),
    }
    write_json(config.output_dir / "prices.json", document, config.no_clobber)
    rows = allocation_rows(model, menu, schedule, config.grid_size)
    write_csv(config.output_dir / "allocation.csv", ALLOCATION_HEADER, rows, config.no_clobber)
    return {"prices": document["prices"], "breakpoints": document["breakpoints"], "revenue": envelope}
