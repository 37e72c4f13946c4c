"""verify: IC/IR on a grid and the two revenue integrals."""
from bundling.config import RunConfig
from bundling.model import VirtualModel
from bundling.pricing import expected_revenue, price_report, revenue_identity_holds, verify_ic_ir
from bundling.reports import write_json
from commands.solve import obtain_menu


def run_verify_command(model: VirtualModel, config: RunConfig) -> dict:
    menu = obtain_menu(model, config)
    _, schedule = price_report(model, menu, config.tolerances)
    ic_ir = verify_ic_ir(model, menu, schedule, config.grid_size, config.tolerances.ic)
    envelope, collected = expected_revenue(model, menu, schedule, config.tolerances.quadrature)
    document = {
        "kept": menu.kept_keys,
        "prices": schedule.to_dict()["prices"],
        "ic_ir": ic_ir.to_dict(),
        "revenue": {
            "envelope_integral": envelope,
            "price_integral": collected,
            "difference": envelope - collected,
            "holds": revenue_identity_holds(envelope, collected),
        },
    }
    write_json(config.output_dir / "verify.json", document, config.no_clobber)
    return {"ic_ir": ic_ir.holds, "revenue_identity": document["revenue"]["holds"]}
