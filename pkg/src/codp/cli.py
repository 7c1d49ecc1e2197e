"""``codp`` command line: fit, locate, sweep and simulate.

Exit codes: 0 success, 2 infeasible deadline, 3 input error, 4 internal error.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import sys
from dataclasses import dataclass, field
from pathlib import Path

from .costs import Direction, build_fitted_model, component_series, monotonicity_diagnostic, total_cost
from .exceptions import CodpError, InfeasibleDeadlineError, ValidationError
from .fitting import difference_profile, select_model
from .inventory import ServiceParams, buffer_plan
from .io import Scenario, load, write_stage_table
from .optimizer import ADVISORY, RegimeNote, deadline_sweep, optimize_discrete, optimize_relaxed
from .production import ProductionLine, codp_candidates
from .simulation import DemandFamily, DemandModel, simulate, validate_plan

EXIT_OK = 0
EXIT_INFEASIBLE = 2
EXIT_INPUT = 3
EXIT_INTERNAL = 4

log = logging.getLogger("codp")


@dataclass
class CommandResult:
    name: str
    report: dict
    text: str
    plots: dict[str, tuple[list[str], list[list]]] = field(default_factory=dict)
    exit_code: int = EXIT_OK


def _fmt(x) -> str:
    return f"{x:.4f}" if isinstance(x, float) else str(x)


def _table(header, rows) -> str:
    cells = [list(map(str, header))] + [[_fmt(v) for v in row] for row in rows]
    widths = [max(len(r[i]) for r in cells) for i in range(len(header))]
    return "\n".join("  ".join(c.rjust(w) for c, w in zip(r, widths)) for r in cells)


def _params(scenario: Scenario) -> ServiceParams:
    return ServiceParams(service_level=scenario.service_level, review_period=scenario.review_period)


def cmd_fit(line: ProductionLine, scenario: Scenario) -> CommandResult:
    series = component_series(line, scenario.volume)
    report, plots, parts = {"series": {}}, {}, []
    for name in ("modification", "generic", "custom"):
        s = series[name]
        try:
            diff = difference_profile(s, scenario.fit.cv_threshold)
            curve = select_model(s, scenario.fit.families)
        except CodpError as exc:
            raise CodpError(f"series {name!r}: {exc}") from exc
        fitted = curve(s.xs)
        report["series"][name] = {
            "family": curve.family.value,
            "coefficients": list(curve.coefficients),
            "r_squared": curve.r_squared,
            "suggested_family": diff.suggested_family.value,
            "first_differences": list(diff.first_differences),
            "second_differences": list(diff.second_differences),
            "successive_ratios": list(diff.successive_ratios),
        }
        plots[f"fit_{name}.csv"] = (["p", "observed", "fitted"],
                                    [[int(x), y, float(f)] for x, y, f in zip(s.x, s.y, fitted)])
        coefs = ", ".join(f"{c:.6g}" for c in curve.coefficients)
        parts.append(
            f"{name:>12}: {curve.family.value:<11} coef=({coefs})  R2={curve.r_squared:.6f}  "
            f"difference analysis suggests {diff.suggested_family.value}"
        )
    text = "Cost curve fits over CODP positions " + f"{series['generic'].x[0]:g}..{series['generic'].x[-1]:g}\n"
    return CommandResult("fit", report, text + "\n".join(parts) + "\n", plots)


def _single_deadline(scenario: Scenario) -> float:
    if len(scenario.deadlines) != 1:
        raise ValidationError(f"locate needs exactly one deadline, scenario has {len(scenario.deadlines)}")
    return scenario.deadlines[0]


def cmd_locate(line: ProductionLine, scenario: Scenario) -> CommandResult:
    deadline = _single_deadline(scenario)
    params = _params(scenario)
    rows = [total_cost(line, p, None, scenario.volume) for p in codp_candidates(line)]
    out = []
    report: dict = {"deadline": deadline}
    try:
        rec = optimize_discrete(line, deadline, scenario.volume)
    except InfeasibleDeadlineError as exc:
        verdict, rec = exc.verdict, None
    else:
        verdict = rec.verdict
    window = set(verdict.window)
    report["verdict"] = {
        "regime": verdict.regime.value,
        "window": list(verdict.window),
        "min_custom_time": verdict.min_custom_time,
        "total_time": verdict.total_time,
        "make_to_stock": verdict.make_to_stock,
    }
    out.append(f"Deadline {deadline:g}: regime {verdict.regime.value}, window {list(verdict.window)}, "
               f"min custom time {verdict.min_custom_time:g}, line time {verdict.total_time:g}")
    note = rec.regime_note if rec else RegimeNote.SHORT
    report["regime_note"] = note.value
    report["advisory"] = ADVISORY[note]
    out.append(f"Advice: {ADVISORY[note]}")

    header = ["p", "generic", "holding", "custom", "reconfig", "total", "feasible"]
    table = [[r.position, r.generic_processing, r.wip_holding, r.custom_incremental,
              r.reconfiguration, r.total, "yes" if r.position in window else "no"] for r in rows]
    report["costs"] = [r.as_dict() | {"feasible": r.position in window} for r in rows]
    out.append("")
    out.append(_table(header, table))

    if rec is not None:
        report["best"] = rec.best.as_dict()
        report["second_best"] = rec.second_best.as_dict() if rec.second_best else None
        out.append("")
        out.append(f"Best CODP: after stage {rec.best.position} (total {rec.best.total:.4f})")
        if rec.second_best:
            out.append(f"Second best: after stage {rec.second_best.position} (total {rec.second_best.total:.4f})")
        else:
            out.append("Second best: none (single feasible position)")
        plan = buffer_plan(line, rec.best.position, params)
        report["buffer_plan"] = {
            "replenishment_cycle": plan.replenishment_cycle,
            "safety_stock": plan.safety_stock,
            "timing_buffer": plan.timing_buffer,
            "order_up_to": plan.order_up_to,
            "average_inventory": plan.average_inventory,
            "max_inventory": plan.max_inventory,
            "z": plan.z,
        }
        out.append(f"Buffer plan: lead={plan.replenishment_cycle:g}  SS={plan.safety_stock:.4f}  "
                   f"S={plan.order_up_to:.4f}  avg={plan.average_inventory:.4f}  max={plan.max_inventory:.4f}  "
                   f"(z={plan.z:.4f}, timing buffer {plan.timing_buffer:.4f})")
    else:
        report["best"] = report["second_best"] = None

    candidates = codp_candidates(line)
    if len(candidates) >= 3:
        model = build_fitted_model(line, scenario.volume, None, scenario.fit.families)
        lo, hi = candidates[0], candidates[-1]
        diags = {}
        out.append("")
        out.append("Monotonicity of fitted cost curves:")
        for name, curve, expected in (
            ("generic", model.generic_curve, Direction.INCREASING),
            ("custom", model.custom_curve, Direction.DECREASING),
            ("modification", model.modification_curve, Direction.INCREASING),
        ):
            diag = monotonicity_diagnostic(curve, lo, hi, expected)
            diags[name] = {"expected": expected.value, "verdict": diag.verdict,
                           "violations": [list(v) for v in diag.violations]}
            out.append(f"  {name:>12} expected {expected.value:<10} {diag.verdict}"
                       + (f"  violations {[tuple(round(a, 3) for a in v) for v in diag.violations]}"
                          if diag.violations else ""))
        report["monotonicity"] = diags
        if rec is not None:
            relaxed = optimize_relaxed(model, verdict)
            report["relaxed"] = {"p_star": relaxed.p_star, "fitted_cost": relaxed.fitted_cost,
                                 "rounded_position": relaxed.best.position}
            out.append(f"Continuous relaxation: p*={relaxed.p_star:.4f}, rounded to stage "
                       f"{relaxed.best.position} by the discrete cost")

    code = EXIT_OK if rec is not None else EXIT_INFEASIBLE
    return CommandResult("locate", report, "\n".join(out) + "\n", {}, code)


def cmd_sweep(line: ProductionLine, scenario: Scenario) -> CommandResult:
    if len(scenario.deadlines) < 2:
        raise ValidationError("sweep needs at least two deadlines")
    entries = deadline_sweep(line, scenario.deadlines, scenario.volume)
    candidates = codp_candidates(line)
    costs = [total_cost(line, p, None, scenario.volume) for p in candidates]
    rows, report_rows, plots = [], [], {}
    for i, e in enumerate(entries):
        rec = e.recommendation
        note = rec.regime_note if rec else RegimeNote.SHORT
        best = rec.best.position if rec else None
        total = rec.best.total if rec else None
        rows.append([e.deadline, e.verdict.regime.value, note.value,
                     best if best is not None else "-", total if total is not None else "-"])
        report_rows.append({"deadline": e.deadline, "regime": e.verdict.regime.value, "note": note.value,
                            "best": best, "total": total,
                            "second_best": rec.second_best.position if rec and rec.second_best else None,
                            "make_to_stock": e.verdict.make_to_stock})
        window = set(e.verdict.window)
        plots[f"cost_curve_{i:02d}.csv"] = (
            ["deadline", "p", "total", "feasible"],
            [[e.deadline, c.position, c.total, int(c.position in window)] for c in costs],
        )
    plots["sweep.csv"] = (["deadline", "regime", "best_p", "total"],
                          [[r["deadline"], r["regime"], r["best"] if r["best"] is not None else "",
                            r["total"] if r["total"] is not None else ""] for r in report_rows])
    text = "Deadline sweep\n" + _table(["deadline", "regime", "note", "best p", "total"], rows) + "\n"
    return CommandResult("sweep", {"rows": report_rows}, text, plots)


def _sim_position(line: ProductionLine, scenario: Scenario) -> int:
    # explicit position, else the optimum under the most generous deadline
    if scenario.sim.position is not None:
        return scenario.sim.position
    try:
        return optimize_discrete(line, max(scenario.deadlines), scenario.volume).best.position
    except InfeasibleDeadlineError:
        candidates = codp_candidates(line)
        if not candidates:
            raise ValidationError("no CODP candidate to simulate") from None
        return candidates[-1]


def cmd_simulate(line: ProductionLine, scenario: Scenario, n_jobs: int | None = None) -> CommandResult:
    if scenario.sim is None:
        raise ValidationError("simulate needs a 'sim' block in the scenario")
    p = _sim_position(line, scenario)
    plan = buffer_plan(line, p, _params(scenario))
    family = scenario.sim.demand or (DemandFamily.NORMAL if line.demand_std > 0 else DemandFamily.DETERMINISTIC)
    demand = DemandModel(family, line.demand_rate, line.demand_std)
    sim = simulate(line, plan, demand, scenario.sim.config, n_jobs=n_jobs)
    check = validate_plan(sim, plan)
    report = {
        "position": p,
        "demand": family.value,
        "plan": {"order_up_to": plan.order_up_to, "safety_stock": plan.safety_stock,
                 "average_inventory": plan.average_inventory, "replenishment_cycle": plan.replenishment_cycle},
        "simulation": sim.to_dict(),
        "validation": {c.name: {"observed": c.observed, "expected": c.expected, "delta": c.delta,
                                "tolerance": c.tolerance, "passed": c.passed} for c in check.checks},
        "validation_passed": check.passed,
    }
    cfg = scenario.sim.config
    lines = [
        f"Simulated buffer after stage {p}: {cfg.replications} replications x "
        f"{cfg.horizon - cfg.warmup} periods (warmup {cfg.warmup}, seed {cfg.seed}), {family.value} demand",
        f"Plan: S={plan.order_up_to:.4f}  SS={plan.safety_stock:.4f}  avg={plan.average_inventory:.4f}",
        f"Cycle service level {sim.cycle_service_level:.4f}  fill rate {sim.fill_rate:.4f}",
        f"Average inventory {sim.average_inventory:.4f}  max observed {sim.max_inventory_observed:.4f}  "
        f"stockout periods {sim.stockout_periods}",
        f"Mean custom lead time {sim.mean_custom_lead_time:.4f}",
        "Validation:",
    ]
    for c in check.checks:
        lines.append(f"  {c.name:<20} observed {c.observed:.4f} expected {c.expected:.4f} "
                     f"delta {c.delta:+.4f} tol {c.tolerance:.4f}  {'PASS' if c.passed else 'FAIL'}")
    plots = {"inventory_trajectory.csv": (["period", "start_on_hand", "end_on_hand", "backorders"],
                                          [list(row) for row in sim.trajectory])}
    return CommandResult("simulate", report, "\n".join(lines) + "\n", plots)


COMMANDS = {"fit": cmd_fit, "locate": cmd_locate, "sweep": cmd_sweep, "simulate": cmd_simulate}


def render_csv(header, rows) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([repr(v) if isinstance(v, float) else v for v in row])
    return buf.getvalue()


def render_report(result: CommandResult, machine_readable: bool) -> str:
    if machine_readable:
        doc = {"command": result.name, "exit_code": result.exit_code, **result.report}
        return json.dumps(doc, sort_keys=True, indent=2) + "\n"
    return result.text


def write_outputs(result: CommandResult, line: ProductionLine, out: Path, machine_readable: bool) -> None:
    out.mkdir(parents=True, exist_ok=True)
    name = "report.json" if machine_readable else "report.txt"
    (out / f"{result.name}_{name}").write_text(render_report(result, machine_readable), encoding="utf-8")
    for fname, (header, rows) in result.plots.items():
        (out / fname).write_text(render_csv(header, rows), encoding="utf-8")
    if result.name == "fit":
        write_stage_table(line, out / "stages.csv")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="codp", description="Locate the customer order decoupling point")
    parser.add_argument("command", choices=sorted(COMMANDS))
    parser.add_argument("--stages", required=True, help="stage table (CSV)")
    parser.add_argument("--scenario", required=True, help="scenario config (YAML or JSON)")
    parser.add_argument("--out", type=Path, help="directory for the report and plot-data files")
    parser.add_argument("--machine-readable", action="store_true", help="emit the report as JSON")
    parser.add_argument("--jobs", type=int, default=None, help="threads for simulation replications")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.WARNING, format="%(levelname)s: %(message)s")
    try:
        line, scenario = load(args.stages, args.scenario)
        if args.command == "simulate":
            result = cmd_simulate(line, scenario, n_jobs=args.jobs)
        else:
            result = COMMANDS[args.command](line, scenario)
    except (CodpError, FileNotFoundError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except Exception as exc:  # noqa: BLE001 - mapped to the internal-error exit code
        log.exception("internal error")
        print(f"internal error: {exc}", file=sys.stderr)
        return EXIT_INTERNAL
    sys.stdout.write(render_report(result, args.machine_readable))
    if args.out is not None:
        write_outputs(result, line, args.out, args.machine_readable)
    return result.exit_code


if __name__ == "__main__":
    sys.exit(main())
