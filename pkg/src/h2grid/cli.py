"""Command-line orchestration: single solves, the standard scenario
suite, renewable-capacity sweeps, and geographic (two-market) sweeps.

Exit codes: 0 optimal, 1 input error, 2 infeasible, 3 unbounded,
4 solver failure. Diagnostics go to stderr; results go to --out as JSON
reports and CSV tables with stable key order (repeat runs with the same
config, seed, and backend are byte-identical).
"""

from __future__ import annotations

import argparse
import sys
from dataclasses import replace
from pathlib import Path

from .certification import certify, re_capacity_factor
from .economics import capex_usd, optimize_plant, zone_pair
from .ingest import (
    RunConfig,
    dataset_from_config,
    dump_json,
    emissions_to_dict,
    load_config,
    report_to_dict,
    write_dispatch_csv,
    write_report,
)
from .lp import LpStatus
from .types import CapacitySpec, CoLocated, Dataset, Fixed, Free, Mode, ScenarioSpec, Split, TcInterval

EXIT_OK = 0
EXIT_INPUT = 1
EXIT_INFEASIBLE = 2
EXIT_UNBOUNDED = 3
EXIT_SOLVER = 4

_STATUS_EXIT = {
    LpStatus.OPTIMAL: EXIT_OK,
    LpStatus.INFEASIBLE: EXIT_INFEASIBLE,
    LpStatus.UNBOUNDED: EXIT_UNBOUNDED,
    LpStatus.SOLVER_FAILURE: EXIT_SOLVER,
}

SUITE_ORDER = ["offgrid", "sell_only", "daily", "monthly", "yearly",
               "flexible", "mef_zero"]
_BUILTIN_TC = {"hourly": TcInterval.HOURLY, "daily": TcInterval.DAILY,
               "monthly": TcInterval.MONTHLY, "yearly": TcInterval.YEARLY}

REC_PRICE_BAND_AUD = (20.0, 60.0)


def builtin_scenario(name: str, config: RunConfig) -> ScenarioSpec:
    """Standard scenarios derived from the config's zone and capacity
    bounds: isolated plant, sell-only, interval-matched trading at three
    widths, unconstrained trading, and a zero-marginal-emissions cap."""
    geo = CoLocated(config.zone)
    caps = config.capacities
    if name == "offgrid":
        return ScenarioSpec(name, Mode.OFF_GRID, geo, caps)
    if name == "sell_only":
        return ScenarioSpec(name, Mode.SELL_ONLY, geo, caps)
    if name in _BUILTIN_TC:
        return ScenarioSpec(name, Mode.GRID, geo, caps,
                            tc_interval=_BUILTIN_TC[name])
    if name == "flexible":
        return ScenarioSpec(name, Mode.GRID, geo, caps)
    if name == "mef_zero":
        return ScenarioSpec(name, Mode.GRID, geo, caps, ei_mef_cap=0.0)
    raise ValueError(f"unknown scenario {name!r}; config defines none by that "
                     f"name and built-ins are {SUITE_ORDER + ['hourly']}")


def resolve_scenario(config: RunConfig, name: str) -> ScenarioSpec:
    for scenario in config.scenarios:
        if scenario.name == name:
            return scenario
    return builtin_scenario(name, config)


def _inputs_block(config: RunConfig, seed_used: int | None = None) -> dict:
    return {
        "horizon": config.horizon,
        "fx_usd_per_aud": config.fx_usd_per_aud,
        "zone": config.zone,
        "fixture_kind": config.fixture_kind,
        "fixture_seed": (config.fixture_seed if config.fixture_kind else None),
        "zone_files": sorted(Path(p).name for p in config.zone_files.values()),
    }


def _solve_one(scenario: ScenarioSpec, config: RunConfig, dataset: Dataset,
               out_dir: Path, export_lp: bool):
    """Optimize, certify, and write one scenario's outputs. Returns
    (report, breakdown, emissions)."""
    lp_path = out_dir / f"{scenario.name}.lp" if export_lp else None
    report, breakdown = optimize_plant(scenario, config.params, dataset,
                                       export_lp_path=lp_path)
    emissions = None
    if report.is_optimal:
        buy, sell = zone_pair(scenario, dataset)
        emissions = certify(report.dispatch, buy,
                            None if isinstance(scenario.geo, CoLocated) else sell)
        write_dispatch_csv(report.dispatch,
                           out_dir / f"{scenario.name}_dispatch.csv")
    write_report(report, breakdown, emissions,
                 out_dir / f"{scenario.name}_report.json",
                 scenario=scenario, inputs=_inputs_block(config))
    return report, breakdown, emissions


def _print_outcome(report, breakdown) -> None:
    if report.is_optimal:
        print(f"{report.scenario_name}: optimal, "
              f"lcoh={breakdown.lcoh_usd_per_kg:.4f} USD/kg")
    else:
        print(f"{report.scenario_name}: {report.status.value}", file=sys.stderr)


def cmd_solve(config: RunConfig, scenario_name: str, export_lp: bool) -> int:
    dataset = dataset_from_config(config)
    scenario = resolve_scenario(config, scenario_name)
    out_dir = Path(config.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    report, breakdown, _ = _solve_one(scenario, config, dataset, out_dir,
                                      export_lp)
    _print_outcome(report, breakdown)
    return _STATUS_EXIT[report.status]


def cmd_suite(config: RunConfig, export_lp: bool) -> int:
    """Run the standard scenario set in dependency order: the isolated
    plant first, whose capital cost caps every grid-connected member."""
    dataset = dataset_from_config(config)
    out_dir = Path(config.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)

    rows = []
    cap = None
    worst = EXIT_OK
    for name in SUITE_ORDER:
        scenario = builtin_scenario(name, config)
        if name != "offgrid" and cap is not None:
            scenario = replace(scenario, capex_cap_usd=cap)
        report, breakdown, emissions = _solve_one(scenario, config, dataset,
                                                  out_dir, export_lp)
        _print_outcome(report, breakdown)
        if name == "offgrid" and report.is_optimal:
            cap = capex_usd(report, config.params)
        if not report.is_optimal and worst == EXIT_OK:
            worst = _STATUS_EXIT[report.status]
        rows.append({
            "scenario": name,
            "status": report.status.value,
            "converged": report.converged,
            "lcoh_usd_per_kg": (None if breakdown is None
                                else breakdown.lcoh_usd_per_kg),
            "capacities": report.capacities or None,
            "cost_breakdown": (None if breakdown is None else {
                "capex_annualized_usd": dict(sorted(
                    breakdown.capex_annualized_usd.items())),
                "om_usd": dict(sorted(breakdown.om_usd.items())),
                "grid_electricity_usd": breakdown.grid_electricity_usd,
            }),
            "ei_market_kgco2e_per_kgh2": (None if emissions is None
                                          else emissions.ei_market),
            "ei_recs_kgco2e_per_kgh2": (None if emissions is None
                                        else emissions.ei_recs),
            "ei_mef_kgco2e_per_kgh2": (None if emissions is None
                                       else emissions.ei_mef),
        })
    dump_json({
        "schema_version": 1,
        "capex_cap_usd": cap,
        "inputs": _inputs_block(config),
        "scenarios": rows,
    }, out_dir / "suite_report.json")
    return worst


def _csv_cell(value) -> str:
    if value is None:
        return ""
    if isinstance(value, str):
        return value
    return repr(float(value))


def _write_csv(path, header: list[str], rows: list[list]) -> None:
    lines = [",".join(header)]
    lines.extend(",".join(_csv_cell(v) for v in row) for row in rows)
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")


def cmd_sweep_re(config: RunConfig, n_points: int, export_lp: bool) -> int:
    """Fix the electrolyser at the isolated optimum's size, then sweep
    installed renewable capacity from zero to 1.5x the isolated optimum's
    renewables-to-electrolyser ratio, re-optimizing storage and dispatch
    at each point and certifying under every accounting method."""
    if n_points < 2:
        print("sweep-re needs --points >= 2", file=sys.stderr)
        return EXIT_INPUT
    dataset = dataset_from_config(config)
    out_dir = Path(config.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)

    base_report, _, _ = _solve_one(builtin_scenario("offgrid", config), config,
                                   dataset, out_dir, export_lp)
    if not base_report.is_optimal:
        print(f"offgrid baseline failed: {base_report.status.value}",
              file=sys.stderr)
        return _STATUS_EXIT[base_report.status]
    d = base_report.dispatch
    c_el, c_wind, c_pv = d.c_el_kw, d.c_wind_kw, d.c_pv_kw
    re_total = c_wind + c_pv
    wind_share = c_wind / re_total if re_total > 0 else 1.0
    r_max = 1.5 * re_total / c_el if c_el > 0 else 0.0

    header = ["re_factor", "status", "lcoh_usd_per_kg", "ei_market", "ei_recs",
              "ei_location", "ei_mef", "ei_aef", "d_market", "d_location",
              "re_capacity_factor", "c_wind_kw", "c_pv_kw", "c_el_kw",
              "c_store_kg"]
    rows, entries = [], []
    for i in range(n_points):
        r = r_max * i / (n_points - 1)
        caps = CapacitySpec(
            wind_kw=Fixed(r * c_el * wind_share),
            pv_kw=Fixed(r * c_el * (1.0 - wind_share)),
            electrolyser_kw=Fixed(c_el),
            storage_kg=Free(),
        )
        scenario = ScenarioSpec(f"re_{i:03d}", Mode.GRID, CoLocated(config.zone),
                                capacities=caps)
        report, breakdown, emissions = _solve_one(scenario, config, dataset,
                                                  out_dir, export_lp)
        if report.is_optimal:
            disp = report.dispatch
            cf = (None if disp.c_wind_kw + disp.c_pv_kw <= 0 else
                  re_capacity_factor(disp.gen_wind_kw, disp.gen_pv_kw,
                                     disp.c_wind_kw, disp.c_pv_kw))
            rows.append([r, report.status.value, breakdown.lcoh_usd_per_kg,
                         emissions.ei_market, emissions.ei_recs,
                         emissions.ei_location, emissions.ei_mef,
                         emissions.ei_aef, emissions.d_market,
                         emissions.d_location, cf, disp.c_wind_kw,
                         disp.c_pv_kw, disp.c_el_kw, disp.c_store_kg])
        else:
            rows.append([r, report.status.value] + [None] * (len(header) - 2))
        entries.append({
            "re_factor": r,
            "status": report.status.value,
            "lcoh_usd_per_kg": (None if breakdown is None
                                else breakdown.lcoh_usd_per_kg),
            "emissions": (None if emissions is None
                          else emissions_to_dict(emissions)),
        })
    _write_csv(out_dir / "sweep_re.csv", header, rows)
    dump_json({
        "schema_version": 1,
        "baseline_capacities": base_report.capacities,
        "notes": "electrolyser and renewable split fixed at the isolated "
                 "optimum; storage re-optimized at every point",
        "inputs": _inputs_block(config),
        "points": entries,
    }, out_dir / "sweep_re.json")
    return EXIT_OK


def cmd_sweep_geo(config: RunConfig, sell_zones: list[str],
                  export_lp: bool) -> int:
    """Solve one yearly-matched scenario per candidate sell-side zone
    (renewables trade there; the plant buys at home), plus a grid-only
    baseline annotated with the cost of covering every purchased MWh with
    a bought certificate."""
    if not sell_zones:
        print("sweep-geo needs at least one sell zone", file=sys.stderr)
        return EXIT_INPUT
    dataset = dataset_from_config(config)
    out_dir = Path(config.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    missing = [z for z in sell_zones if z not in dataset.zones]
    if missing:
        print(f"unknown sell zones {missing}; dataset has "
              f"{sorted(dataset.zones)}", file=sys.stderr)
        return EXIT_INPUT

    baseline_caps = replace(config.capacities, wind_kw=Fixed(0.0),
                            pv_kw=Fixed(0.0))
    baseline = ScenarioSpec("grid_only", Mode.GRID, CoLocated(config.zone),
                            capacities=baseline_caps)
    base_report, base_breakdown, _ = _solve_one(baseline, config, dataset,
                                                out_dir, export_lp)
    baseline_block = {"status": base_report.status.value,
                      "lcoh_usd_per_kg": None,
                      "rec_price_band_aud_per_mwh": list(REC_PRICE_BAND_AUD),
                      "lcoh_with_recs_usd_per_kg": None}
    if base_report.is_optimal:
        imports_mwh = float(base_report.dispatch.import_kw.sum()) / 1000.0
        adders = [imports_mwh * p * config.fx_usd_per_aud
                  / base_report.annual_h2_kg for p in REC_PRICE_BAND_AUD]
        baseline_block["lcoh_usd_per_kg"] = base_breakdown.lcoh_usd_per_kg
        baseline_block["lcoh_with_recs_usd_per_kg"] = [
            base_breakdown.lcoh_usd_per_kg + a for a in adders]

    header = ["sell_zone", "status", "lcoh_usd_per_kg", "ei_market", "ei_recs",
              "ei_mef", "c_wind_kw", "c_pv_kw", "c_el_kw", "c_store_kg"]
    rows, entries = [], []
    for zone in sell_zones:
        scenario = ScenarioSpec(f"geo_{zone}", Mode.GRID,
                                Split(sell_zone=zone, buy_zone=config.zone),
                                capacities=config.capacities,
                                tc_interval=TcInterval.YEARLY)
        report, breakdown, emissions = _solve_one(scenario, config, dataset,
                                                  out_dir, export_lp)
        if report.is_optimal:
            disp = report.dispatch
            rows.append([zone, report.status.value, breakdown.lcoh_usd_per_kg,
                         emissions.ei_market, emissions.ei_recs,
                         emissions.ei_mef, disp.c_wind_kw, disp.c_pv_kw,
                         disp.c_el_kw, disp.c_store_kg])
        else:
            rows.append([zone, report.status.value] + [None] * (len(header) - 2))
        entries.append({
            "sell_zone": zone,
            "status": report.status.value,
            "lcoh_usd_per_kg": (None if breakdown is None
                                else breakdown.lcoh_usd_per_kg),
            "emissions": (None if emissions is None
                          else emissions_to_dict(emissions)),
        })
    _write_csv(out_dir / "sweep_geo.csv", header, rows)
    dump_json({
        "schema_version": 1,
        "buy_zone": config.zone,
        "grid_only_baseline": baseline_block,
        "inputs": _inputs_block(config),
        "points": entries,
    }, out_dir / "sweep_geo.json")
    return EXIT_OK


def _build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", required=True, help="run configuration JSON")
    common.add_argument("--out", help="output directory (overrides config)")
    common.add_argument("--horizon", type=int, help="hours (overrides config)")
    common.add_argument("--seed", type=int,
                        help="fixture seed (overrides config)")
    common.add_argument("--fx", type=float,
                        help="USD per AUD (overrides config)")
    common.add_argument("--export-lp", action="store_true",
                        help="write each scenario's LP in text form")

    parser = argparse.ArgumentParser(
        prog="h2grid",
        description="size and dispatch a grid-connected hydrogen plant, "
                    "then certify its emissions under four accounting methods")
    sub = parser.add_subparsers(dest="command", required=True)
    p = sub.add_parser("solve", parents=[common],
                       help="optimize one scenario")
    p.add_argument("--scenario", required=True)
    sub.add_parser("suite", parents=[common],
                   help="run the standard scenario set")
    p = sub.add_parser("sweep-re", parents=[common],
                       help="sweep installed renewable capacity")
    p.add_argument("--points", type=int, default=7)
    p = sub.add_parser("sweep-geo", parents=[common],
                       help="sweep the renewable farm's market zone")
    p.add_argument("--sell-zones", required=True,
                   help="comma-separated zone ids")
    return parser


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        config = load_config(args.config)
        if args.horizon is not None:
            if args.horizon < 1:
                raise ValueError("--horizon must be >= 1")
            config.horizon = args.horizon
        if args.seed is not None:
            config.fixture_seed = args.seed
        if args.fx is not None:
            if args.fx <= 0:
                raise ValueError("--fx must be positive")
            config.fx_usd_per_aud = args.fx
        if args.out is not None:
            config.out_dir = args.out

        if args.command == "solve":
            return cmd_solve(config, args.scenario, args.export_lp)
        if args.command == "suite":
            return cmd_suite(config, args.export_lp)
        if args.command == "sweep-re":
            return cmd_sweep_re(config, args.points, args.export_lp)
        if args.command == "sweep-geo":
            zones = [z.strip() for z in args.sell_zones.split(",") if z.strip()]
            return cmd_sweep_geo(config, zones, args.export_lp)
        raise AssertionError(f"unhandled command {args.command}")
    except (ValueError, OSError, KeyError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
