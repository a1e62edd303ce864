import argparse
import json
import logging
import sys
from pathlib import Path
from typing import List, Optional, Sequence

from dotenv import load_dotenv

from loadcoupling.approx import (
    LinearizationMode,
    LoadBounds,
    global_load_bounds,
    option_intervals,
    segment_table_from_intervals,
)
from loadcoupling.coupling import Objective, SolverOptions
from loadcoupling.errors import (
    ConvergenceError,
    InfeasibleModelError,
    InvalidConfigError,
    SearchLimitError,
)
from loadcoupling.milp import (
    MilpOptions,
    build_milp,
    export_lp,
    run_milp,
)
from loadcoupling.minl import MinlOptions
from loadcoupling.netmodel import (
    NetworkInstance,
    ScenarioConfig,
    build_sat_reduction,
    dumps_scenario,
    generate_hexnet,
    is_satisfiable,
    load_scenario,
    parse_dimacs,
    truth_assignment_from_association,
    with_uniform_demand,
)
from loadcoupling.pipeline import default_config

from .experiment import METHODS, ExperimentConfig, run_experiments
from .oracle import brute_force_optimum, find_feasible_association
from .report import (
    FORMATS,
    emit_report,
    json_safe,
    render_frame,
    summarize_csv,
)

logger = logging.getLogger("loadcoupling.cli")

EXIT_INVALID_CONFIG = 2
EXIT_NOT_CONVERGED = 3


def _csv_list(cast):
    def parse(text: str) -> List:
        try:
            return [cast(item) for item in text.split(",") if item.strip()]
        except ValueError as e:
            raise argparse.ArgumentTypeError(str(e))
    return parse


def _seeds(text: str) -> List[int]:
    """'0,3,7' or an inclusive range '0-4'."""
    if "-" in text[1:] and "," not in text:
        first, last = text.split("-", 1)
        return list(range(int(first), int(last) + 1))
    return _csv_list(int)(text)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="loadcoupling",
        description="Load coupling with joint transmission in HetNets: "
                    "scenarios, association optimization and bounds",
    )
    parser.add_argument("--verbose", "-v", action="store_true",
                        help="Log at DEBUG level")

    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--scenario", type=Path,
                        help="Scenario JSON file instead of a generated one")
    common.add_argument("--seeds", type=_seeds, default=[0],
                        help="Seeds, e.g. '0,1,2' or '0-4' (default: 0)")
    common.add_argument("--full-scale", action="store_true",
                        help="19 hexagons, 2 SCs and 30 UEs per hexagon")
    common.add_argument("--densify", action="store_true",
                        help="Double the SCs and UEs per hexagon")
    common.add_argument("--out", type=Path, help="Output file (default stdout)")

    solve = argparse.ArgumentParser(add_help=False)
    solve.add_argument("--objective", choices=[o.value for o in Objective],
                       default=Objective.SUM_LOAD.value)
    solve.add_argument("--demand", type=_csv_list(float),
                       help="Uniform demand(s) in bit/s, comma separated")
    solve.add_argument("--lb", action=argparse.BooleanOptionalAction,
                       default=None,
                       help="Interference lower-bound rows in the model")
    solve.add_argument("--node-limit", type=int,
                       help="Branch-and-bound node limit")
    solve.add_argument("--time-limit", type=float,
                       help="Branch-and-bound time limit in seconds")

    sub = parser.add_subparsers(dest="command", required=True)

    gen = sub.add_parser("generate", parents=[common, solve],
                         help="Write a generated scenario as JSON")
    gen.set_defaults(handler=cmd_generate)

    run = sub.add_parser("run", parents=[common, solve],
                         help="Run an experiment sweep")
    run.add_argument("--methods", type=_csv_list(str),
                     default=["baseline", "minl"],
                     help=f"Comma separated subset of {', '.join(METHODS)}")
    run.add_argument("--format", choices=FORMATS, default="csv")
    run.add_argument("--lambda", dest="rounds", type=int, default=3,
                     help="MinL rounds")
    run.add_argument("--tau", type=int, default=5,
                     help="MinL iterations per link test")
    run.add_argument("--local", action="store_true",
                     help="MinL link tests iterate only nearby cells")
    run.add_argument("--points", type=int, default=8,
                     help="Calibrated demand points when --demand is absent")
    run.add_argument("--timing", action="store_true",
                     help="Record wall-clock seconds per row")
    run.add_argument("--summary", action="store_true",
                     help="CSV of per-(demand, method) means over the seeds")
    run.set_defaults(handler=cmd_run)

    bound = sub.add_parser("bound", parents=[common, solve],
                           help="Certified lower bound from the linear model")
    bound.set_defaults(handler=cmd_bound)

    lp = sub.add_parser("export-lp", parents=[common, solve],
                        help="Write the linear model in LP format")
    lp.set_defaults(handler=cmd_export_lp)

    sat = sub.add_parser("sat", help="Build the gadget of a DIMACS formula "
                                     "and decide its load feasibility")
    sat.add_argument("cnf", type=Path, help="DIMACS CNF file")
    sat.add_argument("--out", type=Path, help="Write the gadget scenario here")
    sat.set_defaults(handler=cmd_sat)

    oracle = sub.add_parser("oracle", parents=[common, solve],
                            help="Brute-force optimum of a tiny scenario")
    oracle.set_defaults(handler=cmd_oracle)

    summary = sub.add_parser("summary", help="Per-(demand, method) means "
                                             "over saved CSV reports")
    summary.add_argument("reports", type=Path, nargs="+",
                         help="CSV files written by run")
    summary.add_argument("--out", type=Path,
                         help="Output file (default stdout)")
    summary.set_defaults(handler=cmd_summary)
    return parser


def _write(text: str, out: Optional[Path]) -> None:
    if out is None:
        sys.stdout.write(text)
        return
    out.parent.mkdir(parents=True, exist_ok=True)
    out.write_text(text)
    logger.info(f"Wrote {out}")


def _scenario_config(args) -> ScenarioConfig:
    config = ScenarioConfig() if args.full_scale else ScenarioConfig.desk_scale()
    return config.densified() if args.densify else config


def _instance(args, seed: int) -> NetworkInstance:
    if args.scenario is not None:
        net = load_scenario(args.scenario)
    else:
        net = generate_hexnet(_scenario_config(args), seed)
    if getattr(args, "demand", None):
        net = with_uniform_demand(net, args.demand[0])
    return net


def _config(args) -> dict:
    config = default_config()
    if getattr(args, "lb", None) is not None:
        config["lb_constraints"] = args.lb
    if getattr(args, "node_limit", None) is not None:
        config["node_limit"] = args.node_limit
    if getattr(args, "time_limit", None) is not None:
        config["time_limit"] = args.time_limit
    return config


def cmd_generate(args) -> int:
    _write(dumps_scenario(_instance(args, args.seeds[0])), args.out)
    return 0


def cmd_run(args) -> int:
    config = _config(args)
    # the desk-scale default keeps the search short unless asked otherwise
    if args.node_limit is None and not args.full_scale:
        config["node_limit"] = min(config["node_limit"], 5000)
    solver = SolverOptions.from_config(config)
    experiment = ExperimentConfig(
        scenario=_scenario_config(args),
        methods=tuple(args.methods),
        objective=Objective(args.objective),
        demands=tuple(args.demand) if args.demand else None,
        calibration_points=args.points,
        minl=MinlOptions(rounds=args.rounds, tau=args.tau, local=args.local,
                         solver=solver),
        milp=MilpOptions.from_config(config),
        solver=solver,
        timing=args.timing,
    )
    net = load_scenario(args.scenario) if args.scenario else None
    reports = run_experiments(experiment, args.seeds, net)
    text = emit_report(reports, None, args.format, summary=args.summary)
    _write(text, args.out)
    return 0


def cmd_bound(args) -> int:
    opts = MilpOptions.from_config(_config(args))
    if opts.linearization is not LinearizationMode.SECANT:
        raise InvalidConfigError(
            f"{opts.linearization.value} linearization gives no bound"
        )
    objective = Objective(args.objective)
    certificates = []
    for seed in args.seeds:
        run = run_milp(_instance(args, seed), objective, opts)
        solution = run.solution
        if run.bound is None:
            raise InfeasibleModelError(
                f"seed {seed}: no bound, linear model "
                f"{solution.status.value if solution else 'not solved'}"
            )
        certificates.append({
            "seed": seed,
            "objective_kind": objective.value,
            "bound": run.bound,
            "objective_lp": solution.objective_lp,
            "objective_true": solution.objective_true,
            "status": solution.status.value,
            "nodes": solution.nodes_explored,
        })
    _write(json.dumps(json_safe(certificates), indent=2) + "\n", args.out)
    return 0


def cmd_export_lp(args) -> int:
    config = _config(args)
    opts = MilpOptions.from_config(config)
    net = _instance(args, args.seeds[0])
    bounds: Optional[LoadBounds] = None
    if opts.intervals == "bounds":
        bounds = global_load_bounds(net, opts.solver)
    intervals = option_intervals(net, bounds)
    table = segment_table_from_intervals(net, intervals, opts.linearization,
                                         bounds)
    model = build_milp(net, table, Objective(args.objective),
                       opts.lb_constraints and bounds is not None)
    _write(export_lp(model), args.out)
    return 0


def cmd_sat(args) -> int:
    formula = parse_dimacs(args.cnf.read_text())
    net = build_sat_reduction(formula)
    if args.out is not None:
        _write(dumps_scenario(net), args.out)
    assoc = find_feasible_association(net)
    verdict = {
        "variables": formula.num_vars,
        "clauses": formula.num_clauses,
        "load_feasible": assoc is not None,
        "satisfiable": is_satisfiable(formula),
        "assignment": None,
    }
    if assoc is not None:
        verdict["assignment"] = list(
            truth_assignment_from_association(formula, assoc)
        )
    sys.stdout.write(json.dumps(verdict, indent=2) + "\n")
    return 0


def cmd_oracle(args) -> int:
    objective = Objective(args.objective)
    solver = SolverOptions.from_config(_config(args))
    results = []
    for seed in args.seeds:
        assoc, value = brute_force_optimum(_instance(args, seed), objective,
                                           solver)
        results.append({
            "seed": seed,
            "objective_kind": objective.value,
            "objective": value,
            "association": assoc.to_lists(),
        })
    _write(json.dumps(json_safe(results), indent=2) + "\n", args.out)
    return 0


def cmd_summary(args) -> int:
    _write(render_frame(summarize_csv(args.reports)), args.out)
    return 0


def main(argv: Optional[Sequence[str]] = None) -> int:
    load_dotenv()
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.verbose:
        logging.getLogger().setLevel(logging.DEBUG)

    try:
        return args.handler(args)
    except (InvalidConfigError, SearchLimitError) as e:
        logger.error(f"Invalid configuration: {e}")
        return EXIT_INVALID_CONFIG
    except (ConvergenceError, InfeasibleModelError) as e:
        logger.error(f"Solver failed: {e}")
        return EXIT_NOT_CONVERGED
    except Exception as e:
        logger.exception(f"Unexpected error in {args.command}: {e}")
        raise


if __name__ == "__main__":
    sys.exit(main())
