import dataclasses
import logging
import math
import time
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Sequence, Tuple

import numpy as np
from scipy.optimize import brentq

from loadcoupling.coupling import (
    FixedPointReport,
    FixedPointStatus,
    Objective,
    SolverOptions,
    fixed_point_load,
)
from loadcoupling.errors import (
    ConvergenceError,
    InfeasibleModelError,
    InvalidConfigError,
)
from loadcoupling.milp import BranchAndBoundOptions, MilpOptions, run_milp
from loadcoupling.minl import MinlOptions, run_minl
from loadcoupling.netmodel import (
    Association,
    CellKind,
    NetworkInstance,
    ScenarioConfig,
    generate_hexnet,
    with_uniform_demand,
)

logger = logging.getLogger(__name__)

METHODS = ("baseline", "minl", "milp", "milp+minl", "bound")

LOAD_SLACK = 1e-9
BOUND_SLACK = 1e-9


@dataclass(frozen=True)
class ExperimentConfig:
    """
    One experiment: a scenario, the methods to run and the demand sweep.

    demands=None calibrates calibration_points demands at run time so the
    baseline max load spans calibration_range.
    """
    scenario: ScenarioConfig = field(default_factory=ScenarioConfig.desk_scale)
    methods: Tuple[str, ...] = ("baseline", "minl")
    objective: Objective = Objective.SUM_LOAD
    demands: Optional[Tuple[float, ...]] = None
    calibration_points: int = 8
    calibration_range: Tuple[float, float] = (0.2, 1.0)
    minl: MinlOptions = MinlOptions()
    milp: MilpOptions = MilpOptions(
        search=BranchAndBoundOptions(node_limit=5000)
    )
    solver: SolverOptions = SolverOptions()
    timing: bool = False

    def __post_init__(self):
        unknown = set(self.methods) - set(METHODS)
        if unknown:
            raise InvalidConfigError(
                f"unknown methods {sorted(unknown)}; choose from {METHODS}"
            )
        object.__setattr__(self, "methods", tuple(self.methods))
        object.__setattr__(self, "objective", Objective(self.objective))
        if self.demands is not None:
            demands = tuple(float(d) for d in self.demands)
            if any(not d > 0 for d in demands):
                raise InvalidConfigError("demands must be positive")
            object.__setattr__(self, "demands", demands)
        if self.calibration_points < 1:
            raise InvalidConfigError("calibration_points must be >= 1")

    def to_dict(self) -> Dict[str, Any]:
        data = dataclasses.asdict(self)
        data["objective"] = self.objective.value
        data["milp"]["linearization"] = self.milp.linearization.value
        return data


@dataclass
class ExperimentRow:
    demand: float
    method: str
    objective_kind: str
    objective: float
    bound: float
    sum_load_mc: float
    sum_load_sc: float
    max_load_mc: float
    max_load_sc: float
    jt_ue_count: int
    seconds: float
    seed: int
    status: str
    load_feasible: bool = True
    loads: List[float] = field(default_factory=list)
    nodes: int = 0

    @property
    def gap(self) -> float:
        """
        (objective - bound) / objective.

        NaN without a bound, and for rows whose association overloads a
        cell: the bound only covers associations with every load at most 1.
        """
        if not self.load_feasible or math.isnan(self.bound) or \
                not self.objective:
            return math.nan
        return (self.objective - self.bound) / self.objective


@dataclass
class ExperimentReport:
    seed: int
    config: Dict[str, Any]
    demands: List[float]
    calibrated: bool
    rows: List[ExperimentRow] = field(default_factory=list)


def baseline_max_load(net: NetworkInstance, demand: float,
                      opts: Optional[SolverOptions] = None) -> float:
    report = fixed_point_load(Association.home_only(net),
                              with_uniform_demand(net, demand), opts)
    return report.max_load


def calibrate_demands(net: NetworkInstance, points: int = 8,
                      low: float = 0.2, high: float = 1.0,
                      opts: Optional[SolverOptions] = None) -> List[float]:
    """
    points evenly spaced demands from the one giving baseline max load low
    to the one giving high.
    """
    def demand_for(target: float) -> float:
        scale = float(net.num_ru * net.ru_bandwidth)
        lo, hi = scale * 1e-9, scale * 1e-3
        while baseline_max_load(net, hi, opts) < target:
            lo, hi = hi, hi * 4.0
        return brentq(lambda d: baseline_max_load(net, d, opts) - target,
                      lo, hi, xtol=1e-9 * hi)

    d_low, d_high = demand_for(low), demand_for(high)
    return [float(d) for d in np.linspace(d_low, d_high, points)]


def _row(net: NetworkInstance, demand: float, method: str, objective: Objective,
         seed: int, report: Optional[FixedPointReport],
         assoc: Optional[Association], bound: Optional[float], status: str,
         seconds: float, nodes: int = 0) -> ExperimentRow:
    bound = math.nan if bound is None else float(bound)
    if report is None:
        return ExperimentRow(
            demand=demand, method=method, objective_kind=objective.value,
            objective=math.nan, bound=bound, sum_load_mc=math.nan,
            sum_load_sc=math.nan, max_load_mc=math.nan, max_load_sc=math.nan,
            jt_ue_count=0, seconds=seconds, seed=seed, status=status,
            load_feasible=False, nodes=nodes,
        )
    load = report.load
    macro = net.cells_of_kind(CellKind.MACRO)
    small = ~macro

    def agg(fn, mask):
        return float(fn(load[mask])) if mask.any() else 0.0

    return ExperimentRow(
        demand=demand,
        method=method,
        objective_kind=objective.value,
        objective=report.objective(objective),
        bound=bound,
        sum_load_mc=agg(np.sum, macro),
        sum_load_sc=agg(np.sum, small),
        max_load_mc=agg(np.max, macro),
        max_load_sc=agg(np.max, small),
        jt_ue_count=assoc.jt_ue_count() if assoc is not None else 0,
        seconds=seconds,
        seed=seed,
        status=status,
        load_feasible=bool(report.status is FixedPointStatus.CONVERGED
                           and report.max_load <= 1.0 + LOAD_SLACK),
        loads=[float(v) for v in load],
        nodes=nodes,
    )


def _minl_row(net: NetworkInstance, init: Association,
              config: ExperimentConfig, demand: float, method: str, seed: int,
              bound: Optional[float], clock, started: float) -> ExperimentRow:
    try:
        result = run_minl(net, init, config.minl)
    except ConvergenceError as e:
        logger.warning(f"Seed {seed}, demand {demand:.4g}, {method}: {e}")
        status = e.report.status.value if e.report is not None else "failed"
        return _row(net, demand, method, config.objective, seed, None, None,
                    bound, status, clock() - started)
    return _row(net, demand, method, config.objective, seed, result.report,
                result.assoc, bound, result.report.status.value,
                clock() - started)


def run_experiment(config: ExperimentConfig, seed: int,
                   net: Optional[NetworkInstance] = None) -> ExperimentReport:
    """
    Run every configured method at every demand point on one instance.

    net overrides the generated scenario. Non-converged fixed points and
    infeasible linear models become rows with a status, not errors.
    """
    if net is None:
        net = generate_hexnet(config.scenario, seed)
    demands = config.demands
    calibrated = demands is None
    if calibrated:
        low, high = config.calibration_range
        demands = tuple(calibrate_demands(net, config.calibration_points,
                                          low, high, config.solver))
        logger.info(f"Calibrated demands: {[f'{d:.4g}' for d in demands]}")

    report = ExperimentReport(seed=seed, config=config.to_dict(),
                              demands=list(demands), calibrated=calibrated)
    objective = config.objective
    clock = time.perf_counter if config.timing else (lambda: 0.0)

    for demand in demands:
        inst = with_uniform_demand(net, demand)
        home = Association.home_only(inst)

        started = clock()
        base = fixed_point_load(home, inst, config.solver)
        base_seconds = clock() - started

        milp_run, milp_seconds = None, 0.0
        if {"milp", "milp+minl", "bound"} & set(config.methods):
            started = clock()
            try:
                milp_run = run_milp(inst, objective, config.milp)
            except (InfeasibleModelError, ConvergenceError) as e:
                logger.warning(f"Seed {seed}, demand {demand:.4g}: {e}")
            milp_seconds = clock() - started
        bound = milp_run.bound if milp_run is not None else None

        for method in config.methods:
            if method == "baseline":
                row = _row(inst, demand, method, objective, seed, base, home,
                           bound, base.status.value, base_seconds)
            elif method == "minl":
                started = clock()
                row = _minl_row(inst, home, config, demand, method, seed,
                                bound, clock, started)
            elif method in ("milp", "bound"):
                if milp_run is None or milp_run.assignment is None:
                    status = milp_run.solution.status.value if milp_run \
                        and milp_run.solution else "failed"
                    row = _row(inst, demand, method, objective, seed, None,
                               None, bound, status, milp_seconds)
                elif method == "milp":
                    row = _row(inst, demand, method, objective, seed,
                               milp_run.report, milp_run.assignment, bound,
                               milp_run.solution.status.value, milp_seconds,
                               milp_run.solution.nodes_explored)
                else:
                    row = _row(inst, demand, method, objective, seed, None,
                               None, bound, milp_run.solution.status.value,
                               milp_seconds, milp_run.solution.nodes_explored)
                    row.objective = math.nan if bound is None else bound
                    row.load_feasible = bound is not None
            else:
                if milp_run is None or milp_run.assignment is None:
                    row = _row(inst, demand, method, objective, seed, None,
                               None, bound, "failed", milp_seconds)
                else:
                    started = clock() - milp_seconds
                    row = _minl_row(inst, milp_run.assignment, config, demand,
                                    method, seed, bound, clock, started)
            report.rows.append(row)
            if row.gap < -BOUND_SLACK:
                logger.warning(
                    f"Seed {seed}, demand {demand:.4g}, {method}: load-feasible "
                    f"objective {row.objective:.6g} below bound {bound:.6g}"
                )
            logger.info(
                f"seed={seed} demand={demand:.4g} {method}: "
                f"{objective.value}={row.objective:.5g} gap={row.gap:.3%}"
            )
    return report


def run_experiments(config: ExperimentConfig, seeds: Sequence[int],
                    net: Optional[NetworkInstance] = None
                    ) -> List[ExperimentReport]:
    return [run_experiment(config, seed, net) for seed in seeds]
