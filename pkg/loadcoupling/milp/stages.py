import dataclasses
from dataclasses import dataclass
from typing import Any, Dict, Optional, Tuple

from loadcoupling.approx import (
    LinearizationMode,
    LoadBounds,
    SegmentTable,
    global_load_bounds,
    option_intervals,
    segment_table_from_intervals,
)
from loadcoupling.coupling import (
    FixedPointReport,
    Objective,
    SolverOptions,
    fixed_point_load,
)
from loadcoupling.errors import InfeasibleModelError, InvalidConfigError
from loadcoupling.netmodel import Association, NetworkInstance
from loadcoupling.pipeline import Pipeline, Stage

from .branch_and_bound import (
    BranchAndBoundOptions,
    MilpSolution,
    solve_branch_and_bound,
)
from .model import MilpModel, build_milp


@dataclass(frozen=True)
class MilpOptions:
    """
    Settings of the MILP-based minimization run.

    intervals="bounds" derives interference intervals from global load
    bounds; "trivial" uses (0, T) and never adds lower-bound rows.
    """
    lb_constraints: bool = True
    intervals: str = "bounds"
    linearization: LinearizationMode = LinearizationMode.SECANT
    solver: SolverOptions = SolverOptions()
    search: BranchAndBoundOptions = BranchAndBoundOptions()

    def __post_init__(self):
        if self.intervals not in ("bounds", "trivial"):
            raise InvalidConfigError(
                f"intervals must be 'bounds' or 'trivial', got {self.intervals!r}"
            )
        object.__setattr__(self, "linearization",
                           LinearizationMode(self.linearization))

    @classmethod
    def from_config(cls, config: Dict[str, Any]) -> "MilpOptions":
        return cls(
            lb_constraints=bool(config.get("lb_constraints", True)),
            intervals=config.get("intervals", "bounds"),
            linearization=config.get("linearization", "secant"),
            solver=SolverOptions.from_config(config),
            search=BranchAndBoundOptions.from_config(config),
        )

    def as_config(self) -> Dict[str, Any]:
        return {
            "lb_constraints": self.lb_constraints,
            "intervals": self.intervals,
            "linearization": self.linearization.value,
            **dataclasses.asdict(self.solver),
            "node_limit": self.search.node_limit,
            "time_limit": self.search.time_limit,
            "relative_gap": self.search.relative_gap,
        }


@dataclass
class MilpRun:
    """State handed from stage to stage during one MILP run."""
    net: NetworkInstance
    objective: Objective
    bounds: Optional[LoadBounds] = None
    intervals: Optional[tuple] = None
    table: Optional[SegmentTable] = None
    model: Optional[MilpModel] = None
    solution: Optional[MilpSolution] = None
    assignment: Optional[Association] = None
    report: Optional[FixedPointReport] = None
    bound: Optional[float] = None


class LoadBoundsStage(Stage):
    def handle(self, run: MilpRun):
        if self.setting("intervals", "bounds") == "bounds":
            run.bounds = global_load_bounds(
                run.net, SolverOptions.from_config(self.config)
            )


class InterferenceIntervalStage(Stage):
    def handle(self, run: MilpRun):
        if run.bounds is None:
            self.logger.debug("No load bounds; intervals are (0, T)")
        run.intervals = option_intervals(run.net, run.bounds)


class SegmentStage(Stage):
    def handle(self, run: MilpRun):
        mode = LinearizationMode(self.setting("linearization", "secant"))
        run.table = segment_table_from_intervals(run.net, run.intervals, mode,
                                                 run.bounds)


class ModelStage(Stage):
    def handle(self, run: MilpRun):
        lb = bool(self.setting("lb_constraints", True)) and \
            run.bounds is not None
        run.model = build_milp(run.net, run.table, run.objective, lb)
        self.logger.info(
            f"Model has {run.model.num_variables} variables and "
            f"{run.model.num_constraints} rows"
        )


class BranchAndBoundStage(Stage):
    def handle(self, run: MilpRun):
        opts = BranchAndBoundOptions.from_config(
            {**self.config, **self.stage_config}
        )
        run.solution = solve_branch_and_bound(run.model, opts)


class MilpPipeline(Pipeline):
    """
    Bounds -> intervals -> segments -> model -> branch and bound, with the
    true load fixed point of the decoded association evaluated at the core.
    """
    def __init__(self, config=None, logger=None):
        super().__init__(config, logger)
        for stage in (LoadBoundsStage, InterferenceIntervalStage,
                      SegmentStage, ModelStage, BranchAndBoundStage):
            self.add_stage(stage)

    def process_core(self, run: MilpRun, *args, **kwargs):
        solution = run.solution
        if solution is None or solution.assignment is None:
            self.logger.warning(
                f"No assignment from the linear model "
                f"({solution.status.value if solution else 'not solved'})"
            )
            return run
        run.assignment = solution.assignment
        run.report = fixed_point_load(
            solution.assignment, run.net, SolverOptions.from_config(self.config)
        )
        objective_true = run.report.objective(run.objective)
        run.solution = dataclasses.replace(solution,
                                           objective_true=objective_true)
        if run.table.mode is LinearizationMode.SECANT:
            run.bound = solution.bound
        return run


def run_milp(net: NetworkInstance, objective: Objective = Objective.SUM_LOAD,
             opts: Optional[MilpOptions] = None, logger=None) -> MilpRun:
    opts = opts or MilpOptions()
    pipeline = MilpPipeline(config=opts.as_config(), logger=logger)
    return pipeline.process(MilpRun(net=net, objective=Objective(objective)))


def milp_pipeline(net: NetworkInstance,
                  objective: Objective = Objective.SUM_LOAD,
                  opts: Optional[MilpOptions] = None
                  ) -> Tuple[Association, FixedPointReport, Optional[float]]:
    """
    MILP-based load minimization.

    Returns:
        tuple: The decoded association, its true load fixed point and the
        linear model's proven optimum, a lower bound on the true optimum.
        The bound is None under tangent-mid linearization, which gives no
        such guarantee.

    Raises:
        InfeasibleModelError: The linear model has no feasible leaf, or
            none was found within the search limits.
    """
    run = run_milp(net, objective, opts)
    if run.assignment is None:
        raise InfeasibleModelError(
            f"linear model has no feasible assignment "
            f"({run.solution.status.value})"
        )
    return run.assignment, run.report, run.bound
