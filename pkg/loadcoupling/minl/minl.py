import logging
from dataclasses import dataclass, field
from typing import List, Optional, Tuple

import numpy as np

from loadcoupling.coupling import (
    FixedPointReport,
    SolverOptions,
    fixed_point_load,
)
from loadcoupling.errors import ConvergenceError, InvalidConfigError
from loadcoupling.netmodel import Association, NetworkInstance

from .adjustment import AdjustmentState, try_add_link, try_remove_link

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class MinlOptions:
    rounds: int = 3
    tau: int = 5
    local: bool = False
    neighborhood_db: float = 30.0
    solver: SolverOptions = SolverOptions()

    def __post_init__(self):
        if self.rounds < 1:
            raise InvalidConfigError("MinL needs at least one round")
        if self.tau < 1:
            raise InvalidConfigError("MinL needs tau >= 1")


@dataclass(frozen=True)
class AdjustmentRecord:
    cell: int
    ue: int
    kind: str
    round: int


@dataclass(eq=False)
class MinlResult:
    assoc: Association
    report: FixedPointReport
    trace: List[AdjustmentRecord] = field(default_factory=list)
    evaluations: int = 0
    rounds: int = 0
    aborted: bool = False


def neighborhood(net: NetworkInstance, assoc: Association, v: int, u: int,
                 threshold_db: float = 30.0) -> frozenset:
    """
    Cell v plus every cell whose received power at u or at a UE served by v
    is within threshold_db of the strongest other cell at that UE.
    """
    ues = set(assoc.served_by(v)) | {u}
    rx = net.received_power
    others = np.ones(net.n, dtype=bool)
    others[v] = False
    cells = {v}
    for j in sorted(ues):
        column = np.where(others, rx[:, j], 0.0)
        strongest = column.max()
        if strongest <= 0.0:
            continue
        level = strongest * 10 ** (-threshold_db / 10.0)
        cells.update(np.flatnonzero(column >= level).tolist())
    return frozenset(cells)


def run_minl(net: NetworkInstance, init: Association,
             options: Optional[MinlOptions] = None) -> MinlResult:
    """
    Link-adjustment heuristic.

    Each round visits cells in ascending order and, for each, UEs in
    ascending order, trying to add the link when the cell is a non-serving
    candidate and to remove it when it is a serving non-home cell. Accepted
    moves update the state at once. Stops after options.rounds rounds or the
    first round without a change.
    """
    options = options or MinlOptions()
    init.validate(net)
    state = AdjustmentState.evaluate(init, net, options.solver)
    result = MinlResult(init, state.report)

    candidate = net.candidate_mask
    home = net.home_cells
    remaining = options.rounds
    changed = True
    while remaining > 0 and changed:
        remaining -= 1
        result.rounds += 1
        changed = False
        for v in range(net.n):
            for u in range(net.m):
                if not candidate[v, u] or home[u] == v:
                    continue
                active = None
                if options.local:
                    active = neighborhood(net, state.assoc, v, u,
                                          options.neighborhood_db)
                serving = v in state.assoc.serving[u]
                try:
                    if serving:
                        decision = try_remove_link(state, v, u, options.tau,
                                                   net, options.solver, active)
                    else:
                        decision = try_add_link(state, v, u, options.tau, net,
                                                options.solver, active)
                except ConvergenceError as e:
                    logger.warning(
                        f"Fixed point failed after move ({v}, {u}): {e}; "
                        f"stopping with the last consistent state"
                    )
                    result.aborted = True
                    return _finish(result, state, net, options)
                result.evaluations += 1
                if decision.accepted:
                    state = decision.new_state
                    changed = True
                    result.trace.append(AdjustmentRecord(
                        v, u, "remove" if serving else "add", result.rounds
                    ))
        logger.debug(
            f"MinL round {result.rounds}: {len(result.trace)} moves so far"
        )
    return _finish(result, state, net, options)


def _finish(result: MinlResult, state: AdjustmentState, net: NetworkInstance,
            options: MinlOptions) -> MinlResult:
    result.assoc = state.assoc
    result.report = state.report
    if result.report is None:
        result.report = fixed_point_load(state.assoc, net, options.solver)
    logger.info(
        f"MinL finished after {result.rounds} rounds: {len(result.trace)} "
        f"moves, sum load {result.report.sum_load:.4g}, "
        f"max load {result.report.max_load:.4g}"
    )
    return result


def minl(net: NetworkInstance, init: Association, rounds: int = 3,
         tau: int = 5, options: Optional[MinlOptions] = None
         ) -> Tuple[Association, FixedPointReport]:
    if options is None:
        options = MinlOptions(rounds=rounds, tau=tau)
    result = run_minl(net, init, options)
    return result.assoc, result.report
