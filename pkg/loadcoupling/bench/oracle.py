import itertools
import logging
import math
from typing import Iterator, List, Optional, Tuple

import numpy as np

from loadcoupling.coupling import (
    Objective,
    SolverOptions,
    fixed_point_load,
    mixed_fixed_point,
)
from loadcoupling.errors import SearchLimitError
from loadcoupling.netmodel import Association, NetworkInstance

logger = logging.getLogger(__name__)

MAX_ASSOCIATIONS = 10 ** 6


def count_associations(net: NetworkInstance) -> int:
    return math.prod(len(options) for options in net.options)


def enumerate_associations(net: NetworkInstance) -> Iterator[Association]:
    """Every association, in the product order of the UEs' option lists."""
    for combo in itertools.product(*net.options):
        yield Association(tuple(combo))


def brute_force_optimum(net: NetworkInstance,
                        objective: Objective = Objective.SUM_LOAD,
                        opts: Optional[SolverOptions] = None,
                        max_associations: int = MAX_ASSOCIATIONS
                        ) -> Tuple[Association, float]:
    """
    Exhaustive minimization of the true fixed-point objective.

    Load-feasible associations (max load <= 1) win over infeasible ones;
    within a class the first minimizer in enumeration order is kept.

    Raises:
        SearchLimitError: More than max_associations associations exist.
    """
    objective = Objective(objective)
    opts = opts or SolverOptions()
    total = count_associations(net)
    if total > max_associations:
        raise SearchLimitError(
            f"{total} associations exceed the enumeration guard "
            f"of {max_associations}"
        )
    best = {True: (None, math.inf), False: (None, math.inf)}
    for assoc in enumerate_associations(net):
        report = fixed_point_load(assoc, net, opts)
        value = report.objective(objective) if report.converged else math.inf
        feasible = report.converged and report.feasible
        if value < best[feasible][1]:
            best[feasible] = (assoc, value)
    choice = best[True] if best[True][0] is not None else best[False]
    if choice[0] is None:
        choice = (Association.home_only(net), math.inf)
    logger.info(
        f"Brute force over {total} associations: {objective.value} "
        f"{choice[1]:.6g}"
    )
    return choice


def find_feasible_association(net: NetworkInstance, max_load: float = 1.0,
                              opts: Optional[SolverOptions] = None
                              ) -> Optional[Association]:
    """
    Depth-first search for an association whose fixed-point loads are all
    at most max_load.

    A partial assignment is pruned when a lower bound on its loads already
    exceeds max_load: decided UEs use their chosen sets, undecided UEs count
    every candidate as a signal source and add load to their home cell only.
    The search is exhaustive, so None means no such association exists.
    """
    opts = opts or SolverOptions()
    limit = max_load + opts.tolerance
    home = [frozenset({ue.home_cell}) for ue in net.ues]
    every = [frozenset(ue.candidates) for ue in net.ues]
    chosen: List[frozenset] = []
    visited = 0

    def lower_bound_ok() -> bool:
        d = len(chosen)
        h = Association(tuple(chosen) + tuple(every[d:]))
        f = Association(tuple(chosen) + tuple(home[d:]))
        report = mixed_fixed_point(net, h, f, opts)
        return bool(np.all(np.isfinite(report.load))) and \
            report.load.max() <= limit

    def search() -> bool:
        nonlocal visited
        visited += 1
        if not lower_bound_ok():
            return False
        if len(chosen) == net.m:
            return True
        for option in net.options[len(chosen)]:
            chosen.append(option)
            if search():
                return True
            chosen.pop()
        return False

    found = search()
    logger.info(f"Feasibility search visited {visited} nodes: "
                f"{'feasible' if found else 'infeasible'}")
    return Association(tuple(chosen)) if found else None
