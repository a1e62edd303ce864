from dataclasses import dataclass, field
from enum import Enum
from typing import Dict, Optional, Tuple

import numpy as np

from loadcoupling.approx import SegmentTable
from loadcoupling.coupling import Objective
from loadcoupling.errors import ModelError
from loadcoupling.netmodel import NetworkInstance


class VariableKind(str, Enum):
    CONTINUOUS = "continuous"
    BINARY = "binary"


class Sense(str, Enum):
    EQ = "="
    GE = ">="
    LE = "<="


@dataclass(frozen=True)
class Variable:
    name: str
    kind: VariableKind = VariableKind.CONTINUOUS
    lower: float = 0.0
    upper: Optional[float] = None


@dataclass(frozen=True)
class Constraint:
    terms: Tuple[Tuple[str, float], ...]
    sense: Sense
    rhs: float
    name: Optional[str] = None


@dataclass(frozen=True)
class MilpModel:
    """
    Minimization model with continuous and binary variables.

    branch_order lists UE indices in the order the branch-and-bound solver
    decides them; None means ascending.
    """
    variables: Tuple[Variable, ...]
    constraints: Tuple[Constraint, ...]
    objective: Tuple[Tuple[str, float], ...]
    branch_order: Optional[Tuple[int, ...]] = None
    metadata: Dict[str, object] = field(default_factory=dict, compare=False)

    @property
    def variable_names(self) -> Tuple[str, ...]:
        return tuple(v.name for v in self.variables)

    @property
    def num_variables(self) -> int:
        return len(self.variables)

    @property
    def num_constraints(self) -> int:
        return len(self.constraints)

    def variable(self, name: str) -> Variable:
        for v in self.variables:
            if v.name == name:
                return v
        raise ModelError(f"unknown variable {name}")


def x_name(i: int) -> str:
    return f"x_{i}"


def w_name(j: int, l: int) -> str:
    return f"w_{j}_{l}"


def k_name(j: int, l: int) -> str:
    return f"k_{j}_{l}"


def _clean(value: float) -> float:
    # folds -0.0 into 0.0
    return float(value) + 0.0


def _terms(*pairs) -> Tuple[Tuple[str, float], ...]:
    return tuple((name, _clean(c)) for name, c in pairs if c != 0.0)


def build_milp(net: NetworkInstance, segments: SegmentTable,
               objective: Objective = Objective.SUM_LOAD,
               lb_constraints: bool = False) -> MilpModel:
    """
    Linearized load-minimization model.

    Rows, in order: one load definition per cell, one interference row per
    (UE, option), the interference lower-bound rows when lb_constraints is
    set, one selection row per UE and, for MaxLoad, one epigraph row per
    cell. Variables are x_i, then w_j_l and k_j_l per (UE, option), then t.
    """
    objective = Objective(objective)
    if segments.m != net.m:
        raise ModelError(
            f"segment table covers {segments.m} UEs, instance has {net.m}"
        )
    for j, options in enumerate(net.options):
        if len(segments.segments[j]) != len(options):
            raise ModelError(f"UE {j}: missing segment for some option")

    rx = net.received_power
    variables = [Variable(x_name(i), upper=1.0) for i in range(net.n)]
    for j, options in enumerate(net.options):
        for l in range(len(options)):
            variables.append(Variable(w_name(j, l)))
            variables.append(Variable(k_name(j, l), VariableKind.BINARY,
                                      upper=1.0))
    if objective is Objective.MAX_LOAD:
        variables.append(Variable("t", upper=1.0))

    load_rows = []
    for i in range(net.n):
        pairs = [(x_name(i), 1.0)]
        for j, options in enumerate(net.options):
            for l, ell in enumerate(options):
                if i in ell:
                    seg = segments.segment(j, l)
                    pairs.append((w_name(j, l), -seg.slope))
                    pairs.append((k_name(j, l), -seg.intercept))
        load_rows.append(Constraint(_terms(*pairs), Sense.EQ, 0.0))

    interference_rows, lb_rows = [], []
    for j, options in enumerate(net.options):
        for l, ell in enumerate(options):
            seg = segments.segment(j, l)
            cap = seg.cap
            pairs = [(w_name(j, l), 1.0)]
            pairs += [(x_name(i), -rx[i, j]) for i in range(net.n)
                      if i not in ell]
            pairs.append((k_name(j, l), -cap))
            interference_rows.append(
                Constraint(_terms(*pairs), Sense.GE, _clean(-cap))
            )
            if lb_constraints:
                lb_rows.append(Constraint(
                    _terms((w_name(j, l), 1.0), (k_name(j, l), -cap)),
                    Sense.GE, _clean(seg.w_lo - cap),
                ))

    selection_rows = [
        Constraint(_terms(*[(k_name(j, l), 1.0) for l in range(len(options))]),
                   Sense.EQ, 1.0)
        for j, options in enumerate(net.options)
    ]

    rows = load_rows + interference_rows + lb_rows + selection_rows
    if objective is Objective.MAX_LOAD:
        rows += [Constraint(_terms(("t", 1.0), (x_name(i), -1.0)), Sense.GE,
                            0.0) for i in range(net.n)]
        obj = (("t", 1.0),)
    else:
        obj = tuple((x_name(i), 1.0) for i in range(net.n))

    order = tuple(int(j) for j in np.lexsort((np.arange(net.m), -net.demands)))
    return MilpModel(
        variables=tuple(variables),
        constraints=tuple(rows),
        objective=obj,
        branch_order=order,
        metadata={"objective": objective, "lb_constraints": lb_constraints,
                  "options": net.options},
    )
