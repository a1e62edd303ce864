import itertools
import logging
from dataclasses import dataclass
from typing import Dict, Optional, Sequence, Tuple

import numpy as np

from loadcoupling.errors import InvalidConfigError

from .entities import (
    Association,
    Cell,
    CellKind,
    NetworkInstance,
    UserEquipment,
)

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class CnfFormula:
    """
    3-CNF formula with DIMACS literals: v > 0 is variable v, -v its negation.
    """
    num_vars: int
    clauses: Tuple[Tuple[int, int, int], ...]

    def __post_init__(self):
        object.__setattr__(
            self, "clauses", tuple(tuple(int(l) for l in c) for c in self.clauses)
        )
        if self.num_vars < 1:
            raise InvalidConfigError("a formula needs at least one variable")
        for k, clause in enumerate(self.clauses):
            if len(clause) != 3:
                raise InvalidConfigError(
                    f"clause {k + 1} has {len(clause)} literals, expected 3"
                )
            if len(set(clause)) != 3:
                raise InvalidConfigError(
                    f"clause {k + 1} repeats a literal: {clause}"
                )
            for lit in clause:
                if lit == 0 or abs(lit) > self.num_vars:
                    raise InvalidConfigError(
                        f"clause {k + 1}: literal {lit} out of range"
                    )

    @property
    def num_clauses(self) -> int:
        return len(self.clauses)

    def evaluate(self, values: Sequence[bool]) -> bool:
        """values[i - 1] is the truth value of variable i."""
        return all(
            any(values[abs(l) - 1] == (l > 0) for l in clause)
            for clause in self.clauses
        )


def parse_dimacs(text: str) -> CnfFormula:
    num_vars = None
    literals = []
    for line in text.splitlines():
        line = line.strip()
        if not line or line.startswith("c") or line.startswith("%"):
            continue
        if line.startswith("p"):
            parts = line.split()
            if len(parts) != 4 or parts[1] != "cnf":
                raise InvalidConfigError(f"bad DIMACS header: {line!r}")
            num_vars = int(parts[2])
            continue
        try:
            literals.extend(int(tok) for tok in line.split())
        except ValueError as e:
            raise InvalidConfigError(f"bad DIMACS clause line {line!r}") from e
    if num_vars is None:
        raise InvalidConfigError("DIMACS input has no 'p cnf' header")

    clauses, current = [], []
    for lit in literals:
        if lit == 0:
            clauses.append(tuple(current))
            current = []
        else:
            current.append(lit)
    if current:
        clauses.append(tuple(current))
    return CnfFormula(num_vars, tuple(clauses))


def format_dimacs(formula: CnfFormula) -> str:
    lines = [f"p cnf {formula.num_vars} {formula.num_clauses}"]
    lines.extend(" ".join(str(l) for l in c) + " 0" for c in formula.clauses)
    return "\n".join(lines) + "\n"


def random_3cnf(num_vars: int, num_clauses: int,
                rng: np.random.Generator) -> CnfFormula:
    """Random formula; each clause has three distinct variables."""
    if num_vars < 3:
        raise InvalidConfigError("random 3-CNF needs at least 3 variables")
    clauses = []
    for _ in range(num_clauses):
        variables = rng.choice(np.arange(1, num_vars + 1), size=3, replace=False)
        signs = rng.choice([-1, 1], size=3)
        clauses.append(tuple(int(v * s) for v, s in zip(variables, signs)))
    return CnfFormula(num_vars, tuple(clauses))


def is_satisfiable(formula: CnfFormula) -> bool:
    return satisfying_assignment(formula) is not None


def satisfying_assignment(formula: CnfFormula) -> Optional[Tuple[bool, ...]]:
    """First satisfying assignment by truth table, or None."""
    for values in itertools.product((False, True), repeat=formula.num_vars):
        if formula.evaluate(values):
            return values
    return None


class GadgetLayout:
    """
    Cell and UE numbering of the reduction instance.

    Cells: c0 = 0, c_i = i, a_i = n + 2i - 1, a'_i = n + 2i, and the home
    cell of clause k (1-based) is 3n + k. UEs: u0 = 0, u_i = i, and the UE of
    clause k is n + k. Literal b_i maps to cell a_i and its negation to a'_i.
    """
    def __init__(self, formula: CnfFormula):
        self.n = formula.num_vars
        self.m = formula.num_clauses

    def var_home(self, i: int) -> int:
        return i

    def positive(self, i: int) -> int:
        return self.n + 2 * i - 1

    def negative(self, i: int) -> int:
        return self.n + 2 * i

    def literal_cell(self, lit: int) -> int:
        return self.positive(lit) if lit > 0 else self.negative(-lit)

    def clause_home(self, k: int) -> int:
        return 3 * self.n + k

    def clause_ue(self, k: int) -> int:
        return self.n + k

    @property
    def num_cells(self) -> int:
        return 3 * self.n + self.m + 1

    @property
    def num_ues(self) -> int:
        return self.n + self.m + 1


def build_sat_reduction(formula: CnfFormula) -> NetworkInstance:
    """
    Network instance whose load-feasible associations encode the satisfying
    assignments of formula.

    All powers, demands and the noise power are 1, with one RU of unit
    bandwidth. A literal cell serving some UE stands for a false literal.
    """
    layout = GadgetLayout(formula)
    n = layout.n
    gain = np.zeros((layout.num_cells, layout.num_ues))
    candidates: Dict[int, Tuple[int, ...]] = {}

    gain[0, 0] = n + 1
    candidates[0] = (0,)
    for i in range(1, n + 1):
        c, a, a_neg = layout.var_home(i), layout.positive(i), layout.negative(i)
        gain[[c, a, a_neg], i] = 0.5
        gain[[a, a_neg], 0] = 1.0
        candidates[i] = (c, a, a_neg)
    for k, clause in enumerate(formula.clauses, start=1):
        u, home = layout.clause_ue(k), layout.clause_home(k)
        gain[home, u] = 3.0
        lit_cells = tuple(layout.literal_cell(l) for l in clause)
        gain[list(lit_cells), u] = 1.0
        candidates[u] = (home,) + lit_cells

    cells = []
    for cell_id in range(layout.num_cells):
        cells.append(Cell(id=cell_id, kind=CellKind.MACRO,
                          position=(float(cell_id), 0.0), power_per_ru=1.0))
    ues = [
        UserEquipment(id=j, position=(float(j), 1.0), demand=1.0,
                      home_cell=candidates[j][0], candidates=candidates[j])
        for j in range(layout.num_ues)
    ]
    logger.debug(
        f"Built reduction with {layout.num_cells} cells, {layout.num_ues} UEs"
    )
    return NetworkInstance(cells=tuple(cells), ues=tuple(ues), gain=gain,
                           noise_power=1.0, num_ru=1, ru_bandwidth=1.0)


def association_for_assignment(formula: CnfFormula,
                               values: Sequence[bool]) -> Association:
    """
    Association built from a truth assignment: u_i is served by its home
    cell plus a_i when b_i is false and a'_i when b_i is true; every other
    UE is served by its home cell alone.
    """
    layout = GadgetLayout(formula)
    serving = [frozenset({0})]
    for i in range(1, layout.n + 1):
        helper = layout.negative(i) if values[i - 1] else layout.positive(i)
        serving.append(frozenset({layout.var_home(i), helper}))
    for k in range(1, layout.m + 1):
        serving.append(frozenset({layout.clause_home(k)}))
    return Association(tuple(serving))


def truth_assignment_from_association(formula: CnfFormula,
                                      assoc: Association) -> Tuple[bool, ...]:
    """b_i is true iff cell a'_i serves some UE."""
    layout = GadgetLayout(formula)
    active = set().union(*assoc.serving)
    return tuple(layout.negative(i) in active for i in range(1, layout.n + 1))
