import itertools
import math

import numpy as np
import pytest

from loadcoupling.bench import find_feasible_association
from loadcoupling.coupling import fixed_point_load
from loadcoupling.errors import InvalidConfigError
from loadcoupling.netmodel import (
    CnfFormula,
    GadgetLayout,
    association_for_assignment,
    build_sat_reduction,
    format_dimacs,
    is_satisfiable,
    parse_dimacs,
    random_3cnf,
    satisfying_assignment,
    truth_assignment_from_association,
)

UNSAT = CnfFormula(3, tuple(
    tuple(s * v for s, v in zip(signs, (1, 2, 3)))
    for signs in itertools.product((1, -1), repeat=3)
))


def _unsat_formula(num_vars, extra, rng):
    """Every sign pattern over a random variable triple, plus random clauses."""
    triple = rng.choice(np.arange(1, num_vars + 1), 3, replace=False)
    clauses = [tuple(int(s * v) for s, v in zip(signs, triple))
               for signs in itertools.product((1, -1), repeat=3)]
    clauses += random_3cnf(num_vars, extra, rng).clauses
    order = rng.permutation(len(clauses))
    return CnfFormula(num_vars, tuple(clauses[i] for i in order))


def test_parse_dimacs_with_comments():
    text = "c example\np cnf 3 2\n1 -2 3 0\n-1 2\n-3 0\n"

    formula = parse_dimacs(text)

    assert formula.num_vars == 3
    assert formula.clauses == ((1, -2, 3), (-1, 2, -3))


def test_format_then_parse_gives_same_formula():
    formula = CnfFormula(4, ((1, 2, -4), (-1, 3, 4)))

    assert parse_dimacs(format_dimacs(formula)) == formula


@pytest.mark.parametrize("text", [
    "1 2 3 0\n",
    "p cnf 3 1\n1 2 0\n",
    "p cnf 3 1\n1 1 2 0\n",
    "p cnf 2 1\n1 2 3 0\n",
    "p dnf 3 1\n1 2 3 0\n",
])
def test_parse_dimacs_rejects_bad_input(text):
    with pytest.raises(InvalidConfigError):
        parse_dimacs(text)


def test_truth_table_helpers():
    formula = CnfFormula(3, ((1, 2, 3), (-1, -2, -3)))

    values = satisfying_assignment(formula)

    assert formula.evaluate(values)
    assert is_satisfiable(formula)
    assert not is_satisfiable(UNSAT)


def test_random_formula_shape():
    formula = random_3cnf(5, 7, np.random.default_rng(0))

    assert formula.num_vars == 5
    assert formula.num_clauses == 7
    assert all(len({abs(l) for l in c}) == 3 for c in formula.clauses)


def test_gadget_dimensions():
    formula = CnfFormula(3, ((1, 2, 3), (-1, 2, -3)))

    net = build_sat_reduction(formula)
    layout = GadgetLayout(formula)

    assert net.n == 3 * 3 + 2 + 1 == layout.num_cells
    assert net.m == 3 + 2 + 1 == layout.num_ues
    assert net.num_ru == 1 and net.noise_power == 1.0


def test_gadget_loads_for_satisfying_assignment():
    formula = CnfFormula(3, ((1, 2, 3), (-1, 2, -3), (1, -2, 3)))
    values = (True, True, True)
    assert formula.evaluate(values)
    layout = GadgetLayout(formula)
    net = build_sat_reduction(formula)

    report = fixed_point_load(association_for_assignment(formula, values), net)
    load = report.load

    assert report.converged and report.feasible
    # u0 sees n active literal cells at load 1: SINR (n+1)/(n+1)
    assert load[0] == pytest.approx(1.0, rel=1e-9)
    for i, value in enumerate(values, start=1):
        active = layout.negative(i) if value else layout.positive(i)
        idle = layout.positive(i) if value else layout.negative(i)
        assert load[layout.var_home(i)] == pytest.approx(1.0, rel=1e-9)
        assert load[active] == pytest.approx(1.0, rel=1e-9)
        assert load[idle] == 0.0
    for k, clause in enumerate(formula.clauses, start=1):
        false_literals = sum(values[abs(l) - 1] != (l > 0) for l in clause)
        expected = 1.0 / math.log2(1.0 + 3.0 / (false_literals + 1.0))
        assert load[layout.clause_home(k)] == pytest.approx(expected, rel=1e-9)


def test_truth_assignment_recovered_from_association():
    formula = CnfFormula(3, ((1, 2, 3),))
    values = (False, True, False)

    assoc = association_for_assignment(formula, values)

    assert truth_assignment_from_association(formula, assoc) == values


def test_unsatisfied_clause_overloads_its_home():
    formula = CnfFormula(3, ((1, 2, 3),))
    values = (False, False, False)
    layout = GadgetLayout(formula)

    report = fixed_point_load(association_for_assignment(formula, values),
                              build_sat_reduction(formula))

    assert report.load[layout.clause_home(1)] > 1.0


def test_unsatisfiable_formula_has_no_feasible_association():
    assert find_feasible_association(build_sat_reduction(UNSAT)) is None


def test_feasibility_matches_satisfiability_on_random_formulas():
    rng = np.random.default_rng(2024)
    for _ in range(50):
        formula = random_3cnf(int(rng.integers(3, 5)),
                              int(rng.integers(1, 5)), rng)
        net = build_sat_reduction(formula)

        assoc = find_feasible_association(net)

        assert (assoc is not None) == is_satisfiable(formula)
        if assoc is not None:
            values = truth_assignment_from_association(formula, assoc)
            assert formula.evaluate(values)
            assert fixed_point_load(assoc, net).max_load <= 1.0 + 1e-9


@pytest.mark.slow
def test_generated_unsatisfiable_formulas_are_load_infeasible():
    rng = np.random.default_rng(7)
    for _ in range(5):
        formula = _unsat_formula(int(rng.integers(3, 5)),
                                 int(rng.integers(1, 3)), rng)
        assert not is_satisfiable(formula)

        assert find_feasible_association(build_sat_reduction(formula)) is None
