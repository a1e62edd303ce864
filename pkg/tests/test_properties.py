"""Randomized property suites over many generated instances."""
import numpy as np
import pytest

from loadcoupling.approx import (
    LinearizationMode,
    build_segment_table,
    global_load_bounds,
    interference_cap,
    linearize,
    ue_load_of_interference,
)
from loadcoupling.bench import brute_force_optimum, calibrate_demands
from loadcoupling.bench.oracle import enumerate_associations
from loadcoupling.coupling import (
    Objective,
    fixed_point_load,
    load_step,
    load_vector,
    sinr_step,
)
from loadcoupling.milp import (
    build_milp,
    compile_model,
    milp_pipeline,
    solve_branch_and_bound,
)
from loadcoupling.minl import run_minl
from loadcoupling.netmodel import (
    Association,
    ScenarioConfig,
    generate_hexnet,
    with_uniform_demand,
)

TINY_COUNT = 20


@pytest.fixture(scope="module")
def tiny_nets():
    """At most 4 cells, 6 UEs and 2 candidates per UE."""
    nets = []
    for seed in range(TINY_COUNT):
        config = ScenarioConfig(hexagons=1,
                                small_cells_per_hexagon=1 + seed % 3,
                                ues_per_hexagon=2 + seed % 5, candidates=2)
        nets.append(with_uniform_demand(generate_hexnet(config, seed), 1e6))
    return nets


@pytest.mark.slow
def test_load_map_is_standard_on_many_instances():
    config = ScenarioConfig.desk_scale()
    for seed in range(50):
        net = with_uniform_demand(generate_hexnet(config, 100 + seed), 2e5)
        rng = np.random.default_rng(seed)
        assoc = Association.all_candidates(net)
        x = rng.uniform(0.01, 1.0, net.n)
        y = x + rng.uniform(0.0, 0.5, net.n)
        fx = load_step(x, net, assoc, assoc)
        assert np.all(fx <= load_step(y, net, assoc, assoc) + 1e-15)
        served = fx > 0
        for alpha in (1.1, 2.0, 5.0):
            scaled = load_step(alpha * x, net, assoc, assoc)
            assert np.all(scaled[served] < alpha * fx[served])

        loads = [fixed_point_load(assoc, net, start=s).load
                 for s in (None, np.ones(net.n), np.full(net.n, 5.0))]
        for load in loads[1:]:
            assert np.abs(load - loads[0]).max() <= 1e-8

        report = fixed_point_load(assoc, net)
        gamma = report.sinr
        residual = np.abs(sinr_step(gamma, net, assoc, assoc) - gamma) / gamma
        assert residual.max() <= 1e-8
        assert np.abs(load_vector(gamma, assoc, net) - report.load).max() \
            <= 1e-8


def test_linearization_on_random_intervals(desk_hexnets):
    net = desk_hexnets[0]
    rng = np.random.default_rng(2024)

    for _ in range(500):
        j = int(rng.integers(net.m))
        options = net.options[j]
        ell = options[rng.integers(len(options))]
        cap = interference_cap(ell, j, net)
        w_lo, w_hi = np.sort(rng.uniform(0.0, cap, 2))
        f_lo = ue_load_of_interference(ell, j, w_lo, net)
        f_hi = ue_load_of_interference(ell, j, w_hi, net)
        f_mid = ue_load_of_interference(ell, j, 0.5 * (w_lo + w_hi), net)
        assert f_mid >= 0.5 * (f_lo + f_hi) - 1e-12

        secant = linearize(ell, j, w_lo, w_hi, net, LinearizationMode.SECANT)
        tangent = linearize(ell, j, w_lo, w_hi, net,
                            LinearizationMode.TANGENT_MID)
        ws = rng.uniform(w_lo, w_hi, 200)
        exact = ue_load_of_interference(ell, j, ws, net)
        assert np.all(secant.value(ws) <= exact + 1e-12)
        assert np.all(tangent.value(ws) >= exact - 1e-12)
        assert secant.value(w_lo) == pytest.approx(f_lo, rel=1e-9)
        assert secant.value(w_hi) == pytest.approx(f_hi, rel=1e-9)


@pytest.mark.slow
@pytest.mark.parametrize("objective", list(Objective))
def test_bound_is_sound_on_tiny_instances(tiny_nets, objective):
    for net in tiny_nets:
        _, optimum = brute_force_optimum(net, objective)
        bounds = global_load_bounds(net)

        _, report, bound = milp_pipeline(net, objective)

        assert bound <= optimum + 1e-9
        assert report.objective(objective) >= optimum - 1e-9
        for assoc in enumerate_associations(net):
            load = fixed_point_load(assoc, net).load
            assert np.all(bounds.lower <= load + 1e-9)
            assert np.all(load <= bounds.upper + 1e-9)


@pytest.mark.parametrize("objective", list(Objective))
@pytest.mark.parametrize("lb", [True, False])
def test_search_is_exact_on_tiny_instances(tiny_nets, objective, lb):
    for net in tiny_nets:
        table = build_segment_table(net, global_load_bounds(net))
        model = build_milp(net, table, objective, lb)
        cm = compile_model(model)
        best = min(
            value for value, _, feasible in (
                cm.evaluate_leaf(a.option_indices(net))
                for a in enumerate_associations(net)
            ) if feasible
        )

        solution = solve_branch_and_bound(model)

        assert abs(solution.objective_lp - best) <= 1e-8


@pytest.mark.slow
@pytest.mark.parametrize("objective", list(Objective))
def test_minl_moves_only_lower_loads(tiny_nets, objective):
    for net in tiny_nets:
        home = Association.home_only(net)
        baseline = fixed_point_load(home, net)
        _, optimum = brute_force_optimum(net, objective)

        result = run_minl(net, home)

        assoc, previous = home, baseline.load
        for record in result.trace:
            if record.kind == "add":
                assoc = assoc.with_link(record.cell, record.ue)
            else:
                assoc = assoc.without_link(record.cell, record.ue)
            load = fixed_point_load(assoc, net).load
            assert np.all(load <= previous + 1e-8)
            previous = load
        assert assoc == result.assoc
        value = result.report.objective(objective)
        assert optimum - 1e-9 <= value <= baseline.objective(objective) + 1e-12


@pytest.mark.slow
def test_minl_improves_desk_scale_at_top_demand():
    config = ScenarioConfig.desk_scale()
    for seed in range(5):
        net = generate_hexnet(config, seed)
        top = calibrate_demands(net, points=2)[-1]
        net = with_uniform_demand(net, top)
        baseline = fixed_point_load(Association.home_only(net), net)

        result = run_minl(net, Association.home_only(net))

        assert result.trace
        assert result.report.sum_load < baseline.sum_load
        assert result.report.max_load < baseline.max_load
