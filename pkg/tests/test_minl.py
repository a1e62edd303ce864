import importlib

import numpy as np
import pytest

from conftest import make_network
from loadcoupling.coupling import Objective, fixed_point_load
from loadcoupling.errors import InvalidConfigError, PreconditionError
from loadcoupling.minl import (
    AdjustmentRecord,
    AdjustmentState,
    MinlOptions,
    Trigger,
    minl,
    neighborhood,
    run_minl,
    try_add_link,
    try_remove_link,
)
from loadcoupling.netmodel import Association


@pytest.fixture
def blind_helper_net():
    """Cell 1 is a candidate of UE 0 but has no path to it."""
    return make_network(
        gain=[[1.0, 0.9], [0.0, 1.0]],
        demands=[0.2, 0.8],
        candidates=[(0, 1), (1,)],
    )


@pytest.fixture
def isolated_net():
    """No cross interference: UE 1 hears only cell 1."""
    return make_network(
        gain=[[1.0, 0.0], [1.0, 1.0]],
        demands=[0.2, 0.8],
        candidates=[(0, 1), (1,)],
    )


def test_adding_helpful_link_is_accepted(two_cell_net):
    state = AdjustmentState.evaluate(Association.home_only(two_cell_net),
                                     two_cell_net)

    decision = try_add_link(state, 1, 0, 5, two_cell_net)

    assert decision.accepted
    assert decision.trigger is Trigger.SUFFICIENT_MET
    assert decision.iterations_used == 1
    assert decision.new_state.assoc.serving[0] == frozenset({0, 1})
    assert decision.new_state.load == pytest.approx([0.0261, 0.1879],
                                                    abs=1e-4)
    assert np.all(decision.new_state.load < state.load)


def test_adding_zero_gain_link_is_rejected(blind_helper_net):
    state = AdjustmentState.evaluate(Association.home_only(blind_helper_net),
                                     blind_helper_net)

    decision = try_add_link(state, 1, 0, 5, blind_helper_net)

    assert not decision.accepted
    assert decision.trigger is Trigger.NECESSARY_FAILED
    assert decision.iterations_used == 1
    assert decision.new_state is None


def test_removing_zero_gain_link_is_accepted(blind_helper_net):
    assoc = Association.home_only(blind_helper_net).with_link(1, 0)
    state = AdjustmentState.evaluate(assoc, blind_helper_net)

    decision = try_remove_link(state, 1, 0, 5, blind_helper_net)

    assert decision.accepted
    assert decision.new_state.assoc == Association.home_only(blind_helper_net)
    assert np.all(decision.new_state.load <= state.load)


def test_removing_needed_link_runs_out_of_iterations(isolated_net):
    assoc = Association.home_only(isolated_net).with_link(1, 0)
    state = AdjustmentState.evaluate(assoc, isolated_net)

    decision = try_remove_link(state, 1, 0, 5, isolated_net)

    assert not decision.accepted
    assert decision.trigger is Trigger.EXHAUSTED
    assert decision.iterations_used == 5


def test_link_preconditions(two_cell_net):
    state = AdjustmentState.evaluate(Association.home_only(two_cell_net),
                                     two_cell_net)
    with pytest.raises(PreconditionError):
        try_add_link(state, 0, 1, 5, two_cell_net)
    with pytest.raises(PreconditionError):
        try_add_link(state, 0, 0, 5, two_cell_net)
    with pytest.raises(PreconditionError):
        try_remove_link(state, 0, 0, 5, two_cell_net)
    with pytest.raises(PreconditionError):
        try_remove_link(state, 1, 0, 5, two_cell_net)


def test_minl_adds_the_helpful_link(two_cell_net):
    result = run_minl(two_cell_net, Association.home_only(two_cell_net))

    assert result.trace[0] == AdjustmentRecord(1, 0, "add", 1)
    assert result.assoc.serving[0] == frozenset({0, 1})
    assert result.rounds == 2
    assert not result.aborted


def test_minl_wrapper_returns_association_and_report(two_cell_net):
    assoc, report = minl(two_cell_net, Association.home_only(two_cell_net),
                         rounds=1, tau=3)

    assert report.converged
    assert report.sum_load == pytest.approx(
        fixed_point_load(assoc, two_cell_net).sum_load
    )


@pytest.mark.parametrize("index", range(3))
@pytest.mark.parametrize("local", [False, True])
def test_minl_never_raises_any_load(desk_hexnets, index, local):
    net = desk_hexnets[index]
    baseline = fixed_point_load(Association.home_only(net), net)

    result = run_minl(net, Association.home_only(net),
                      MinlOptions(local=local))

    result.assoc.validate(net)
    assert np.all(result.report.load <= baseline.load + 1e-8)
    for objective in Objective:
        assert result.report.objective(objective) <= \
            baseline.objective(objective) + 1e-12


def test_neighborhood_contains_the_cell_and_strong_interferers(desk_hexnets):
    net = desk_hexnets[0]
    assoc = Association.home_only(net)
    ue = net.ues[0]
    v = ue.candidates[1]

    near = neighborhood(net, assoc, v, ue.id, threshold_db=30.0)
    wide = neighborhood(net, assoc, v, ue.id, threshold_db=300.0)

    assert v in near
    assert ue.home_cell in near
    assert near <= wide
    assert wide == frozenset(range(net.n))


def test_options_validation():
    with pytest.raises(InvalidConfigError):
        MinlOptions(rounds=0)
    with pytest.raises(InvalidConfigError):
        MinlOptions(tau=0)


def test_zero_budget_is_exhausted(two_cell_net, blind_helper_net):
    state = AdjustmentState.evaluate(Association.home_only(two_cell_net),
                                     two_cell_net)
    added = try_add_link(state, 1, 0, 0, two_cell_net)

    assoc = Association.home_only(blind_helper_net).with_link(1, 0)
    state = AdjustmentState.evaluate(assoc, blind_helper_net)
    removed = try_remove_link(state, 1, 0, 0, blind_helper_net)

    for decision in (added, removed):
        assert not decision.accepted
        assert decision.trigger is Trigger.EXHAUSTED
        assert decision.iterations_used == 0


def test_nothing_to_adjust_stops_after_one_round():
    net = make_network(gain=[[1.0, 0.2], [0.2, 1.0]], demands=[0.5, 0.5],
                       candidates=[(0,), (1,)])

    result = run_minl(net, Association.home_only(net))

    assert result.rounds == 1
    assert result.trace == []
    assert result.evaluations == 0
    assert result.assoc == Association.home_only(net)


def test_more_rounds_never_hurt(desk_hexnets):
    net = desk_hexnets[4]
    home = Association.home_only(net)

    one = run_minl(net, home, MinlOptions(rounds=1))
    three = run_minl(net, home, MinlOptions(rounds=3))

    assert three.report.sum_load <= one.report.sum_load + 1e-12
    assert three.rounds <= 3
    assert three.trace[:len(one.trace)] == one.trace


def test_initial_fixed_point_is_computed_once(monkeypatch):
    adjustment = importlib.import_module("loadcoupling.minl.adjustment")
    minl_module = importlib.import_module("loadcoupling.minl.minl")

    net = make_network(gain=[[1.0, 0.2], [0.2, 1.0]], demands=[0.5, 0.5],
                       candidates=[(0,), (1,)])
    calls = []

    def counted(*args, **kwargs):
        calls.append(args)
        return fixed_point_load(*args, **kwargs)

    monkeypatch.setattr(adjustment, "fixed_point_load", counted)
    monkeypatch.setattr(minl_module, "fixed_point_load", counted)

    result = run_minl(net, Association.home_only(net))

    assert len(calls) == 1
    assert result.report.sum_load == pytest.approx(
        fixed_point_load(Association.home_only(net), net).sum_load
    )
