import numpy as np
import pytest
from scipy.optimize import brentq

from conftest import make_network
from loadcoupling.approx import (
    LinearizationMode,
    LinearSegment,
    LoadBounds,
    build_segment_table,
    global_load_bounds,
    interference_cap,
    interference_interval,
    linearize,
    option_intervals,
    ue_load_derivative,
    ue_load_of_interference,
)
from loadcoupling.coupling import fixed_point_load
from loadcoupling.errors import (
    DegenerateLinkError,
    InvalidConfigError,
    PreconditionError,
)
from loadcoupling.netmodel import Association


def _random_associations(net, rng, count):
    for _ in range(count):
        yield Association(tuple(
            options[rng.integers(len(options))] for options in net.options
        ))


@pytest.mark.parametrize("index", range(3))
def test_bounds_enclose_every_association(desk_hexnets, index):
    net = desk_hexnets[index]
    bounds = global_load_bounds(net)
    rng = np.random.default_rng(index)
    assocs = [Association.home_only(net), Association.all_candidates(net)]
    assocs += list(_random_associations(net, rng, 10))

    for assoc in assocs:
        load = fixed_point_load(assoc, net).load
        assert np.all(bounds.lower <= load + 1e-9)
        assert np.all(load <= bounds.upper + 1e-9)


@pytest.mark.parametrize("index", range(3))
def test_intervals_contain_actual_interference(desk_hexnets, index):
    net = desk_hexnets[index]
    bounds = global_load_bounds(net)
    rng = np.random.default_rng(10 + index)
    rx = net.received_power

    for assoc in _random_associations(net, rng, 5):
        load = fixed_point_load(assoc, net).load
        for j, ell in enumerate(assoc.serving):
            outside = [i for i in range(net.n) if i not in ell]
            w = float(rx[outside, j] @ load[outside])
            w_lo, w_hi = interference_interval(ell, j, bounds, net)
            assert w_lo - 1e-15 <= w <= w_hi + 1e-15


def test_trivial_bounds_give_zero_to_cap(two_cell_net):
    intervals = option_intervals(two_cell_net)

    assert intervals[0][0] == (0.0, interference_cap({0}, 0, two_cell_net))
    assert intervals[0][1] == (0.0, 0.0)
    assert intervals[1][0] == (0.0, 0.9)


def test_load_bounds_validation():
    LoadBounds.trivial(3)
    with pytest.raises(InvalidConfigError):
        LoadBounds(np.array([0.5]), np.array([0.4]))
    with pytest.raises(InvalidConfigError):
        LoadBounds(np.array([-0.1]), np.array([0.4]))


def test_ue_load_curve_matches_fixed_point_term(two_cell_net):
    load = ue_load_of_interference({0}, 0, 0.3, two_cell_net)

    assert load == pytest.approx(0.2 / np.log2(1.0 + 1.0 / (0.3 + 0.01)))


def test_ue_load_derivative_matches_finite_difference(two_cell_net):
    w, h = 0.4, 1e-6

    slope = ue_load_derivative({0}, 0, w, two_cell_net)
    upper = ue_load_of_interference({0}, 0, w + h, two_cell_net)
    lower = ue_load_of_interference({0}, 0, w - h, two_cell_net)

    assert slope == pytest.approx((upper - lower) / (2 * h), rel=1e-6)
    assert slope > 0


def test_zero_signal_set_is_degenerate():
    net = make_network(gain=[[1.0, 0.0], [0.0, 1.0]], demands=[1.0, 1.0],
                       candidates=[(0,), (1, 0)])
    with pytest.raises(DegenerateLinkError):
        ue_load_of_interference({0}, 1, 0.1, net)
    with pytest.raises(PreconditionError):
        ue_load_of_interference(set(), 1, 0.1, net)


@pytest.mark.parametrize("w_lo, w_hi", [(0.0, 1.0), (0.2, 0.5), (0.01, 0.02)])
def test_secant_underestimates_and_tangent_overestimates(two_cell_net, w_lo,
                                                         w_hi):
    secant = linearize({0}, 0, w_lo, w_hi, two_cell_net,
                       LinearizationMode.SECANT)
    tangent = linearize({0}, 0, w_lo, w_hi, two_cell_net,
                        LinearizationMode.TANGENT_MID)

    for w in np.linspace(w_lo, w_hi, 11):
        exact = ue_load_of_interference({0}, 0, w, two_cell_net)
        assert secant.value(w) <= exact + 1e-12
        assert tangent.value(w) >= exact - 1e-12
    assert secant.value(w_lo) == pytest.approx(
        ue_load_of_interference({0}, 0, w_lo, two_cell_net), rel=1e-12
    )


def test_point_interval_has_zero_slope(two_cell_net):
    segment = linearize({0}, 0, 0.3, 0.3, two_cell_net)

    assert segment.slope == 0.0
    assert segment.intercept == ue_load_of_interference({0}, 0, 0.3,
                                                        two_cell_net)


def test_segment_interval_must_lie_under_cap():
    with pytest.raises(InvalidConfigError):
        LinearSegment(1.0, 0.0, 0.0, 2.0, cap=1.0)
    with pytest.raises(PreconditionError):
        linearize({0}, 0, 0.5, 0.1, make_network([[1.0]], [1.0], [(0,)]))


def test_segment_table_covers_every_option(small_hexnet):
    bounds = global_load_bounds(small_hexnet)

    table = build_segment_table(small_hexnet, bounds)

    assert table.m == small_hexnet.m
    for j, options in enumerate(small_hexnet.options):
        assert len(table.segments[j]) == len(options)
        for l, ell in enumerate(options):
            seg = table.segment(j, l)
            assert seg.cap == pytest.approx(
                interference_cap(ell, j, small_hexnet)
            )
            assert 0.0 <= seg.w_lo <= seg.w_hi <= seg.cap + 1e-15


@pytest.fixture
def three_cell_net():
    """UE 0 hears the cells at 1.0, 0.5 and 0.25; sigma^2 = 0.1."""
    return make_network(gain=[[1.0, 1.0], [0.5, 0.1], [0.25, 0.1]],
                        demands=[1.0, 1.0], candidates=[(0,), (0,)],
                        noise=0.1)


def test_ue_load_worked_values(three_cell_net):
    def f(w):
        return ue_load_of_interference({0}, 0, w, three_cell_net)

    assert f(0.0) == pytest.approx(1.0 / np.log2(11.0), rel=1e-12)
    assert f(0.0) == pytest.approx(0.28907, abs=1e-5)
    assert f(0.9) == pytest.approx(1.0, rel=1e-12)
    assert f(0.2) < f(0.3)


def test_interference_cap_sums_outside_cells(three_cell_net):
    assert interference_cap({0}, 0, three_cell_net) == pytest.approx(0.75)
    assert interference_cap({0, 1, 2}, 0, three_cell_net) == 0.0
    assert interference_cap(set(), 0, three_cell_net) == pytest.approx(1.75)


def test_interference_interval_weighs_the_bounds(three_cell_net):
    bounds = LoadBounds(np.array([0.0, 0.2, 0.4]), np.array([0.0, 0.5, 0.8]))

    w_lo, w_hi = interference_interval({0}, 0, bounds, three_cell_net)

    assert w_lo == pytest.approx(0.2)
    assert w_hi == pytest.approx(0.45)
    point = LoadBounds(np.full(3, 0.3), np.full(3, 0.3))
    assert len(set(interference_interval({0}, 0, point, three_cell_net))) == 1


def test_interval_clamped_to_cap_when_overloaded(three_cell_net):
    bounds = LoadBounds(np.zeros(3), np.full(3, 4.0))

    assert interference_interval({0}, 0, bounds, three_cell_net)[1] == \
        pytest.approx(0.75)


def test_secant_worked_example():
    net = make_network(gain=[[1.0], [1.0]], demands=[1.0], candidates=[(0,)],
                       noise=0.1)

    segment = linearize({0}, 0, 0.0, 0.9, net)

    assert segment.slope == pytest.approx(0.78992, abs=1e-5)
    assert segment.intercept == pytest.approx(0.28907, abs=1e-5)
    assert segment.value(0.45) == pytest.approx(0.64453, abs=1e-5)
    exact = ue_load_of_interference({0}, 0, 0.45, net)
    assert exact == pytest.approx(0.669, abs=1e-3)
    assert segment.value(0.45) < exact


def test_single_link_bounds_coincide(single_cell_net):
    bounds = global_load_bounds(single_cell_net)

    assert bounds.lower == pytest.approx([1.0])
    assert bounds.upper == pytest.approx([1.0])


def test_symmetric_pair_bounds_match_scalar_roots():
    net = make_network(gain=[[1.0, 0.25], [0.25, 1.0]], demands=[0.3, 0.3],
                       candidates=[(0, 1), (1, 0)], noise=0.1)

    bounds = global_load_bounds(net)

    lower = 0.3 / np.log2(1.0 + 1.25 / 0.1)
    upper = brentq(
        lambda x: x - 2 * 0.3 / np.log2(1.0 + 1.0 / (0.25 * x + 0.1)),
        0.0, 1.0, xtol=1e-14,
    )
    assert bounds.lower == pytest.approx([lower, lower], rel=1e-9)
    assert bounds.upper == pytest.approx([upper, upper], abs=1e-8)
