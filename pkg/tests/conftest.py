import numpy as np
import pytest

from loadcoupling.netmodel import (
    Cell,
    CellKind,
    NetworkInstance,
    ScenarioConfig,
    UserEquipment,
    generate_hexnet,
    with_uniform_demand,
)


def make_network(gain, demands, candidates, homes=None, noise=0.01,
                 powers=None, num_ru=1, ru_bandwidth=1.0, kinds=None):
    """Hand-built instance; gain[i][j] is cell i -> UE j."""
    gain = np.asarray(gain, dtype=float)
    n, m = gain.shape
    powers = powers or [1.0] * n
    kinds = kinds or [CellKind.MACRO] * n
    homes = homes or [c[0] for c in candidates]
    cells = tuple(
        Cell(id=i, kind=kinds[i], position=(100.0 * i, 0.0),
             power_per_ru=powers[i])
        for i in range(n)
    )
    ues = tuple(
        UserEquipment(id=j, position=(50.0 * j, 10.0), demand=demands[j],
                      home_cell=homes[j], candidates=tuple(candidates[j]))
        for j in range(m)
    )
    return NetworkInstance(cells=cells, ues=ues, gain=gain, noise_power=noise,
                           num_ru=num_ru, ru_bandwidth=ru_bandwidth)


@pytest.fixture
def two_cell_net():
    """
    Cell 1 can help UE 0 by joint transmission; doing so lowers both loads.
    Home-only loads are about (0.0822, 0.2168).
    """
    return make_network(
        gain=[[1.0, 0.9], [1.0, 1.0]],
        demands=[0.2, 0.8],
        candidates=[(0, 1), (1,)],
    )


@pytest.fixture
def single_cell_net():
    return make_network(gain=[[1.0]], demands=[1.0], candidates=[(0,)],
                        noise=1.0)


@pytest.fixture
def small_hexnet():
    """One hexagon, two small cells, four UEs, up to four options each."""
    config = ScenarioConfig(hexagons=1, small_cells_per_hexagon=2,
                            ues_per_hexagon=4, candidates=3)
    return with_uniform_demand(generate_hexnet(config, seed=7), 2e6)


@pytest.fixture(scope="session")
def desk_hexnets():
    config = ScenarioConfig.desk_scale()
    return [with_uniform_demand(generate_hexnet(config, seed), 2e5)
            for seed in range(5)]
