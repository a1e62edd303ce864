import dataclasses
import logging
import math
from dataclasses import dataclass, field
from typing import Any, Dict, List

import numpy as np

from loadcoupling.errors import InvalidConfigError

from .channel import ChannelConfig, gain_matrix
from .entities import Cell, CellKind, NetworkInstance, UserEquipment

logger = logging.getLogger(__name__)

# pointy-top axial neighbour directions
_AXIAL_DIRECTIONS = ((1, 0), (1, -1), (0, -1), (-1, 0), (-1, 1), (0, 1))


@dataclass(frozen=True)
class ScenarioConfig:
    """
    Parameters of a hexagonal HetNet layout.

    Defaults give the 19-hexagon, 570-UE scenario; desk_scale() gives the
    7-hexagon one used for quick runs.
    """
    hexagons: int = 19
    radius_m: float = 500.0
    small_cells_per_hexagon: int = 2
    ues_per_hexagon: int = 30
    macro_power_w: float = 0.4
    small_power_w: float = 0.05
    noise_density_dbm_hz: float = -174.0
    num_ru: int = 100
    ru_bandwidth_hz: float = 180e3
    candidates: int = 3
    demand_bps: float = 5e5
    channel: ChannelConfig = field(default_factory=ChannelConfig)

    def __post_init__(self):
        if self.hexagons < 1:
            raise InvalidConfigError("hexagons must be at least 1")
        if self.ues_per_hexagon < 1:
            raise InvalidConfigError("ues_per_hexagon must be at least 1")
        if self.small_cells_per_hexagon < 0:
            raise InvalidConfigError("small_cells_per_hexagon must be >= 0")
        if self.candidates < 1:
            raise InvalidConfigError("candidates must be at least 1")
        for name in ("radius_m", "macro_power_w", "small_power_w",
                     "ru_bandwidth_hz", "demand_bps"):
            if not getattr(self, name) > 0:
                raise InvalidConfigError(f"{name} must be positive")
        if self.num_ru < 1:
            raise InvalidConfigError("num_ru must be at least 1")

    @classmethod
    def desk_scale(cls, **overrides) -> "ScenarioConfig":
        params = dict(hexagons=7, small_cells_per_hexagon=1, ues_per_hexagon=6)
        params.update(overrides)
        return cls(**params)

    def densified(self) -> "ScenarioConfig":
        """Same layout with both UEs and SCs per hexagon doubled."""
        return dataclasses.replace(
            self,
            small_cells_per_hexagon=2 * self.small_cells_per_hexagon,
            ues_per_hexagon=2 * self.ues_per_hexagon,
        )

    @property
    def noise_power_w(self) -> float:
        """Noise density integrated over one RU, no noise figure."""
        return 10 ** ((self.noise_density_dbm_hz - 30.0) / 10.0) * \
            self.ru_bandwidth_hz

    def to_dict(self) -> Dict[str, Any]:
        return dataclasses.asdict(self)


def hexagon_centers(count: int, radius_m: float) -> np.ndarray:
    """Centers of count pointy-top hexagons, spiralling out from the origin."""
    axial = [(0, 0)]
    ring = 1
    while len(axial) < count:
        q, r = -ring, ring
        for dq, dr in _AXIAL_DIRECTIONS:
            for _ in range(ring):
                axial.append((q, r))
                q, r = q + dq, r + dr
        ring += 1
    axial = np.array(axial[:count], dtype=float)
    x = math.sqrt(3.0) * radius_m * (axial[:, 0] + axial[:, 1] / 2.0)
    y = 1.5 * radius_m * axial[:, 1]
    return np.column_stack([x, y])


def sample_in_hexagon(rng: np.random.Generator, center, radius_m: float,
                      count: int) -> np.ndarray:
    """Uniform points inside a pointy-top hexagon by rejection sampling."""
    if count == 0:
        return np.empty((0, 2))
    half_width = math.sqrt(3.0) / 2.0 * radius_m
    points: List[np.ndarray] = []
    found = 0
    while found < count:
        batch = rng.uniform(
            low=(-half_width, -radius_m),
            high=(half_width, radius_m),
            size=(2 * (count - found) + 4, 2),
        )
        ax = np.abs(batch[:, 0])
        inside = np.abs(batch[:, 1]) <= radius_m - ax / math.sqrt(3.0)
        batch = batch[inside][: count - found]
        points.append(batch)
        found += len(batch)
    return np.vstack(points) + np.asarray(center, dtype=float)


def top_candidates(received: np.ndarray, k: int) -> List[tuple]:
    """
    Per UE (column), the k cells with the highest received power, best
    first, ties going to the lower cell id.
    """
    n, m = received.shape
    ids = np.arange(n)
    result = []
    for j in range(m):
        order = np.lexsort((ids, -received[:, j]))
        result.append(tuple(int(i) for i in order[:k]))
    return result


def assign_home_and_candidates(net: NetworkInstance, k: int) -> NetworkInstance:
    """
    Reassign every UE's candidate set to its k strongest cells by received
    power p_i * g_ij and its home cell to the strongest of them.
    """
    if k < 1:
        raise InvalidConfigError(f"candidate count must be >= 1, got {k}")
    if k > net.n:
        raise InvalidConfigError(
            f"candidate count {k} exceeds the number of cells {net.n}"
        )
    ranked = top_candidates(net.received_power, k)
    return net.with_ues(
        dataclasses.replace(ue, home_cell=cands[0], candidates=cands)
        for ue, cands in zip(net.ues, ranked)
    )


def generate_hexnet(config: ScenarioConfig, seed: int) -> NetworkInstance:
    """
    Generate a hexagonal HetNet instance.

    One macro cell sits at each hexagon center; small cells and UEs are
    uniform inside their hexagon. Macro cells take ids 0..H-1, small cells
    follow. Identical (config, seed) pairs give identical instances.
    """
    rng = np.random.default_rng(seed)
    centers = hexagon_centers(config.hexagons, config.radius_m)

    cells = [
        Cell(id=h, kind=CellKind.MACRO, position=tuple(c),
             power_per_ru=config.macro_power_w)
        for h, c in enumerate(centers)
    ]
    for center in centers:
        for xy in sample_in_hexagon(rng, center, config.radius_m,
                                    config.small_cells_per_hexagon):
            cells.append(Cell(id=len(cells), kind=CellKind.SMALL,
                              position=tuple(xy),
                              power_per_ru=config.small_power_w))

    home_placeholder = (0,)
    ues = []
    for center in centers:
        for xy in sample_in_hexagon(rng, center, config.radius_m,
                                    config.ues_per_hexagon):
            ues.append(UserEquipment(id=len(ues), position=tuple(xy),
                                     demand=config.demand_bps, home_cell=0,
                                     candidates=home_placeholder))

    sigma = np.array([config.channel.shadow_std(c.kind) for c in cells])
    shadow_db = rng.standard_normal((len(cells), len(ues))) * sigma[:, None]
    gain = gain_matrix(cells, ues, shadow_db, config.channel)

    net = NetworkInstance(
        cells=tuple(cells),
        ues=tuple(ues),
        gain=gain,
        noise_power=config.noise_power_w,
        num_ru=config.num_ru,
        ru_bandwidth=config.ru_bandwidth_hz,
    )
    net = assign_home_and_candidates(net, min(config.candidates, net.n))
    logger.info(
        f"Generated instance seed={seed}: {net.n} cells, {net.m} UEs"
    )
    return net
