from dataclasses import dataclass, field

import numpy as np

from .entities import Cell, CellKind, UserEquipment


@dataclass(frozen=True)
class PathLossLaw:
    """PL(d) = intercept_db + slope_db * log10(d_km)."""
    intercept_db: float
    slope_db: float

    def loss_db(self, distance_m):
        return self.intercept_db + self.slope_db * np.log10(
            np.asarray(distance_m, dtype=float) / 1000.0
        )


MACRO_LAW = PathLossLaw(128.1, 37.6)
SMALL_LAW = PathLossLaw(140.7, 36.7)


@dataclass(frozen=True)
class ChannelConfig:
    macro_law: PathLossLaw = field(default=MACRO_LAW)
    small_law: PathLossLaw = field(default=SMALL_LAW)
    min_distance_m: float = 10.0
    macro_shadow_db: float = 6.0
    small_shadow_db: float = 3.0

    def law(self, kind: CellKind) -> PathLossLaw:
        return self.macro_law if kind == CellKind.MACRO else self.small_law

    def shadow_std(self, kind: CellKind) -> float:
        if kind == CellKind.MACRO:
            return self.macro_shadow_db
        return self.small_shadow_db


def distance_m(a, b) -> float:
    return float(np.hypot(a[0] - b[0], a[1] - b[1]))


def gain_from_loss(loss_db):
    """Linear gain for a total loss in dB, capped at 1."""
    return np.minimum(1.0, np.power(10.0, -np.asarray(loss_db) / 10.0))


def link_gain(
    cell: Cell,
    ue: UserEquipment,
    shadow_db: float,
    config: ChannelConfig = ChannelConfig(),
) -> float:
    """
    Linear power gain of the cell -> UE link.

    Distances below config.min_distance_m are clamped before the path-loss
    law is applied. Shadowing is additive in dB.
    """
    d = max(distance_m(cell.position, ue.position), config.min_distance_m)
    loss = config.law(cell.kind).loss_db(d) + shadow_db
    return float(gain_from_loss(loss))


def gain_matrix(cells, ues, shadow_db: np.ndarray, config: ChannelConfig):
    """Vectorized link_gain over every cell-UE pair; shadow_db is n x m."""
    cell_xy = np.array([c.position for c in cells], dtype=float)
    ue_xy = np.array([u.position for u in ues], dtype=float)
    diff = cell_xy[:, None, :] - ue_xy[None, :, :]
    dist = np.maximum(np.hypot(diff[..., 0], diff[..., 1]),
                      config.min_distance_m)
    loss = np.empty_like(dist)
    for i, cell in enumerate(cells):
        loss[i] = config.law(cell.kind).loss_db(dist[i])
    return gain_from_loss(loss + shadow_db)
