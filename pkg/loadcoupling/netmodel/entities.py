import dataclasses
from dataclasses import dataclass, field
from enum import Enum
from functools import cached_property
from typing import Sequence, Tuple

import numpy as np

from loadcoupling.errors import InvalidConfigError, PreconditionError


class CellKind(str, Enum):
    MACRO = "macro"
    SMALL = "small"


@dataclass(frozen=True)
class Cell:
    id: int
    kind: CellKind
    position: Tuple[float, float]
    power_per_ru: float

    def __post_init__(self):
        object.__setattr__(self, "kind", CellKind(self.kind))
        object.__setattr__(
            self, "position", tuple(float(c) for c in self.position)
        )
        if not self.power_per_ru > 0:
            raise InvalidConfigError(
                f"cell {self.id}: power_per_ru must be positive, "
                f"got {self.power_per_ru}"
            )


@dataclass(frozen=True)
class UserEquipment:
    id: int
    position: Tuple[float, float]
    demand: float
    home_cell: int
    candidates: Tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(
            self, "position", tuple(float(c) for c in self.position)
        )
        object.__setattr__(
            self, "candidates", tuple(int(c) for c in self.candidates)
        )
        if not self.candidates:
            raise InvalidConfigError(f"UE {self.id}: empty candidate set")
        if len(set(self.candidates)) != len(self.candidates):
            raise InvalidConfigError(
                f"UE {self.id}: repeated candidate in {self.candidates}"
            )
        if self.home_cell not in self.candidates:
            raise InvalidConfigError(
                f"UE {self.id}: home cell {self.home_cell} is not a candidate"
            )
        if not self.demand > 0:
            raise InvalidConfigError(
                f"UE {self.id}: demand must be positive, got {self.demand}"
            )


def association_options(ue: UserEquipment) -> Tuple[frozenset, ...]:
    """
    Serving sets UE ue may use: the home cell united with every subset of
    its other candidates.

    Subsets are enumerated by bitmask over the candidate order, so option 0
    is home-only and option 2^(k-1) - 1 is all candidates. The position of a
    set in the returned tuple is the option index used in model variable
    names.
    """
    others = [c for c in ue.candidates if c != ue.home_cell]
    options = []
    for mask in range(1 << len(others)):
        chosen = {others[b] for b in range(len(others)) if mask >> b & 1}
        options.append(frozenset({ue.home_cell} | chosen))
    return tuple(options)


@dataclass(frozen=True, eq=False)
class NetworkInstance:
    """
    Immutable physical scenario.

    gain is the n x m matrix of linear power gains, gain[i, j] from cell i to
    UE j. It is stored read-only so instances can be shared freely.
    """
    cells: Tuple[Cell, ...]
    ues: Tuple[UserEquipment, ...]
    gain: np.ndarray
    noise_power: float
    num_ru: int
    ru_bandwidth: float

    def __post_init__(self):
        object.__setattr__(self, "cells", tuple(self.cells))
        object.__setattr__(self, "ues", tuple(self.ues))
        gain = np.array(self.gain, dtype=float)
        gain.setflags(write=False)
        object.__setattr__(self, "gain", gain)

        n, m = len(self.cells), len(self.ues)
        if n < 1 or m < 1:
            raise InvalidConfigError("an instance needs at least 1 cell and 1 UE")
        if gain.shape != (n, m):
            raise InvalidConfigError(
                f"gain matrix has shape {gain.shape}, expected {(n, m)}"
            )
        if not np.all(np.isfinite(gain)) or np.any(gain < 0):
            raise InvalidConfigError("gains must be finite and non-negative")
        if not self.noise_power > 0:
            raise InvalidConfigError("noise_power must be positive")
        if int(self.num_ru) < 1:
            raise InvalidConfigError("num_ru must be at least 1")
        if not self.ru_bandwidth > 0:
            raise InvalidConfigError("ru_bandwidth must be positive")
        if [c.id for c in self.cells] != list(range(n)):
            raise InvalidConfigError("cell ids must be 0..n-1 in order")
        if [u.id for u in self.ues] != list(range(m)):
            raise InvalidConfigError("UE ids must be 0..m-1 in order")
        for ue in self.ues:
            if any(c < 0 or c >= n for c in ue.candidates):
                raise InvalidConfigError(
                    f"UE {ue.id}: candidate outside 0..{n - 1}"
                )

    @property
    def n(self) -> int:
        return len(self.cells)

    @property
    def m(self) -> int:
        return len(self.ues)

    @cached_property
    def powers(self) -> np.ndarray:
        return np.array([c.power_per_ru for c in self.cells], dtype=float)

    @cached_property
    def demands(self) -> np.ndarray:
        return np.array([u.demand for u in self.ues], dtype=float)

    @cached_property
    def received_power(self) -> np.ndarray:
        """p_i * g_ij for every cell-UE pair."""
        rx = self.powers[:, None] * self.gain
        rx.setflags(write=False)
        return rx

    @cached_property
    def demand_scale(self) -> np.ndarray:
        """d_j / (M * B): the load a UE adds at unit spectral efficiency."""
        return self.demands / (self.num_ru * self.ru_bandwidth)

    @cached_property
    def home_cells(self) -> np.ndarray:
        return np.array([u.home_cell for u in self.ues], dtype=int)

    @cached_property
    def candidate_mask(self) -> np.ndarray:
        mask = np.zeros((self.n, self.m), dtype=bool)
        for ue in self.ues:
            mask[list(ue.candidates), ue.id] = True
        mask.setflags(write=False)
        return mask

    @cached_property
    def options(self) -> Tuple[Tuple[frozenset, ...], ...]:
        return tuple(association_options(ue) for ue in self.ues)

    def cells_of_kind(self, kind: CellKind) -> np.ndarray:
        return np.array([c.kind == kind for c in self.cells], dtype=bool)

    def with_ues(self, ues: Sequence[UserEquipment]) -> "NetworkInstance":
        return dataclasses.replace(self, ues=tuple(ues))


def with_uniform_demand(net: NetworkInstance, demand: float) -> NetworkInstance:
    """Same instance with every UE demand replaced by demand (bit/s)."""
    return net.with_ues(
        dataclasses.replace(ue, demand=float(demand)) for ue in net.ues
    )


@dataclass(frozen=True)
class Association:
    """Per-UE serving cell sets, serving[j] being the cells that serve UE j."""
    serving: Tuple[frozenset, ...] = field()

    def __post_init__(self):
        object.__setattr__(
            self,
            "serving",
            tuple(frozenset(int(c) for c in s) for s in self.serving),
        )

    @classmethod
    def home_only(cls, net: NetworkInstance) -> "Association":
        return cls(tuple(frozenset({u.home_cell}) for u in net.ues))

    @classmethod
    def all_candidates(cls, net: NetworkInstance) -> "Association":
        return cls(tuple(frozenset(u.candidates) for u in net.ues))

    @classmethod
    def from_kappa(cls, kappa: np.ndarray) -> "Association":
        kappa = np.asarray(kappa, dtype=bool)
        return cls(
            tuple(frozenset(np.flatnonzero(kappa[:, j]).tolist())
                  for j in range(kappa.shape[1]))
        )

    @property
    def m(self) -> int:
        return len(self.serving)

    def kappa(self, n: int) -> np.ndarray:
        """Binary n x m matrix, kappa[i, j] set when cell i serves UE j."""
        kappa = np.zeros((n, len(self.serving)), dtype=bool)
        for j, cells in enumerate(self.serving):
            kappa[list(cells), j] = True
        return kappa

    def with_link(self, cell: int, ue: int) -> "Association":
        serving = list(self.serving)
        serving[ue] = serving[ue] | {cell}
        return Association(tuple(serving))

    def without_link(self, cell: int, ue: int) -> "Association":
        serving = list(self.serving)
        serving[ue] = serving[ue] - {cell}
        return Association(tuple(serving))

    def served_by(self, cell: int) -> Tuple[int, ...]:
        return tuple(j for j, s in enumerate(self.serving) if cell in s)

    def jt_ue_count(self) -> int:
        return sum(1 for s in self.serving if len(s) >= 2)

    def option_indices(self, net: NetworkInstance) -> Tuple[int, ...]:
        return tuple(
            net.options[j].index(s) for j, s in enumerate(self.serving)
        )

    def validate(self, net: NetworkInstance) -> "Association":
        if len(self.serving) != net.m:
            raise PreconditionError(
                f"association covers {len(self.serving)} UEs, "
                f"instance has {net.m}"
            )
        for ue, cells in zip(net.ues, self.serving):
            if ue.home_cell not in cells:
                raise PreconditionError(
                    f"UE {ue.id} is not served by its home cell {ue.home_cell}"
                )
            if not cells <= set(ue.candidates):
                raise PreconditionError(
                    f"UE {ue.id} served by non-candidates "
                    f"{sorted(cells - set(ue.candidates))}"
                )
        return self

    def to_lists(self) -> list:
        return [sorted(s) for s in self.serving]

