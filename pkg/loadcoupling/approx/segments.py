from dataclasses import dataclass
from enum import Enum
from typing import Optional, Tuple

import numpy as np

from loadcoupling.coupling.maps import LN2
from loadcoupling.errors import (
    DegenerateLinkError,
    InvalidConfigError,
    PreconditionError,
)
from loadcoupling.netmodel import NetworkInstance

from .bounds import LoadBounds, interference_interval


class LinearizationMode(str, Enum):
    SECANT = "secant"
    TANGENT_MID = "tangent-mid"


def _signal(ell, j: int, net: NetworkInstance) -> float:
    if not ell:
        raise PreconditionError("serving set is empty")
    signal = float(net.received_power[list(ell), j].sum())
    if signal <= 0.0:
        raise DegenerateLinkError(
            f"cells {sorted(ell)} deliver no signal to UE {j}"
        )
    return signal


def ue_load_of_interference(ell, j: int, w, net: NetworkInstance):
    """
    Load UE j puts on each cell of ell when it sees interference w (watts):
    d_j / (M B log2(1 + S / (w + sigma^2))), S the JT signal power.
    """
    signal = _signal(ell, j, net)
    u = np.asarray(w, dtype=float) + net.noise_power
    load = net.demand_scale[j] * LN2 / np.log(1.0 + signal / u)
    return float(load) if np.ndim(load) == 0 else load


def ue_load_derivative(ell, j: int, w, net: NetworkInstance):
    """d/dw of ue_load_of_interference."""
    signal = _signal(ell, j, net)
    u = np.asarray(w, dtype=float) + net.noise_power
    log_term = np.log(1.0 + signal / u)
    slope = net.demand_scale[j] * LN2 * signal / (
        u * (u + signal) * log_term ** 2
    )
    return float(slope) if np.ndim(slope) == 0 else slope


def interference_cap(ell, j: int, net: NetworkInstance) -> float:
    """Interference at UE j with every cell outside ell fully loaded."""
    outside = np.ones(net.n, dtype=bool)
    outside[list(ell)] = False
    return float(net.received_power[outside, j].sum())


@dataclass(frozen=True)
class LinearSegment:
    slope: float
    intercept: float
    w_lo: float
    w_hi: float
    cap: float
    mode: LinearizationMode = LinearizationMode.SECANT

    def __post_init__(self):
        slack = 1e-12 * max(1.0, abs(self.cap))
        if not (0.0 <= self.w_lo <= self.w_hi <= self.cap + slack):
            raise InvalidConfigError(
                f"segment interval [{self.w_lo}, {self.w_hi}] not inside "
                f"[0, {self.cap}]"
            )

    def value(self, w):
        return self.intercept + self.slope * np.asarray(w, dtype=float)


def linearize(ell, j: int, w_lo: float, w_hi: float, net: NetworkInstance,
              mode: LinearizationMode = LinearizationMode.SECANT
              ) -> LinearSegment:
    """
    One-segment approximation of the UE load curve on [w_lo, w_hi].

    Secant mode interpolates both endpoints and underestimates the concave
    curve on the interval. TangentMid uses the tangent at the midpoint and
    overestimates it. A point interval gives slope 0 in both modes.
    """
    if not 0.0 <= w_lo <= w_hi:
        raise PreconditionError(f"bad interval [{w_lo}, {w_hi}]")
    mode = LinearizationMode(mode)
    cap = interference_cap(ell, j, net)
    if w_hi == w_lo:
        return LinearSegment(0.0, ue_load_of_interference(ell, j, w_lo, net),
                             w_lo, w_hi, cap, mode)
    if mode is LinearizationMode.SECANT:
        f_lo = ue_load_of_interference(ell, j, w_lo, net)
        f_hi = ue_load_of_interference(ell, j, w_hi, net)
        slope = (f_hi - f_lo) / (w_hi - w_lo)
        intercept = f_lo - w_lo * slope
    else:
        mid = 0.5 * (w_lo + w_hi)
        slope = ue_load_derivative(ell, j, mid, net)
        intercept = ue_load_of_interference(ell, j, mid, net) - mid * slope
    return LinearSegment(slope, intercept, w_lo, w_hi, cap, mode)


@dataclass(frozen=True)
class SegmentTable:
    """
    Segments for every UE j and option index l of net.options[j].

    segments[j][l] linearizes the load curve of option l over its
    interference interval; intervals come from bounds, or are (0, T) when
    no bounds were given.
    """
    options: Tuple[Tuple[frozenset, ...], ...]
    segments: Tuple[Tuple[LinearSegment, ...], ...]
    mode: LinearizationMode
    bounds: Optional[LoadBounds] = None

    def segment(self, j: int, l: int) -> LinearSegment:
        return self.segments[j][l]

    @property
    def m(self) -> int:
        return len(self.segments)


Intervals = Tuple[Tuple[Tuple[float, float], ...], ...]


def option_intervals(net: NetworkInstance,
                     bounds: Optional[LoadBounds] = None) -> Intervals:
    """Interference interval of every (UE, option); (0, T) without bounds."""
    effective = bounds if bounds is not None else LoadBounds.trivial(net.n)
    return tuple(
        tuple(interference_interval(ell, j, effective, net) for ell in options)
        for j, options in enumerate(net.options)
    )


def segment_table_from_intervals(net: NetworkInstance, intervals: Intervals,
                                 mode: LinearizationMode,
                                 bounds: Optional[LoadBounds] = None
                                 ) -> SegmentTable:
    segments = tuple(
        tuple(linearize(ell, j, lo, hi, net, mode)
              for ell, (lo, hi) in zip(options, intervals[j]))
        for j, options in enumerate(net.options)
    )
    return SegmentTable(net.options, segments, LinearizationMode(mode), bounds)


def build_segment_table(net: NetworkInstance,
                        bounds: Optional[LoadBounds] = None,
                        mode: LinearizationMode = LinearizationMode.SECANT
                        ) -> SegmentTable:
    return segment_table_from_intervals(
        net, option_intervals(net, bounds), mode, bounds
    )
