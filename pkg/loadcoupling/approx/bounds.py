import logging
from dataclasses import dataclass
from typing import Optional, Tuple

import numpy as np

from loadcoupling.coupling import SolverOptions, mixed_fixed_point
from loadcoupling.errors import InvalidConfigError
from loadcoupling.netmodel import Association, NetworkInstance

logger = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class LoadBounds:
    """Componentwise load bounds valid for every feasible association."""
    lower: np.ndarray
    upper: np.ndarray

    def __post_init__(self):
        lower = np.asarray(self.lower, dtype=float)
        upper = np.asarray(self.upper, dtype=float)
        if lower.shape != upper.shape:
            raise InvalidConfigError("bound vectors differ in length")
        if np.any(lower < 0) or np.any(lower > upper):
            raise InvalidConfigError("bounds must satisfy 0 <= lower <= upper")
        object.__setattr__(self, "lower", lower)
        object.__setattr__(self, "upper", upper)

    @classmethod
    def trivial(cls, n: int) -> "LoadBounds":
        """lower = 0, upper = 1: the bounds that give (0, T) intervals."""
        return cls(np.zeros(n), np.ones(n))


def global_load_bounds(net: NetworkInstance,
                       opts: Optional[SolverOptions] = None) -> LoadBounds:
    """
    Load bounds from two mixed fixed points.

    The lower bound serves every UE by all candidates for SINR and by its
    home cell alone for load; the upper bound swaps the two. Raises
    ConvergenceError when either iteration fails to converge.
    """
    home = Association.home_only(net)
    everything = Association.all_candidates(net)
    lower = mixed_fixed_point(net, everything, home, opts)
    lower.require_converged("lower load bound")
    upper = mixed_fixed_point(net, home, everything, opts)
    upper.require_converged("upper load bound")
    logger.debug(
        f"Load bounds: lower max {lower.max_load:.4g}, "
        f"upper max {upper.max_load:.4g}"
    )
    # guard against last-ulp inversions where both bounds coincide
    return LoadBounds(lower.load, np.maximum(upper.load, lower.load))


def interference_interval(ell, j: int, bounds: LoadBounds,
                          net: NetworkInstance) -> Tuple[float, float]:
    """
    Range of the interference UE j sees when served by the cells in ell,
    for any load vector between the bounds. The upper end is clamped to the
    interference cap T and the lower end never exceeds the upper one.
    """
    outside = np.ones(net.n, dtype=bool)
    outside[list(ell)] = False
    rx = net.received_power[outside, j]
    cap = float(rx.sum())
    w_hi = min(float(rx @ bounds.upper[outside]), cap)
    w_lo = min(float(rx @ bounds.lower[outside]), w_hi)
    return w_lo, w_hi
