import logging
from dataclasses import dataclass
from enum import Enum
from typing import Any, Callable, Dict, Iterable, Optional

import numpy as np

from loadcoupling.errors import ConvergenceError, PreconditionError
from loadcoupling.netmodel import NetworkInstance

from .maps import AssociationLike, as_kappa, load_step, sinr_vector

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class SolverOptions:
    tolerance: float = 1e-9
    max_iterations: int = 10000
    divergence_cap: float = 1e3

    @classmethod
    def from_config(cls, config: Dict[str, Any]) -> "SolverOptions":
        return cls(
            tolerance=float(config.get("tolerance", cls.tolerance)),
            max_iterations=int(config.get("max_iterations", cls.max_iterations)),
            divergence_cap=float(config.get("divergence_cap",
                                            cls.divergence_cap)),
        )


class FixedPointStatus(str, Enum):
    CONVERGED = "converged"
    ITERATION_LIMIT = "iteration_limit"
    DIVERGED = "diverged"


class Objective(str, Enum):
    SUM_LOAD = "sum"
    MAX_LOAD = "max"

    def of(self, load) -> float:
        load = np.asarray(load, dtype=float)
        return float(load.sum() if self is Objective.SUM_LOAD else load.max())


@dataclass(frozen=True, eq=False)
class FixedPointReport:
    load: np.ndarray
    sinr: np.ndarray
    iterations: int
    residual: float
    status: FixedPointStatus
    feasible: bool

    @property
    def converged(self) -> bool:
        return self.status is FixedPointStatus.CONVERGED

    @property
    def sum_load(self) -> float:
        return float(self.load.sum())

    @property
    def max_load(self) -> float:
        return float(self.load.max())

    def objective(self, objective: Objective) -> float:
        return objective.of(self.load)

    def require_converged(self, what: str = "fixed point") -> "FixedPointReport":
        if not self.converged:
            raise ConvergenceError(
                f"{what} did not converge: {self.status.value} after "
                f"{self.iterations} iterations (residual {self.residual:.3g})",
                report=self,
            )
        return self


def _iterate(step: Callable[[np.ndarray], np.ndarray], x0: np.ndarray,
             opts: SolverOptions, mask: Optional[np.ndarray] = None):
    x = x0
    residual = float("inf")
    status = FixedPointStatus.ITERATION_LIMIT
    iterations = 0
    for iterations in range(1, opts.max_iterations + 1):
        new = step(x)
        delta = np.abs(new - x) if mask is None else np.abs(new - x)[mask]
        residual = float(delta.max()) if delta.size else 0.0
        x = new
        if not np.all(np.isfinite(x)) or x.max() > opts.divergence_cap:
            status = FixedPointStatus.DIVERGED
            break
        if residual <= opts.tolerance:
            status = FixedPointStatus.CONVERGED
            break
    if status is not FixedPointStatus.CONVERGED:
        logger.warning(
            f"Fixed-point iteration stopped: {status.value} after "
            f"{iterations} iterations, residual {residual:.3g}"
        )
    else:
        logger.debug(f"Fixed point converged in {iterations} iterations")
    return x, iterations, residual, status


def _report(x, h_assoc, net, iterations, residual, status, opts):
    return FixedPointReport(
        load=x,
        sinr=sinr_vector(x, h_assoc, net),
        iterations=iterations,
        residual=residual,
        status=status,
        feasible=bool(np.all(np.isfinite(x)) and x.max() <= 1.0 + opts.tolerance),
    )


def _start(net: NetworkInstance, start) -> np.ndarray:
    if start is None:
        return np.zeros(net.n)
    x0 = np.array(start, dtype=float)
    if x0.shape != (net.n,):
        raise PreconditionError(f"start vector has shape {x0.shape}")
    return x0


def mixed_fixed_point(net: NetworkInstance, h_assoc: AssociationLike,
                      f_assoc: AssociationLike,
                      opts: Optional[SolverOptions] = None,
                      start=None) -> FixedPointReport:
    """Fixed point of x = f(h(x, h_assoc), f_assoc); report.sinr = h(x, h_assoc)."""
    opts = opts or SolverOptions()
    h_kappa, f_kappa = as_kappa(h_assoc, net), as_kappa(f_assoc, net)
    x, it, res, status = _iterate(
        lambda x: load_step(x, net, h_kappa, f_kappa), _start(net, start), opts
    )
    return _report(x, h_kappa, net, it, res, status, opts)


def fixed_point_load(assoc: AssociationLike, net: NetworkInstance,
                     opts: Optional[SolverOptions] = None,
                     start=None) -> FixedPointReport:
    """
    Unique fixed point of the load coupling system x = f(h(x)).

    Args:
        assoc: Serving sets or an n x m kappa matrix
        net: The network instance
        opts: Stopping rules. Defaults to SolverOptions()
        start: Initial load vector. Defaults to all zeros, from which the
            iterates increase monotonically

    Returns:
        FixedPointReport: Non-convergence is reported through status, not
        raised.
    """
    return mixed_fixed_point(net, assoc, assoc, opts, start)


def async_fixed_point(assoc: AssociationLike, net: NetworkInstance,
                      active: Iterable[int], x0,
                      opts: Optional[SolverOptions] = None,
                      load_assoc: Optional[AssociationLike] = None
                      ) -> FixedPointReport:
    """
    Fixed-point iteration over the cells in active only; every other cell
    keeps its x0 value throughout.

    load_assoc selects a different association for the load map f, giving
    the mixed map f(h(x, assoc), load_assoc).
    """
    opts = opts or SolverOptions()
    x0 = _start(net, x0)
    mask = np.zeros(net.n, dtype=bool)
    mask[list(active)] = True
    h_kappa = as_kappa(assoc, net)
    f_kappa = h_kappa if load_assoc is None else as_kappa(load_assoc, net)
    if not mask.any():
        return _report(x0, h_kappa, net, 0, 0.0, FixedPointStatus.CONVERGED,
                       opts)
    x, it, res, status = _iterate(
        lambda x: load_step(x, net, h_kappa, f_kappa, active=mask),
        x0, opts, mask
    )
    return _report(x, h_kappa, net, it, res, status, opts)
