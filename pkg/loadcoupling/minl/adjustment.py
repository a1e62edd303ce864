import logging
from dataclasses import dataclass
from enum import Enum
from typing import Iterable, Optional

import numpy as np

from loadcoupling.coupling import (
    FixedPointReport,
    SolverOptions,
    fixed_point_load,
    load_step,
    load_vector,
    sinr_step,
    sinr_vector,
)
from loadcoupling.errors import PreconditionError
from loadcoupling.netmodel import Association, NetworkInstance

logger = logging.getLogger(__name__)

SAFETY_SLACK = 1e-8


class Trigger(str, Enum):
    SUFFICIENT_MET = "sufficient_met"
    NECESSARY_FAILED = "necessary_failed"
    EXHAUSTED = "exhausted"


@dataclass(frozen=True, eq=False)
class AdjustmentState:
    """An association with its converged load fixed point and SINRs."""
    assoc: Association
    load: np.ndarray
    sinr: np.ndarray
    report: Optional[FixedPointReport] = None

    @classmethod
    def evaluate(cls, assoc: Association, net: NetworkInstance,
                 opts: Optional[SolverOptions] = None) -> "AdjustmentState":
        report = fixed_point_load(assoc, net, opts).require_converged(
            "association load"
        )
        return cls(assoc, report.load, report.sinr, report)


@dataclass(frozen=True, eq=False)
class AdjustmentDecision:
    accepted: bool
    new_state: Optional[AdjustmentState]
    iterations_used: int
    trigger: Trigger


def _mask(net: NetworkInstance, active: Optional[Iterable[int]]):
    if active is None:
        return None
    mask = np.zeros(net.n, dtype=bool)
    mask[list(active)] = True
    return mask


def _improves(test_value: float, current: float, strict: bool) -> bool:
    return test_value < current if strict else test_value <= current


def _accept(state: AdjustmentState, kappa: np.ndarray, net: NetworkInstance,
            opts: Optional[SolverOptions], t: int) -> AdjustmentDecision:
    new_state = AdjustmentState.evaluate(Association.from_kappa(kappa), net,
                                         opts)
    if np.any(new_state.load > state.load + SAFETY_SLACK):
        worst = float((new_state.load - state.load).max())
        logger.warning(
            f"Accepted adjustment raised a load by {worst:.3g}; rejecting it"
        )
        return AdjustmentDecision(False, None, t, Trigger.SUFFICIENT_MET)
    return AdjustmentDecision(True, new_state, t, Trigger.SUFFICIENT_MET)


def try_add_link(state: AdjustmentState, v: int, u: int, tau: int,
                 net: NetworkInstance, opts: Optional[SolverOptions] = None,
                 active: Optional[Iterable[int]] = None
                 ) -> AdjustmentDecision:
    """
    Decide whether serving UE u by cell v as well lowers every cell load.

    Two sequences start from the current state: loads under the SINR map of
    the extended association with the load map of the current one, and
    SINRs under the load map of the current association with the SINR map
    of the extended one. The link is accepted at the first step where cell
    v's load under the extended association does not exceed the load
    iterate, and rejected at the first step where u's SINR under the
    extended association does not exceed the SINR iterate.

    With active, only those cells iterate in the load sequence (the others
    stay at the current loads) and acceptance needs a strict decrease.
    """
    ue = net.ues[u]
    if v not in ue.candidates:
        raise PreconditionError(f"cell {v} is not a candidate of UE {u}")
    if v in state.assoc.serving[u]:
        raise PreconditionError(f"cell {v} already serves UE {u}")

    base = state.assoc.kappa(net.n)
    kappa = base.copy()
    kappa[v, u] = True
    mask = _mask(net, active)
    strict = mask is not None

    x, gamma = state.load, state.sinr
    for t in range(1, tau + 1):
        x = load_step(x, net, kappa, base, active=mask)
        gamma = sinr_step(gamma, net, base, kappa)
        load_v = load_vector(sinr_vector(x, kappa, net), kappa, net)[v]
        if _improves(load_v, x[v], strict):
            logger.debug(f"Adding ({v}, {u}) accepted at step {t}")
            return _accept(state, kappa, net, opts, t)
        sinr_u = sinr_vector(load_vector(gamma, kappa, net), kappa, net)[u]
        if sinr_u <= gamma[u]:
            logger.debug(f"Adding ({v}, {u}) rejected at step {t}")
            return AdjustmentDecision(False, None, t, Trigger.NECESSARY_FAILED)
    return AdjustmentDecision(False, None, tau, Trigger.EXHAUSTED)


def try_remove_link(state: AdjustmentState, v: int, u: int, tau: int,
                    net: NetworkInstance, opts: Optional[SolverOptions] = None,
                    active: Optional[Iterable[int]] = None
                    ) -> AdjustmentDecision:
    """
    Decide whether dropping cell v from UE u's serving set lowers every
    cell load.

    The SINR sequence iterates the current SINR map over the reduced load
    map; the link is dropped at the first step where u's SINR under the
    reduced association reaches the SINR iterate. The load sequence
    iterates the current load map over the reduced SINR map; the move is
    rejected at the first step where cell v's reduced load is not below the
    load iterate. The home link is never removed.
    """
    if v == net.ues[u].home_cell:
        raise PreconditionError(f"cell {v} is the home cell of UE {u}")
    if v not in state.assoc.serving[u]:
        raise PreconditionError(f"cell {v} does not serve UE {u}")

    base = state.assoc.kappa(net.n)
    kappa = base.copy()
    kappa[v, u] = False
    mask = _mask(net, active)
    strict = mask is not None

    x, gamma = state.load, state.sinr
    for t in range(1, tau + 1):
        gamma = sinr_step(gamma, net, kappa, base)
        x = load_step(x, net, kappa, base, active=mask)
        sinr_u = sinr_vector(load_vector(gamma, kappa, net), kappa, net)[u]
        if sinr_u > gamma[u] if strict else sinr_u >= gamma[u]:
            logger.debug(f"Removing ({v}, {u}) accepted at step {t}")
            return _accept(state, kappa, net, opts, t)
        load_v = load_vector(sinr_vector(x, kappa, net), kappa, net)[v]
        if not load_v < x[v]:
            logger.debug(f"Removing ({v}, {u}) rejected at step {t}")
            return AdjustmentDecision(False, None, t, Trigger.NECESSARY_FAILED)
    return AdjustmentDecision(False, None, tau, Trigger.EXHAUSTED)
