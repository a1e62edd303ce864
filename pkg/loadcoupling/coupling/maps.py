import logging
import math
from typing import Optional, Union

import numpy as np

from loadcoupling.errors import InfeasibleDemandError, PreconditionError
from loadcoupling.netmodel import Association, NetworkInstance

logger = logging.getLogger(__name__)

LN2 = math.log(2.0)

AssociationLike = Union[Association, np.ndarray]


def as_kappa(assoc: AssociationLike, net: NetworkInstance) -> np.ndarray:
    """Boolean n x m serving matrix for an Association or a kappa array."""
    if isinstance(assoc, Association):
        if assoc.m != net.m:
            raise PreconditionError(
                f"association covers {assoc.m} UEs, instance has {net.m}"
            )
        return assoc.kappa(net.n)
    kappa = np.asarray(assoc, dtype=bool)
    if kappa.shape != (net.n, net.m):
        raise PreconditionError(
            f"kappa has shape {kappa.shape}, expected {(net.n, net.m)}"
        )
    return kappa


def spectral_efficiency(gamma):
    """log2(1 + gamma), computed as a natural-log ratio."""
    return np.log(1.0 + np.asarray(gamma, dtype=float)) / LN2


def sinr_vector(x, assoc: AssociationLike, net: NetworkInstance) -> np.ndarray:
    """
    SINR of every UE given cell loads x.

    gamma_j = sum_{i serving j} p_i g_ij / (sum_{k not serving j} p_k g_kj x_k
    + sigma^2). A UE whose serving cells all have zero gain gets gamma = 0
    and a warning.
    """
    x = np.asarray(x, dtype=float)
    if x.shape != (net.n,):
        raise PreconditionError(f"load vector has shape {x.shape}")
    kappa = as_kappa(assoc, net)
    rx = net.received_power
    signal = np.where(kappa, rx, 0.0).sum(axis=0)
    interference = np.where(kappa, 0.0, rx).T @ x
    degenerate = signal <= 0.0
    if np.any(degenerate):
        logger.warning(
            f"UEs {np.flatnonzero(degenerate).tolist()} receive no signal"
        )
    return signal / (interference + net.noise_power)


def load_vector(gamma, assoc: AssociationLike,
                net: NetworkInstance) -> np.ndarray:
    """
    Cell loads given UE SINRs: x_i = sum_{j served by i} d_j / (M B
    log2(1 + gamma_j)). A JT UE adds the same term to each of its cells.
    """
    gamma = np.asarray(gamma, dtype=float)
    if gamma.shape != (net.m,):
        raise PreconditionError(f"SINR vector has shape {gamma.shape}")
    kappa = as_kappa(assoc, net)
    served = kappa.any(axis=0)
    starved = served & (gamma <= 0.0)
    if np.any(starved):
        raise InfeasibleDemandError(
            f"UEs {np.flatnonzero(starved).tolist()} are served at zero SINR"
        )
    per_ue = np.zeros(net.m)
    per_ue[served] = net.demand_scale[served] / \
        spectral_efficiency(gamma[served])
    return kappa.astype(float) @ per_ue


def load_step(x, net: NetworkInstance, h_assoc: AssociationLike,
              f_assoc: AssociationLike,
              active: Optional[np.ndarray] = None) -> np.ndarray:
    """
    One application of x -> f(h(x, h_assoc), f_assoc).

    With a boolean active mask only those cells update; the others keep
    their value from x.
    """
    new = load_vector(sinr_vector(x, h_assoc, net), f_assoc, net)
    if active is not None:
        new = np.where(active, new, x)
    return new


def sinr_step(gamma, net: NetworkInstance, f_assoc: AssociationLike,
              h_assoc: AssociationLike) -> np.ndarray:
    """One application of gamma -> h(f(gamma, f_assoc), h_assoc)."""
    return sinr_vector(load_vector(gamma, f_assoc, net), h_assoc, net)
