import heapq
import itertools
import logging
import re
import time
from dataclasses import dataclass
from enum import Enum
from typing import Any, Dict, List, Optional, Sequence, Tuple

import numpy as np

from loadcoupling.coupling import Objective
from loadcoupling.errors import ModelError
from loadcoupling.netmodel import Association

from .model import MilpModel, Sense

logger = logging.getLogger(__name__)

_X = re.compile(r"^x_(\d+)$")
_W = re.compile(r"^w_(\d+)_(\d+)$")
_K = re.compile(r"^k_(\d+)_(\d+)$")

FEASIBILITY_SLACK = 1e-9
PRUNE_SLACK = 1e-9


class SolveStatus(str, Enum):
    OPTIMAL = "optimal"
    GAP_LIMIT = "gap_limit"
    NODE_LIMIT = "node_limit"
    INFEASIBLE = "infeasible"


@dataclass(frozen=True)
class BranchAndBoundOptions:
    node_limit: int = 1_000_000
    time_limit: Optional[float] = None
    relative_gap: float = 0.0
    leaf_tolerance: float = 1e-10
    leaf_max_iterations: int = 1000

    @classmethod
    def from_config(cls, config: Dict[str, Any]) -> "BranchAndBoundOptions":
        time_limit = config.get("time_limit")
        return cls(
            node_limit=int(config.get("node_limit", cls.node_limit)),
            time_limit=None if time_limit is None else float(time_limit),
            relative_gap=float(config.get("relative_gap", cls.relative_gap)),
        )


@dataclass(frozen=True, eq=False)
class MilpSolution:
    assignment: Optional[Association]
    objective_lp: float
    objective_true: Optional[float]
    bound: float
    status: SolveStatus
    nodes_explored: int
    load_lp: Optional[np.ndarray] = None
    interference_lp: Optional[np.ndarray] = None
    choices: Optional[Tuple[int, ...]] = None


class CompiledModel:
    """
    Numeric form of a load-minimization model, decoded from its rows.

    Per (UE j, option l): the load each cell receives is
    slope[j, l] * w + intercept[j, l] (vectors over cells), and w is the
    largest of zero and the lower-bound pieces piece_a[j, l] @ x +
    piece_c[j, l] of the rows that become active when k_j_l = 1.
    """

    def __init__(self, model: MilpModel):
        names = model.variable_names
        xs = sorted(int(_X.match(v).group(1)) for v in names if _X.match(v))
        if xs != list(range(len(xs))) or not xs:
            raise ModelError("load variables must be x_0..x_{n-1}")
        self.n = n = len(xs)
        opts: Dict[int, int] = {}
        for v in names:
            mk = _K.match(v)
            if mk:
                j, l = int(mk.group(1)), int(mk.group(2))
                opts[j] = max(opts.get(j, 0), l + 1)
        if sorted(opts) != list(range(len(opts))) or not opts:
            raise ModelError("selection variables must cover UEs 0..m-1")
        self.m = m = len(opts)
        self.num_options = np.array([opts[j] for j in range(m)], dtype=int)
        lmax = int(self.num_options.max())

        self.slope = np.zeros((m, lmax, n))
        self.intercept = np.zeros((m, lmax, n))
        members = [[set() for _ in range(lmax)] for _ in range(m)]
        pieces: Dict[Tuple[int, int], List[Tuple[np.ndarray, float]]] = {}

        for row in model.constraints:
            self._decode_row(row, members, pieces)

        pmax = max([len(p) for p in pieces.values()] + [1])
        self.piece_a = np.zeros((m, lmax, pmax, n))
        self.piece_c = np.full((m, lmax, pmax), -np.inf)
        for (j, l), plist in pieces.items():
            for p, (a, c) in enumerate(plist):
                self.piece_a[j, l, p] = a
                self.piece_c[j, l, p] = c

        self.valid = np.arange(lmax)[None, :] < self.num_options[:, None]
        self.option_cells = tuple(
            tuple(frozenset(members[j][l]) for l in range(self.num_options[j]))
            for j in range(m)
        )

        self.weights = np.zeros(n)
        has_t = False
        for name, coef in model.objective:
            mx = _X.match(name)
            if mx:
                self.weights[int(mx.group(1))] += coef
            elif name == "t":
                has_t = True
            else:
                raise ModelError(f"unsupported objective term {name}")
        if has_t:
            if np.any(self.weights):
                raise ModelError("objective mixes t with load terms")
            self.objective = Objective.MAX_LOAD
        else:
            if np.any(self.weights < 0):
                raise ModelError("negative load weights are not supported")
            self.objective = Objective.SUM_LOAD

        order = model.branch_order
        self.branch_order = tuple(range(m)) if order is None else tuple(order)
        if sorted(self.branch_order) != list(range(m)):
            raise ModelError("branch order is not a permutation of the UEs")

    def _decode_row(self, row, members, pieces):
        terms = dict(row.terms)
        xs = [(int(_X.match(v).group(1)), c) for v, c in terms.items()
              if _X.match(v)]
        ws = [(tuple(map(int, _W.match(v).groups())), c)
              for v, c in terms.items() if _W.match(v)]
        ks = [(tuple(map(int, _K.match(v).groups())), c)
              for v, c in terms.items() if _K.match(v)]
        other = [v for v in terms if not (_X.match(v) or _W.match(v)
                                          or _K.match(v))]

        if row.sense is Sense.EQ and len(xs) == 1 and not other:
            # load definition: c_x x_i + sum c_w w + sum c_k k = rhs
            (i, cx), = xs
            if row.rhs != 0.0:
                raise ModelError(f"load row for x_{i} has nonzero rhs")
            for (j, l), c in ws:
                self.slope[j, l, i] = -c / cx
            for (j, l), c in ks:
                self.intercept[j, l, i] = -c / cx
                members[j][l].add(i)
            return
        if row.sense is Sense.EQ and ks and not xs and not ws and not other:
            if any(c != 1.0 for _, c in ks) or row.rhs != 1.0:
                raise ModelError("selection rows must read sum k = 1")
            return
        if row.sense is Sense.GE and len(ws) == 1 and not other:
            # cw w + sum c_x x + c_k k >= rhs; with k = 1: w >= piece
            (jl, cw), = ws
            if cw <= 0 or any(key != jl for key, _ in ks):
                raise ModelError(f"unsupported interference row for w_{jl}")
            a = np.zeros(self.n)
            for i, c in xs:
                a[i] = -c / cw
            ck = sum(c for _, c in ks)
            pieces.setdefault(jl, []).append((a, (row.rhs - ck) / cw))
            return
        if row.sense is Sense.GE and "t" in other and len(other) == 1:
            return
        raise ModelError(f"row does not belong to the load model family: "
                         f"{row.terms} {row.sense.value} {row.rhs}")

    def least_fixed_point(self, js, ls, x0, tolerance=1e-10,
                          max_iterations=1000):
        """
        Least fixed point of x = sum over (js, ls) of slope * w(x) +
        intercept, iterated upward from x0 (which must lie below it).

        Returns (x, feasible, converged); feasible is False as soon as a
        component exceeds 1. When the iteration cap is hit, x is the last
        iterate, which lies below the fixed point, and converged is False.
        """
        if len(js) == 0:
            return np.zeros(self.n), True, True
        S = self.slope[js, ls]
        M = self.intercept[js, ls].sum(axis=0)
        A = self.piece_a[js, ls]
        C = self.piece_c[js, ls]
        x = x0
        change = np.inf
        for _ in range(max_iterations):
            w = np.maximum(0.0, (A @ x + C).max(axis=1))
            new = S.T @ w + M
            if new.max() > 1.0 + FEASIBILITY_SLACK:
                return new, False, True
            change = float(np.abs(new - x).max())
            if change <= tolerance:
                return new, True, True
            x = new
        logger.warning(f"Affine load iteration hit its cap of "
                       f"{max_iterations} (last change {change:.3g})")
        return x, True, False

    def interference(self, js, ls, x) -> np.ndarray:
        A = self.piece_a[js, ls]
        C = self.piece_c[js, ls]
        return np.maximum(0.0, (A @ x + C).max(axis=1))

    def objective_of(self, x) -> float:
        if self.objective is Objective.MAX_LOAD:
            return float(x.max())
        return float(self.weights @ x)

    def evaluate_leaf(self, choices: Sequence[int], tolerance=1e-10,
                      max_iterations=1000):
        """
        (objective, x, feasible) for a full choice of one option per UE.

        A leaf whose iteration did not converge is reported infeasible.
        """
        js = np.arange(self.m)
        ls = np.asarray(choices, dtype=int)
        x, feasible, converged = self.least_fixed_point(
            js, ls, np.zeros(self.n), tolerance, max_iterations
        )
        return self.objective_of(x), x, feasible and converged

    def node_bound(self, x_partial, undecided: np.ndarray):
        """
        Lower bound on the objective of every leaf below a node, or None
        when no leaf below it can be feasible.
        """
        floor = np.zeros(self.n)
        extra = 0.0
        if len(undecided):
            A = self.piece_a[undecided]
            C = self.piece_c[undecided]
            w = np.maximum(0.0, (A @ x_partial + C).max(axis=2))
            contrib = self.slope[undecided] * w[..., None] + \
                self.intercept[undecided]
            valid = self.valid[undecided]
            floor = np.where(valid[..., None], contrib, np.inf) \
                .min(axis=1).sum(axis=0)
            if self.objective is Objective.SUM_LOAD:
                totals = np.where(valid, contrib @ self.weights, np.inf)
                extra = float(totals.min(axis=1).sum())
        per_cell = x_partial + floor
        if per_cell.max() > 1.0 + FEASIBILITY_SLACK:
            return None
        if self.objective is Objective.MAX_LOAD:
            return float(per_cell.max())
        return float(self.weights @ x_partial) + extra

    def association(self, choices: Sequence[int]) -> Association:
        return Association(tuple(
            self.option_cells[j][l] for j, l in enumerate(choices)
        ))


def compile_model(model: MilpModel) -> CompiledModel:
    return CompiledModel(model)


def solve_branch_and_bound(model: MilpModel,
                           opts: Optional[BranchAndBoundOptions] = None
                           ) -> MilpSolution:
    """
    Best-first branch and bound over one option per UE.

    UEs are decided in model.branch_order. A node's continuous part is the
    least fixed point of the decided UEs' affine load map; undecided UEs add
    their cheapest option evaluated at that point. A depth-first dive
    supplies the first incumbent.

    Returns:
        MilpSolution: bound is a valid lower bound on the model optimum even
        when the node or time limit stops the search.
    """
    opts = opts or BranchAndBoundOptions()
    cm = compile_model(model)
    order = np.array(cm.branch_order, dtype=int)
    started = time.perf_counter()
    counter = itertools.count()
    nodes = 0

    incumbent = np.inf
    best: Optional[Tuple[Tuple[int, ...], np.ndarray]] = None

    def lfp(depth, choices, x0):
        js = order[:depth]
        ls = np.asarray(choices, dtype=int)
        return cm.least_fixed_point(js, ls, x0, opts.leaf_tolerance,
                                    opts.leaf_max_iterations)

    def children(depth, choices, x):
        j = order[depth]
        out = []
        for l in range(cm.num_options[j]):
            child = choices + (l,)
            x_child, feasible, converged = lfp(depth + 1, child, x)
            if not feasible:
                continue
            bound = cm.node_bound(x_child, order[depth + 1:])
            if bound is not None:
                out.append((bound, child, x_child, converged))
        return out

    # leaves whose iteration hit its cap: their last iterate still bounds
    # them from below but never becomes the incumbent
    unresolved = np.inf

    root_x = np.zeros(cm.n)
    root_bound = cm.node_bound(root_x, order)
    heap = []
    if root_bound is not None:
        heap.append((root_bound, next(counter), 0, (), root_x))

    # dive for a first incumbent
    depth, choices, x, converged = 0, (), root_x, True
    while root_bound is not None and depth < cm.m:
        kids = children(depth, choices, x)
        nodes += 1
        if not kids:
            break
        _, choices, x, converged = min(kids, key=lambda k: k[0])
        depth += 1
    if root_bound is not None and depth == cm.m and converged:
        incumbent, best = cm.objective_of(x), (choices, x)
        logger.debug(f"Dive incumbent {incumbent:.6g}")

    status = SolveStatus.OPTIMAL
    global_bound = None
    while heap:
        bound, _, depth, choices, x = heap[0]
        if bound >= incumbent - PRUNE_SLACK:
            heap.clear()
            break
        if opts.relative_gap > 0 and np.isfinite(incumbent) and \
                incumbent - bound <= opts.relative_gap * max(abs(incumbent),
                                                             1e-12):
            status, global_bound = SolveStatus.GAP_LIMIT, bound
            break
        out_of_time = opts.time_limit is not None and \
            time.perf_counter() - started > opts.time_limit
        if nodes >= opts.node_limit or out_of_time:
            status, global_bound = SolveStatus.NODE_LIMIT, bound
            break
        heapq.heappop(heap)
        nodes += 1
        for c_bound, child, x_child, converged in children(depth, choices, x):
            if depth + 1 == cm.m:
                if not converged:
                    unresolved = min(unresolved, c_bound)
                elif c_bound < incumbent:
                    incumbent, best = c_bound, (child, x_child)
            elif c_bound < incumbent - PRUNE_SLACK:
                heapq.heappush(heap, (c_bound, next(counter), depth + 1,
                                      child, x_child))

    if global_bound is None:
        global_bound = incumbent
    if unresolved < min(global_bound, incumbent):
        logger.warning(f"Unconverged leaves lower the bound to "
                       f"{unresolved:.6g}")
        global_bound = unresolved
        if status is SolveStatus.OPTIMAL:
            status = SolveStatus.NODE_LIMIT
    if best is None:
        if status is SolveStatus.OPTIMAL:
            status = SolveStatus.INFEASIBLE
        logger.info(f"Branch and bound found no feasible leaf ({status.value}, "
                    f"{nodes} nodes)")
        return MilpSolution(None, np.inf, None, global_bound, status, nodes)

    choices, x = best
    # choices follow branch order; map back to UE order
    by_ue = [0] * cm.m
    for pos, j in enumerate(order):
        by_ue[j] = choices[pos]
    w = cm.interference(order, np.asarray(choices, dtype=int), x)
    w_by_ue = np.empty(cm.m)
    w_by_ue[order] = w
    logger.info(
        f"Branch and bound {status.value}: objective {incumbent:.6g}, "
        f"bound {global_bound:.6g}, {nodes} nodes"
    )
    return MilpSolution(
        assignment=cm.association(by_ue),
        objective_lp=float(incumbent),
        objective_true=None,
        bound=float(min(global_bound, incumbent)),
        status=status,
        nodes_explored=nodes,
        load_lp=x,
        interference_lp=w_by_ue,
        choices=tuple(by_ue),
    )
