"""Exact 0-1 solver for the neighbourhood-restricted improvement subproblem.

Depth-first branch and bound.  Bounding uses the linear relaxation of
(cover rows + Hamming band + improvement cut): the relaxation is solved
by the self-contained simplex in :mod:`hamcover.simplex`, its dual
vector is clipped into the dual cone, and the Lagrangian value of the
clipped duals is evaluated directly.  That "certified" bound is valid
for any multiplier vector, so simplex inaccuracies can only cost time,
never correctness.  Fixing a variable off its relaxation bound adds the
corresponding reduced-cost penalty, giving an O(1) bound per node; a
combinatorial bound (max over uncovered rows of the cheapest free
covering column) backs everything up.  On oversized problems the root
multipliers come from subgradient ascent on the cover rows instead of
the simplex tableau.

Integral costs are exploited throughout: a node is abandoned as soon as
its bound reaches best-so-far - 0.5.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass
from enum import Enum
from typing import IO, Iterable

import numpy as np

from .model import Solution, solution_from
from .nsop import NsopModel, is_nsop_feasible

__all__ = [
    "SolveStatus",
    "SolveOutcome",
    "SolverConfig",
    "solve",
    "lower_bound",
    "select_branch_variable",
    "propagate",
]

PRUNE_MARGIN = 0.5  # integral costs: bound >= limit + 0.5 closes a node

# problems with more tableau cells than this get subgradient root bounds
_SIMPLEX_CELL_LIMIT = 6_000_000
_CORE_LP_MAX_FREE = 700     # mid-tree LP resolves only below this many free columns
_CORE_LP_DEPTH_STRIDE = 5


class SolveStatus(Enum):
    PROVEN_OPTIMAL = "optimal"
    PROVEN_INFEASIBLE = "infeasible"
    FEASIBLE_TIME_LIMIT = "feasible_time_limit"
    UNKNOWN_TIME_LIMIT = "unknown_time_limit"


@dataclass(frozen=True)
class SolveOutcome:
    status: SolveStatus
    best: Solution | None
    lower_bound: float
    nodes_explored: int
    elapsed: float

    @property
    def proved(self) -> bool:
        return self.status in (SolveStatus.PROVEN_OPTIMAL, SolveStatus.PROVEN_INFEASIBLE)


@dataclass(frozen=True)
class SolverConfig:
    time_limit: float = 15.0
    node_limit: int | None = None
    lp_tolerance: float = 1e-7
    deterministic: bool = False

    def __post_init__(self) -> None:
        if self.time_limit <= 0:
            raise ValueError(f"time_limit must be positive, got {self.time_limit}")
        if not 0 < self.lp_tolerance <= 1e-4:
            raise ValueError(f"lp_tolerance must lie in (0, 1e-4], got {self.lp_tolerance}")
        if self.node_limit is not None and self.node_limit < 1:
            raise ValueError(f"node_limit must be >= 1, got {self.node_limit}")


def solve(model: NsopModel, config: SolverConfig, trace: IO[str] | None = None) -> SolveOutcome:
    """Run branch and bound on the subproblem under the configured budget.

    Timeouts are statuses, not errors.  With ``deterministic=True`` the
    wall clock is ignored entirely and only ``node_limit`` bounds the
    search, so equal node budgets give identical outcomes.
    """
    engine = _Engine(model, config, trace)
    return engine.run()


def select_branch_variable(relaxation_point: Iterable[float], model: NsopModel) -> int:
    """Most-fractional coordinate of the relaxation point, ties to the
    lower index.  Raises if every coordinate is integral."""
    best_j = -1
    best_gap = None
    for j, x in enumerate(relaxation_point):
        if abs(x - round(x)) <= 1e-9:
            continue
        gap = abs(x - 0.5)
        if best_gap is None or gap < best_gap - 1e-15:
            best_j, best_gap = j, gap
    if best_j < 0:
        raise ValueError("relaxation point is integral; nothing to branch on")
    return best_j


def propagate(
    model: NsopModel, fixed_zero: Iterable[int], fixed_one: Iterable[int]
) -> tuple[frozenset[int], frozenset[int]] | None:
    """Close the fixings under the node's logical implications.

    Returns the extended (fixed_zero, fixed_one) pair, or None when the
    node cannot contain an improving feasible point: a row left without
    enough columns, the Hamming band already exceeded (or unreachable
    from above 1), or cost accounting that cannot beat the cut.
    """
    inst = model.base
    f0, f1 = set(fixed_zero), set(fixed_one)
    if f0 & f1:
        raise ValueError("fixed_zero and fixed_one overlap")
    for j in f0 | f1:
        if not 0 <= j < inst.num_cols:
            raise ValueError(f"column index {j} outside [0, {inst.num_cols})")
    inc = model.incumbent.selected

    changed = True
    while changed:
        changed = False
        for i, row in enumerate(inst.rows):
            need = inst.rhs[i] - len(row & f1)
            if need <= 0:
                continue
            free = [j for j in row if j not in f0 and j not in f1]
            if len(free) < need:
                return None
            if len(free) == need:
                f1.update(free)
                changed = True

    committed = sum(1 for j in f1 if j not in inc) + sum(1 for j in f0 if j in inc)
    if committed > model.k:
        return None
    if committed == 0 and len(f0) + len(f1) == inst.num_cols:
        return None  # the only completion is the incumbent itself
    fixed_cost = sum(inst.costs[j] for j in f1)
    if fixed_cost > model.improvement_rhs:
        return None
    # valid completion bound: the single most expensive "cheapest fix"
    worst = 0
    for i, row in enumerate(inst.rows):
        if inst.rhs[i] - len(row & f1) <= 0:
            continue
        cheapest = min(inst.costs[j] for j in row if j not in f0 and j not in f1)
        worst = max(worst, cheapest)
    if fixed_cost + worst > model.improvement_rhs:
        return None
    return frozenset(f0), frozenset(f1)


def lower_bound(
    model: NsopModel, fixed_zero: Iterable[int], fixed_one: Iterable[int]
) -> float | None:
    """Certified bound on any improving completion under the fixings,
    from the [0,1] relaxation; None signals the node can be pruned."""
    inst = model.base
    f0, f1 = set(fixed_zero), set(fixed_one)
    if f0 & f1:
        raise ValueError("fixed_zero and fixed_one overlap")
    n = inst.num_cols
    if len(f0) + len(f1) == n:
        cost = sum(inst.costs[j] for j in f1)
        return float(cost) if is_nsop_feasible(model, f1) else None

    engine = _Engine(model, SolverConfig(time_limit=60.0), trace=None)
    for j in f1:
        engine.assign(j, 1)
    for j in f0:
        engine.assign(j, 0)
    if not engine.propagate_quick():
        return None
    lp = engine.root_relaxation()
    if lp is None:
        return None
    return lp


# ---------------------------------------------------------------------------
# engine internals


class _Budget:
    def __init__(self, config: SolverConfig):
        self.start = time.monotonic()
        self.deadline = None if config.deterministic else self.start + config.time_limit
        self.node_limit = config.node_limit

    def exhausted(self, nodes: int) -> bool:
        if self.node_limit is not None and nodes >= self.node_limit:
            return True
        return self.deadline is not None and time.monotonic() > self.deadline

    def elapsed(self) -> float:
        return time.monotonic() - self.start


class _Frame:
    """One branching decision: variable, remaining value list, trail mark,
    parent-node bound and the branching order guiding this subtree."""

    __slots__ = ("var", "values", "idx", "mark", "bound", "order")

    def __init__(self, var, values, mark, bound, order):
        self.var = var
        self.values = values
        self.idx = 0
        self.mark = mark
        self.bound = bound
        self.order = order


class _Engine:
    def __init__(self, model: NsopModel, config: SolverConfig, trace: IO[str] | None):
        inst = model.base
        self.model = model
        self.config = config
        self.trace = trace
        self.n = inst.num_cols
        self.m = inst.num_rows
        self.costs = list(inst.costs)
        self.rows = [sorted(r) for r in inst.rows]
        self.cols = [sorted(c) for c in inst.cols]
        self.rhs = list(inst.rhs)
        self.inc = [False] * self.n
        for j in model.incumbent.selected:
            self.inc[j] = True
        self.k = model.k
        self.cut_rhs = model.improvement_rhs
        self.rows_by_cost = [sorted(r, key=lambda j: (self.costs[j], j)) for r in self.rows]

        # node state
        self.val = [-1] * self.n
        self.covered = [0] * self.m
        self.freecov = [len(r) for r in self.rows]
        self.fixed_cost = 0
        self.committed = 0
        self.n_free = self.n
        self.free_in_x = len(model.incumbent.selected)
        self.trail: list[tuple[int, float]] = []

        # dual snapshot (root)
        self.pen_one = [0.0] * self.n
        self.pen_zero = [0.0] * self.n
        self.dual_const = -math.inf
        self.penalty = 0.0

        self.best_sel: frozenset[int] | None = None
        self.best_cost: int | None = None
        self.nodes = 0
        self.root_bound = -math.inf

    # -- state transitions ---------------------------------------------------

    @property
    def limit(self) -> int:
        """Largest completion cost still worth finding."""
        if self.best_cost is None:
            return self.cut_rhs
        return min(self.cut_rhs, self.best_cost - 1)

    def assign(self, j: int, v: int) -> None:
        self.val[j] = v
        pen = self.pen_one[j] if v == 1 else self.pen_zero[j]
        self.trail.append((j, pen))
        self.penalty += pen
        self.n_free -= 1
        if self.inc[j]:
            self.free_in_x -= 1
        if v == 1:
            self.fixed_cost += self.costs[j]
            if not self.inc[j]:
                self.committed += 1
            for i in self.cols[j]:
                self.covered[i] += 1
                self.freecov[i] -= 1
        else:
            if self.inc[j]:
                self.committed += 1
            for i in self.cols[j]:
                self.freecov[i] -= 1

    def undo_to(self, mark: int) -> None:
        while len(self.trail) > mark:
            j, pen = self.trail.pop()
            v = self.val[j]
            self.val[j] = -1
            self.penalty -= pen
            self.n_free += 1
            if self.inc[j]:
                self.free_in_x += 1
            if v == 1:
                self.fixed_cost -= self.costs[j]
                if not self.inc[j]:
                    self.committed -= 1
                for i in self.cols[j]:
                    self.covered[i] -= 1
                    self.freecov[i] += 1
            else:
                if self.inc[j]:
                    self.committed -= 1
                for i in self.cols[j]:
                    self.freecov[i] += 1

    def propagate_quick(self, touched: Iterable[int] | None = None) -> bool:
        """Fixpoint of forced assignments; False on a certain dead end."""
        rows_todo = list(range(self.m)) if touched is None else list(touched)
        pos = 0
        while pos < len(rows_todo):
            i = rows_todo[pos]
            pos += 1
            need = self.rhs[i] - self.covered[i]
            if need <= 0:
                continue
            if self.freecov[i] < need:
                return False
            if self.freecov[i] == need:
                for j in self.rows[i]:
                    if self.val[j] == -1:
                        self.assign(j, 1)
                        if self.fixed_cost > self.limit or self.committed > self.k:
                            return False
                        rows_todo.extend(self.cols[j])
        if self.committed > self.k or self.fixed_cost > self.limit:
            return False
        if self.committed == 0 and self.n_free == 0:
            return False  # completion would equal the incumbent
        return True

    # -- bounds ----------------------------------------------------------------

    def dual_bound(self) -> float:
        return self.dual_const + self.penalty

    def comb_bound(self) -> float:
        """Cheapest-fix bound: max over deficient rows of the cheapest
        free covering column, on top of the committed cost."""
        worst = 0
        for i in range(self.m):
            if self.rhs[i] - self.covered[i] <= 0:
                continue
            for j in self.rows_by_cost[i]:
                if self.val[j] == -1:
                    if self.costs[j] > worst:
                        worst = self.costs[j]
                    break
        return float(self.fixed_cost + worst)

    def node_bound(self) -> float:
        b = self.dual_bound()
        if b >= self.limit + PRUNE_MARGIN:
            return b
        return max(b, self.comb_bound())

    # -- LP relaxation ----------------------------------------------------------

    def _free_lp_arrays(self):
        """Rows with a deficit and the free columns, as an LP over the free set."""
        free_cols = [j for j in range(self.n) if self.val[j] == -1]
        col_pos = {j: t for t, j in enumerate(free_cols)}
        live_rows = [i for i in range(self.m) if self.rhs[i] - self.covered[i] > 0]
        nf = len(free_cols)
        R = len(live_rows) + 3
        A = np.zeros((R, nf))
        b = np.zeros(R)
        senses = []
        for r, i in enumerate(live_rows):
            for j in self.rows[i]:
                if self.val[j] == -1:
                    A[r, col_pos[j]] = 1.0
            b[r] = self.rhs[i] - self.covered[i]
            senses.append("G")
        s = np.array([1.0 if not self.inc[j] else -1.0 for j in free_cols])
        base_d = self.committed + self.free_in_x
        A[len(live_rows), :] = s
        b[len(live_rows)] = 1 - base_d
        senses.append("G")
        A[len(live_rows) + 1, :] = s
        b[len(live_rows) + 1] = self.k - base_d
        senses.append("L")
        c = np.array([float(self.costs[j]) for j in free_cols])
        A[len(live_rows) + 2, :] = c
        b[len(live_rows) + 2] = float(self.limit - self.fixed_cost)
        senses.append("L")
        return free_cols, live_rows, A, senses, b, c

    def _certified(self, lam, live_rows, free_cols, A, b, c) -> tuple[float, np.ndarray]:
        """Lagrangian value of clipped multipliers: a bound valid whatever
        state the simplex stopped in.  Returns (total bound, reduced costs)."""
        R = len(b)
        lam = np.asarray(lam, dtype=float).copy()
        nlive = len(live_rows)
        lam[:nlive] = np.maximum(lam[:nlive], 0.0)        # cover rows: >=
        lam[nlive] = max(lam[nlive], 0.0)                 # band lower: >=
        lam[nlive + 1] = min(lam[nlive + 1], 0.0)         # band upper: <=
        lam[R - 1] = min(lam[R - 1], 0.0)                 # cut: <=
        r = c - lam @ A
        bound = float(lam @ b + np.minimum(r, 0.0).sum()) + self.fixed_cost
        return bound, r

    def _subgradient_duals(self, live_rows, free_cols, A, b, c, iters=220):
        """Cover-row multipliers by subgradient ascent; band and cut
        multipliers stay at zero.  Used when the tableau would be too big."""
        nlive = len(live_rows)
        Ac = A[:nlive]
        need = b[:nlive]
        u = np.zeros(nlive)
        lam = np.zeros(len(b))
        best_l = -math.inf
        best_u = u.copy()
        f = 2.0
        stall = 0
        target = float(self.limit - self.fixed_cost + 1)
        for _ in range(iters):
            r = c - u @ Ac
            xhat = (r < 0).astype(float)
            l_val = float(u @ need + np.minimum(r, 0.0).sum())
            if l_val > best_l + 1e-9:
                best_l, best_u = l_val, u.copy()
                stall = 0
            else:
                stall += 1
                if stall >= 20:
                    f /= 2.0
                    stall = 0
                    if f < 1e-3:
                        break
            g = need - Ac @ xhat
            gg = float(g @ g)
            if gg < 1e-12:
                break
            step = f * max(target - l_val, 0.1) / gg
            u = np.maximum(0.0, u + step * g)
        lam[:nlive] = best_u
        return lam

    def root_relaxation(self, refresh_penalties: bool = True, deadline: float | None = None) -> float | None:
        """Solve the relaxation at the current fixings; install the dual
        snapshot (bound constant + per-variable penalties).  Returns the
        certified bound, or None when n.. every column is fixed."""
        from . import simplex

        if self.n_free == 0:
            return self.fixed_cost if all(
                self.covered[i] >= self.rhs[i] for i in range(self.m)
            ) else None
        free_cols, live_rows, A, senses, b, c = self._free_lp_arrays()
        cells = A.shape[0] * (A.shape[1] + 2 * A.shape[0])
        if cells <= _SIMPLEX_CELL_LIMIT:
            warm = np.array([1.0 if self.inc[j] else 0.0 for j in free_cols])
            res = simplex.solve_lp(
                A, senses, b, c,
                np.zeros(len(free_cols)), np.ones(len(free_cols)),
                tol=self.config.lp_tolerance, warm=warm, deadline=deadline,
            )
            lam = res.duals
            self._last_lp_x = res.x
            bound, r = self._certified(lam, live_rows, free_cols, A, b, c)
            if res.status == simplex.INFEASIBLE:
                # try to certify emptiness by scaling the Farkas direction
                for scale in (1.0, 1e2, 1e4, 1e7):
                    fb, _ = self._certified(lam * scale, live_rows, free_cols, A, b, c)
                    bound = max(bound, fb)
        else:
            lam = self._subgradient_duals(live_rows, free_cols, A, b, c)
            self._last_lp_x = None
            bound, r = self._certified(lam, live_rows, free_cols, A, b, c)
        self._last_lp_cols = free_cols
        if refresh_penalties:
            for j in free_cols:
                self.pen_one[j] = 0.0
                self.pen_zero[j] = 0.0
            for t, j in enumerate(free_cols):
                rc = float(r[t])
                if rc >= 0:
                    self.pen_one[j] = rc
                else:
                    self.pen_zero[j] = -rc
            self.penalty = 0.0
            self.dual_const = bound
        return bound

    # -- primal helpers ---------------------------------------------------------

    def try_candidate(self, selection: Iterable[int]) -> bool:
        """Exact acceptance test; installs the candidate as best if it is
        an improving feasible point of the subproblem."""
        sel = frozenset(j for j in selection)
        cost = sum(self.costs[j] for j in sel)
        if cost > self.limit:
            return False
        if not is_nsop_feasible(self.model, sel):
            return False
        assert cost <= self.limit
        self.best_sel = sel
        self.best_cost = cost
        if self.trace:
            self.trace.write(f"improved best={cost} nodes={self.nodes}\n")
        return True

    def round_and_repair(self) -> None:
        """LP-guided rounding plus greedy repair and trimming, used once
        at the root to seed the incumbent side of the search."""
        x = getattr(self, "_last_lp_x", None)
        cand = {j for j in range(self.n) if self.val[j] == 1}
        if x is not None:
            cand.update(j for j, t in zip(self._last_lp_cols, x) if t >= 0.5)
        else:
            cand.update(j for j in range(self.n) if self.val[j] == -1 and self.inc[j])
        cover = [0] * self.m
        for j in cand:
            for i in self.cols[j]:
                cover[i] += 1
        deficient = [i for i in range(self.m) if cover[i] < self.rhs[i]]
        while deficient:
            best_j, best_cost, best_gain = -1, 0, 0
            for i in deficient:
                for j in self.rows[i]:
                    if j in cand or self.val[j] == 0:
                        continue
                    gain = sum(1 for i2 in self.cols[j] if cover[i2] < self.rhs[i2])
                    cj = self.costs[j]
                    if best_j < 0 or cj * best_gain < best_cost * gain or (
                        cj * best_gain == best_cost * gain and (gain, -j) > (best_gain, -best_j)
                    ):
                        best_j, best_cost, best_gain = j, cj, gain
            if best_j < 0:
                return
            cand.add(best_j)
            for i in self.cols[best_j]:
                cover[i] += 1
            deficient = [i for i in deficient if cover[i] < self.rhs[i]]
        # trim: expensive first, never touching columns fixed to one
        for j in sorted(cand, key=lambda j: (-self.costs[j], -j)):
            if self.val[j] == 1:
                continue
            if all(cover[i] > self.rhs[i] for i in self.cols[j]):
                cand.discard(j)
                for i in self.cols[j]:
                    cover[i] -= 1
        self.try_candidate(cand)

    def complete_covered_node(self) -> None:
        """All rows are covered by fixed columns: the node's optimum is
        closed-form.  Free non-incumbent columns stay 0; free incumbent
        columns are dropped greedily (most expensive first) while the
        band allows; if no change is committed and nothing can be
        dropped, the cheapest free outside column is brought in."""
        free_x = [j for j in range(self.n) if self.val[j] == -1 and self.inc[j]]
        room = self.k - self.committed
        drops = sorted(free_x, key=lambda j: (-self.costs[j], j))[: max(0, room)]
        sel = {j for j in range(self.n) if self.val[j] == 1}
        sel.update(j for j in free_x if j not in set(drops))
        if self.committed == 0 and not drops:
            outside = [j for j in range(self.n) if self.val[j] == -1 and not self.inc[j]]
            if not outside:
                return
            j = min(outside, key=lambda j: (self.costs[j], j))
            sel.add(j)
        self.try_candidate(sel)

    # -- branching ---------------------------------------------------------------

    def _root_order(self) -> list[int]:
        x = getattr(self, "_last_lp_x", None)
        if x is None:
            return sorted(
                (j for j in range(self.n) if self.val[j] == -1),
                key=lambda j: (self.costs[j], j),
            )
        frac = {}
        for j, t in zip(self._last_lp_cols, x):
            f = 0.5 - abs(float(t) - 0.5)
            if f > 1e-6:
                frac[j] = f
        ordered = sorted(frac, key=lambda j: (-frac[j], j))
        rest = sorted(
            (j for j in range(self.n) if self.val[j] == -1 and j not in frac),
            key=lambda j: (self.costs[j], j),
        )
        return ordered + rest

    def pick_branch_var(self, order: list[int]) -> int:
        for j in order:
            if self.val[j] == -1:
                return j
        # order exhausted: fall back to the most constrained deficient row
        best_i = -1
        best_key = None
        for i in range(self.m):
            if self.rhs[i] - self.covered[i] > 0:
                key = (self.freecov[i], i)
                if best_key is None or key < best_key:
                    best_i, best_key = i, key
        for j in self.rows_by_cost[best_i]:
            if self.val[j] == -1:
                return j
        raise RuntimeError("no free variable at an open node")  # pragma: no cover

    # -- main loop -----------------------------------------------------------------

    def run(self) -> SolveOutcome:
        budget = _Budget(self.config)
        lp_deadline = budget.deadline

        ok = self.propagate_quick()
        if ok:
            root = self.root_relaxation(deadline=lp_deadline)
            if root is None:
                ok = False
            else:
                self.root_bound = root
                self.round_and_repair()
        if not ok:
            return self._finish(SolveStatus.PROVEN_INFEASIBLE, budget)
        # one refinement pass: fixing against the bound shrinks the core,
        # and the smaller relaxation usually tightens the snapshot
        for _ in range(2):
            if self.dual_bound() >= self.limit + PRUNE_MARGIN:
                break
            before = self.n_free
            if not self._reduced_cost_fix():
                return self._finish(SolveStatus.PROVEN_INFEASIBLE, budget)
            if self.n_free == 0 or before - self.n_free < max(20, before // 20):
                break
            root = self.root_relaxation(deadline=lp_deadline)
            if root is None:
                return self._finish(SolveStatus.PROVEN_INFEASIBLE, budget)
            self.root_bound = max(self.root_bound, root)
            self.round_and_repair()

        if self.dual_bound() >= self.limit + PRUNE_MARGIN:
            status = (
                SolveStatus.PROVEN_OPTIMAL if self.best_sel is not None else SolveStatus.PROVEN_INFEASIBLE
            )
            return self._finish(status, budget)
        if self.n_free == 0:
            if all(self.covered[i] >= self.rhs[i] for i in range(self.m)):
                self.try_candidate({j for j in range(self.n) if self.val[j] == 1})
            status = (
                SolveStatus.PROVEN_OPTIMAL if self.best_sel is not None else SolveStatus.PROVEN_INFEASIBLE
            )
            return self._finish(status, budget)

        order = self._root_order()
        frames: list[_Frame] = []
        root_node_bound = max(self.node_bound(), self.root_bound)
        frames.append(_Frame(self.pick_branch_var(order), (1, 0), len(self.trail), root_node_bound, order))

        aborted = False
        while frames:
            if budget.exhausted(self.nodes):
                aborted = True
                break
            frame = frames[-1]
            self.undo_to(frame.mark)
            if frame.idx >= len(frame.values):
                frames.pop()
                continue
            v = frame.values[frame.idx]
            frame.idx += 1
            self.nodes += 1
            self.assign(frame.var, v)
            if not self.propagate_quick(self.cols[frame.var]):
                continue
            bound = self.node_bound()
            if bound >= self.limit + PRUNE_MARGIN:
                continue
            if all(self.covered[i] >= self.rhs[i] for i in range(self.m)):
                self.complete_covered_node()
                continue
            order_here = frame.order
            depth = len(frames)
            if (
                depth % _CORE_LP_DEPTH_STRIDE == 0
                and 25 <= self.n_free <= _CORE_LP_MAX_FREE
            ):
                lb = self.root_relaxation(refresh_penalties=False, deadline=lp_deadline)
                if lb is None or lb >= self.limit + PRUNE_MARGIN:
                    continue
                bound = max(bound, lb)
                order_here = self._root_order()
            if self.trace and self.nodes % 5000 == 0:
                self.trace.write(
                    f"node={self.nodes} depth={depth} bound={bound:.2f} "
                    f"best={self.best_cost} free={self.n_free}\n"
                )
            frames.append(_Frame(self.pick_branch_var(order_here), (1, 0), len(self.trail), bound, order_here))

        if aborted:
            open_bounds = [f.bound for f in frames]
            lb = min(open_bounds) if open_bounds else self.root_bound
            if self.best_cost is not None:
                lb = min(lb, float(self.best_cost))
                return self._finish(SolveStatus.FEASIBLE_TIME_LIMIT, budget, lb)
            return self._finish(SolveStatus.UNKNOWN_TIME_LIMIT, budget, lb)
        status = SolveStatus.PROVEN_OPTIMAL if self.best_sel is not None else SolveStatus.PROVEN_INFEASIBLE
        return self._finish(status, budget)

    def _reduced_cost_fix(self) -> bool:
        """Permanently fix free variables whose penalty already closes the
        gap; False when the resulting propagation proves a dead end."""
        base = self.dual_bound()
        lim = self.limit + PRUNE_MARGIN
        todo_zero = []
        todo_one = []
        for j in range(self.n):
            if self.val[j] != -1:
                continue
            if base + self.pen_one[j] >= lim:
                todo_zero.append(j)
            elif base + self.pen_zero[j] >= lim:
                todo_one.append(j)
        touched = []
        for j in todo_zero:
            if self.val[j] == -1:
                self.assign(j, 0)
                touched.extend(self.cols[j])
        for j in todo_one:
            if self.val[j] == -1:
                self.assign(j, 1)
                touched.extend(self.cols[j])
        if touched:
            return self.propagate_quick(touched)
        return True

    def _finish(self, status: SolveStatus, budget: _Budget, lb: float | None = None) -> SolveOutcome:
        best = None
        if status in (SolveStatus.PROVEN_OPTIMAL, SolveStatus.FEASIBLE_TIME_LIMIT):
            assert self.best_sel is not None and self.best_cost is not None
            best = solution_from(self.model.base, self.best_sel)
            assert best.cost == self.best_cost
        if status == SolveStatus.PROVEN_OPTIMAL:
            lb = float(best.cost)
        elif status == SolveStatus.PROVEN_INFEASIBLE:
            lb = math.inf
        elif lb is None:
            lb = self.root_bound
        outcome = SolveOutcome(
            status=status,
            best=best,
            lower_bound=lb,
            nodes_explored=self.nodes,
            elapsed=budget.elapsed(),
        )
        if self.trace:
            self.trace.write(
                f"done status={status.value} best={self.best_cost} "
                f"bound={outcome.lower_bound} nodes={self.nodes} elapsed={outcome.elapsed:.3f}\n"
            )
        return outcome
