"""Dense bounded-variable primal simplex, two phases, Bland fallback.

Solves   minimize c.x  subject to  A x >= / <= b,  lo <= x <= hi.

This is deliberately self-contained: the branch-and-bound layer never
trusts the reported optimum directly.  It only consumes the dual vector,
clips it into the dual cone and evaluates the Lagrangian bound exactly,
which stays valid even when the simplex terminates early or drifts
numerically.  Cycling is handled by switching the pricing rule to
Bland's smallest-index rule after a run of degenerate pivots.
"""

from __future__ import annotations

import time
from dataclasses import dataclass
from typing import Sequence

import numpy as np

__all__ = ["LpResult", "solve_lp"]

# statuses
OPTIMAL = "optimal"
INFEASIBLE = "infeasible"
ITERATION_LIMIT = "iteration_limit"
TIME_LIMIT = "time_limit"
NUMERICAL = "numerical"


@dataclass
class LpResult:
    status: str
    x: np.ndarray | None          # structural variable values (best effort)
    objective: float | None
    duals: np.ndarray             # one multiplier per row, best effort
    iterations: int


def solve_lp(
    A: np.ndarray,
    senses: Sequence[str],
    b: np.ndarray,
    c: np.ndarray,
    lo: np.ndarray,
    hi: np.ndarray,
    *,
    tol: float = 1e-7,
    warm: np.ndarray | None = None,
    deadline: float | None = None,
    max_iter: int | None = None,
) -> LpResult:
    """Two-phase simplex over rows ``A[i] x >= b[i]`` ('G') or ``<= b[i]`` ('L').

    ``warm`` seeds the nonbasic point (clamped to the nearest bound);
    rows it already satisfies start without artificials.
    """
    R, N = A.shape
    if R != len(b) or R != len(senses) or N != len(c):
        raise ValueError("inconsistent LP dimensions")
    ge = np.array([s == "G" for s in senses], dtype=bool)
    b = np.asarray(b, dtype=float)
    c = np.asarray(c, dtype=float)
    lo = np.asarray(lo, dtype=float)
    hi = np.asarray(hi, dtype=float)

    # columns: [structural | slack per row | artificial per row]
    C = N + 2 * R
    slack0, art0 = N, N + R
    T = np.zeros((R, C))
    T[:, :N] = A
    slack_coef = np.where(ge, -1.0, 1.0)
    T[np.arange(R), slack0 + np.arange(R)] = slack_coef

    full_lo = np.zeros(C)
    full_hi = np.full(C, np.inf)
    full_lo[:N] = lo
    full_hi[:N] = hi

    # nonbasic start: clamp warm point to the nearer finite bound
    x_nb = lo.copy()
    if warm is not None:
        w = np.clip(warm, lo, hi)
        use_hi = np.isfinite(hi) & (np.abs(w - hi) < np.abs(w - lo))
        x_nb = np.where(use_hi, hi, lo)
    at_hi = np.zeros(C, dtype=bool)
    at_hi[:N] = np.isfinite(hi) & (x_nb == hi) & (hi > lo)
    values = np.concatenate([np.where(at_hi[:N], hi, lo), np.zeros(2 * R)])

    resid = b - A @ values[:N]
    # basis: a slack where it can absorb the residual, else an artificial
    basis = np.empty(R, dtype=int)
    xB = np.empty(R)
    slack_val = resid * slack_coef  # slack value if made basic
    for i in range(R):
        if slack_val[i] >= 0.0:
            basis[i] = slack0 + i
            xB[i] = slack_val[i]
        else:
            basis[i] = art0 + i
            T[i, art0 + i] = 1.0 if resid[i] >= 0 else -1.0
            xB[i] = abs(resid[i])
            full_hi[art0 + i] = np.inf
    # unused artificial columns stay pinned at zero
    for i in range(R):
        if basis[i] != art0 + i:
            full_hi[art0 + i] = 0.0

    rhs_col = b.copy()  # maintained as B^-1 b alongside T
    state = _Tableau(T, rhs_col, basis, xB, values, full_lo, full_hi, tol)

    if max_iter is None:
        max_iter = 500 + 40 * (R + N)

    iters = 0
    need_phase1 = bool((basis >= art0).any())
    if need_phase1:
        c1 = np.zeros(C)
        c1[art0:] = 1.0
        status, it1 = state.optimize(c1, max_iter, deadline)
        iters += it1
        if status != OPTIMAL:
            return _finish(state, status, c, N, ge, slack0, iters)
        if state.objective(c1) > max(1e-6, tol * (1 + abs(b).max(initial=0.0))):
            return _finish(state, INFEASIBLE, c, N, ge, slack0, iters)
        # lock every artificial at zero for phase 2
        state.hi[art0:] = 0.0
        state.drive_out_artificials(art0)

    c2 = np.zeros(C)
    c2[:N] = c
    status, it2 = state.optimize(c2, max_iter - iters, deadline)
    iters += it2
    return _finish(state, status, c, N, ge, slack0, iters)


def _finish(state: "_Tableau", status: str, c: np.ndarray, N: int, ge: np.ndarray,
            slack0: int, iters: int) -> LpResult:
    x = state.solution()[:N]
    obj = float(c @ x)
    # duals from the final objective row on the slack columns:
    #   d_slack = -coef * y  with coef = -1 on >= rows, +1 on <= rows
    z = state.last_obj_row
    R = len(ge)
    if z is None:
        duals = np.zeros(R)
    else:
        d_slack = z[slack0 : slack0 + R]
        duals = np.where(ge, d_slack, -d_slack)
    if status == INFEASIBLE:
        return LpResult(INFEASIBLE, None, None, duals, iters)
    return LpResult(status, x, obj, duals, iters)


class _Tableau:
    """Mutable simplex state; ``optimize`` runs one cost vector to optimality."""

    def __init__(self, T, rhs_col, basis, xB, values, lo, hi, tol):
        self.T = T
        self.rhs = rhs_col
        self.basis = basis
        self.xB = xB
        self.values = values
        self.lo = lo
        self.hi = hi
        self.tol = tol
        self.last_obj_row: np.ndarray | None = None
        self._in_basis = np.zeros(T.shape[1], dtype=bool)
        self._in_basis[basis] = True
        # eliminate basic columns so T starts as B^-1 A
        self._factorize()

    def _factorize(self) -> None:
        T, basis = self.T, self.basis
        for r in range(len(basis)):
            q = basis[r]
            piv = T[r, q]
            if abs(piv) < 1e-11:
                continue
            if piv != 1.0:
                T[r, :] /= piv
                self.rhs[r] /= piv
            col = T[:, q].copy()
            col[r] = 0.0
            nz = np.nonzero(np.abs(col) > 1e-13)[0]
            if len(nz):
                self.T[nz, :] -= np.outer(col[nz], T[r, :])
                self.rhs[nz] -= col[nz] * self.rhs[r]
                self.T[nz, q] = 0.0

    def objective(self, c: np.ndarray) -> float:
        return float(c @ self.solution())

    def solution(self) -> np.ndarray:
        x = self.values.copy()
        x[self.basis] = self.xB
        return x

    def _refresh_xB(self) -> None:
        nb_val = self.values.copy()
        nb_val[self.basis] = 0.0
        nz = np.nonzero(nb_val)[0]
        self.xB = self.rhs - self.T[:, nz] @ nb_val[nz] if len(nz) else self.rhs.copy()

    def drive_out_artificials(self, art0: int) -> None:
        """Pivot basic artificials (at zero) onto any usable column."""
        for r in range(len(self.basis)):
            q = self.basis[r]
            if q < art0:
                continue
            row = self.T[r, :art0]
            cand = np.nonzero((np.abs(row) > 1e-8) & ~self._in_basis[:art0])[0]
            if len(cand):
                self._pivot(r, int(cand[0]), enter_value=self.values[int(cand[0])])
            # else: the row is redundant; the artificial stays basic at 0,
            # pinned by hi = 0

    def optimize(self, c: np.ndarray, max_iter: int, deadline: float | None) -> tuple[str, int]:
        T, lo, hi = self.T, self.lo, self.hi
        tol = self.tol
        z = c - c[self.basis] @ T
        z[self.basis] = 0.0
        self.last_obj_row = z
        bland = False
        degenerate_run = 0
        iters = 0
        while True:
            if iters >= max_iter:
                return ITERATION_LIMIT, iters
            if deadline is not None and iters % 32 == 0 and time.monotonic() > deadline:
                return TIME_LIMIT, iters
            iters += 1

            at_lo_ok = (~self._in_basis) & (z < -tol) & (self.values <= lo + 1e-12)
            at_hi_ok = (~self._in_basis) & (z > tol) & (self.values >= hi - 1e-12) & np.isfinite(hi)
            movable = (hi - lo) > 1e-12
            cand = np.nonzero((at_lo_ok | at_hi_ok) & movable)[0]
            if len(cand) == 0:
                self.last_obj_row = z
                return OPTIMAL, iters
            if bland:
                q = int(cand[0])
            else:
                q = int(cand[np.argmax(np.abs(z[cand]))])
            direction = 1.0 if z[q] < 0 else -1.0  # increase from lo / decrease from hi

            col = T[:, q]
            step = direction * col
            limits = np.full(len(col), np.inf)
            pos = step > 1e-11
            neg = step < -1e-11
            lo_b = lo[self.basis]
            hi_b = hi[self.basis]
            limits[pos] = (self.xB[pos] - lo_b[pos]) / step[pos]
            finite_hi = neg & np.isfinite(hi_b)
            limits[finite_hi] = (self.xB[finite_hi] - hi_b[finite_hi]) / step[finite_hi]
            own = hi[q] - lo[q]

            r = int(np.argmin(limits)) if len(limits) else -1
            row_limit = limits[r] if r >= 0 else np.inf
            delta = min(row_limit, own)
            if not np.isfinite(delta):
                return NUMERICAL, iters  # bounded problems never hit this
            if delta < 0:
                delta = 0.0

            if delta <= 1e-10:
                degenerate_run += 1
                if degenerate_run > 60 + len(self.basis):
                    bland = True
            else:
                degenerate_run = 0

            if own <= row_limit + 1e-12 and np.isfinite(own):
                # bound flip: no basis change
                self.xB -= delta * step
                self.values[q] = hi[q] if direction > 0 else lo[q]
                continue

            # tie-break leaving row by smallest basic index (Bland compatible)
            ties = np.nonzero(limits <= row_limit + 1e-12)[0]
            if len(ties) > 1:
                r = int(ties[np.argmin(self.basis[ties])])
            self.xB -= delta * step
            enter_value = self.values[q] + direction * delta
            self._pivot(r, q, enter_value)
            z = z - z[q] * T[r, :]
            z[q] = 0.0
            self.last_obj_row = z
            if iters % 128 == 0:
                z = c - c[self.basis] @ T
                z[self.basis] = 0.0
                self.last_obj_row = z
                self._refresh_xB()

    def _pivot(self, r: int, q: int, enter_value: float) -> None:
        T = self.T
        leave = self.basis[r]
        # park the leaving variable on its nearer bound
        lv = self.xB[r]
        if np.isfinite(self.hi[leave]) and abs(lv - self.hi[leave]) < abs(lv - self.lo[leave]):
            self.values[leave] = self.hi[leave]
        else:
            self.values[leave] = self.lo[leave]
        self._in_basis[leave] = False
        self._in_basis[q] = True
        self.basis[r] = q

        piv = T[r, q]
        T[r, :] /= piv
        self.rhs[r] /= piv
        col = T[:, q].copy()
        col[r] = 0.0
        nz = np.nonzero(np.abs(col) > 1e-13)[0]
        if len(nz):
            T[nz, :] -= np.outer(col[nz], T[r, :])
            self.rhs[nz] -= col[nz] * self.rhs[r]
            T[nz, q] = 0.0
        self.xB[r] = enter_value
