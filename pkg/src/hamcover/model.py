"""Core domain types for zero-one covering problems.

An instance is a minimisation problem over binary column variables:
pick a subset of columns so that every row i is covered by at least
rhs[i] of the chosen columns, at minimum total cost.  For the classic
set covering problem every rhs entry is 1; the right-hand sides are
kept general here.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable

__all__ = [
    "Instance",
    "Solution",
    "SearchParams",
    "cost_of",
    "is_feasible_cover",
    "hamming_distance",
    "density",
    "solution_from",
]


@dataclass(frozen=True)
class Instance:
    """Immutable covering-problem data.

    rows[i] is the set of column indices (0-based) that cover row i.
    The column-to-rows view ``cols`` is derived once at construction.
    """

    num_rows: int
    num_cols: int
    costs: tuple[int, ...]
    rows: tuple[frozenset[int], ...]
    rhs: tuple[int, ...]
    name: str = ""
    cols: tuple[frozenset[int], ...] = field(
        init=False, repr=False, compare=False, default=()
    )

    def __post_init__(self) -> None:
        m, n = self.num_rows, self.num_cols
        if m <= 0 or n <= 0:
            raise ValueError(f"instance {self.name!r}: need m > 0 and n > 0, got {m}x{n}")
        if len(self.costs) != n:
            raise ValueError(f"instance {self.name!r}: expected {n} costs, got {len(self.costs)}")
        for j, c in enumerate(self.costs):
            if not isinstance(c, int) or isinstance(c, bool):
                raise ValueError(f"instance {self.name!r}: cost of column {j} is not an integer: {c!r}")
            if c < 0:
                raise ValueError(f"instance {self.name!r}: cost of column {j} is negative: {c}")
        if len(self.rows) != m:
            raise ValueError(f"instance {self.name!r}: expected {m} rows, got {len(self.rows)}")
        if len(self.rhs) != m:
            raise ValueError(f"instance {self.name!r}: expected {m} rhs entries, got {len(self.rhs)}")
        covered_by: list[set[int]] = [set() for _ in range(n)]
        for i, (row, b) in enumerate(zip(self.rows, self.rhs)):
            if not isinstance(b, int) or b <= 0:
                raise ValueError(f"instance {self.name!r}: rhs of row {i} must be a positive integer, got {b!r}")
            if not row:
                raise ValueError(f"instance {self.name!r}: row {i} is covered by no column")
            if len(row) < b:
                raise ValueError(
                    f"instance {self.name!r}: row {i} needs {b} columns but only {len(row)} cover it"
                )
            for j in row:
                if not 0 <= j < n:
                    raise ValueError(f"instance {self.name!r}: row {i} lists column {j} outside [0, {n})")
                covered_by[j].add(i)
        object.__setattr__(self, "cols", tuple(frozenset(s) for s in covered_by))

    @property
    def nnz(self) -> int:
        """Number of ones in the row/column coverage matrix."""
        return sum(len(r) for r in self.rows)


@dataclass(frozen=True)
class Solution:
    """A zero-one assignment over columns, stored as the set of chosen
    columns, with its objective value cached."""

    selected: frozenset[int]
    cost: int


def solution_from(instance: Instance, selected: Iterable[int]) -> Solution:
    """Build a Solution with the cached cost recomputed from ``instance``."""
    sel = frozenset(selected)
    return Solution(selected=sel, cost=cost_of(instance, sel))


@dataclass(frozen=True)
class SearchParams:
    """Neighbourhood-search controls: initial radius, radius increment,
    and the stall limit (consecutive non-improving iterations allowed)."""

    k_init: int = 5
    delta: int = 5
    l_limit: int = 5
    nsop_time_limit: float | None = None  # None: derived from instance size

    def __post_init__(self) -> None:
        if self.k_init < 1:
            raise ValueError(f"k_init must be >= 1, got {self.k_init}")
        if self.delta < 1:
            raise ValueError(f"delta must be >= 1, got {self.delta}")
        if self.l_limit < 1:
            raise ValueError(f"l_limit must be >= 1, got {self.l_limit}")
        if self.nsop_time_limit is not None and self.nsop_time_limit <= 0:
            raise ValueError(f"nsop_time_limit must be positive, got {self.nsop_time_limit}")


def _check_columns(instance: Instance, selected: Iterable[int]) -> None:
    for j in selected:
        if not 0 <= j < instance.num_cols:
            raise ValueError(f"column index {j} outside [0, {instance.num_cols})")


def cost_of(instance: Instance, selected: Iterable[int]) -> int:
    """Total cost of the given column set."""
    sel = set(selected)
    _check_columns(instance, sel)
    return sum(instance.costs[j] for j in sel)


def is_feasible_cover(instance: Instance, selected: Iterable[int]) -> bool:
    """True iff every row i is covered by at least rhs[i] selected columns."""
    sel = set(selected)
    _check_columns(instance, sel)
    return all(len(row & sel) >= b for row, b in zip(instance.rows, instance.rhs))


def hamming_distance(a: Iterable[int], b: Iterable[int], n: int | None = None) -> int:
    """Number of coordinates in which the 0-1 vectors behind the two
    column sets differ, i.e. the size of their symmetric difference."""
    sa, sb = set(a), set(b)
    if n is not None:
        for j in sa | sb:
            if not 0 <= j < n:
                raise ValueError(f"column index {j} outside [0, {n})")
    return len(sa ^ sb)


def density(instance: Instance) -> float:
    """Percentage of ones in the coverage matrix: 100 * nnz / (m * n)."""
    return 100.0 * instance.nnz / (instance.num_rows * instance.num_cols)
