"""Initial feasible solution: ratio greedy plus redundancy removal.

The greedy repeatedly picks the column with the smallest ratio
cost / (number of still-uncovered rows the column would help cover).
Ratios are compared by integer cross-multiplication so ties are exact
and platform independent.  Afterwards every column whose covered rows
are all covered elsewhere is dropped, scanning from expensive to cheap.
"""

from __future__ import annotations

from .model import Instance, Solution, is_feasible_cover, solution_from

__all__ = ["greedy_construct", "remove_redundant"]


def greedy_construct(instance: Instance) -> Solution:
    """Feasible cover from the cost/coverage ratio greedy.

    Tie-breaking among equal ratios: prefer the column covering more
    uncovered rows, then the lowest column index.
    """
    n = instance.num_cols
    costs = instance.costs
    cols = instance.cols
    # deficit[i]: how many more distinct columns row i still needs
    deficit = list(instance.rhs)
    # gain[j]: number of rows with positive deficit that column j covers
    gain = [0] * n
    for j in range(n):
        gain[j] = sum(1 for i in cols[j] if deficit[i] > 0)
    remaining = sum(deficit)
    selected: set[int] = set()

    while remaining > 0:
        best = -1
        best_cost = 0
        best_gain = 0
        for j in range(n):
            g = gain[j]
            if g <= 0 or j in selected:
                continue
            c = costs[j]
            if best < 0:
                better = True
            else:
                # c / g < best_cost / best_gain, exactly
                lhs = c * best_gain
                rhs = best_cost * g
                better = lhs < rhs or (lhs == rhs and g > best_gain)
            if better:
                best, best_cost, best_gain = j, c, g
        if best < 0:
            raise ValueError(f"instance {instance.name!r}: rows left uncoverable by unselected columns")
        selected.add(best)
        for i in cols[best]:
            if deficit[i] > 0:
                deficit[i] -= 1
                remaining -= 1
                if deficit[i] == 0:
                    # row satisfied: it no longer contributes to any gain
                    for j in instance.rows[i]:
                        gain[j] -= 1

    return solution_from(instance, selected)


def remove_redundant(instance: Instance, solution: Solution) -> Solution:
    """Drop columns whose rows are all covered enough by the rest.

    Scan order is decreasing cost, ties by decreasing index; each
    removal is committed immediately.  Removing only ever lowers
    coverage, so a single pass leaves a 1-minimal cover.
    """
    if not is_feasible_cover(instance, solution.selected):
        raise ValueError("remove_redundant requires a feasible cover")
    cover_count = [0] * instance.num_rows
    for j in solution.selected:
        for i in instance.cols[j]:
            cover_count[i] += 1
    kept = set(solution.selected)
    for j in sorted(solution.selected, key=lambda j: (-instance.costs[j], -j)):
        if all(cover_count[i] > instance.rhs[i] for i in instance.cols[j]):
            kept.remove(j)
            for i in instance.cols[j]:
                cover_count[i] -= 1
    return solution_from(instance, kept)
