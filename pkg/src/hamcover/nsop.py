"""Neighbourhood-restricted improvement subproblem construction.

Given a covering instance, a feasible incumbent and a radius k, the
subproblem keeps the base covering constraints and adds two side
constraints over the same binary variables:

* a Hamming band: the number of coordinates changed relative to the
  incumbent, written linearly as
  sum_{j not in X} x_j + sum_{j in X} (1 - x_j), must lie in [1, k];
* an improvement cut: total cost <= incumbent cost - 1 (valid because
  costs are integral).

Any feasible point of the subproblem is therefore a strictly better
cover within distance k of the incumbent.  The lower end of the band
is implied by the cut but is kept explicit; it can only help the
relaxation.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import IO, Iterable

from .model import Instance, Solution, cost_of, is_feasible_cover

__all__ = ["NsopModel", "build_nsop", "is_nsop_feasible", "hamming_band_bounds", "to_lp_text"]


@dataclass(frozen=True)
class NsopModel:
    """Base instance + incumbent + radius, with the cut right-hand side
    precomputed.  Immutable; safe to hand to a running solver."""

    base: Instance
    incumbent: Solution
    k: int
    improvement_rhs: int

    @property
    def num_cols(self) -> int:
        return self.base.num_cols


def build_nsop(instance: Instance, incumbent: Solution, k: int) -> NsopModel:
    """Assemble the restricted improvement subproblem around ``incumbent``.

    The incumbent must be a feasible cover with an accurate cached cost,
    and k must be at least 1.
    """
    if k < 1:
        raise ValueError(f"neighbourhood radius must be >= 1, got {k}")
    if not is_feasible_cover(instance, incumbent.selected):
        raise ValueError("incumbent is not a feasible cover of the instance")
    actual = cost_of(instance, incumbent.selected)
    if actual != incumbent.cost:
        raise ValueError(f"incumbent cost cache is stale: stored {incumbent.cost}, recomputed {actual}")
    return NsopModel(
        base=instance,
        incumbent=incumbent,
        k=k,
        improvement_rhs=incumbent.cost - 1,
    )


def hamming_band_bounds(model: NsopModel, candidate: Iterable[int]) -> int:
    """Evaluate the linearized distance expression at ``candidate``:
    sum of selected columns outside the incumbent plus incumbent columns
    dropped.  Callers compare the value against [1, model.k]."""
    cand = set(candidate)
    inc = model.incumbent.selected
    added = sum(1 for j in cand if j not in inc)
    dropped = sum(1 for j in inc if j not in cand)
    return added + dropped


def is_nsop_feasible(model: NsopModel, candidate: Iterable[int]) -> bool:
    """Check all three constraint groups: cover, band, improvement cut."""
    cand = set(candidate)
    if not is_feasible_cover(model.base, cand):
        return False
    dist = hamming_band_bounds(model, cand)
    if not 1 <= dist <= model.k:
        return False
    return cost_of(model.base, cand) <= model.improvement_rhs


def to_lp_text(model: NsopModel, sink: IO[str] | None = None) -> str:
    """Debug export in LP text style: objective, cover rows, the two
    band inequalities and the cut.  For eyeballing and external
    cross-checks only; not a stable interface."""
    inst = model.base
    inc = model.incumbent.selected
    lines = ["Minimize", " obj: " + " + ".join(f"{inst.costs[j]} x{j}" for j in range(inst.num_cols))]
    lines.append("Subject To")
    for i, (row, b) in enumerate(zip(inst.rows, inst.rhs)):
        terms = " + ".join(f"x{j}" for j in sorted(row))
        lines.append(f" cover{i}: {terms} >= {b}")
    band_terms = []
    band_const = 0
    for j in range(inst.num_cols):
        if j in inc:
            band_terms.append(f"- x{j}")
            band_const += 1
        else:
            band_terms.append(f"+ x{j}")
    band = " ".join(band_terms)
    lines.append(f" band_lo: {band} >= {1 - band_const}")
    lines.append(f" band_hi: {band} <= {model.k - band_const}")
    cut = " + ".join(f"{inst.costs[j]} x{j}" for j in range(inst.num_cols))
    lines.append(f" cut: {cut} <= {model.improvement_rhs}")
    lines.append("Binaries")
    lines.append(" " + " ".join(f"x{j}" for j in range(inst.num_cols)))
    lines.append("End")
    text = "\n".join(lines) + "\n"
    if sink is not None:
        sink.write(text)
    return text
