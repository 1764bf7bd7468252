"""OR-Library set covering file ingestion and the best-known-value catalog.

The OR-Library SCP layout is a whitespace-separated integer stream:
``m n``, then n column costs, then for each row the count of covering
columns followed by that many 1-based column indices.  Tokens wrap
across lines at arbitrary widths, so parsing is position-tracked over
the raw token stream rather than line-oriented.
"""

from __future__ import annotations

import fnmatch
import io
import re
from dataclasses import dataclass
from importlib import resources
from pathlib import Path
from typing import IO, Iterator

from .model import Instance, density

__all__ = [
    "ParseError",
    "BestKnownCatalog",
    "InstanceStats",
    "parse_orlib_scp",
    "to_orlib_text",
    "load_best_known",
    "bundled_best_known",
    "instance_stats",
    "canonical_name",
    "discover_instances",
]

_BEST_KNOWN_RESOURCE = "best_known.txt"


class ParseError(ValueError):
    """Malformed instance or catalog input; message carries the position."""


class _Tokens:
    """Token stream over text, remembering each token's byte offset."""

    def __init__(self, text: str):
        self._matches = re.finditer(r"\S+", text)
        self.count = 0
        self.last_pos = 0

    def next_int(self, what: str) -> int:
        m = next(self._matches, None)
        if m is None:
            raise ParseError(f"truncated input: expected {what} after token {self.count} (byte {self.last_pos})")
        self.count += 1
        self.last_pos = m.start()
        tok = m.group()
        try:
            return int(tok)
        except ValueError:
            raise ParseError(f"token {self.count} (byte {m.start()}): expected integer {what}, got {tok!r}") from None

    def exhausted(self) -> bool:
        m = next(self._matches, None)
        if m is not None:
            self.last_pos = m.start()
            return False
        return True


def parse_orlib_scp(source: str | IO[str], name: str = "") -> Instance:
    """Parse an OR-Library SCP file into an Instance.

    Column indices in the file are 1-based; the conversion to 0-based
    happens here and nowhere else.  Raises ParseError on truncated
    input, non-integer tokens, out-of-range indices or empty rows.
    """
    text = source if isinstance(source, str) else source.read()
    toks = _Tokens(text)
    m = toks.next_int("row count")
    n = toks.next_int("column count")
    if m <= 0 or n <= 0:
        raise ParseError(f"token {toks.count} (byte {toks.last_pos}): need positive dimensions, got m={m} n={n}")
    costs = []
    for j in range(n):
        c = toks.next_int(f"cost of column {j + 1}")
        if c < 0:
            raise ParseError(f"token {toks.count} (byte {toks.last_pos}): negative cost for column {j + 1}")
        costs.append(c)
    rows = []
    for i in range(m):
        k_i = toks.next_int(f"coverage count of row {i + 1}")
        if k_i <= 0:
            raise ParseError(f"token {toks.count} (byte {toks.last_pos}): row {i + 1} has coverage count {k_i}")
        row = set()
        for _ in range(k_i):
            j = toks.next_int(f"covering column of row {i + 1}")
            if not 1 <= j <= n:
                raise ParseError(
                    f"token {toks.count} (byte {toks.last_pos}): row {i + 1} lists column {j} outside [1, {n}]"
                )
            row.add(j - 1)
        rows.append(frozenset(row))
    if not toks.exhausted():
        raise ParseError(f"trailing data at byte {toks.last_pos} after row {m}")
    return Instance(
        num_rows=m,
        num_cols=n,
        costs=tuple(costs),
        rows=tuple(rows),
        rhs=(1,) * m,
        name=name,
    )


def to_orlib_text(instance: Instance, width: int = 12) -> str:
    """Serialize an Instance back to the OR-Library layout (1-based
    indices, tokens wrapped at ``width`` per line)."""
    out: list[str] = []

    def emit(values: list[int]) -> None:
        for start in range(0, len(values), width):
            out.append(" ".join(str(v) for v in values[start : start + width]))

    out.append(f"{instance.num_rows} {instance.num_cols}")
    emit(list(instance.costs))
    for row in instance.rows:
        cols = sorted(j + 1 for j in row)
        out.append(str(len(cols)))
        emit(cols)
    return "\n".join(out) + "\n"


def canonical_name(name: str) -> str:
    """Map an instance identifier to its catalog spelling.

    OR-Library file names ("scp41", "scpnre1") and the literature's
    table names ("4.1", "NRE1") both occur in the wild; the catalog is
    keyed by the latter.
    """
    base = name.strip()
    if base.lower().endswith(".txt"):
        base = base[:-4]
    if base.lower().startswith("scp"):
        base = base[3:]
    if not base:
        return name.strip()
    if base[0].isdigit():
        if "." in base:
            return base
        return f"{base[0]}.{base[1:]}" if len(base) > 1 else base
    return base.upper()


@dataclass(frozen=True)
class BestKnownCatalog:
    """Optimal/best-known objective value per benchmark instance,
    queried under either the table spelling or the file spelling."""

    values: dict[str, int]

    def get(self, name: str) -> int | None:
        return self.values.get(canonical_name(name))

    def __contains__(self, name: str) -> bool:
        return canonical_name(name) in self.values

    def __len__(self) -> int:
        return len(self.values)

    def names(self) -> list[str]:
        return sorted(self.values)


def load_best_known(source: str | IO[str]) -> BestKnownCatalog:
    """Load a catalog from "name value" lines; '#' starts a comment."""
    text = source if isinstance(source, str) else source.read()
    values: dict[str, int] = {}
    for lineno, raw in enumerate(io.StringIO(text), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        if len(parts) != 2:
            raise ParseError(f"line {lineno}: expected 'name value', got {raw.strip()!r}")
        name = canonical_name(parts[0])
        try:
            value = int(parts[1])
        except ValueError:
            raise ParseError(f"line {lineno}: value for {parts[0]!r} is not an integer") from None
        if value <= 0:
            raise ParseError(f"line {lineno}: value for {parts[0]!r} must be positive, got {value}")
        if name in values:
            raise ParseError(f"line {lineno}: duplicate instance name {parts[0]!r}")
        values[name] = value
    return BestKnownCatalog(values=values)


def bundled_best_known() -> BestKnownCatalog:
    """The catalog shipped with the package (65 OR-Library instances)."""
    text = resources.files("hamcover.data").joinpath(_BEST_KNOWN_RESOURCE).read_text()
    return load_best_known(text)


@dataclass(frozen=True)
class InstanceStats:
    name: str
    num_rows: int
    num_cols: int
    density_pct: float


def instance_stats(instance: Instance) -> InstanceStats:
    return InstanceStats(
        name=instance.name,
        num_rows=instance.num_rows,
        num_cols=instance.num_cols,
        density_pct=density(instance),
    )


def discover_instances(directory: str | Path, pattern: str | None = None) -> Iterator[Path]:
    """Yield instance files under ``directory`` in sorted-name order.

    ``pattern`` is a glob matched against both the file name and its
    catalog spelling, so "scp4*" and "4.*" select the same files.
    """
    directory = Path(directory)
    for path in sorted(directory.iterdir()):
        if not path.is_file():
            continue
        if pattern is None:
            yield path
            continue
        stem = path.name[:-4] if path.name.lower().endswith(".txt") else path.name
        if fnmatch.fnmatch(stem, pattern) or fnmatch.fnmatch(canonical_name(stem), pattern):
            yield path
