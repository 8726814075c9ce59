"""Categorical transaction data: schema, CSV ingestion, pattern enumeration.

Patterns are full assignments (one category per schema variable), so any two
distinct patterns match disjoint transaction sets.  That disjointness is what
makes the p-values of true and false hypotheses independent, which the
sequential procedure's error control relies on.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from .exact_tests import ContingencyTable, Sidedness, fisher_p_value, min_attainable_p
from .procedures import Hypothesis
from .utility import FamilyDominance, PreferenceOrder

__all__ = [
    "DataError",
    "BinRule",
    "VariableSpec",
    "TargetSpec",
    "CategoricalSchema",
    "TransactionTable",
    "DisjointnessReport",
    "ingest_csv",
    "enumerate_patterns",
    "build_hypotheses",
    "validate_disjointness",
]

ROLES = ("family", "utility")
DIRECTIONS = ("lower_is_better", "higher_is_better")

PatternId = tuple[int, ...]


class DataError(ValueError):
    """Input data does not match the schema."""


@dataclass(frozen=True)
class BinRule:
    """Half-open numeric interval [lower, upper) mapped to one category.

    A missing bound means unbounded on that side.
    """

    category: str
    lower: float | None = None
    upper: float | None = None

    def contains(self, value: float) -> bool:
        if self.lower is not None and value < self.lower:
            return False
        if self.upper is not None and value >= self.upper:
            return False
        return True


@dataclass(frozen=True)
class VariableSpec:
    """One schema variable: its role, categories, and optional binning.

    For utility variables the category order is the ordinal scale and
    ``direction`` says which end is preferred.  Bin rules, when present,
    must be contiguous, non-overlapping, and produce exactly the declared
    category list in order.
    """

    name: str
    role: str
    categories: tuple[str, ...]
    bins: tuple[BinRule, ...] | None = None
    direction: str | None = None

    def __post_init__(self) -> None:
        if self.role not in ROLES:
            raise ValueError(f"variable {self.name!r}: role must be one of {ROLES}")
        if not self.categories:
            raise ValueError(f"variable {self.name!r}: needs at least one category")
        if len(set(self.categories)) != len(self.categories):
            raise ValueError(f"variable {self.name!r}: duplicate categories")
        if self.role == "utility":
            if self.direction not in DIRECTIONS:
                raise ValueError(
                    f"utility variable {self.name!r}: direction must be one of {DIRECTIONS}"
                )
        elif self.direction is not None:
            raise ValueError(f"family variable {self.name!r}: direction not allowed")
        if self.bins is not None:
            produced = tuple(b.category for b in self.bins)
            if produced != self.categories:
                raise ValueError(
                    f"variable {self.name!r}: bin outputs {produced} do not match "
                    f"declared categories {self.categories}"
                )
            for prev, nxt in zip(self.bins, self.bins[1:]):
                if prev.upper is None or nxt.lower is None or prev.upper != nxt.lower:
                    raise ValueError(
                        f"variable {self.name!r}: bins must be contiguous and ordered "
                        f"({prev.category!r} -> {nxt.category!r})"
                    )

    def encode(self, raw: str) -> int | None:
        """Category index for a raw CSV cell, or None when unmappable."""
        if self.bins is None:
            try:
                return self.categories.index(raw)
            except ValueError:
                return None
        try:
            value = float(raw)
        except ValueError:
            return None
        for idx, rule in enumerate(self.bins):
            if rule.contains(value):
                return idx
        return None


@dataclass(frozen=True)
class TargetSpec:
    """Binary target column and the raw value treated as label 1."""

    column: str
    positive: str


@dataclass(frozen=True)
class CategoricalSchema:
    variables: tuple[VariableSpec, ...]
    target: TargetSpec

    def __post_init__(self) -> None:
        names = [v.name for v in self.variables]
        if not names:
            raise ValueError("schema needs at least one variable")
        if len(set(names)) != len(names):
            raise ValueError(f"duplicate variable names: {names}")
        if self.target.column in names:
            raise ValueError(f"target column {self.target.column!r} also listed as a variable")

    @property
    def variable_names(self) -> tuple[str, ...]:
        return tuple(v.name for v in self.variables)

    def preference_order(self) -> FamilyDominance:
        """Dominance order induced by the schema's family/utility split."""
        family_positions = tuple(
            i for i, v in enumerate(self.variables) if v.role == "family"
        )
        utility_orientation = tuple(
            (i, len(v.categories), v.direction == "lower_is_better")
            for i, v in enumerate(self.variables)
            if v.role == "utility"
        )
        return FamilyDominance(family_positions, utility_orientation)

    def pattern_labels(self, pattern: Sequence[int]) -> tuple[str, ...]:
        return tuple(
            var.categories[code] for var, code in zip(self.variables, pattern)
        )


@dataclass(frozen=True, eq=False)
class TransactionTable:
    """Encoded transactions: one category index per variable plus a 0/1 label."""

    codes: np.ndarray
    labels: np.ndarray
    schema: CategoricalSchema
    dropped_rows: tuple[int, ...] = field(default=())

    @property
    def n_rows(self) -> int:
        return int(self.codes.shape[0])

    @property
    def n_positive(self) -> int:
        return int(self.labels.sum())


def ingest_csv(
    path: str, schema: CategoricalSchema, drop_unmappable: bool = False
) -> TransactionTable:
    """Read and encode a CSV file (header row, comma separated, UTF-8).

    A row with any cell that no category or bin accepts aborts the run with
    a DataError naming the row, unless ``drop_unmappable`` is set, in which
    case offending rows are skipped and recorded on the returned table.
    """
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise DataError(f"{path}: empty file, expected a header row") from None
        positions = {}
        for column in [*schema.variable_names, schema.target.column]:
            try:
                positions[column] = header.index(column)
            except ValueError:
                raise DataError(f"{path}: missing column {column!r}") from None
        var_pos = [positions[v.name] for v in schema.variables]
        target_pos = positions[schema.target.column]
        width = max(positions.values())

        codes: list[tuple[int, ...]] = []
        labels: list[int] = []
        dropped: list[int] = []
        for row_no, row in enumerate(reader, start=2):
            if len(row) <= width:
                raise DataError(f"{path}: row {row_no} has {len(row)} fields, expected more")
            encoded = []
            bad: tuple[str, str] | None = None
            for var, pos in zip(schema.variables, var_pos):
                code = var.encode(row[pos])
                if code is None:
                    bad = (var.name, row[pos])
                    break
                encoded.append(code)
            if bad is not None:
                if drop_unmappable:
                    dropped.append(row_no)
                    continue
                raise DataError(
                    f"{path}: row {row_no}: value {bad[1]!r} not mappable for "
                    f"variable {bad[0]!r}"
                )
            codes.append(tuple(encoded))
            labels.append(1 if row[target_pos] == schema.target.positive else 0)

    n_vars = len(schema.variables)
    return TransactionTable(
        codes=np.asarray(codes, dtype=np.int64).reshape(len(codes), n_vars),
        labels=np.asarray(labels, dtype=np.int64),
        schema=schema,
        dropped_rows=tuple(dropped),
    )


def enumerate_patterns(
    table: TransactionTable, schema: CategoricalSchema, min_support: int = 1
) -> list[tuple[PatternId, ContingencyTable]]:
    """All observed full assignments with support >= max(min_support, 1).

    Every transaction matches exactly one full assignment, so before the
    support filter the supports partition the rows.  Output is sorted in
    lexicographic category-index order, making enumeration deterministic.
    """
    if min_support < 0:
        raise ValueError(f"min_support must be non-negative, got {min_support}")
    if table.n_rows == 0:
        return []
    uniq, inverse = np.unique(table.codes, axis=0, return_inverse=True)
    support = np.bincount(inverse, minlength=len(uniq))
    positive = np.bincount(inverse, weights=table.labels, minlength=len(uniq)).astype(np.int64)
    n, n1 = table.n_rows, table.n_positive
    floor = max(min_support, 1)
    return [
        (tuple(int(c) for c in uniq[i]), ContingencyTable(n, n1, int(support[i]), int(positive[i])))
        for i in range(len(uniq))
        if support[i] >= floor
    ]


def build_hypotheses(
    patterns: Sequence[tuple[PatternId, ContingencyTable]],
    side: Sidedness,
    order: PreferenceOrder,
) -> list[Hypothesis]:
    """Score each pattern: p-value, minimal attainable p-value, utility key.

    Hypothesis indices follow the (deterministic) enumeration order.
    """
    hypotheses = []
    for index, (pattern, table) in enumerate(patterns):
        p = fisher_p_value(table, side)
        psi = min_attainable_p(table.n_total, table.n_positive, table.support, side)
        hypotheses.append(
            Hypothesis(
                index=index,
                p=p,
                psi=min(psi, p),  # guard against one-ulp inversions of psi <= p
                key=order.key_for_pattern(pattern),
            )
        )
    return hypotheses


@dataclass(frozen=True)
class DisjointnessReport:
    ok: bool
    message: str = ""
    offending: tuple = ()


def validate_disjointness(
    patterns: Iterable[Sequence[int | None]], schema: CategoricalSchema
) -> DisjointnessReport:
    """Check the structural guarantee that distinct patterns share no rows.

    Full assignments over the schema's variables can never overlap; the
    report flags wildcard/partial assignments, out-of-range codes, and
    duplicated patterns instead of raising, because a violation is a
    property of the data under inspection rather than a usage error.
    """
    n_vars = len(schema.variables)
    seen: dict[tuple, int] = {}
    for pos, pattern in enumerate(patterns):
        pattern = tuple(pattern)
        if len(pattern) != n_vars:
            return DisjointnessReport(
                ok=False,
                message=f"pattern #{pos} has {len(pattern)} coordinates, schema has {n_vars}",
                offending=(pattern,),
            )
        for var, code in zip(schema.variables, pattern):
            if code is None:
                return DisjointnessReport(
                    ok=False,
                    message=f"pattern #{pos} leaves variable {var.name!r} unassigned "
                    "(partial patterns can overlap)",
                    offending=(pattern,),
                )
            if not 0 <= code < len(var.categories):
                return DisjointnessReport(
                    ok=False,
                    message=f"pattern #{pos} has out-of-range code {code} for "
                    f"variable {var.name!r}",
                    offending=(pattern,),
                )
        if pattern in seen:
            return DisjointnessReport(
                ok=False,
                message=f"patterns #{seen[pattern]} and #{pos} are identical "
                "(duplicates match the same rows)",
                offending=(pattern, pattern),
            )
        seen[pattern] = pos
    return DisjointnessReport(ok=True)
