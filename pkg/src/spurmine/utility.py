"""Ordinal utility algebra: pairwise preference, Pareto fronts, set comparison.

A preference order is any strict partial order over utility keys; hypotheses
whose keys are incomparable can both be kept by the mining procedures, which
is the whole point of working with partial rather than total preferences.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from enum import Enum
from typing import Callable, Sequence

__all__ = [
    "Ordering",
    "SetComparison",
    "UtilityKey",
    "PreferenceOrder",
    "FamilyDominance",
    "ExplicitComparator",
    "EmptyOrder",
    "compare",
    "dominating_subset",
    "utility_measure",
    "compare_sets",
    "less_useful_count_weights",
    "check_partial_order",
]


class Ordering(Enum):
    MORE_PREFERRED = "more_preferred"
    LESS_PREFERRED = "less_preferred"
    EQUAL = "equal"
    INCOMPARABLE = "incomparable"


class SetComparison(Enum):
    MORE_USEFUL = "more_useful"
    LESS_USEFUL = "less_useful"
    EQUAL = "equal"
    INCOMPARABLE = "incomparable"


@dataclass(frozen=True)
class UtilityKey:
    """Family coordinates plus oriented utility ranks for one pattern.

    Utility ranks are already oriented at construction time so that a smaller
    rank always means more preferred, regardless of the variable's declared
    direction.
    """

    family: tuple[int, ...]
    utility: tuple[int, ...]


class PreferenceOrder:
    """Base class for preference orders over utility keys."""

    def compare(self, a: UtilityKey, b: UtilityKey) -> Ordering:
        raise NotImplementedError

    def key_for_pattern(self, pattern: Sequence[int]) -> UtilityKey:
        """Default key derivation: the whole pattern is the family.

        Distinct patterns then compare as incomparable under FamilyDominance
        semantics, and orders that do not know about a schema still get a
        usable key.
        """
        return UtilityKey(family=tuple(pattern), utility=())


def _check_arity(a: UtilityKey, b: UtilityKey) -> None:
    if len(a.family) != len(b.family) or len(a.utility) != len(b.utility):
        raise ValueError(f"utility keys have mismatched arity: {a} vs {b}")


class FamilyDominance(PreferenceOrder):
    """Componentwise dominance on utility ranks within an identical family.

    Keys from different families are incomparable.  Within a family, a key is
    more preferred when every oriented rank is <= the other's and at least
    one is strictly smaller (Pareto dominance on ranks).

    ``family_positions``/``utility_orientation`` describe how to derive keys
    from full patterns: positions index into the pattern, and orientation
    holds (position, n_categories, lower_is_better) per utility variable.
    """

    def __init__(
        self,
        family_positions: tuple[int, ...] = (),
        utility_orientation: tuple[tuple[int, int, bool], ...] = (),
    ) -> None:
        self._family_positions = family_positions
        self._utility_orientation = utility_orientation

    def compare(self, a: UtilityKey, b: UtilityKey) -> Ordering:
        _check_arity(a, b)
        if a.family != b.family:
            return Ordering.INCOMPARABLE
        a_le_b = all(x <= y for x, y in zip(a.utility, b.utility))
        b_le_a = all(y <= x for x, y in zip(a.utility, b.utility))
        if a_le_b and b_le_a:
            return Ordering.EQUAL
        if a_le_b:
            return Ordering.MORE_PREFERRED
        if b_le_a:
            return Ordering.LESS_PREFERRED
        return Ordering.INCOMPARABLE

    def key_for_pattern(self, pattern: Sequence[int]) -> UtilityKey:
        family = tuple(pattern[pos] for pos in self._family_positions)
        utility = tuple(
            pattern[pos] if lower_better else n_cats - 1 - pattern[pos]
            for pos, n_cats, lower_better in self._utility_orientation
        )
        return UtilityKey(family=family, utility=utility)


class EmptyOrder(PreferenceOrder):
    """Every pair of distinct keys is incomparable."""

    def compare(self, a: UtilityKey, b: UtilityKey) -> Ordering:
        return Ordering.EQUAL if a == b else Ordering.INCOMPARABLE


class ExplicitComparator(PreferenceOrder):
    """Wraps a caller-provided pairwise relation.

    The callable must implement a strict partial order (plus an equivalence
    for EQUAL); ``check_partial_order`` samples triples to catch cycles and
    asymmetry violations in user-supplied relations.
    """

    def __init__(
        self,
        compare_fn: Callable[[UtilityKey, UtilityKey], Ordering],
        key_fn: Callable[[Sequence[int]], UtilityKey] | None = None,
    ) -> None:
        self._compare_fn = compare_fn
        self._key_fn = key_fn

    def compare(self, a: UtilityKey, b: UtilityKey) -> Ordering:
        return self._compare_fn(a, b)

    def key_for_pattern(self, pattern: Sequence[int]) -> UtilityKey:
        if self._key_fn is not None:
            return self._key_fn(pattern)
        return super().key_for_pattern(pattern)


def compare(a: UtilityKey, b: UtilityKey, order: PreferenceOrder) -> Ordering:
    return order.compare(a, b)


def dominating_subset(keys: Sequence[UtilityKey], order: PreferenceOrder) -> list[UtilityKey]:
    """Keys not strictly dominated by any other key (input order preserved).

    Keys that compare EQUAL to each other all remain; the operation is
    idempotent.
    """
    return [
        k
        for k in keys
        if not any(order.compare(k, other) is Ordering.LESS_PREFERRED for other in keys)
    ]


def _covered(key: UtilityKey, front: Sequence[UtilityKey], order: PreferenceOrder) -> bool:
    return any(
        order.compare(key, other) in (Ordering.LESS_PREFERRED, Ordering.EQUAL)
        for other in front
    )


def utility_measure(
    keys: Sequence[UtilityKey], other_keys: Sequence[UtilityKey], order: PreferenceOrder
) -> int:
    """How many front elements of ``keys`` the other set fails to cover.

    An element is covered when some element of the other set's front is at
    least as preferred (strictly more preferred or equal).  A set always
    fully covers itself, so the measure from a set to itself is 0.
    """
    front = dominating_subset(keys, order)
    other_front = dominating_subset(other_keys, order)
    return sum(1 for k in front if not _covered(k, other_front, order))


def compare_sets(
    keys: Sequence[UtilityKey], other_keys: Sequence[UtilityKey], order: PreferenceOrder
) -> SetComparison:
    """Classify two sets by their mutual utility measures."""
    d_ab = utility_measure(keys, other_keys, order)
    d_ba = utility_measure(other_keys, keys, order)
    if d_ab == 0 and d_ba == 0:
        return SetComparison.EQUAL
    if d_ab > 0 and d_ba == 0:
        return SetComparison.MORE_USEFUL
    if d_ab == 0 and d_ba > 0:
        return SetComparison.LESS_USEFUL
    return SetComparison.INCOMPARABLE


def less_useful_count_weights(
    keys: Sequence[UtilityKey], order: PreferenceOrder
) -> list[float]:
    """Per-key weight: 1 + number of keys strictly less preferred than it.

    Under a total order over n keys this yields n, n-1, ..., 1 from most to
    least preferred, the standard utility-rank weighting for the weighted
    Bonferroni baseline.
    """
    return [
        1.0
        + sum(1 for other in keys if order.compare(other, k) is Ordering.LESS_PREFERRED)
        for k in keys
    ]


def check_partial_order(
    keys: Sequence[UtilityKey],
    order: PreferenceOrder,
    max_triples: int = 20000,
    seed: int = 0,
) -> None:
    """Validate strict-partial-order axioms on the given keys; raise if broken.

    Checks reflexivity of EQUAL, symmetry consistency of every pair, and
    transitivity of both the strict relation and the equivalence on all
    triples (sampled when the exhaustive count exceeds ``max_triples``).
    """
    n = len(keys)
    for k in keys:
        if order.compare(k, k) is not Ordering.EQUAL:
            raise ValueError(f"order is not reflexive at {k}")
    flipped = {
        Ordering.MORE_PREFERRED: Ordering.LESS_PREFERRED,
        Ordering.LESS_PREFERRED: Ordering.MORE_PREFERRED,
        Ordering.EQUAL: Ordering.EQUAL,
        Ordering.INCOMPARABLE: Ordering.INCOMPARABLE,
    }
    for i in range(n):
        for j in range(i + 1, n):
            fwd = order.compare(keys[i], keys[j])
            back = order.compare(keys[j], keys[i])
            if back is not flipped[fwd]:
                raise ValueError(
                    f"asymmetric comparison between {keys[i]} and {keys[j]}: {fwd} vs {back}"
                )

    def one_triple(a: UtilityKey, b: UtilityKey, c: UtilityKey) -> None:
        ab, bc, ac = order.compare(a, b), order.compare(b, c), order.compare(a, c)
        strict_or_eq = (Ordering.MORE_PREFERRED, Ordering.EQUAL)
        if ab in strict_or_eq and bc in strict_or_eq:
            if Ordering.MORE_PREFERRED in (ab, bc):
                if ac is not Ordering.MORE_PREFERRED:
                    raise ValueError(f"transitivity violated on ({a}, {b}, {c})")
            elif ac is not Ordering.EQUAL:
                raise ValueError(f"equivalence transitivity violated on ({a}, {b}, {c})")

    if n ** 3 <= max_triples:
        triples = (
            (keys[i], keys[j], keys[k])
            for i in range(n)
            for j in range(n)
            for k in range(n)
        )
        for a, b, c in triples:
            one_triple(a, b, c)
    else:
        rng = random.Random(seed)
        for _ in range(max_triples):
            a, b, c = (keys[rng.randrange(n)] for _ in range(3))
            one_triple(a, b, c)
