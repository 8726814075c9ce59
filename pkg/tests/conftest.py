"""Shared helpers: random hypothesis instances for differential testing."""

import numpy as np

from spurmine.procedures import Hypothesis
from spurmine.utility import EmptyOrder, FamilyDominance, UtilityKey


def random_instance(rng, max_n=40, allow_psi=True, order_kind=None):
    """One random testing problem: hypotheses plus a preference order.

    Keys are random (family, 2-D utility-rank) tuples, so FamilyDominance
    induces a random partial order over them.  p-values are continuous, so
    ties have probability zero.  When psi values are drawn they are kept
    below the matching p.
    """
    n = int(rng.integers(1, max_n + 1))
    if order_kind is None:
        order_kind = rng.choice(["family", "family", "empty", "total"])
    if order_kind == "family":
        keys = [
            UtilityKey(
                family=(int(rng.integers(0, 3)),),
                utility=(int(rng.integers(0, 4)), int(rng.integers(0, 4))),
            )
            for _ in range(n)
        ]
        order = FamilyDominance()
    elif order_kind == "total":
        keys = [UtilityKey(family=(), utility=(i,)) for i in range(n)]
        order = FamilyDominance()
    else:
        keys = [UtilityKey(family=(i,), utility=()) for i in range(n)]
        order = EmptyOrder()

    if allow_psi and rng.random() < 0.6:
        psi = rng.uniform(0.0, 0.4, n) * (rng.random(n) < 0.6)
    else:
        psi = np.zeros(n)
    p = np.maximum(psi + (1.0 - psi) * rng.uniform(0.0, 1.0, n), 1e-12)
    hyps = [Hypothesis(i, float(p[i]), float(psi[i]), keys[i]) for i in range(n)]
    return hyps, order
