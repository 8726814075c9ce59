"""Multiple-testing procedures with familywise error rate control.

Includes the classical single-shot corrections (Bonferroni, weighted
Bonferroni), the step-down Holm method, the testability-aware threshold
(t_bonferroni), and the iterative utility-aware procedure ``spur`` together
with its deliberately broken variant ``invalid_spur`` (no budget update,
kept only to demonstrate that the update is what preserves FWER control).
"""

from __future__ import annotations

from bisect import bisect_right
from dataclasses import dataclass
from typing import Sequence

from .utility import Ordering, PreferenceOrder, UtilityKey

__all__ = [
    "Hypothesis",
    "IterationRecord",
    "ProcedureResult",
    "tarone_threshold",
    "bonferroni",
    "weighted_bonferroni",
    "holm",
    "t_bonferroni",
    "spur",
    "invalid_spur",
    "spur_closed_form_oracle",
]

_BELOW = (Ordering.LESS_PREFERRED, Ordering.EQUAL)


@dataclass(frozen=True, slots=True)
class Hypothesis:
    """One testable hypothesis: p-value, minimal attainable p-value, utility key."""

    index: int
    p: float
    psi: float
    key: UtilityKey

    def __post_init__(self) -> None:
        if not 0.0 < self.p <= 1.0:
            raise ValueError(f"p-value must be in (0, 1], got {self.p}")
        if not 0.0 <= self.psi <= self.p:
            raise ValueError(f"psi must be in [0, p], got psi={self.psi}, p={self.p}")


@dataclass(frozen=True, slots=True)
class IterationRecord:
    """One iteration of the sequential procedure.

    ``rejected`` is None on the final, non-rejecting iteration.  ``tau`` is
    only defined on rejecting iterations.  ``n_testable`` counts hypotheses
    whose minimal attainable p-value is within the threshold; zero flags an
    iteration where no remaining hypothesis was testable at all.
    """

    t: int
    sigma: float
    delta: float
    p_min: float
    tau: float | None
    rejected: int | None
    ignored: tuple[int, ...]
    n_testable: int


@dataclass(frozen=True)
class ProcedureResult:
    """Outcome of one procedure run.

    ``stopped_at`` is the first iteration that made no rejection (for
    single-shot procedures it is 1).  ``threshold`` is set by procedures
    that use a single global rejection threshold.
    """

    rejected: frozenset[int]
    trace: tuple[IterationRecord, ...] = ()
    stopped_at: int = 1
    threshold: float | None = None


def _check_alpha(alpha: float) -> None:
    if not 0.0 < alpha < 1.0:
        raise ValueError(f"alpha must be in (0, 1), got {alpha}")


def tarone_threshold(
    hypotheses: Sequence[Hypothesis], budget: float, offset: float = 0.0
) -> float:
    """Largest threshold sigma with (sigma - offset) * |{psi <= sigma}| <= budget.

    The maximum is taken over the finite candidate set
    {budget/m + offset : m = 1..n} | {psi values}: on any interval where the
    testable count is constant the constraint is linear in sigma, so the
    optimum is always attained at one of these points.  With every psi zero
    this reduces to budget/n + offset.  An empty hypothesis list imposes no
    constraint and returns budget + offset.
    """
    if budget < 0.0:
        raise ValueError(f"budget must be non-negative, got {budget}")
    if not 0.0 <= offset < 1.0:
        raise ValueError(f"offset must be in [0, 1), got {offset}")
    n = len(hypotheses)
    if n == 0:
        return budget + offset
    psis = sorted(h.psi for h in hypotheses)
    if psis[-1] == 0.0:
        return budget / n + offset
    # Tolerance absorbs the one-ulp rounding of budget/m * m.
    limit = budget * (1.0 + 1e-9) + 1e-300
    best = offset
    for candidate in {budget / m + offset for m in range(1, n + 1)} | set(psis):
        if candidate <= best:
            continue
        count = bisect_right(psis, candidate)
        if (candidate - offset) * count <= limit:
            best = candidate
    return best


def bonferroni(hypotheses: Sequence[Hypothesis], alpha: float) -> ProcedureResult:
    """Reject everything at or below alpha / n."""
    _check_alpha(alpha)
    if not hypotheses:
        return ProcedureResult(rejected=frozenset())
    threshold = alpha / len(hypotheses)
    rejected = frozenset(h.index for h in hypotheses if h.p <= threshold)
    return ProcedureResult(rejected=rejected, threshold=threshold)


def weighted_bonferroni(
    hypotheses: Sequence[Hypothesis], weights: Sequence[float], alpha: float
) -> ProcedureResult:
    """Reject h_i at or below alpha * w_i / sum(w)."""
    _check_alpha(alpha)
    if len(weights) != len(hypotheses):
        raise ValueError(
            f"{len(weights)} weights for {len(hypotheses)} hypotheses"
        )
    if any(w <= 0 for w in weights):
        raise ValueError("weights must be positive")
    if not hypotheses:
        return ProcedureResult(rejected=frozenset())
    total = sum(weights)
    rejected = frozenset(
        h.index for h, w in zip(hypotheses, weights) if h.p <= alpha * w / total
    )
    return ProcedureResult(rejected=rejected)


def holm(hypotheses: Sequence[Hypothesis], alpha: float) -> ProcedureResult:
    """Classic step-down: sort p ascending, reject while p_(t) <= alpha/(n-t+1)."""
    _check_alpha(alpha)
    n = len(hypotheses)
    ranked = sorted(hypotheses, key=lambda h: (h.p, h.index))
    rejected: set[int] = set()
    for t, h in enumerate(ranked, start=1):
        if h.p > alpha / (n - t + 1):
            break
        rejected.add(h.index)
    return ProcedureResult(rejected=frozenset(rejected))


def t_bonferroni(hypotheses: Sequence[Hypothesis], alpha: float) -> ProcedureResult:
    """Bonferroni restricted to testable hypotheses via the maximal threshold."""
    _check_alpha(alpha)
    if not hypotheses:
        return ProcedureResult(rejected=frozenset())
    threshold = tarone_threshold(hypotheses, alpha, 0.0)
    rejected = frozenset(h.index for h in hypotheses if h.p <= threshold)
    return ProcedureResult(rejected=rejected, threshold=threshold)


def _min_p(hypotheses: Sequence[Hypothesis]) -> Hypothesis:
    # Ties on p broken by lowest index so reruns are reproducible.
    return min(hypotheses, key=lambda h: (h.p, h.index))


def _spur_impl(
    hypotheses: Sequence[Hypothesis],
    alpha: float,
    order: PreferenceOrder,
    update_budget: bool,
) -> ProcedureResult:
    _check_alpha(alpha)
    if len({h.index for h in hypotheses}) != len(hypotheses):
        raise ValueError("hypothesis indices must be unique")
    remaining = list(hypotheses)
    delta = alpha
    p_prev = 0.0
    sigma_prev = 0.0
    rejected: list[int] = []
    trace: list[IterationRecord] = []
    t = 1
    stopped_at = t
    while remaining:
        # The previous threshold stays feasible after a rejection (the
        # rejected hypothesis leaves the testable set, which more than pays
        # for the budget spent), so taking the max keeps the threshold
        # sequence non-decreasing without loosening the budget constraint.
        sigma = max(tarone_threshold(remaining, delta, p_prev), sigma_prev)
        n_testable = sum(1 for h in remaining if h.psi <= sigma)
        best = _min_p(remaining)
        if best.p > sigma:
            trace.append(
                IterationRecord(t, sigma, delta, best.p, None, None, (), n_testable)
            )
            stopped_at = t
            break
        if sigma <= p_prev:
            # No budget width left: the rejection-rate cap tau would be
            # undefined, so the procedure ends here.
            trace.append(
                IterationRecord(t, sigma, delta, best.p, None, None, (), n_testable)
            )
            stopped_at = t
            break
        tau = delta / (sigma - p_prev)
        keep: list[Hypothesis] = []
        ignored: list[int] = []
        for h in remaining:
            if h is best:
                continue
            if order.compare(h.key, best.key) in _BELOW:
                ignored.append(h.index)
            else:
                keep.append(h)
        rejected.append(best.index)
        trace.append(
            IterationRecord(
                t, sigma, delta, best.p, tau, best.index, tuple(ignored), n_testable
            )
        )
        if update_budget:
            delta = delta - tau * (best.p - p_prev) + best.p
        p_prev = best.p
        sigma_prev = sigma
        remaining = keep
        t += 1
        stopped_at = t
    return ProcedureResult(
        rejected=frozenset(rejected), trace=tuple(trace), stopped_at=stopped_at
    )


def spur(
    hypotheses: Sequence[Hypothesis], alpha: float, order: PreferenceOrder
) -> ProcedureResult:
    """Iterative utility-aware procedure.

    Each iteration solves for the largest threshold the remaining budget
    allows, rejects the most significant remaining hypothesis if it clears
    the threshold, discards every hypothesis that is equally or less
    preferred than the rejected one (more-preferred and incomparable
    hypotheses stay), and shrinks the budget to pay for the discards.
    """
    return _spur_impl(hypotheses, alpha, order, update_budget=True)


def invalid_spur(
    hypotheses: Sequence[Hypothesis], alpha: float, order: PreferenceOrder
) -> ProcedureResult:
    """Same as ``spur`` but the budget is never updated.

    Exists only to demonstrate empirically that skipping the budget update
    breaks FWER control; do not use it for real analyses.
    """
    return _spur_impl(hypotheses, alpha, order, update_budget=False)


def spur_closed_form_oracle(
    hypotheses: Sequence[Hypothesis], alpha: float, order: PreferenceOrder
) -> frozenset[int]:
    """Closed-form restatement of ``spur`` valid when every psi is zero.

    At iteration t the rejection rule collapses to
    p <= (alpha - sum_i p_i * n_ignored_i) / |H_t|, which this function
    applies directly.  Kept as an independent differential-testing oracle
    for the sequential implementation.
    """
    _check_alpha(alpha)
    if any(h.psi != 0.0 for h in hypotheses):
        raise ValueError("closed form requires every psi to be zero")
    remaining = list(hypotheses)
    rejected: set[int] = set()
    spent = 0.0
    while remaining:
        threshold = (alpha - spent) / len(remaining)
        best = _min_p(remaining)
        if best.p > threshold:
            break
        keep = [
            h
            for h in remaining
            if h is not best and order.compare(h.key, best.key) not in _BELOW
        ]
        spent += best.p * (len(remaining) - len(keep) - 1)
        rejected.add(best.index)
        remaining = keep
    return frozenset(rejected)
