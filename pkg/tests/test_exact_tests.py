"""Exact-test checks against a rational enumeration oracle.

The oracle works in exact integer/Fraction arithmetic: pmf weights are
binomial-coefficient products, tail sums are integer sums, and the float
conversion at the end is correctly rounded.  Everything the implementation
computes in log space is compared against it.
"""

from fractions import Fraction
from math import comb

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from spurmine.exact_tests import (
    TWO_SIDED_TIE_TOLERANCE,
    ContingencyTable,
    Sidedness,
    _log_pmf_terms,
    fisher_p_value,
    hypergeom_pmf,
    min_attainable_p,
)

ONE = Sidedness.ONE_SIDED_UPPER
TWO = Sidedness.TWO_SIDED


def support_range(n, n1, ns):
    return max(0, ns + n1 - n), min(n1, ns)


def weights(n, n1, ns):
    """Integer pmf numerators over the feasible cell range, plus denominator."""
    kmin, kmax = support_range(n, n1, ns)
    return kmin, [comb(n1, k) * comb(n - n1, ns - k) for k in range(kmin, kmax + 1)], comb(n, ns)


def oracle_pmf(n, n1, ns, k):
    kmin, w, den = weights(n, n1, ns)
    return Fraction(w[k - kmin], den)


def oracle_one_sided(n, n1, ns, a):
    kmin, w, den = weights(n, n1, ns)
    return Fraction(sum(w[a - kmin :]), den)


def oracle_two_sided(n, n1, ns, a):
    # Mirrors the implementation's tie rule exactly, in integers:
    # include k iff w_k <= w_obs * (1 + tol).
    kmin, w, den = weights(n, n1, ns)
    scale = round(1 / TWO_SIDED_TIE_TOLERANCE)
    obs = w[a - kmin]
    return Fraction(sum(wk for wk in w if wk * scale <= obs * (scale + 1)), den)


def oracle_min_attainable(n, n1, ns, side):
    kmin, kmax = support_range(n, n1, ns)
    fn = oracle_one_sided if side is ONE else oracle_two_sided
    return min(fn(n, n1, ns, a) for a in range(kmin, kmax + 1))


def margins(max_n, step=1):
    for n in range(1, max_n + 1, step):
        for n1 in range(n + 1):
            for ns in range(n + 1):
                yield n, n1, ns


# ---------------------------------------------------------------- frozen examples


def test_pmf_frozen_examples():
    assert hypergeom_pmf(10, 5, 4, 4) == pytest.approx(5 / 210, rel=1e-12)
    assert hypergeom_pmf(10, 10, 4, 4) == pytest.approx(1.0, rel=1e-12)
    # enumeration oracle gives 14400/38760 for these margins
    expected = float(oracle_pmf(20, 10, 6, 3))
    assert expected == pytest.approx(14400 / 38760, rel=1e-15)
    assert hypergeom_pmf(20, 10, 6, 3) == pytest.approx(expected, rel=1e-12)


def test_fisher_frozen_examples():
    assert fisher_p_value(ContingencyTable(10, 5, 4, 4), ONE) == pytest.approx(5 / 210, rel=1e-12)
    # at the lower feasible extreme the upper tail covers every outcome
    assert fisher_p_value(ContingencyTable(10, 5, 4, 0), ONE) == pytest.approx(1.0, rel=1e-12)
    assert fisher_p_value(ContingencyTable(30, 20, 10, 0), ONE) == pytest.approx(1.0, rel=1e-12)
    expected = float(oracle_two_sided(20, 10, 6, 6))
    assert expected == pytest.approx(420 / 38760, rel=1e-15)
    assert fisher_p_value(ContingencyTable(20, 10, 6, 6), TWO) == pytest.approx(expected, rel=1e-12)


def test_min_attainable_frozen_examples():
    assert min_attainable_p(10, 5, 4, ONE) == pytest.approx(5 / 210, rel=1e-12)
    # only one feasible table: psi is 1
    assert min_attainable_p(10, 10, 4, ONE) == pytest.approx(1.0, rel=1e-12)
    expected = float(oracle_min_attainable(30, 15, 5, TWO))
    assert min_attainable_p(30, 15, 5, TWO) == pytest.approx(expected, rel=1e-12)


# ---------------------------------------------------------------- errors


def test_infeasible_cell_rejected():
    with pytest.raises(ValueError):
        hypergeom_pmf(10, 5, 4, 5)  # k > min(n1, ns)
    with pytest.raises(ValueError):
        hypergeom_pmf(10, 8, 9, 0)  # k below the feasible minimum
    with pytest.raises(ValueError):
        hypergeom_pmf(10, 11, 4, 2)  # margin exceeds total


@pytest.mark.parametrize(
    "kwargs",
    [
        dict(n_total=10, n_positive=5, support=4, positive_support=5),
        dict(n_total=10, n_positive=8, support=9, positive_support=0),
        dict(n_total=10, n_positive=11, support=4, positive_support=2),
        dict(n_total=10, n_positive=5, support=-1, positive_support=0),
    ],
)
def test_table_invariants(kwargs):
    with pytest.raises(ValueError):
        ContingencyTable(**kwargs)


# ---------------------------------------------------------------- properties


def test_normalization_small_margins():
    for n, n1, ns in margins(30):
        _, log_terms = _log_pmf_terms(n, n1, ns)
        assert abs(np.exp(log_terms).sum() - 1.0) < 1e-12, (n, n1, ns)


def test_oracle_agreement_exhaustive_small():
    for n, n1, ns in margins(22):
        kmin, kmax = support_range(n, n1, ns)
        psi_one = min_attainable_p(n, n1, ns, ONE)
        psi_two = min_attainable_p(n, n1, ns, TWO)
        assert psi_one == pytest.approx(float(oracle_min_attainable(n, n1, ns, ONE)), rel=1e-12)
        assert psi_two == pytest.approx(float(oracle_min_attainable(n, n1, ns, TWO)), rel=1e-12)
        last_one = None
        for a in range(kmin, kmax + 1):
            table = ContingencyTable(n, n1, ns, a)
            p_one = fisher_p_value(table, ONE)
            p_two = fisher_p_value(table, TWO)
            assert p_one == pytest.approx(float(oracle_one_sided(n, n1, ns, a)), rel=1e-12)
            assert p_two == pytest.approx(float(oracle_two_sided(n, n1, ns, a)), rel=1e-12)
            assert psi_one <= p_one * (1 + 1e-12)
            assert psi_two <= p_two * (1 + 1e-12)
            if last_one is not None:  # one-sided tail shrinks as the cell grows
                assert p_one <= last_one * (1 + 1e-12)
            last_one = p_one


@settings(max_examples=300, deadline=None)
@given(st.data())
def test_oracle_agreement_random_margins(data):
    n = data.draw(st.integers(1, 120), label="n")
    n1 = data.draw(st.integers(0, n), label="n1")
    ns = data.draw(st.integers(0, n), label="ns")
    kmin, kmax = support_range(n, n1, ns)
    a = data.draw(st.integers(kmin, kmax), label="a")
    table = ContingencyTable(n, n1, ns, a)
    assert fisher_p_value(table, ONE) == pytest.approx(
        float(oracle_one_sided(n, n1, ns, a)), rel=1e-11
    )
    assert fisher_p_value(table, TWO) == pytest.approx(
        float(oracle_two_sided(n, n1, ns, a)), rel=1e-11
    )
    assert hypergeom_pmf(n, n1, ns, a) == pytest.approx(float(oracle_pmf(n, n1, ns, a)), rel=1e-11)


def test_two_sided_min_is_brute_force_min():
    # the endpoint rule must agree with brute force over every feasible cell
    rng = np.random.default_rng(5)
    for _ in range(200):
        n = int(rng.integers(1, 40))
        n1 = int(rng.integers(0, n + 1))
        ns = int(rng.integers(0, n + 1))
        assert min_attainable_p(n, n1, ns, TWO) == pytest.approx(
            float(oracle_min_attainable(n, n1, ns, TWO)), rel=1e-12
        )


def test_large_table_matches_scipy():
    from scipy import stats

    n, n1, ns = 1_000_000, 250_000, 600
    for a in (120, 150, 180, 210):
        ours = fisher_p_value(ContingencyTable(n, n1, ns, a), ONE)
        ref = float(stats.hypergeom.sf(a - 1, n, n1, ns))
        assert ours == pytest.approx(ref, rel=1e-9)
    psi = min_attainable_p(n, n1, ns, ONE)
    ref_psi = float(stats.hypergeom.pmf(ns, n, n1, ns))
    assert psi == pytest.approx(ref_psi, rel=1e-9)


def test_results_stay_in_unit_interval():
    for n, n1, ns in margins(40, step=7):
        kmin, kmax = support_range(n, n1, ns)
        for a in (kmin, (kmin + kmax) // 2, kmax):
            for side in (ONE, TWO):
                p = fisher_p_value(ContingencyTable(n, n1, ns, a), side)
                assert 0.0 < p <= 1.0
