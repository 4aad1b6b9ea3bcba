import itertools
import math
from fractions import Fraction

import numpy as np
import pytest

from coea_lab.errors import ConfigurationError
from coea_lab.oracles import (
    EscapeEstimate,
    crossing_lower_bound,
    crossing_prob_exact,
    crossing_prob_mc,
    default_grid,
    escape_prob_mc,
    failed_rows,
    jump_pmf,
    mgf_bound_check,
    prob_even,
    run_oracle_grid,
    sample_tube_states,
    tail_bound_check,
    wilson_interval,
    write_oracle_report,
)
from coea_lab.oracles import _jump_logpmf_cached
from coea_lab.telemetry import TubeSpec


# -- prob_even -------------------------------------------------------------------


def test_prob_even_n1():
    assert prob_even(1, 0.3) == pytest.approx(0.7, abs=1e-15)


def test_prob_even_half():
    for n in (1, 5, 17):
        assert prob_even(n, 0.5) == pytest.approx(0.5, abs=1e-15)


def test_prob_even_n2_enumeration():
    # four outcomes: 0.49 + 0.09
    assert prob_even(2, 0.3) == pytest.approx(0.58, abs=1e-15)


def _prob_even_exhaustive(n, p):
    # independent oracle: walk all 2^n outcomes with exact rationals
    pf = Fraction(p).limit_denominator(10**6)
    total = Fraction(0)
    for bits in itertools.product((0, 1), repeat=n):
        k = sum(bits)
        if k % 2 == 0:
            total += pf**k * (1 - pf) ** (n - k)
    return float(total)


@pytest.mark.parametrize("n", [0, 1, 2, 3, 7, 10, 12])
@pytest.mark.parametrize("p", [0.1, 0.25, 0.5, 0.9])
def test_prob_even_matches_exhaustive_enumeration(n, p):
    assert abs(prob_even(n, p) - _prob_even_exhaustive(n, p)) <= 1e-12


# -- jump pmf ----------------------------------------------------------------------


def test_jump_pmf_s0_is_shifted_binomial():
    from scipy import stats

    pmf = jump_pmf(20, 0, 0.8)
    expect = stats.binom.pmf(np.arange(21), 20, 0.04)
    assert np.allclose(pmf.probs, expect, atol=1e-15)
    assert pmf.support[0] == 0


def test_jump_pmf_zero_point_enumeration():
    # n=2, s=1, chi=1 (p=1/2): four joint outcomes, two land on zero
    pmf = jump_pmf(2, 1, 1.0)
    assert pmf.pmf(0) == pytest.approx(0.5, abs=1e-15)


def test_jump_pmf_small_case_exact_enumeration():
    # independent oracle: enumerate (V1, V2) jointly for n=6, s=2
    n, s, chi = 6, 2, 0.9
    p = chi / n
    pmf = jump_pmf(n, s, chi)
    from math import comb

    for k in range(-s, n - s + 1):
        exact = sum(
            comb(n - s, v1) * p**v1 * (1 - p) ** (n - s - v1)
            * comb(s, v2) * p**v2 * (1 - p) ** (s - v2)
            for v1 in range(n - s + 1)
            for v2 in range(s + 1)
            if v1 - v2 == k
        )
        assert pmf.pmf(k) == pytest.approx(exact, abs=1e-14)


@pytest.mark.parametrize("n,s,chi", [
    (50, 0, 0.3), (100, 25, 0.6), (500, 250, 0.9), (500, 500, 0.3), (2000, 700, 1.5),
])
def test_jump_pmf_sums_to_one(n, s, chi):
    pmf = jump_pmf(n, s, chi)
    assert abs(math.fsum(pmf.probs) - 1.0) <= 1e-12
    assert (pmf.probs >= 0).all()


def test_jump_pmf_mean_identity():
    for n, s, chi in [(100, 50, 0.6), (100, 20, 1.3), (60, 60, 0.4)]:
        assert jump_pmf(n, s, chi).mean() == pytest.approx((n - 2 * s) * chi / n, abs=1e-10)


def test_jump_pmf_validation():
    with pytest.raises(ConfigurationError):
        jump_pmf(10, 11, 0.5)
    with pytest.raises(ConfigurationError):
        jump_pmf(10, 5, 0.0)


def test_logpmf_agrees_with_pmf():
    n, s, chi = 100, 30, 0.6
    pmf = jump_pmf(n, s, chi)
    logpmf = _jump_logpmf_cached(n, s, chi)
    mask = pmf.probs > 1e-300
    assert np.allclose(np.exp(logpmf[mask]), pmf.probs[mask], rtol=1e-10)


def test_sf_and_cdf_are_complementary():
    pmf = jump_pmf(80, 37, 0.9)
    for k in (-37, -5, 0, 3, 43):
        assert pmf.sf(k) + pmf.cdf(k - 1) == pytest.approx(1.0, abs=1e-12)


# -- MGF bound -----------------------------------------------------------------------


def test_mgf_near_zero_eta():
    chk = mgf_bound_check(50, 25, 0.6, eta=1e-9)
    assert chk.exact == pytest.approx(1.0, abs=1e-6)
    assert chk.bound == pytest.approx(1.0, abs=1e-6)
    assert chk.holds


def test_mgf_example_holds():
    chk = mgf_bound_check(100, 50, 0.6, eta=1.0)
    assert chk.holds and chk.exact <= chk.bound


def test_mgf_closed_form_cross_check():
    # independent oracle: M_U(eta) = (1-p+p e^eta)^(n-s) (1-p+p e^-eta)^s
    n, s, chi, eta = 80, 30, 0.7, 0.9
    p = chi / n
    closed = (1 - p + p * math.exp(eta)) ** (n - s) * (1 - p + p * math.exp(-eta)) ** s
    chk = mgf_bound_check(n, s, chi, eta)
    assert chk.exact == pytest.approx(closed, rel=1e-9)


def test_mgf_s_equals_n_minimal_but_holds():
    vals = [mgf_bound_check(60, s, 0.5, eta=1.0).exact for s in (0, 30, 60)]
    assert vals[2] < vals[1] < vals[0]
    assert mgf_bound_check(60, 60, 0.5, eta=1.0).holds


def test_mgf_eta_validation_and_overflow():
    with pytest.raises(ConfigurationError):
        mgf_bound_check(10, 5, 0.5, eta=0.0)
    with pytest.raises(OverflowError):
        mgf_bound_check(10, 5, 0.5, eta=20.0)  # chi*(e^20-1) >> 700


# -- tail bounds ------------------------------------------------------------------------


def test_tail_s0_vacuous_but_holds():
    chk = tail_bound_check(100, 50, 0.6, s=0, lam=100)
    assert chk.exact <= 1.0
    assert chk.bound1 == pytest.approx(math.exp(-0.6) * 100**0.6)
    assert chk.bound1 > 1.0 and chk.vacuous1 and chk.holds1


def test_tail_example_both_bounds_hold():
    chk = tail_bound_check(100, 50, 0.6, s=5, lam=100)
    assert chk.holds1 and not chk.vacuous1
    assert chk.bound2 is not None and chk.holds2


def test_tail_second_bound_applicability():
    # s >= e^2 * chi: for chi=0.6 that means s >= 4.43..., so s=5..10 qualify
    for s in range(1, 5):
        assert tail_bound_check(100, 50, 0.6, s=s, lam=100).bound2 is None
    for s in range(5, 11):
        chk = tail_bound_check(100, 50, 0.6, s=s, lam=100)
        assert chk.bound2 == pytest.approx(math.exp(-0.6 - s))
        assert chk.holds2


def test_tail_small_lambda_rejected():
    with pytest.raises(ConfigurationError):
        tail_bound_check(100, 50, 0.6, s=1, lam=2)


# -- crossing probability ------------------------------------------------------------------


def test_crossing_unreachable_is_zero():
    # D > n - X: no jump can reach the diagonal
    assert crossing_prob_exact(20, X=15, Y=2 + 20, chi=0.5, lam=50) == 0.0


def test_crossing_large_lambda_limit():
    vals = [crossing_prob_exact(100, 40, 42, 0.6, lam) for lam in (10, 10**3, 10**6)]
    assert vals[0] < vals[1] < 1.0 + 1e-12
    assert vals[2] == pytest.approx(1.0, abs=1e-9)


def test_crossing_monotone_in_lambda_and_D():
    lams = [10, 30, 100, 300, 1000]
    vals = [crossing_prob_exact(100, 40, 43, 0.6, lam) for lam in lams]
    assert all(a <= b + 1e-15 for a, b in zip(vals, vals[1:]))
    ds = range(1, 8)
    vals = [crossing_prob_exact(100, 40, 40 + d, 0.6, 100) for d in ds]
    assert all(a >= b - 1e-15 for a, b in zip(vals, vals[1:]))


def test_crossing_exact_vs_direct_mc(gen):
    # Monte-Carlo agreement through the kernel sampler
    n, X, Y, chi, lam = 100, 40, 42, 0.6, 100
    exact = crossing_prob_exact(n, X, Y, chi, lam)
    est = crossing_prob_mc(n, X, Y, chi, lam, trials=20_000, gen=gen)
    sigma = math.sqrt(exact * (1 - exact) / est.trials)
    assert abs(est.estimate - exact) <= 4 * sigma


def test_crossing_odd_side_strictness(gen):
    # X = Y state: the mutating side is y and a tie with X must not cross
    n, chi, lam = 60, 0.8, 40
    exact = crossing_prob_exact(n, 30, 30, chi, lam)
    tail = jump_pmf(n, 30, chi).sf(1)  # strictly positive jump required
    assert exact == pytest.approx(float(-np.expm1(lam * np.log1p(-tail))), rel=1e-12)


# -- escape MC ---------------------------------------------------------------------------------


def test_escape_tiny_chi_never_escapes(gen):
    spec = TubeSpec(kappa=0.7, lam=100)
    est = escape_prob_mc(100, 50, 51, chi=1e-6, lam=100, spec=spec, trials=500, gen=gen)
    assert est.estimate == 0.0 and est.escapes == 0
    assert est.ci_high < 0.02
    assert est.in_scope


def test_escape_needs_trials():
    spec = TubeSpec(kappa=0.7, lam=100)
    with pytest.raises(ConfigurationError):
        escape_prob_mc(100, 50, 51, 0.6, 100, spec, trials=99,
                       gen=np.random.default_rng(0))


def test_escape_out_of_scope_flagged(gen):
    spec = TubeSpec(kappa=0.7, lam=100)
    est = escape_prob_mc(100, 40, 60, 0.6, 100, spec, trials=200, gen=gen)
    assert est.in_scope is False


def test_wilson_interval_sanity():
    lo, hi = wilson_interval(0, 100)
    assert lo == 0.0 and 0 < hi < 0.1
    lo, hi = wilson_interval(50, 100)
    assert lo < 0.5 < hi
    lo99 = wilson_interval(10, 100)
    lo95 = wilson_interval(10, 100, z=1.959963984540054)
    assert lo99[0] < lo95[0] and lo99[1] > lo95[1]  # wider at higher confidence


# -- state sampling / grid runner ------------------------------------------------------------


def test_sample_tube_states_preconditions(gen):
    n, chi, lam, eps = 100, 0.6, 1000, 0.2
    tube = TubeSpec.for_chi(chi, lam)
    states = sample_tube_states(n, chi, lam, 20, eps, gen)
    assert len(states) == 20
    for st in states:
        assert abs(st.X - st.Y) < tube.c
        assert n - st.X >= eps * n and n - st.Y >= eps * n
        assert st.x_update == (st.X < st.Y)
    assert any(s.x_update for s in states) and any(not s.x_update for s in states)


def test_run_oracle_grid_empty():
    assert run_oracle_grid({}) == []


def test_run_oracle_grid_rejects_tiny_lambda():
    grid = {"tail_mgf": {"n": [10], "s_parent_fractions": [0.5], "chi": [0.5],
                         "thresholds": [1], "lambda": [2], "etas": []}}
    with pytest.raises(ConfigurationError):
        run_oracle_grid(grid)


def test_default_grid_all_bounds_hold(tmp_path):
    rows = run_oracle_grid(default_grid())
    assert rows
    assert failed_rows(rows) == []
    report = tmp_path / "report.csv"
    write_oracle_report(rows, report)
    header = report.read_text().splitlines()[0]
    assert header.startswith("check,n,s_parent,chi,lambda,threshold,eta,exact,bound1")


def test_crossing_bound_example():
    # the lemma's lower bound on a concrete in-tube state
    val = crossing_prob_exact(100, 40, 42, 0.6, 100)
    assert val >= crossing_lower_bound(0.6, 100)
