import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

import oracles
from bvsquares.aperror import (
    ConvolutionSpec,
    RieszParams,
    SquareModulusWindow,
    averaged_error,
    averaged_error_terms,
    convolution_coefficients,
    error_E,
    errors_for_moduli,
    exponent_fit,
    pairwise_sum,
    psi_ap,
    riesz_error_r,
    riesz_mean_A,
    weighted_remainder_sum,
)
from bvsquares.errors import ConfigurationError, DomainError, RangeError


@pytest.fixture(scope="module")
def lam_1e4():
    return oracles.mangoldt_array_eratosthenes(10**4)


def test_window_basic():
    w = SquareModulusWindow(50)
    assert list(w) == [8, 9, 10]
    assert w.moduli == [64, 81, 100]
    assert len(SquareModulusWindow(0.5)) == 1  # 1 in (0.5, 1]
    assert len(SquareModulusWindow(1.2)) == 0


@settings(max_examples=200, deadline=None)
@given(st.floats(0.01, 1e6))
def test_window_membership(Q):
    w = SquareModulusWindow(Q)
    for q in range(max(1, w.q_min - 3), w.q_max + 4):
        assert (q in set(w)) == (Q < q * q <= 2 * Q)


def test_window_rejects_nonpositive():
    with pytest.raises(ConfigurationError):
        SquareModulusWindow(0)


def test_psi_ap_small(table_small):
    # n <= 20, n = 1 mod 4: 5, 13, 17 (and 9 = 3^2)
    assert psi_ap(20, 4, 1, table_small) == pytest.approx(math.log(5) + math.log(13) + math.log(17) + math.log(3))


def test_error_E_matches_bruteforce(table_small, lam_1e4):
    for q in (1, 2, 7, 12, 64, 99):
        assert error_E(10**4, q, table_small) == pytest.approx(
            oracles.error_E_bruteforce(lam_1e4, 10**4, q), rel=1e-12
        )


def test_errors_for_moduli_consistent(table_small):
    mods = [4, 9, 25, 49]
    assert errors_for_moduli(5e4, mods, table_small) == [error_E(5e4, m, table_small) for m in mods]
    assert errors_for_moduli(5e4, [], table_small) == []


def test_x_beyond_table(table_small):
    with pytest.raises(RangeError):
        error_E(2e5, 3, table_small)


def test_pairwise_sum_fixed_shape():
    vals = [1e16, 1.0, -1e16, 1.0]
    assert pairwise_sum(vals) == pairwise_sum(list(vals))
    assert pairwise_sum([]) == 0.0
    assert pairwise_sum([3.5]) == 3.5


def test_averaged_error_thread_independent(table_1e6):
    w = SquareModulusWindow.from_theta(1e6, 0.4)
    one = averaged_error(1e6, w, table_1e6, threads=1)
    for th in (2, 3, 8):
        assert averaged_error(1e6, w, table_1e6, threads=th) == one
    assert len(averaged_error_terms(1e6, w, table_1e6)) == len(w)


@settings(max_examples=150, deadline=None)
@given(
    st.integers(1, 2000), st.integers(1, 30), st.integers(0, 60), st.integers(1, 30), st.sampled_from([0, 1, 4])
)
def test_riesz_matches_walk(x, q, a, d, k):
    A = riesz_mean_A(RieszParams(x, q, a, d, k))
    ref = oracles.riesz_by_residue(x, q, d, k).get(a % q, 0.0)
    assert A == ref


@settings(max_examples=150, deadline=None)
@given(st.integers(1, 3000), st.integers(1, 30), st.integers(0, 30), st.integers(1, 30))
def test_riesz_zero_is_count(x, q, a, d):
    p = RieszParams(x, q, a, d, 0)
    assert riesz_mean_A(p) == oracles.riesz_double_loop_count(x, q, a, d)
    assert riesz_error_r(p) == riesz_mean_A(p) - x / (q * d)


def test_riesz_monotone_in_x():
    vals = [riesz_mean_A(RieszParams(x, 7, 3, 5, 4)) for x in range(1, 2000, 37)]
    assert all(b >= a for a, b in zip(vals, vals[1:]))


def test_riesz_param_checks():
    with pytest.raises(ConfigurationError):
        RieszParams(10, 0, 1, 1)
    with pytest.raises(ConfigurationError):
        RieszParams(10, 3, 1, 1, k=61)


@pytest.mark.parametrize("M", [(20, 30), (10, 12, 14), (64, 64), (8, 9, 10)])
def test_convolution_one_matches_exhaustive(M):
    assert convolution_coefficients(ConvolutionSpec(M)) == oracles.convolution_exhaustive(M)


def test_convolution_log_family():
    M = (12, 20)
    got = convolution_coefficients(ConvolutionSpec(M, ("log", "one")))
    ref = oracles.convolution_exhaustive(M, [math.log, lambda m: 1])
    assert set(got) == set(ref)
    for d in ref:
        assert got[d] == pytest.approx(ref[d], rel=1e-12)


def test_convolution_custom_family_bound():
    ConvolutionSpec((10, 10), (lambda m: 0.5 * math.log(m), "one"))
    with pytest.raises(ConfigurationError):
        convolution_coefficients(ConvolutionSpec((10, 10), (lambda m: 5.0, "one")))
    with pytest.raises(ConfigurationError):
        ConvolutionSpec((100, 100), (lambda m: 1.0, "one"), large_threshold=50)
    with pytest.raises(ConfigurationError):
        ConvolutionSpec((10**4, 10**4))


def test_convolution_spec_sizes():
    s = ConvolutionSpec((10, 20, 30))
    assert s.fold_count == 3 and s.D == 6000 and s.D1 == 750
    assert list(s.factor_range(0)) == [6, 7, 8, 9, 10]


def test_remainder_matches_double_loop():
    coeffs = convolution_coefficients(ConvolutionSpec((8, 9)))
    w = SquareModulusWindow(20)
    for k in (0, 1, 4):
        tot, terms = weighted_remainder_sum(coeffs, 3000, w, k, per_modulus=True)
        ref_tot, ref_terms = oracles.weighted_remainder_double_loop(coeffs, 3000, list(w), k)
        assert tot == pytest.approx(ref_tot, rel=1e-9)
        assert terms == pytest.approx(ref_terms, rel=1e-9)


def test_remainder_fixed_residue():
    coeffs = convolution_coefficients(ConvolutionSpec((6, 8)))
    w = SquareModulusWindow(8)
    got = weighted_remainder_sum(coeffs, 1500, w, 1, residue_rule=1)
    ref, _ = oracles.weighted_remainder_double_loop(coeffs, 1500, list(w), 1, rule=1)
    assert got == pytest.approx(ref, rel=1e-9)
    with pytest.raises(DomainError):
        weighted_remainder_sum(coeffs, 1500, w, 1, residue_rule=lambda q: q)


def test_exponent_fit_recovers_power():
    pts = [(x, 3.0 * x**0.75) for x in (1e3, 1e4, 1e5, 1e6)]
    slope, icpt = exponent_fit(pts)
    assert slope == pytest.approx(0.75, abs=1e-12)
    assert math.exp(icpt) == pytest.approx(3.0, rel=1e-9)
    with pytest.raises(DomainError):
        exponent_fit([(10, 1.0)])
