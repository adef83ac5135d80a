import math

import pytest
from hypothesis import given, settings, strategies as st

from mimo_gdof.exceptions import DomainError
from mimo_gdof.gdof import (Branch, GdofParams, bound_b1, bound_b1_plus, bound_b2,
                            bound_b2_plus, bound_b3, min_of_bounds, siso_per_user_gdof,
                            sum_gdof)


def S(K, M, N, a):
    return sum_gdof(GdofParams(K, M, N, a)).sum_gdof


def test_zero_forcing_regime_gives_KM():
    r = sum_gdof(GdofParams(3, 1, 5, 0.7))
    assert r.sum_gdof == 3
    assert r.active_branch is Branch.ZERO_FORCING


def test_no_interference():
    assert S(3, 1, 1, 0) == 3


def test_fewer_receive_than_transmit_antennas():
    assert S(3, 3, 2, 2) == pytest.approx(4, abs=1e-12)


def test_moderate_branch_takes_second_argument():
    # K=3, M=2, N=3, a=0.7: first argument 3/2 ((K-2)*2*0.3 + min(4,3)*0.7)
    first = 3 / 2 * (1 * 2 * 0.3 + 3 * 0.7)
    second = 3 * 0.7 + 3 * 2 * 0.3
    assert first == pytest.approx(4.05)
    assert second == pytest.approx(3.9)
    p = GdofParams(3, 2, 3, 0.7)
    assert sum_gdof(p).sum_gdof == pytest.approx(3.9, abs=1e-12)
    assert min_of_bounds(p) == pytest.approx(3.9, abs=1e-12)


@pytest.mark.parametrize("K,a,expected", [(3, 0.5, 0.5), (3, 3, 1), (4, 0, 1)])
def test_siso_examples(K, a, expected):
    assert siso_per_user_gdof(K, a) == pytest.approx(expected, abs=1e-12)


def test_bounds_examples():
    for a in (0, 0.3, 0.7, 1, 2.5):
        assert bound_b3(GdofParams(3, 2, 3, a)) == 6
    assert bound_b2(GdofParams(3, 2, 3, 0.7)) == pytest.approx(3 * 0.7 + 3 * 2 * 0.3)
    for K in range(2, 6):
        for M in range(1, 4):
            for N in range(1, 4):
                p = GdofParams(K, M, N, 0)
                assert bound_b1(p) == pytest.approx(K * min(M, N))
                assert min_of_bounds(p) == pytest.approx(K * min(M, N))


def test_bound_applicability():
    assert bound_b1(GdofParams(3, 2, 3, 0.51)) is None
    assert bound_b1_plus(GdofParams(3, 2, 3, 0.49)) is None
    assert bound_b1_plus(GdofParams(3, 2, 3, 1.01)) is None
    assert bound_b2(GdofParams(3, 2, 3, 1.01)) is None
    assert bound_b2_plus(GdofParams(3, 2, 3, 0.99)) is None
    p = GdofParams(3, 2, 3, 0.7)
    assert set(sum_gdof(p).applicable_bounds()) == {"b1+", "b2", "b3"}


def test_min_of_bounds_zero_forcing_attained_by_b3():
    p = GdofParams(3, 1, 5, 0.7)
    r = sum_gdof(p)
    assert min_of_bounds(p) == 3
    assert all(v >= 3 for v in r.applicable_bounds().values())


@pytest.mark.parametrize("bad", [
    dict(K=1, M=1, N=1, alpha=0.5),
    dict(K=3, M=0, N=1, alpha=0.5),
    dict(K=3, M=1, N=0, alpha=0.5),
    dict(K=3, M=1, N=1, alpha=-0.1),
    dict(K=3, M=1, N=1, alpha=float("nan")),
    dict(K=2.0, M=1, N=1, alpha=0.5),
])
def test_domain_errors(bad):
    with pytest.raises(DomainError):
        GdofParams(**bad)


def test_siso_domain_errors():
    with pytest.raises(DomainError):
        siso_per_user_gdof(1, 0.5)
    with pytest.raises(DomainError):
        siso_per_user_gdof(3, -1)


params = st.builds(GdofParams, st.integers(2, 6), st.integers(1, 6), st.integers(1, 6),
                   st.floats(0, 5, allow_nan=False))


@given(params)
@settings(max_examples=500)
def test_formula_equals_min_of_bounds(p):
    assert sum_gdof(p).sum_gdof == pytest.approx(min_of_bounds(p), abs=1e-9)


@given(params)
@settings(max_examples=300)
def test_result_invariants(p):
    r = sum_gdof(p)
    assert 0 <= r.sum_gdof <= p.K * min(p.M, p.N) + 1e-12
    for v in r.applicable_bounds().values():
        assert r.sum_gdof <= v + 1e-9


@given(st.integers(2, 6), st.floats(0, 8, allow_nan=False))
def test_siso_reduction(K, a):
    assert S(K, 1, 1, a) == pytest.approx(K * siso_per_user_gdof(K, a), abs=1e-12)


@given(st.integers(2, 6), st.integers(1, 5), st.integers(1, 5), st.floats(0, 8, allow_nan=False))
def test_fewer_receive_antennas_reduction(K, N, extra, a):
    M = N + extra
    assert S(K, M, N, a) == pytest.approx(K * N * siso_per_user_gdof(K, a), abs=1e-9)


@pytest.mark.parametrize("K", range(2, 7))
@pytest.mark.parametrize("M", range(1, 7))
@pytest.mark.parametrize("N", range(1, 7))
def test_w_curve_shape(K, M, N):
    low = [S(K, M, N, i / 200) for i in range(101)]
    assert all(b <= a + 1e-12 for a, b in zip(low, low[1:]))
    high = [S(K, M, N, 1 + i / 20) for i in range(200)]
    assert all(b >= a - 1e-12 for a, b in zip(high, high[1:]))
    assert S(K, M, N, 0) == K * min(M, N)
    assert S(K, M, N, 1e6) == K * min(M, N)


def test_boundary_branches_agree():
    eps = 1e-12
    for K in range(2, 7):
        for M in range(1, 7):
            for N in range(1, 7):
                for b in (0.5, 1.0):
                    p = GdofParams(K, M, N, b)
                    if p.zero_forcing:
                        continue
                    from mimo_gdof.gdof import _branch_value
                    left = _branch_value(p, Branch.WEAK if b == 0.5 else Branch.MODERATE)
                    right = _branch_value(p, Branch.MODERATE if b == 0.5 else Branch.STRONG)
                    assert math.isclose(left, right, abs_tol=eps)
