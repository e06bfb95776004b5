import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from tvlap.matkernel import DimensionError, rank
from tvlap.model import GVariant, StateSpaceModel, TvlapConfig, build_noise_driver, build_transition, make_tvlap
from tvlap.verify import check_system, controllability_matrix, observability_matrix, vandermonde


def test_observability_k1():
    o = observability_matrix(build_transition(1, 0.1), [[1.0, 0.0]])
    assert np.allclose(o, [[1, 0], [1, 0.1]], rtol=0, atol=0)


def test_observability_k2_rows():
    o = observability_matrix(build_transition(2, 1.0), [[1.0, 0.0, 0.0]])
    assert np.allclose(o, [[1, 0, 0], [1, 1, 0.5], [1, 2, 2]], rtol=0, atol=1e-15)


@pytest.mark.parametrize("K", [3, 6])
def test_observability_row_is_first_row_of_scaled_transition(K):
    T = 0.3
    h = np.eye(1, K + 1)
    o = observability_matrix(build_transition(K, T), h)
    assert np.array_equal(o[0], h[0])
    for j in range(1, K + 1):
        assert np.allclose(o[j], build_transition(K, j * T)[0], rtol=1e-12, atol=1e-15)


def test_controllability_identity_driver():
    phi = build_transition(2, 0.5)
    c = controllability_matrix(phi, np.eye(3))
    assert np.allclose(c, np.hstack([np.eye(3), phi, phi @ phi]))
    assert rank(c) == 3


def test_controllability_g1_closed_form():
    K, T = 2, 1.0
    c = controllability_matrix(build_transition(K, T), build_noise_driver(K, T, GVariant.G1))
    for i in range(K + 1):
        for j in range(K + 1):
            p = K - i
            assert c[i, j] == pytest.approx(((j + 1) * T) ** p / math.factorial(p), rel=1e-14)


def test_controllability_k0():
    assert np.array_equal(controllability_matrix([[1.0]], [[0.3]]), [[0.3]])


def test_dimension_errors():
    with pytest.raises(DimensionError):
        observability_matrix(np.eye(3), np.ones((1, 2)))
    with pytest.raises(DimensionError):
        controllability_matrix(np.eye(3), np.ones((2, 1)))


def test_check_reference_model():
    rep = check_system(make_tvlap(TvlapConfig(K=4, T=0.1), check=False))
    assert rep.observable and rep.controllable
    assert rep.obs_rank == rep.ctrl_rank == rep.dim == 5
    assert rep.phi_power_max_err < 1e-15


def test_check_zero_driver():
    m = make_tvlap(TvlapConfig(K=4), check=False)
    rep = check_system(StateSpaceModel(m.phi, m.h, np.zeros_like(m.g), m.q, m.r))
    assert not rep.controllable and rep.ctrl_rank == 0
    assert rep.observable


def test_check_large_k_small_t_reports_without_raising():
    m = make_tvlap(TvlapConfig(K=10, T=0.001), check=False)
    rep = check_system(m)
    assert rep.obs_rank <= rep.dim and rep.ctrl_rank <= rep.dim
    raw = check_system(m, equilibrate=False)
    assert raw.obs_rank < raw.dim


def test_raw_rank_deficiency_already_at_moderate_k():
    raw = check_system(make_tvlap(TvlapConfig(K=5, T=0.01), check=False), equilibrate=False)
    assert not raw.observable


@pytest.mark.parametrize("K", range(9))
def test_vandermonde_distinct_and_duplicated(K):
    nodes = np.arange(K + 1.0)
    assert rank(vandermonde(nodes)) == K + 1
    if K:
        for i in range(K + 1):
            dup = nodes.copy()
            dup[i] = nodes[(i + 1) % (K + 1)]
            assert rank(vandermonde(dup)) <= K


@given(st.integers(0, 6), st.floats(0.01, 1.0), st.floats(0.1, 100.0) | st.floats(-100.0, -0.1))
def test_observability_rank_invariant_to_measurement_scaling(K, T, s):
    phi = build_transition(K, T)
    h = np.eye(1, K + 1)
    from tvlap.verify import _equilibrate_columns

    a = rank(_equilibrate_columns(observability_matrix(phi, h)))
    b = rank(_equilibrate_columns(observability_matrix(phi, h * s)))
    assert a == b == K + 1
