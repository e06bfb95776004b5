import math
import warnings

import numpy as np
import pytest
from hypothesis import given, strategies as st

from tvlap.model import (
    ArmaSpec,
    GVariant,
    ModelWarning,
    SpecialModel,
    StateSpaceModel,
    TvlapConfig,
    arma_to_state_space,
    augment,
    build_measurement,
    build_noise_driver,
    build_transition,
    make_special,
    make_tvlap,
)


def test_transition_examples():
    assert np.array_equal(build_transition(0, 3.7), [[1.0]])
    assert np.array_equal(build_transition(1, 0.1), [[1, 0.1], [0, 1]])
    assert np.array_equal(build_transition(2, 1.0), [[1, 1, 0.5], [0, 1, 1], [0, 0, 1]])


@given(st.integers(0, 8), st.floats(1e-3, 2.0))
def test_transition_entries_are_taylor_coefficients(K, T):
    phi = build_transition(K, T)
    for i in range(K + 1):
        for j in range(K + 1):
            want = T ** (j - i) / math.factorial(j - i) if j >= i else 0.0
            assert phi[i, j] == pytest.approx(want, rel=1e-14, abs=0)


def test_measurement_examples():
    assert np.array_equal(build_measurement(0), [[1.0]])
    assert np.array_equal(build_measurement(2), [[1.0, 0.0, 0.0]])
    assert np.array_equal(build_measurement(4), [[1.0, 0, 0, 0, 0]])


def test_noise_driver_examples():
    assert np.allclose(build_noise_driver(1, 0.1, GVariant.G1), [[0.1], [1.0]], rtol=0, atol=0)
    assert np.array_equal(build_noise_driver(2, 0.3, GVariant.G3), np.eye(3))
    assert np.array_equal(build_noise_driver(2, 1.0, GVariant.G2), np.diag([0.5, 1.0, 1.0]))


def test_make_tvlap_reference_model():
    m = make_tvlap(TvlapConfig(K=4, T=0.1, g_variant="g1", q=0.01 ** 2, r=1.0))
    assert m.dim == 5 and m.order == 4
    assert m.q.shape == (1, 1) and m.q[0, 0] == pytest.approx(1e-4)
    assert np.allclose(m.process_cov, m.g @ m.q @ m.g.T)


def test_make_tvlap_k0_is_level():
    a = make_tvlap(TvlapConfig(K=0, T=0.5, q=0.2, r=1.5))
    b = make_special(SpecialModel.LEVEL, 0.5, 0.2, 1.5)
    for name in ("phi", "h", "g", "q"):
        assert np.array_equal(getattr(a, name), getattr(b, name))
    assert a.r == b.r


def test_make_tvlap_composition_g3():
    m = make_tvlap(TvlapConfig(K=2, T=0.2, g_variant="g3", q=[1.0, 2.0, 3.0]))
    assert np.array_equal(m.phi, build_transition(2, 0.2))
    assert np.array_equal(m.g, np.eye(3))


def test_scalar_q_under_g3_goes_on_top_derivative():
    cfg = TvlapConfig(K=2, g_variant="g3", q=9.0)
    assert np.array_equal(cfg.q_matrix, np.diag([0.0, 0.0, 9.0]))


def test_q_dimension_mismatch_names_expected():
    with pytest.raises(ValueError, match="3x3"):
        TvlapConfig(K=2, g_variant="g2", q=np.eye(2))


@pytest.mark.parametrize("kwargs", [dict(K=-1), dict(K=13), dict(T=0.0), dict(r=0.0),
                                    dict(q=-1.0), dict(q=[[1.0, 2.0], [0.0, 1.0]], K=1, g_variant="g3")])
def test_config_rejects(kwargs):
    with pytest.raises(ValueError):
        TvlapConfig(**kwargs)


def test_model_arrays_are_read_only():
    m = make_tvlap(TvlapConfig())
    with pytest.raises(ValueError):
        m.phi[0, 0] = 2.0


def test_special_models():
    assert np.array_equal(make_special("level", 1.0, 1.0, 1.0).phi, [[1.0]])
    assert np.array_equal(make_special("static", 1.0, 1.0, 1.0).phi, [[1.0]])
    assert np.array_equal(make_special("cv", 0.5, 1.0, 1.0).phi, [[1, 0.5], [0, 1]])
    assert np.array_equal(make_special("holt", 0.5, 1.0, 1.0).phi, [[1, 0.5], [0, 1]])
    assert np.array_equal(make_special("ca", 1.0, 1.0, 1.0).phi, build_transition(2, 1.0))


def test_zero_driver_warns():
    m = make_tvlap(TvlapConfig(K=4), check=False)
    zero_g = StateSpaceModel(m.phi, m.h, np.zeros_like(m.g), m.q, m.r)
    from tvlap.model import _check

    with pytest.warns(ModelWarning):
        _check(zero_g, "zero driver")


def test_reference_model_builds_without_warning():
    with warnings.catch_warnings():
        warnings.simplefilter("error", ModelWarning)
        make_tvlap(TvlapConfig(K=4, T=0.1))


def test_arma_white():
    xi, up, pi, lam = arma_to_state_space(ArmaSpec(theta=(2.5,)))
    assert xi.shape == (0, 0) and up.shape == (0, 1) and pi.shape == (1, 0)
    assert lam == 2.5


def test_arma_ar1_by_hand():
    xi, up, pi, lam = arma_to_state_space(ArmaSpec(phi=(-0.5,), theta=(1.0,)))
    assert np.array_equal(xi, [[0.5]])
    assert np.array_equal(up, [[1.0]])
    assert np.array_equal(pi, [[0.5]])
    assert lam == 1.0


def test_arma11_beta():
    xi, up, pi, lam = arma_to_state_space(ArmaSpec(phi=(-0.5,), theta=(1.0, 0.3)))
    assert xi.shape == (1, 1)
    assert pi[0, 0] == pytest.approx(0.8, abs=1e-15)


def test_arma_companion_layout():
    xi, up, pi, _ = arma_to_state_space(ArmaSpec(phi=(-0.2, 0.1, -0.05), theta=(1.0, 0.4)))
    assert np.array_equal(xi[:-1, 1:], np.eye(2))
    assert np.allclose(xi[-1], [0.05, -0.1, 0.2])
    assert np.array_equal(up[:, 0], [0, 0, 1])
    # beta = [0.4 + 0.2, -0.1, 0.05] reversed
    assert np.allclose(pi[0], [0.05, -0.1, 0.6])


@pytest.mark.parametrize("phi", [(-1.0,), (-2.5,), (0.0, -1.0)])
def test_arma_rejects_unstable(phi):
    with pytest.raises(ValueError):
        ArmaSpec(phi=phi)


def test_augment_white_is_base():
    base = make_tvlap(TvlapConfig(K=2, r=1.0))
    aug = augment(base, ArmaSpec(theta=(2.0,)), 0.5)
    assert np.array_equal(aug.phi, base.phi) and np.array_equal(aug.h, base.h)
    assert aug.r == pytest.approx(4.0 * 0.5)
    assert not aug.has_cross_cov
    assert np.array_equal(aug.cross_cov, np.zeros((3, 1)))


def test_augment_ar1_on_k1():
    base = make_special("holt", 0.1, 1e-3, 1.0)
    aug = augment(base, ArmaSpec(phi=(-0.5,)), 2.0)
    assert aug.dim == 3 and aug.base_dim == 2
    assert np.array_equal(aug.h, [[1.0, 0.0, 0.5]])
    assert aug.cross_cov[-1, 0] == 2.0
    assert aug.r == 2.0
    assert aug.noise_dim == 1
