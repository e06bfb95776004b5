import numpy as np
import pytest

from tvlap.model import ArmaSpec
from tvlap.simgen import gaussian, gen_arma_noise, gen_fault_channels, gen_sine, gen_sine_exp, rng

# first draws of the documented generator; any change here breaks reproducibility
FROZEN = [-0.008211587544399778, 0.16812613774348753, 0.9481955881183344, 0.6136754112581602]


def test_gaussian_box_muller_by_hand():
    u = rng(7).random(4)
    z = gaussian(rng(7), 3)
    r1 = np.sqrt(-2 * np.log(1 - u[0]))
    r2 = np.sqrt(-2 * np.log(1 - u[2]))
    assert z[0] == r1 * np.cos(2 * np.pi * u[1])
    assert z[1] == r1 * np.sin(2 * np.pi * u[1])
    assert z[2] == r2 * np.cos(2 * np.pi * u[3])


def test_gaussian_frozen_values():
    z = gaussian(rng(0), 4)
    assert np.allclose(z, FROZEN, rtol=0, atol=1e-15)


def test_gaussian_moments():
    z = gaussian(rng(1), 100_000)
    assert abs(z.mean()) < 0.02
    assert abs(z.var() - 1) < 0.02


def test_sine_scenario():
    sc = gen_sine(1)
    assert len(sc) == 1201 and sc.t[-1] == pytest.approx(120.0)
    assert sc.truth[0] == 0.0 and sc.truth_d1[0] == 0.5
    i = int(np.argmax(sc.truth[:400]))
    assert sc.t[i] == pytest.approx(5 * np.pi, abs=0.05)
    assert sc.step == pytest.approx(0.1)


def test_sine_exp_scenario():
    sc = gen_sine_exp(1)
    assert sc.truth[0] == 1.0
    assert sc.truth[-1] == pytest.approx(5 * np.sin(12) + np.exp(3.6), abs=1e-9)
    assert sc.truth[-1] == pytest.approx(33.92, abs=0.01)
    assert np.allclose(sc.truth_d1, 0.5 * np.cos(0.1 * sc.t) + 0.03 * np.exp(0.03 * sc.t))


@pytest.mark.parametrize("gen", [gen_sine, gen_sine_exp])
def test_truth_derivative_consistent(gen):
    sc = gen(0)
    central = (sc.truth[2:] - sc.truth[:-2]) / (2 * sc.step)
    assert np.max(np.abs(central - sc.truth_d1[1:-1])) < 0.01 * sc.step


def test_reproducible():
    assert np.array_equal(gen_sine(5).x, gen_sine(5).x)
    assert not np.array_equal(gen_sine(5).x, gen_sine(6).x)


def test_fault_channels_shape():
    chans = gen_fault_channels(3, 5, 5.0)
    assert [c.name for c in chans] == ["channel1", "channel2", "channel3"]
    jump = chans[2].x - chans[2].truth
    big = np.abs(jump) > 2.5
    # count runs of jump samples and their lengths
    edges = np.flatnonzero(np.diff(np.r_[0, big.astype(int), 0]))
    runs = edges[1::2] - edges[::2]
    assert len(runs) == 5
    assert np.all((runs >= 3) & (runs <= 8))
    assert not np.any(np.abs(chans[0].x - chans[0].truth) > 2.5)


def test_fault_channels_without_jumps_are_alike():
    chans = gen_fault_channels(3, 0, 5.0)
    stds = [np.std(c.x - c.truth) for c in chans]
    assert max(stds) / min(stds) < 1.5


def test_arma_noise_white_variance():
    e = gen_arma_noise(ArmaSpec(theta=(2.0,)), 0.5, 10_000, 4)
    assert abs(e.var() / 2.0 - 1) < 0.1


def test_arma_noise_ar1_variance():
    e = gen_arma_noise(ArmaSpec(phi=(-0.5,)), 1.0, 10_000, 4)
    assert abs(e.var() / (4 / 3) - 1) < 0.1


def test_arma_noise_repeatable():
    spec = ArmaSpec(phi=(-0.3,), theta=(1.0, 0.5))
    assert np.array_equal(gen_arma_noise(spec, 1.0, 50, 9), gen_arma_noise(spec, 1.0, 50, 9))
