"""Seeded synthetic scenarios.

Randomness comes from numpy's counter-based Philox4x64-10 bit generator keyed
by the seed. Uniform doubles are drawn with ``Generator.random`` (53-bit
mantissa) and turned into standard normals by the Box-Muller transform::

    u1, u2 = 1 - U, U'        (U, U' consecutive uniforms, u1 in (0, 1])
    z1 = sqrt(-2 ln u1) cos(2 pi u2)
    z2 = sqrt(-2 ln u1) sin(2 pi u2)

Normals are emitted in pairs ``z1, z2``; an odd request drops the last one.
"""

from dataclasses import dataclass

import numpy as np

from .model import ArmaSpec
from .noise import arma_filter

ARMA_WARMUP = 200


@dataclass(frozen=True, eq=False)
class Scenario:
    name: str
    t: np.ndarray
    x: np.ndarray
    truth: np.ndarray
    truth_d1: np.ndarray
    seed: int

    def __len__(self):
        return len(self.t)

    @property
    def step(self):
        return float(self.t[1] - self.t[0])


def rng(seed):
    return np.random.Generator(np.random.Philox(seed))


def gaussian(gen, n):
    """``n`` standard normals from ``gen`` via Box-Muller."""
    m = (n + 1) // 2
    u = gen.random(2 * m)
    u1 = 1.0 - u[0::2]
    u2 = u[1::2]
    radius = np.sqrt(-2.0 * np.log(u1))
    z = np.empty(2 * m)
    z[0::2] = radius * np.cos(2.0 * np.pi * u2)
    z[1::2] = radius * np.sin(2.0 * np.pi * u2)
    return z[:n]


def time_grid(stop=120.0, step=0.1):
    n = int(round(stop / step)) + 1
    return np.arange(n) * step


def gen_sine(seed, noise_std=1.0):
    """``5 sin(0.1 t)`` plus white Gaussian noise on ``t = 0:0.1:120``."""
    t = time_grid()
    truth = 5.0 * np.sin(0.1 * t)
    d1 = 0.5 * np.cos(0.1 * t)
    x = truth + noise_std * gaussian(rng(seed), len(t))
    return Scenario("sine", t, x, truth, d1, seed)


def gen_sine_exp(seed, noise_std=1.0):
    """``5 sin(0.1 t) + exp(0.03 t)`` plus white Gaussian noise."""
    t = time_grid()
    truth = 5.0 * np.sin(0.1 * t) + np.exp(0.03 * t)
    d1 = 0.5 * np.cos(0.1 * t) + 0.03 * np.exp(0.03 * t)
    x = truth + noise_std * gaussian(rng(seed), len(t))
    return Scenario("sine_exp", t, x, truth, d1, seed)


def gen_fault_channels(seed, n_jumps=5, jump_mag=5.0, n=200, step=0.1, noise_std=0.15):
    """Three range-like channels over a shared smooth trajectory.

    Channel 3 additionally carries ``n_jumps`` rectangular excursions of
    height ``jump_mag`` (random sign), each lasting 3-8 samples at random,
    non-overlapping positions in the last three quarters of the record.
    """
    gen = rng(seed)
    t = np.arange(n) * step
    truth = 8.0 + 0.3 * np.sin(0.25 * t)
    d1 = 0.075 * np.cos(0.25 * t)
    channels = [truth + noise_std * gaussian(gen, n) for _ in range(3)]
    if n_jumps:
        x = channels[2]
        taken = np.zeros(n, dtype=bool)
        placed = attempts = 0
        while placed < n_jumps:
            attempts += 1
            if attempts > 10_000:
                raise ValueError(f"cannot place {n_jumps} separated jumps in {n} samples")
            length = int(gen.integers(3, 9))
            start = int(gen.integers(n // 4, n - length))
            if taken[max(0, start - 3):start + length + 3].any():
                continue
            taken[start:start + length] = True
            sign = 1.0 if gen.random() < 0.5 else -1.0
            x[start:start + length] += sign * jump_mag
            placed += 1
    return [
        Scenario(f"channel{c + 1}", t, x, truth, d1, seed) for c, x in enumerate(channels)
    ]


def gen_arma_noise(spec, innov_var, n, seed):
    """``n`` samples of ARMA noise driven by Gaussian input of variance ``innov_var``.

    The first ``ARMA_WARMUP`` samples of the simulation are discarded so the
    output is close to stationary.
    """
    if n < 1:
        raise ValueError("n must be at least 1")
    if not isinstance(spec, ArmaSpec):
        raise TypeError("spec must be an ArmaSpec")
    e = np.sqrt(innov_var) * gaussian(rng(seed), n + ARMA_WARMUP)
    return arma_filter(spec, e)[ARMA_WARMUP:]
