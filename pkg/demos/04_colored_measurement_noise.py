"""Filter a trend observed through AR(1) noise, with and without a model of the noise colour."""

import numpy as np

from tvlap import ArmaSpec, TvlapConfig, augment, impulse_response, innovation_variance, make_tvlap, run
from tvlap.analysis import burn_in_length
from tvlap.simgen import gen_arma_noise

spec = ArmaSpec(phi=(-0.8,))  # v(n) = 0.8 v(n-1) + e(n)
h = impulse_response(spec)
print("impulse response:", np.round(h[:6], 4), "... (%d terms)" % len(h))

# the output variance R = 1 fixes the driver variance through sum h^2
rbar = innovation_variance(1.0, spec)
print("driver variance Rbar = %.4f (closed form %.4f)" % (rbar, 1 - 0.8 ** 2))

t = np.arange(2000) * 0.1
truth = 5 * np.sin(0.1 * t)
ys = truth + gen_arma_noise(spec, rbar, len(t), seed=3)


base = make_tvlap(TvlapConfig(K=2, T=0.1, q=1e-3, r=1.0))
aug = augment(base, spec, rbar)
burn = burn_in_length(2)
white, _, _ = run(base, ys)
colored, _, _ = run(aug, ys, correlated=True)
print("trend MSE, white-noise filter:    %.4f" % np.mean((white[burn:, 0] - truth[burn:]) ** 2))
print("trend MSE, colored-noise filter:  %.4f" % np.mean((colored[burn:, 0] - truth[burn:]) ** 2))
