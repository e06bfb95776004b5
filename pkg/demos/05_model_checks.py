"""Observability, controllability and steady-state covariance of the trend models."""

from tvlap import TvlapConfig, check_system, make_tvlap, riccati_converged
from tvlap.model import GVariant

for K in (1, 4, 8, 12):
    for T in (0.001, 0.1):
        m = make_tvlap(TvlapConfig(K=K, T=T), check=False)
        eq, raw = check_system(m), check_system(m, equilibrate=False)
        print("K=%2d T=%-6g  obs rank %2d/%2d  ctrl rank %2d  (unscaled obs rank %2d)"
              % (K, T, eq.obs_rank, m.dim, eq.ctrl_rank, raw.obs_rank))

# the unscaled matrices lose rank quickly because T^k/k! spans many decades;
# a diagonal rescaling of the state restores the exact-arithmetic answer

for g in GVariant:
    m = make_tvlap(TvlapConfig(K=4, T=0.1, g_variant=g))
    ok, p, iters = riccati_converged(m)
    print("%s: Riccati converged=%s after %d iterations, steady var(trend) = %.4f" % (g.value, ok, iters, p[0, 0]))

# a scalar q lands on the top derivative for g2/g3; g1 also leaks it into the
# lower states through weights T^k/k!, which at T=0.1 barely moves P
