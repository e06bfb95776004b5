"""Observability and controllability checks for linear state-space models."""

from dataclasses import dataclass

import numpy as np

from .matkernel import DEFAULT_RANK_TOL, DimensionError, as_matrix, mat_pow, rank


@dataclass(frozen=True)
class SystemCheckReport:
    observable: bool
    controllable: bool
    obs_rank: int
    ctrl_rank: int
    phi_power_max_err: float
    dim: int


def observability_matrix(phi, h):
    """Rows ``h, h phi, ..., h phi^(n-1)`` stacked vertically."""
    phi, h = as_matrix(phi, "phi"), as_matrix(h, "h")
    n = phi.shape[0]
    if phi.shape[1] != n or h.shape[1] != n:
        raise DimensionError(f"incompatible phi {phi.shape} and h {h.shape}")
    blocks = [h]
    for _ in range(n - 1):
        blocks.append(blocks[-1] @ phi)
    return np.vstack(blocks)


def controllability_matrix(phi, g):
    """Blocks ``g, phi g, ..., phi^(n-1) g`` stacked horizontally."""
    phi, g = as_matrix(phi, "phi"), as_matrix(g, "g")
    n = phi.shape[0]
    if phi.shape[1] != n or g.shape[0] != n:
        raise DimensionError(f"incompatible phi {phi.shape} and g {g.shape}")
    blocks = [g]
    for _ in range(n - 1):
        blocks.append(phi @ blocks[-1])
    return np.hstack(blocks)


def _equilibrate_columns(m):
    s = np.max(np.abs(m), axis=0)
    s[s == 0] = 1.0
    return m / s


def vandermonde(nodes, powers=None):
    """Square (or ``powers``-column) Vandermonde matrix ``V[i, j] = nodes[i]**j``."""
    nodes = np.asarray(nodes, dtype=np.float64)
    n = len(nodes) if powers is None else powers
    return nodes[:, None] ** np.arange(n)[None, :]


def phi_power_error(phi, T, builder):
    """Largest ``|phi^k - builder(k T)|`` over ``k = 1..dim``."""
    err = 0.0
    for k in range(1, phi.shape[0] + 1):
        err = max(err, float(np.max(np.abs(mat_pow(phi, k) - builder(k * T)))))
    return err


def check_system(model, tol=DEFAULT_RANK_TOL, equilibrate=True):
    """Rank tests for ``[phi, h]`` and ``[phi, g]``.

    With ``equilibrate`` the observability matrix is column-scaled and the
    controllability matrix row-scaled before the rank test. This is a
    diagonal change of state coordinates, so the ranks are unchanged in exact
    arithmetic, but the tiny ``T^k/k!`` entries no longer fall below the
    relative pivot tolerance.
    """
    obs = observability_matrix(model.phi, model.h)
    ctrl = controllability_matrix(model.phi, model.g)
    if equilibrate:
        obs = _equilibrate_columns(obs)
        ctrl = _equilibrate_columns(ctrl.T).T
    n = model.dim
    obs_rank = rank(obs, tol)
    ctrl_rank = rank(ctrl, tol)
    return SystemCheckReport(
        observable=obs_rank == n,
        controllable=ctrl_rank == n,
        obs_rank=obs_rank,
        ctrl_rank=ctrl_rank,
        phi_power_max_err=_trend_power_error(model),
        dim=n,
    )


def _trend_power_error(model):
    # phi(T)^k == phi(kT) self test on the leading Taylor block; T is read off phi[0, 1]
    from .model import build_transition

    K = getattr(model, "base_dim", 0) or model.dim
    K -= 1
    if K == 0:
        return 0.0
    block = np.asarray(model.phi[:K + 1, :K + 1])
    T = float(block[0, 1])
    if not T > 0:
        return float("nan")
    return phi_power_error(block, T, lambda t: build_transition(K, t))
