"""Kalman filtering for scalar-measurement state-space models.

The filter is written as pure functions on an immutable :class:`FilterState`.
A call to :func:`step` performs the time update followed by the measurement
update, so the state returned for sample ``n`` is the posterior given
``y(0..n)``. Covariances use the Joseph form, which stays symmetric positive
semidefinite even when starting from a huge prior.
"""

from dataclasses import dataclass, replace

import numpy as np

from .matkernel import as_matrix, solve_spd, symmetrize


class FilterDivergenceError(ArithmeticError):
    """Innovation variance became non-positive."""


@dataclass(frozen=True, eq=False)
class FilterState:
    """Posterior mean ``xhat`` (column) and covariance ``p`` at time ``n``.

    ``gain``, ``innovation`` and ``innov_var`` carry what the correlated-noise filter needs
    from the previous measurement update; they stay ``None`` for :func:`step`.
    """

    n: int
    xhat: np.ndarray
    p: np.ndarray
    gain: np.ndarray = None
    innovation: float = None
    innov_var: float = None

    @property
    def dim(self):
        return self.xhat.shape[0]


@dataclass(frozen=True, eq=False)
class ForecastPoint:
    k: int
    xhat: np.ndarray
    p: np.ndarray


def init_state(dim, infinity=1e5, xhat=None):
    """Diffuse start: zero mean and ``infinity * I`` covariance at ``n = -1``."""
    if dim < 1:
        raise ValueError("dim must be at least 1")
    if not infinity > 0:
        raise ValueError("infinity must be positive")
    x = np.zeros((dim, 1)) if xhat is None else as_matrix(xhat).reshape(dim, 1).copy()
    return FilterState(n=-1, xhat=x, p=infinity * np.eye(dim))


def predict(model, state):
    """Time update ``(phi x, phi P phi' + g Q g')``."""
    x = model.phi @ state.xhat
    p = model.phi @ state.p @ model.phi.T + model.g @ model.q @ model.g.T
    return x, p


def _measurement_update(model, x_prior, p_prior, y):
    h = model.h
    innovation = float(y - (h @ x_prior)[0, 0])
    s = h @ p_prior @ h.T + model.r
    if not s[0, 0] > 0.0:
        raise FilterDivergenceError(f"innovation variance {s[0, 0]!r} is not positive")
    gain = solve_spd(s, h @ p_prior.T).T
    x = x_prior + gain * innovation
    a = np.eye(p_prior.shape[0]) - gain @ h
    p = a @ p_prior @ a.T + gain * model.r @ gain.T
    return x, symmetrize(p), gain, innovation, float(s[0, 0])


def step(model, state, y):
    """One predict/update cycle.

    Returns
    -------
    state : FilterState
        Posterior at ``state.n + 1``.
    innovation : float
        ``y - h x_prior``.
    innov_var : float
        ``h P_prior h' + r``.
    """
    y = float(y)
    if not np.isfinite(y):
        raise ValueError("observation must be finite")
    x_prior, p_prior = predict(model, state)
    x, p, _, innovation, s = _measurement_update(model, x_prior, p_prior, y)
    return FilterState(n=state.n + 1, xhat=x, p=p), innovation, s


def predict_correlated(model, state):
    """Time update when the disturbance correlates with the last measurement noise.

    With ``M = E[w(n) v(n)]``, the disturbance entering ``X(n+1)`` has
    conditional mean ``M s^-1 nu(n)`` given ``y(n)``. The covariance picks up
    the matching cross terms between the posterior error and that disturbance.
    """
    x, p = predict(model, state)
    if state.gain is None or not getattr(model, "has_cross_cov", False):
        return x, p
    m = np.asarray(model.cross_cov)
    phi = model.phi
    x = x + m * (state.innovation / state.innov_var)
    cross = -(state.gain @ m.T)  # cov(posterior error, disturbance)
    p = p + phi @ cross + cross.T @ phi.T - (m @ m.T) / state.innov_var
    return x, symmetrize(p)


def step_correlated(model, state, y):
    """:func:`step` for an :class:`~tvlap.model.AugmentedModel` with cross-covariance.

    With a zero ``cross_cov`` this performs exactly the same arithmetic as
    :func:`step`.
    """
    y = float(y)
    if not np.isfinite(y):
        raise ValueError("observation must be finite")
    x_prior, p_prior = predict_correlated(model, state)
    x, p, gain, innovation, s = _measurement_update(model, x_prior, p_prior, y)
    new = FilterState(n=state.n + 1, xhat=x, p=p, gain=gain, innovation=innovation, innov_var=s)
    return new, innovation, s


def run(model, ys, state=None, infinity=1e5, correlated=False):
    """Filter a whole sequence; returns ``(xhat[n, dim], p[n, dim, dim], final state)``."""
    if state is None:
        state = init_state(model.dim, infinity)
    stepper = step_correlated if correlated else step
    ys = np.asarray(ys, dtype=np.float64)
    xs = np.empty((len(ys), model.dim))
    ps = np.empty((len(ys), model.dim, model.dim))
    for i, y in enumerate(ys):
        state, _, _ = stepper(model, state, y)
        xs[i] = state.xhat[:, 0]
        ps[i] = state.p
    return xs, ps, state


def forecast(model, state, steps):
    """Iterate the time update ``steps`` times from the current posterior."""
    if steps < 1:
        raise ValueError("steps must be at least 1")
    out = []
    x, p = state.xhat, state.p
    s = FilterState(n=state.n, xhat=x, p=p)
    for k in range(1, steps + 1):
        x, p = predict(model, s)
        s = replace(s, xhat=x, p=p)
        out.append(ForecastPoint(k=k, xhat=x, p=p))
    return out


def riccati_converged(model, max_iter=10_000, tol=1e-8, infinity=1e5, p0=None):
    """Iterate the covariance recursion until successive posteriors agree.

    Returns ``(converged, p_steady, iterations)``; convergence means
    ``||P_i - P_{i-1}||_inf < tol`` (maximum absolute row sum). The iterate
    can still sit roughly ``tol / (1 - rate)`` from the fixed point, so pass a
    tighter ``tol`` when the steady state itself is needed precisely.
    """
    if max_iter < 1:
        raise ValueError("max_iter must be at least 1")
    p = infinity * np.eye(model.dim) if p0 is None else as_matrix(p0).copy()
    state = FilterState(n=-1, xhat=np.zeros((model.dim, 1)), p=p)
    for i in range(1, max_iter + 1):
        x_prior, p_prior = predict(model, state)
        _, p_new, *_ = _measurement_update(model, x_prior, p_prior, 0.0)
        delta = np.linalg.norm(p_new - state.p, np.inf)
        state = replace(state, p=p_new)
        if delta < tol:
            return True, p_new, i
    return False, state.p, max_iter
