"""Measurement-noise statistics: R from history, ARMA impulse responses,
and the driving-noise variance implied by a stationary output variance."""

from dataclasses import dataclass

import numpy as np

from .matkernel import NotPositiveDefiniteError, solve_spd


@dataclass(frozen=True)
class ResidualReport:
    chosen_order: int
    residuals: np.ndarray
    r_estimate: float
    stationarity_passed: bool


def polyfit_residuals(block, order):
    """Residuals of a least-squares polynomial fit on normalised time [0, 1]."""
    y = np.asarray(block, dtype=np.float64)
    n = len(y)
    s = np.linspace(0.0, 1.0, n)
    V = s[:, None] ** np.arange(order + 1)[None, :]
    gram = V.T @ V
    rhs = V.T @ y[:, None]
    try:
        coef = solve_spd(gram, rhs)
    except NotPositiveDefiniteError:
        ridge = 1e-12 * np.trace(gram)
        coef = solve_spd(gram + ridge * np.eye(order + 1), rhs)
    return y - (V @ coef).ravel()


def looks_stationary(residuals):
    """Cheap wide-sense-stationarity screen for fit residuals.

    Splits the series in halves and requires (a) close means relative to the
    pooled standard deviation, (b) a variance ratio within [1/2.5, 2.5] and
    (c) lag-1 autocorrelation inside (-0.9, 0.9).
    """
    e = np.asarray(residuals, dtype=np.float64)
    half = len(e) // 2
    a, b = e[:half], e[half:]
    va, vb = np.var(a, ddof=1), np.var(b, ddof=1)
    pooled = np.sqrt(0.5 * (va + vb))
    if pooled <= 1e-12 * max(1.0, np.max(np.abs(e))):
        # numerically zero residuals are trivially stationary
        return True
    if abs(np.mean(a) - np.mean(b)) > 0.5 * pooled:
        return False
    if va == 0.0 or vb == 0.0 or not (1 / 2.5 <= va / vb <= 2.5):
        return False
    c = e - e.mean()
    rho = (c[1:] @ c[:-1]) / (c @ c)
    return -0.9 < rho < 0.9


def estimate_r(block, max_order=3):
    """Estimate the measurement variance from a historical block.

    Polynomials of increasing order are fitted until the residuals pass
    :func:`looks_stationary`; the residual sample variance (``ddof=1``) of
    the first passing order is returned.
    """
    y = np.asarray(block, dtype=np.float64)
    if y.ndim != 1:
        raise ValueError("block must be one-dimensional")
    if max_order < 0:
        raise ValueError("max_order must be non-negative")
    if len(y) < max(4, max_order + 2):
        raise ValueError(f"block of length {len(y)} too short for order {max_order}")
    if not np.all(np.isfinite(y)):
        raise ValueError("block contains non-finite values")
    for order in range(max_order + 1):
        res = polyfit_residuals(y, order)
        ok = looks_stationary(res)
        if ok or order == max_order:
            return ResidualReport(order, res, float(np.var(res, ddof=1)), bool(ok))


def arma_filter(spec, u):
    """Run the ARMA difference equation on input ``u`` from zero initial state.

    ``y(n) = sum_i theta_i u(n-i) - sum_j phi_j y(n-j)``
    """
    u = np.asarray(u, dtype=np.float64)
    y = np.zeros_like(u)
    theta, phi = spec.theta, spec.phi
    for n in range(len(u)):
        acc = 0.0
        for i, th in enumerate(theta):
            if n - i < 0:
                break
            acc += th * u[n - i]
        for j, ph in enumerate(phi, start=1):
            if n - j < 0:
                break
            acc -= ph * y[n - j]
        y[n] = acc
    return y


def impulse_response(spec, tol=1e-12, max_terms=100_000):
    """Impulse response ``h(0), h(1), ...`` of the ARMA transfer function.

    Computed by the difference-equation recursion driven by a unit impulse.
    Once past the MA part, the series is truncated when the geometric tail
    estimate ``|h(n)| / (1 - rho)`` drops below ``tol``, where ``rho`` is the
    largest ratio of consecutive magnitudes over the last 10 terms clipped to
    ``[0, 0.999]``.
    """
    if not tol > 0:
        raise ValueError("tol must be positive")
    if max_terms < 1:
        raise ValueError("max_terms must be at least 1")
    theta, phi = spec.theta, spec.phi
    if not phi:
        return np.array(theta[:max_terms], dtype=np.float64)
    h = []
    for n in range(max_terms):
        acc = theta[n] if n < len(theta) else 0.0
        for j, ph in enumerate(phi, start=1):
            if n - j < 0:
                break
            acc -= ph * h[n - j]
        h.append(acc)
        if n + 1 >= max(len(theta), len(phi)) + 10:
            last = np.abs(h[-11:])
            with np.errstate(divide="ignore", invalid="ignore"):
                ratios = np.where(last[:-1] > 0, last[1:] / last[:-1], 0.0)
            rho = min(max(float(np.max(ratios)), 0.0), 0.999)
            if last[-1] / (1.0 - rho) < tol and np.max(last) / (1.0 - rho) < tol:
                break
    return np.array(h)


def innovation_variance(r, spec, tol=1e-12, max_terms=100_000):
    """Variance of the white ARMA input giving stationary output variance ``r``."""
    if not r > 0:
        raise ValueError("r must be positive")
    h = impulse_response(spec, tol, max_terms)
    energy = float(h @ h)
    if energy == 0.0:
        raise ValueError("impulse response is identically zero")
    return r / energy
