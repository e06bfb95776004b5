"""State-space construction for the local Taylor-polynomial trend model.

The state at time ``n`` is ``[f(n), f'(n), ..., f^(K)(n)]`` and one step of
length ``T`` advances it with the truncated Taylor series::

    X(n+1) = Phi X(n) + G W(n)
    y(n)   = H X(n) + V(n)

with ``Phi[i, j] = T**(j-i) / (j-i)!`` for ``j >= i`` and ``H = [1, 0, ..., 0]``.

Colored measurement noise is described by an ARMA transfer function

    H(z) = (theta_0 + theta_1 z^-1 + ... + theta_q z^-q)
           / (1 + phi_1 z^-1 + ... + phi_p z^-p)

Note the sign convention: ``phi`` coefficients are stored exactly as they
appear in the denominator, so an AR(1) process ``v(n) = 0.5 v(n-1) + e(n)``
has ``phi = [-0.5]``.
"""

import math
import warnings
from dataclasses import dataclass
from enum import Enum

import numpy as np

from .matkernel import as_matrix, block_diag, frozen

MAX_ORDER = 12


class GVariant(str, Enum):
    """Shape of the process-noise driver matrix."""

    G1 = "g1"  # column of Taylor weights, noise enters through X_K
    G2 = "g2"  # diagonal of Taylor weights
    G3 = "g3"  # identity


class SpecialModel(str, Enum):
    LEVEL = "level"
    HOLT = "holt"
    STATIC = "static"
    CV = "cv"
    CA = "ca"


_SPECIAL_ORDER = {
    SpecialModel.LEVEL: 0,
    SpecialModel.STATIC: 0,
    SpecialModel.HOLT: 1,
    SpecialModel.CV: 1,
    SpecialModel.CA: 2,
}


class ModelWarning(UserWarning):
    """Emitted when a model fails its observability/controllability check."""


def _q_matrix(q, K, variant):
    """Normalise a Q specification to a matrix of the driver's width.

    A scalar is accepted for every variant; for G2/G3 it is taken as a
    variance on the highest derivative only (zero-padded diagonal).
    A 1-D sequence is read as a diagonal.
    """
    variant = GVariant(variant)
    width = 1 if variant is GVariant.G1 else K + 1
    q = np.asarray(q, dtype=np.float64)
    if q.ndim == 0 or q.size == 1 and width > 1:
        if width == 1:
            return q.reshape(1, 1)
        m = np.zeros((width, width))
        m[-1, -1] = float(q.reshape(-1)[0])
        return m
    if q.ndim == 1:
        q = np.diag(q)
    if q.shape != (width, width):
        raise ValueError(
            f"Q for variant {variant.name} with K={K} must be {width}x{width}, got {q.shape}"
        )
    return q


@dataclass(frozen=True)
class TvlapConfig:
    """Parameters of a local polynomial trend model.

    ``q`` may be a scalar, a diagonal (1-D), or a full matrix; see
    :func:`make_tvlap` for how scalars are placed.
    """

    K: int = 4
    T: float = 0.1
    g_variant: GVariant = GVariant.G1
    q: object = 1e-4
    r: float = 1.0
    epsilon: float = 1e-6
    infinity: float = 1e5

    def __post_init__(self):
        object.__setattr__(self, "g_variant", GVariant(self.g_variant))
        if not (isinstance(self.K, (int, np.integer)) and 0 <= self.K <= MAX_ORDER):
            raise ValueError(f"K must be an integer in [0, {MAX_ORDER}], got {self.K!r}")
        if not self.T > 0:
            raise ValueError("T must be positive")
        if not self.r > 0:
            raise ValueError("R must be positive")
        if not self.epsilon > 0:
            raise ValueError("epsilon must be positive")
        if not self.infinity > 0:
            raise ValueError("infinity must be positive")
        q = _q_matrix(self.q, self.K, self.g_variant)
        if not np.all(np.isfinite(q)) or np.max(np.abs(q - q.T), initial=0.0) > 1e-12 * max(1.0, np.max(np.abs(q))):
            raise ValueError("Q must be finite and symmetric")
        if np.linalg.eigvalsh(q).min() < -1e-12 * max(1.0, np.max(np.abs(q))):
            raise ValueError("Q must be positive semidefinite")

    @property
    def q_matrix(self):
        return _q_matrix(self.q, self.K, self.g_variant)


@dataclass(frozen=True, eq=False)
class StateSpaceModel:
    """Linear Gaussian system ``X' = phi X + g W``, ``y = h X + V``."""

    phi: np.ndarray
    h: np.ndarray
    g: np.ndarray
    q: np.ndarray
    r: float

    def __post_init__(self):
        for name in ("phi", "h", "g", "q"):
            object.__setattr__(self, name, frozen(as_matrix(getattr(self, name), name)))
        object.__setattr__(self, "r", float(self.r))
        n = self.phi.shape[0]
        if self.phi.shape != (n, n):
            raise ValueError(f"phi must be square, got {self.phi.shape}")
        if self.h.shape != (1, n):
            raise ValueError(f"h must be 1x{n}, got {self.h.shape}")
        if self.g.shape[0] != n:
            raise ValueError(f"g must have {n} rows, got {self.g.shape}")
        if self.q.shape != (self.g.shape[1], self.g.shape[1]):
            raise ValueError(f"q must be {self.g.shape[1]}x{self.g.shape[1]}, got {self.q.shape}")
        if self.r < 0 or (self.r == 0 and not isinstance(self, AugmentedModel)):
            raise ValueError("r must be positive")

    @property
    def dim(self):
        return self.phi.shape[0]

    @property
    def order(self):
        """Polynomial order K of the trend block."""
        return self.dim - 1

    @property
    def process_cov(self):
        """``g q g'``, the covariance of the state disturbance."""
        return self.g @ self.q @ self.g.T


@dataclass(frozen=True, eq=False)
class ArmaSpec:
    """ARMA noise shaping filter, denominator ``1 + phi_1 z^-1 + ...``."""

    phi: tuple = ()
    theta: tuple = (1.0,)

    def __post_init__(self):
        phi = tuple(float(c) for c in self.phi)
        theta = tuple(float(c) for c in self.theta)
        if not theta:
            raise ValueError("theta needs at least theta_0")
        if not all(math.isfinite(c) for c in phi + theta):
            raise ValueError("ARMA coefficients must be finite")
        object.__setattr__(self, "phi", phi)
        object.__setattr__(self, "theta", theta)
        if phi and not _ar_stable(phi):
            raise ValueError(f"AR polynomial with coefficients {phi} is not stable")

    @property
    def p(self):
        return len(self.phi)

    @property
    def q(self):
        return len(self.theta) - 1

    @property
    def order(self):
        return max(self.p, self.q)

    @property
    def is_white(self):
        return self.order == 0


def _companion(phi_padded):
    r = len(phi_padded)
    xi = np.zeros((r, r))
    if r:
        xi[:-1, 1:] = np.eye(r - 1)
        xi[-1, :] = -np.asarray(phi_padded[::-1])
    return xi


def _ar_stable(phi):
    # roots of z^p + phi_1 z^(p-1) + ... + phi_p strictly inside the unit circle
    roots = np.roots(np.r_[1.0, phi])
    return roots.size == 0 or float(np.max(np.abs(roots))) < 1.0


@dataclass(frozen=True, eq=False)
class AugmentedModel(StateSpaceModel):
    """Trend model stacked with an ARMA noise state.

    ``cross_cov`` is ``E[w(n) v(n)]`` for the stacked disturbance ``w = G W``
    and the measurement noise ``v = theta_0 * eps``; ``innov_var`` is the
    variance of the white sequence ``eps`` driving the ARMA filter.
    """

    cross_cov: np.ndarray = None
    innov_var: float = 1.0
    base_dim: int = 0

    def __post_init__(self):
        super().__post_init__()
        cc = np.zeros((self.dim, 1)) if self.cross_cov is None else as_matrix(self.cross_cov)
        if cc.shape != (self.dim, 1):
            raise ValueError(f"cross_cov must be {self.dim}x1, got {cc.shape}")
        object.__setattr__(self, "cross_cov", frozen(cc))

    @property
    def noise_dim(self):
        return self.dim - self.base_dim

    @property
    def has_cross_cov(self):
        return bool(np.any(self.cross_cov != 0.0))


def build_transition(K, T):
    """Taylor transition matrix of order ``K`` for time step ``T``."""
    if K < 0:
        raise ValueError("K must be non-negative")
    if not T > 0:
        raise ValueError("T must be positive")
    phi = np.zeros((K + 1, K + 1))
    for i in range(K + 1):
        for j in range(i, K + 1):
            phi[i, j] = T ** (j - i) / math.factorial(j - i)
    return phi


def build_measurement(K):
    if K < 0:
        raise ValueError("K must be non-negative")
    h = np.zeros((1, K + 1))
    h[0, 0] = 1.0
    return h


def taylor_weights(K, T):
    """``[T^K/K!, ..., T, 1]``"""
    return np.array([T ** (K - i) / math.factorial(K - i) for i in range(K + 1)])


def build_noise_driver(K, T, variant=GVariant.G1):
    if K < 0:
        raise ValueError("K must be non-negative")
    if not T > 0:
        raise ValueError("T must be positive")
    variant = GVariant(variant)
    w = taylor_weights(K, T)
    if variant is GVariant.G1:
        return w.reshape(-1, 1)
    if variant is GVariant.G2:
        return np.diag(w)
    return np.eye(K + 1)


def _check(model, what):
    from .verify import check_system

    report = check_system(model)
    if not (report.observable and report.controllable):
        warnings.warn(
            f"{what} is not observable and controllable at the default tolerance "
            f"(obs rank {report.obs_rank}, ctrl rank {report.ctrl_rank}, dim {model.dim}); "
            "filter convergence is not guaranteed",
            ModelWarning,
            stacklevel=3,
        )
    return report


def make_tvlap(config, check=True):
    """Assemble the state-space model described by ``config``.

    A scalar Q under G1 is the variance of the single disturbance entering
    through the Taylor-weight column. Under G2/G3 a scalar is placed on the
    highest derivative with zeros elsewhere.
    """
    K, T = config.K, config.T
    model = StateSpaceModel(
        phi=build_transition(K, T),
        h=build_measurement(K),
        g=build_noise_driver(K, T, config.g_variant),
        q=config.q_matrix,
        r=config.r,
    )
    if check:
        _check(model, f"TVLAP model (K={K}, T={T}, {config.g_variant.name})")
    return model


def make_special(kind, T, q, r, g_variant=GVariant.G1, check=True):
    """Level/Static (K=0), Holt/CV (K=1) and CA (K=2) as TVLAP instances."""
    K = _SPECIAL_ORDER[SpecialModel(kind)]
    return make_tvlap(TvlapConfig(K=K, T=T, g_variant=g_variant, q=q, r=r), check=check)


def arma_to_state_space(spec):
    """Companion-form realisation of an :class:`ArmaSpec`.

    Returns
    -------
    xi : (r, r) ndarray
        Companion matrix with last row ``[-phi_r, ..., -phi_1]``.
    upsilon : (r, 1) ndarray
        ``[0, ..., 0, 1]'``.
    pi : (1, r) ndarray
        ``[beta_r, ..., beta_1]`` with ``beta_i = theta_i - theta_0 * phi_i``.
    lam : float
        ``theta_0``.

    For white noise (``r == 0``) the three matrices are empty.
    """
    r = spec.order
    phi = list(spec.phi) + [0.0] * (r - spec.p)
    theta = list(spec.theta) + [0.0] * (r - spec.q)
    lam = theta[0]
    beta = [theta[i] - lam * phi[i - 1] for i in range(1, r + 1)]
    xi = _companion(phi)
    upsilon = np.zeros((r, 1))
    if r:
        upsilon[-1, 0] = 1.0
    pi = np.array(beta[::-1], dtype=np.float64).reshape(1, r)
    return xi, upsilon, pi, lam


def augment(base, spec, innov_var, check=True):
    """Stack ``base`` with the ARMA noise realisation of ``spec``.

    ``innov_var`` is the variance of the white input to the ARMA filter
    (see :func:`tvlap.noise.innovation_variance`).
    """
    if not innov_var > 0:
        raise ValueError("innov_var must be positive")
    xi, upsilon, pi, lam = arma_to_state_space(spec)
    nb = base.dim
    r = xi.shape[0]
    cross = np.zeros((nb + r, 1))
    if r:
        cross[nb:] = upsilon * innov_var * lam
    model = AugmentedModel(
        phi=block_diag(base.phi, xi),
        h=np.hstack([base.h, pi]),
        g=block_diag(base.g, upsilon) if r else base.g,
        q=block_diag(base.q, np.array([[innov_var]])) if r else base.q,
        r=lam * lam * innov_var,
        cross_cov=cross,
        innov_var=innov_var,
        base_dim=nb,
    )
    if check and r:
        _check(model, "augmented colored-noise model")
    return model
