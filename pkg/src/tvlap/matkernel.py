"""Small dense matrix helpers.

Matrices are plain 2-D ``float64`` numpy arrays. System dimensions in this
package stay below ~16, so everything here favours clarity and predictable
rounding over speed.
"""

import numpy as np

DEFAULT_RANK_TOL = 1e-10


class DimensionError(ValueError):
    """Raised when matrix shapes are incompatible."""


class NotPositiveDefiniteError(np.linalg.LinAlgError):
    """Raised when a Cholesky pivot is not strictly positive."""


def as_matrix(a, name="matrix"):
    """Return ``a`` as a finite 2-D float64 array.

    Scalars become 1x1 and 1-D input becomes a column.
    """
    m = np.asarray(a, dtype=np.float64)
    if m.ndim == 0:
        m = m.reshape(1, 1)
    elif m.ndim == 1:
        m = m.reshape(-1, 1)
    elif m.ndim != 2:
        raise DimensionError(f"{name} must be at most 2-D, got shape {m.shape}")
    if m.size and not np.all(np.isfinite(m)):
        raise ValueError(f"{name} contains non-finite entries")
    return m


def frozen(a):
    """Read-only float64 copy of ``a``."""
    m = np.array(a, dtype=np.float64)
    m.setflags(write=False)
    return m


def mat_mul(a, b):
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    if a.ndim != 2 or b.ndim != 2 or a.shape[1] != b.shape[0]:
        raise DimensionError(f"cannot multiply {a.shape} by {b.shape}")
    return a @ b


def block_diag(*blocks):
    """Block-diagonal stack; empty (0x0) blocks are skipped."""
    blocks = [np.asarray(b, dtype=np.float64) for b in blocks]
    rows = sum(b.shape[0] for b in blocks)
    cols = sum(b.shape[1] for b in blocks)
    out = np.zeros((rows, cols))
    i = j = 0
    for b in blocks:
        out[i:i + b.shape[0], j:j + b.shape[1]] = b
        i += b.shape[0]
        j += b.shape[1]
    return out


def cholesky(a):
    """Lower Cholesky factor of a symmetric positive definite matrix.

    Raises
    ------
    NotPositiveDefiniteError
        If a pivot is <= 0 during factorization.
    """
    a = np.asarray(a, dtype=np.float64)
    n = a.shape[0]
    L = np.zeros_like(a)
    for j in range(n):
        d = a[j, j] - L[j, :j] @ L[j, :j]
        if not d > 0.0:
            raise NotPositiveDefiniteError(f"non-positive pivot {d!r} at index {j}")
        L[j, j] = np.sqrt(d)
        for i in range(j + 1, n):
            L[i, j] = (a[i, j] - L[i, :j] @ L[j, :j]) / L[j, j]
    return L


def solve_spd(a, b):
    """Solve ``a @ x = b`` for symmetric positive definite ``a``.

    Parameters
    ----------
    a : (n, n) array_like
        Symmetric positive definite matrix (relative symmetry tolerance 1e-9).
    b : (n, m) array_like
        Right-hand side.

    Returns
    -------
    x : (n, m) ndarray
    """
    a = as_matrix(a, "a")
    b = as_matrix(b, "b")
    n = a.shape[0]
    if a.shape[1] != n:
        raise DimensionError(f"a must be square, got {a.shape}")
    if b.shape[0] != n:
        raise DimensionError(f"cannot solve {a.shape} system with rhs {b.shape}")
    scale = np.max(np.abs(a)) if a.size else 0.0
    if np.max(np.abs(a - a.T), initial=0.0) > 1e-9 * scale:
        raise NotPositiveDefiniteError("matrix is not symmetric")
    if n == 1:
        # scalar innovation covariance: plain division keeps the filter
        # arithmetic identical to the textbook scalar recursion
        if not a[0, 0] > 0.0:
            raise NotPositiveDefiniteError(f"non-positive pivot {a[0, 0]!r} at index 0")
        return b / a[0, 0]
    L = cholesky(a)
    y = np.zeros_like(b)
    for i in range(n):
        y[i] = (b[i] - L[i, :i] @ y[:i]) / L[i, i]
    x = np.zeros_like(b)
    for i in reversed(range(n)):
        x[i] = (y[i] - L[i + 1:, i] @ x[i + 1:]) / L[i, i]
    return x


def rank(a, tol=DEFAULT_RANK_TOL):
    """Numerical rank by row reduction with partial pivoting.

    A pivot counts when its magnitude exceeds ``tol`` times the largest
    absolute entry of the original matrix.
    """
    if not tol > 0:
        raise ValueError("tol must be positive")
    m = np.array(as_matrix(a), dtype=np.float64)
    if m.size == 0:
        return 0
    cutoff = tol * np.max(np.abs(m))
    if cutoff == 0.0:
        return 0
    rows, cols = m.shape
    r = 0
    for c in range(cols):
        if r == rows:
            break
        p = r + int(np.argmax(np.abs(m[r:, c])))
        if abs(m[p, c]) <= cutoff:
            continue
        m[[r, p]] = m[[p, r]]
        m[r + 1:] -= np.outer(m[r + 1:, c] / m[r, c], m[r])
        r += 1
    return r


def mat_pow(a, k):
    a = as_matrix(a)
    if a.shape[0] != a.shape[1]:
        raise DimensionError(f"matrix power needs a square matrix, got {a.shape}")
    if k < 0:
        raise ValueError("k must be non-negative")
    out = np.eye(a.shape[0])
    for _ in range(k):
        out = out @ a
    return out


def symmetrize(p):
    return 0.5 * (p + p.T)
