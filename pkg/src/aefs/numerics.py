"""Dense-matrix vocabulary shared by the whole package.

Everything here is a pure function of float64 numpy arrays. Public
operations validate their inputs through :func:`check_matrix`, so NaN/Inf
can never slip into the numeric core unnoticed.
"""

import numpy as np

ACTIVATION_KINDS = ("sigmoid", "tanh", "relu", "identity")


def check_matrix(a, name: str = "matrix") -> np.ndarray:
    """Coerce ``a`` to a 2-D float64 array; reject empty or non-finite input."""
    out = np.asarray(a, dtype=np.float64)
    if out.ndim != 2:
        raise ValueError(f"{name} must be 2-D, got shape {out.shape}")
    if out.shape[0] < 1 or out.shape[1] < 1:
        raise ValueError(f"{name} needs at least one row and one column, got shape {out.shape}")
    if not np.all(np.isfinite(out)):
        i, j = np.argwhere(~np.isfinite(out))[0]
        raise ValueError(f"{name} has a non-finite entry at row {i}, column {j}")
    return out


def row_norms(m) -> np.ndarray:
    """Euclidean norm of every row, as a 1-D array of length rows(m)."""
    m = check_matrix(m, "m")
    return np.sqrt((m * m).sum(axis=1))


def l21_norm(m) -> float:
    """Sum of row norms: sum_i ||m_i||_2. Zero iff m is the zero matrix."""
    m = check_matrix(m, "m")
    return float(np.sqrt((m * m).sum(axis=1)).sum())


def frobenius_norm_sq(m) -> float:
    """Sum of squared entries."""
    m = check_matrix(m, "m")
    return float((m * m).sum())


def _sigmoid(z):
    # Branch on sign so exp() only ever sees non-positive arguments.
    out = np.empty_like(z)
    pos = z >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-z[pos]))
    ez = np.exp(z[~pos])
    out[~pos] = ez / (1.0 + ez)
    return out


def _apply(kind, z):
    if kind == "sigmoid":
        return _sigmoid(z)
    if kind == "tanh":
        return np.tanh(z)
    if kind == "relu":
        return np.maximum(z, 0.0)
    if kind == "identity":
        return z.copy()
    raise ValueError(f"unknown activation kind {kind!r}; expected one of {ACTIVATION_KINDS}")


def _apply_derivative(kind, z):
    if kind == "sigmoid":
        s = _sigmoid(z)
        return s * (1.0 - s)
    if kind == "tanh":
        t = np.tanh(z)
        return 1.0 - t * t
    if kind == "relu":
        # Subgradient choice: derivative at exactly 0 is 0.
        return (z > 0).astype(np.float64)
    if kind == "identity":
        return np.ones_like(z)
    raise ValueError(f"unknown activation kind {kind!r}; expected one of {ACTIVATION_KINDS}")


def activate(kind: str, z) -> np.ndarray:
    """Apply an activation elementwise. Returns a new array of z's shape."""
    return _apply(kind, check_matrix(z, "z"))


def activate_derivative(kind: str, z) -> np.ndarray:
    """Elementwise derivative of the activation, taken at the pre-activation z."""
    return _apply_derivative(kind, check_matrix(z, "z"))
