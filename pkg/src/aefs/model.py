"""Two-layer autoencoder without bias units.

The network is ``recon = act_output(act_hidden(x @ w1) @ w2)``. Row i of
``w1`` belongs to input feature i; the row norms of a trained ``w1`` are
what the selector ranks. The training objective is

    (1/2m) * ||x - recon||_F^2  +  alpha * l21(w1)  +  (beta/2) * (||w1||_F^2 + ||w2||_F^2)

and its smooth part (everything except the ``alpha`` term) has analytic
gradients below. Their correctness oracle is
:func:`finite_difference_gradient`; the test suite holds them to it.
"""

from dataclasses import dataclass

import numpy as np

from .numerics import (
    ACTIVATION_KINDS,
    _apply,
    _apply_derivative,
    check_matrix,
    l21_norm,
)


@dataclass(frozen=True)
class Hyperparams:
    """alpha scales the l2,1 row-sparsity penalty on the encoder matrix,
    beta the quadratic weight decay on both matrices."""

    alpha: float = 0.0
    beta: float = 0.0

    def __post_init__(self):
        if self.alpha < 0 or self.beta < 0:
            raise ValueError(f"alpha and beta must be nonnegative, got alpha={self.alpha}, beta={self.beta}")


@dataclass(frozen=True)
class AutoencoderParams:
    """Encoder/decoder weights: w1 is (d, h), w2 is (h, d). Treated as
    immutable once constructed; never write into the arrays."""

    w1: np.ndarray
    w2: np.ndarray
    act_hidden: str = "sigmoid"
    act_output: str = "identity"

    def __post_init__(self):
        object.__setattr__(self, "w1", check_matrix(self.w1, "w1"))
        object.__setattr__(self, "w2", check_matrix(self.w2, "w2"))
        if self.w1.shape[1] != self.w2.shape[0] or self.w1.shape[0] != self.w2.shape[1]:
            raise ValueError(
                f"w1 shape {self.w1.shape} and w2 shape {self.w2.shape} do not form a (d, h), (h, d) pair"
            )
        for kind in (self.act_hidden, self.act_output):
            if kind not in ACTIVATION_KINDS:
                raise ValueError(f"unknown activation kind {kind!r}; expected one of {ACTIVATION_KINDS}")

    @property
    def num_features(self) -> int:
        return self.w1.shape[0]

    @property
    def hidden_size(self) -> int:
        return self.w1.shape[1]


@dataclass(frozen=True)
class Gradients:
    """Gradients of the smooth objective: g1 matches w1, g2 matches w2."""

    g1: np.ndarray
    g2: np.ndarray


def _check_input(params: AutoencoderParams, x, name: str = "x") -> np.ndarray:
    x = check_matrix(x, name)
    if x.shape[1] != params.w1.shape[0]:
        raise ValueError(
            f"{name} shape {x.shape} is incompatible with w1 shape {params.w1.shape}: "
            f"{name} has {x.shape[1]} feature columns, w1 expects {params.w1.shape[0]}"
        )
    return x


def _forward_raw(x, w1, w2, act_hidden, act_output):
    # No validation and no overflow errors: divergence shows up as inf/nan
    # in the result, which callers test for. Keeps backtracking line
    # searches free to probe steps that turn out to be too large.
    with np.errstate(over="ignore", invalid="ignore"):
        h_pre = x @ w1
        hidden = _apply(act_hidden, h_pre)
        y_pre = hidden @ w2
        recon = _apply(act_output, y_pre)
    return h_pre, hidden, y_pre, recon


def _smooth_value_raw(x, w1, w2, act_hidden, act_output, beta):
    _, _, _, recon = _forward_raw(x, w1, w2, act_hidden, act_output)
    with np.errstate(over="ignore", invalid="ignore"):
        r = recon - x
        val = float((r * r).sum()) / (2.0 * x.shape[0])
        if beta:
            val += 0.5 * beta * (float((w1 * w1).sum()) + float((w2 * w2).sum()))
    return val


def _smooth_gradients_raw(x, w1, w2, act_hidden, act_output, beta):
    m = x.shape[0]
    with np.errstate(over="ignore", invalid="ignore"):
        h_pre, hidden, y_pre, recon = _forward_raw(x, w1, w2, act_hidden, act_output)
        delta_out = (recon - x) * _apply_derivative(act_output, y_pre) / m
        g2 = hidden.T @ delta_out
        delta_hidden = (delta_out @ w2.T) * _apply_derivative(act_hidden, h_pre)
        g1 = x.T @ delta_hidden
        if beta:
            g1 = g1 + beta * w1
            g2 = g2 + beta * w2
    return g1, g2


def forward(params: AutoencoderParams, x) -> tuple[np.ndarray, np.ndarray]:
    """Run the network. Returns (hidden, recon): the hidden activations
    with shape (m, h) and the reconstruction with shape (m, d)."""
    x = _check_input(params, x)
    _, hidden, _, recon = _forward_raw(x, params.w1, params.w2, params.act_hidden, params.act_output)
    return hidden, recon


def smooth_objective(params: AutoencoderParams, x, hp: Hyperparams) -> float:
    """The objective without its l2,1 term: reconstruction loss plus weight decay."""
    x = _check_input(params, x)
    val = _smooth_value_raw(x, params.w1, params.w2, params.act_hidden, params.act_output, hp.beta)
    if not np.isfinite(val):
        raise ValueError("smooth objective is non-finite: parameters have diverged")
    return val


def objective(params: AutoencoderParams, x, hp: Hyperparams) -> float:
    """Full training objective; nonnegative, non-finite values are rejected."""
    val = smooth_objective(params, x, hp)
    if hp.alpha:
        val += hp.alpha * l21_norm(params.w1)
    return val


def smooth_gradients(params: AutoencoderParams, x, hp: Hyperparams) -> Gradients:
    """Exact chain-rule gradients of :func:`smooth_objective`.

    Output-layer error is taken at the pre-activation ``hidden @ w2`` and
    hidden-layer error at ``x @ w1``; the weight-decay term contributes
    ``beta * w`` to each matrix.
    """
    x = _check_input(params, x)
    g1, g2 = _smooth_gradients_raw(x, params.w1, params.w2, params.act_hidden, params.act_output, hp.beta)
    return Gradients(g1, g2)


def finite_difference_gradient(params: AutoencoderParams, x, hp: Hyperparams, eps: float = 1e-5) -> Gradients:
    """Central-difference gradient of :func:`smooth_objective`, entry by entry.

    Independent numerical oracle for :func:`smooth_gradients`: it only
    evaluates the objective, never the analytic chain rule.
    """
    if eps <= 0:
        raise ValueError(f"eps must be positive, got {eps}")
    x = _check_input(params, x)

    def value(w1, w2):
        return _smooth_value_raw(x, w1, w2, params.act_hidden, params.act_output, hp.beta)

    grads = []
    for w in (params.w1, params.w2):
        g = np.zeros_like(w)
        work = w.copy()
        for i in range(w.shape[0]):
            for j in range(w.shape[1]):
                orig = work[i, j]
                work[i, j] = orig + eps
                plus = value(work, params.w2) if w is params.w1 else value(params.w1, work)
                work[i, j] = orig - eps
                minus = value(work, params.w2) if w is params.w1 else value(params.w1, work)
                work[i, j] = orig
                g[i, j] = (plus - minus) / (2.0 * eps)
        grads.append(g)
    return Gradients(grads[0], grads[1])
