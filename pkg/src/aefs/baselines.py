"""Linear self-representation baseline (RSR) and the linear reduction of
the autoencoder objective, each implemented literally:

    rsr:     ||x - x w||_F^2 + lam * l21(w)           over w (d, d)
    linear:  (1/2m) ||x - x w1 w2||_F^2 + alpha * l21(w1)

Note the baseline carries no 1/2m factor, so penalty strengths match
across the two only after rescaling: lam = 2 * m * alpha.
"""

from dataclasses import dataclass, field

import numpy as np

from .model import Hyperparams
from .numerics import check_matrix, l21_norm
from .prox import BacktrackingStep, StepPolicy, TrainTrace, proximal_gradient_descent


@dataclass(frozen=True)
class RsrConfig:
    lam: float
    max_iters: int = 1000
    tol: float = 1e-6
    step: StepPolicy = field(default_factory=BacktrackingStep)
    seed: int = 0  # unused by the default zero init; kept for config uniformity

    def __post_init__(self):
        if self.lam < 0:
            raise ValueError(f"lam must be nonnegative, got {self.lam}")
        if self.max_iters < 1:
            raise ValueError(f"max_iters must be at least 1, got {self.max_iters}")
        if self.tol < 0:
            raise ValueError(f"tol must be nonnegative, got {self.tol}")


def rsr_solve(x, cfg: RsrConfig, w0=None) -> tuple[np.ndarray, TrainTrace]:
    """Minimize the self-representation objective by proximal gradient
    descent; row norms of the returned (d, d) matrix rank features.

    Starts from the zero matrix unless a warm start ``w0`` is given.
    Deterministic for fixed inputs.
    """
    x = check_matrix(x, "x")
    d = x.shape[1]
    if w0 is None:
        w0 = np.zeros((d, d))
    else:
        w0 = check_matrix(w0, "w0")
        if w0.shape != (d, d):
            raise ValueError(f"w0 must be ({d}, {d}) to match x shape {x.shape}, got {w0.shape}")

    xt = x.T

    def value(ws):
        with np.errstate(over="ignore", invalid="ignore"):
            r = x - x @ ws[0]
            return float((r * r).sum())

    def grads(ws):
        with np.errstate(over="ignore", invalid="ignore"):
            return [2.0 * (xt @ (x @ ws[0] - x))]

    ws, trace = proximal_gradient_descent(
        [w0], value, grads, [cfg.lam], cfg.step, max_epochs=cfg.max_iters, tol=cfg.tol
    )
    return ws[0], trace


def rsr_objective(w, x, lam: float) -> float:
    """The value the solver minimizes, evaluated at w."""
    w = check_matrix(w, "w")
    x = check_matrix(x, "x")
    if w.shape != (x.shape[1], x.shape[1]):
        raise ValueError(f"w shape {w.shape} must be ({x.shape[1]}, {x.shape[1]}) for x shape {x.shape}")
    r = x - x @ w
    return float((r * r).sum()) + lam * l21_norm(w)


def linear_aefs_objective(w1, w2, x, alpha: float) -> float:
    """Objective of the all-linear autoencoder with weight decay left out.

    Equals the full model objective with identity activations and beta=0;
    the test suite cross-checks that identity.
    """
    w1 = check_matrix(w1, "w1")
    w2 = check_matrix(w2, "w2")
    x = check_matrix(x, "x")
    if x.shape[1] != w1.shape[0] or w1.shape[1] != w2.shape[0] or w2.shape[1] != x.shape[1]:
        raise ValueError(
            f"inconsistent shapes: x {x.shape}, w1 {w1.shape}, w2 {w2.shape} "
            f"(need x (m,d), w1 (d,h), w2 (h,d))"
        )
    if alpha < 0:
        raise ValueError(f"alpha must be nonnegative, got {alpha}")
    r = x - x @ w1 @ w2
    return float((r * r).sum()) / (2.0 * x.shape[0]) + alpha * l21_norm(w1)


def linear_aefs_train(x, alpha: float, hidden_size: int, seed: int = 0, max_iters: int = 2000,
                      tol: float = 1e-9, step: StepPolicy | None = None):
    """Fit the linear reduction directly (identity activations, no decay).

    Convenience wrapper over the shared proximal engine; returns
    (w1, w2, trace). Used by the linear-vs-baseline parity checks.
    """
    from .prox import TrainConfig, train

    cfg = TrainConfig(
        hidden_size=hidden_size,
        hp=Hyperparams(alpha=alpha, beta=0.0),
        max_epochs=max_iters,
        tol=tol,
        step=step if step is not None else BacktrackingStep(),
        seed=seed,
        act_hidden="identity",
        act_output="identity",
    )
    params, trace = train(x, cfg)
    return params.w1, params.w2, trace
