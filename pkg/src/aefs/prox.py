"""Group-sparse proximal gradient descent.

The penalty's proximal operator has a closed form, the multivariate soft
threshold: a row is zeroed outright when its norm falls at or below the
threshold, otherwise it is shrunk toward zero by the threshold amount.
:func:`proximal_gradient_descent` drives any list of matrices whose smooth
objective and gradients are supplied as callables; the autoencoder trainer
and the linear self-representation baseline both run on it.
"""

from dataclasses import dataclass, field

import numpy as np

from .model import (
    AutoencoderParams,
    Hyperparams,
    _smooth_gradients_raw,
    _smooth_value_raw,
    objective,
    smooth_gradients,
)
from .numerics import check_matrix

# Rows count as nonzero support above this norm; thresholded rows are
# exactly zero, the epsilon only guards float noise in traces.
SUPPORT_EPS = 1e-8

# Below this step size the line search gives up and keeps the iterate: no
# productive step exists at float resolution, i.e. we are stationary.
_MIN_STEP = 1e-20


@dataclass(frozen=True)
class FixedStep:
    """Constant step size. No descent guarantee; kept for reproducibility studies."""

    t: float = 0.01

    def __post_init__(self):
        if self.t <= 0:
            raise ValueError(f"step size must be positive, got {self.t}")


@dataclass(frozen=True)
class BacktrackingStep:
    """Shrink the step until the full objective decreases sufficiently.

    A candidate at step t is accepted when
    F(candidate) <= F(current) - (c/t) * ||candidate - current||_F^2,
    with F the smooth part plus the exact l2,1 penalty. The accepted step
    carries over to the next iteration and regrows one notch per
    iteration, so a conservative t0 only costs a few early probes.
    """

    t0: float = 0.1
    shrink: float = 0.5
    c: float = 1e-4

    def __post_init__(self):
        if self.t0 <= 0:
            raise ValueError(f"initial step must be positive, got {self.t0}")
        if not 0.0 < self.shrink < 1.0:
            raise ValueError(f"shrink factor must lie in (0, 1), got {self.shrink}")
        if self.c <= 0:
            raise ValueError(f"sufficient-decrease constant must be positive, got {self.c}")


StepPolicy = FixedStep | BacktrackingStep


@dataclass(frozen=True)
class TrainConfig:
    hidden_size: int
    hp: Hyperparams = field(default_factory=Hyperparams)
    max_epochs: int = 1000
    tol: float = 1e-6
    step: StepPolicy = field(default_factory=BacktrackingStep)
    seed: int = 0
    init_scale: float = 1.0
    act_hidden: str = "sigmoid"
    act_output: str = "identity"
    batch_size: int | None = None  # None = full batch

    def __post_init__(self):
        if self.hidden_size < 1:
            raise ValueError(f"hidden_size must be at least 1, got {self.hidden_size}")
        if self.max_epochs < 1:
            raise ValueError(f"max_epochs must be at least 1, got {self.max_epochs}")
        if self.tol < 0:
            raise ValueError(f"tol must be nonnegative, got {self.tol}")
        if self.init_scale <= 0:
            raise ValueError(f"init_scale must be positive, got {self.init_scale}")
        if self.batch_size is not None and self.batch_size < 1:
            raise ValueError(f"batch_size must be at least 1, got {self.batch_size}")


@dataclass
class TrainTrace:
    """Observability record of one optimization run.

    objective_history[0] is the objective at the initial point; one entry
    is appended per accepted iteration. With a backtracking policy the
    sequence is non-increasing.
    """

    objective_history: list[float]
    epochs_run: int
    converged: bool
    final_row_support: int


def vector_soft_threshold(w, lam: float) -> np.ndarray:
    """Shrink a vector toward zero by ``lam`` in norm.

    Returns the zero vector when ||w||_2 <= lam, otherwise w scaled by
    (1 - lam/||w||_2). This is the proximal operator of lam*||.||_2.
    """
    if lam < 0:
        raise ValueError(f"threshold must be nonnegative, got {lam}")
    w = np.asarray(w, dtype=np.float64)
    norm = float(np.linalg.norm(w))
    if norm <= lam:
        return np.zeros_like(w)
    return (1.0 - lam / norm) * w


def group_soft_threshold(w, lam: float) -> np.ndarray:
    """Apply :func:`vector_soft_threshold` to every row of a matrix."""
    if lam < 0:
        raise ValueError(f"threshold must be nonnegative, got {lam}")
    w = check_matrix(w, "w")
    norms = np.sqrt((w * w).sum(axis=1))
    scale = np.zeros_like(norms)
    live = norms > lam
    scale[live] = 1.0 - lam / norms[live]
    return w * scale[:, None]


def _candidate(ws, grads, prox_weights, t):
    out = []
    for w, g, lam in zip(ws, grads, prox_weights):
        stepped = w - t * g
        out.append(group_soft_threshold(stepped, lam * t) if lam else stepped)
    return out


def proximal_gradient_descent(
    ws0,
    smooth_value,
    smooth_grads,
    prox_weights,
    step: StepPolicy,
    max_epochs: int = 1000,
    tol: float = 1e-6,
    stop_window: int = 5,
    support_of: int = 0,
) -> tuple[list[np.ndarray], TrainTrace]:
    """Minimize smooth_value(ws) + sum_i prox_weights[i] * l21(ws[i]).

    Parameters
    ----------
    ws0 : list of 2-D arrays, the initial point (copied, never mutated).
    smooth_value : callable(list of arrays) -> float. May return inf/nan
        for diverging iterates; must not raise on them.
    smooth_grads : callable(list of arrays) -> list of arrays.
    prox_weights : per-matrix l2,1 weight; 0 means a plain gradient step.
    step : FixedStep or BacktrackingStep.
    support_of : index of the matrix whose nonzero-row count goes into the
        trace.

    Stops once the relative objective change over ``stop_window`` accepted
    iterations drops below ``tol``, or after ``max_epochs`` iterations.
    """
    ws = [np.array(check_matrix(w, f"ws0[{i}]")) for i, w in enumerate(ws0)]
    if len(prox_weights) != len(ws):
        raise ValueError(f"got {len(ws)} matrices but {len(prox_weights)} prox weights")
    if any(lam < 0 for lam in prox_weights):
        raise ValueError(f"prox weights must be nonnegative, got {prox_weights}")

    def full_objective(cur):
        val = smooth_value(cur)
        for lam, w in zip(prox_weights, cur):
            if lam:
                val += lam * float(np.sqrt((w * w).sum(axis=1)).sum())
        return float(val)

    history = [full_objective(ws)]
    if not np.isfinite(history[0]):
        raise ValueError("objective is non-finite at the initial point")

    backtracking = isinstance(step, BacktrackingStep)
    t = step.t0 if backtracking else step.t
    converged = False
    epochs = 0

    for k in range(max_epochs):
        grads = smooth_grads(ws)
        if any(not np.all(np.isfinite(g)) for g in grads):
            raise ValueError(f"non-finite gradient at iteration {k}: the step size is too large")

        if backtracking:
            t = t / step.shrink
            while True:
                cand = _candidate(ws, grads, prox_weights, t)
                new_val = full_objective(cand)
                moved = sum(float(((c - w) ** 2).sum()) for c, w in zip(cand, ws))
                if np.isfinite(new_val) and new_val <= history[-1] - step.c / t * moved:
                    break
                t *= step.shrink
                if t < _MIN_STEP:
                    cand, new_val = ws, history[-1]
                    break
        else:
            cand = _candidate(ws, grads, prox_weights, t)
            new_val = full_objective(cand)
            if not np.isfinite(new_val):
                raise ValueError(f"objective diverged at iteration {k}: fixed step {t} is too large")

        ws = cand
        history.append(new_val)
        epochs = k + 1

        if len(history) > stop_window:
            ref = history[-1 - stop_window]
            if abs(ref - history[-1]) <= tol * max(1.0, abs(ref)):
                converged = True
                break

    support = int((np.sqrt((ws[support_of] ** 2).sum(axis=1)) > SUPPORT_EPS).sum())
    return ws, TrainTrace(history, epochs, converged, support)


def proximal_step(params: AutoencoderParams, x, hp: Hyperparams, t: float) -> AutoencoderParams:
    """One combined step from ``params``: soft-thresholded gradient step on
    w1 (threshold alpha*t), plain gradient step on w2. Inputs untouched."""
    if t <= 0:
        raise ValueError(f"step size must be positive, got {t}")
    g = smooth_gradients(params, x, hp)
    if not (np.all(np.isfinite(g.g1)) and np.all(np.isfinite(g.g2))):
        raise ValueError("non-finite gradient: the step size is too large or parameters diverged")
    w1 = group_soft_threshold(params.w1 - t * g.g1, hp.alpha * t)
    w2 = params.w2 - t * g.g2
    return AutoencoderParams(w1, w2, params.act_hidden, params.act_output)


def seeded_init(num_features: int, cfg: TrainConfig) -> AutoencoderParams:
    """Gaussian init with std init_scale/sqrt(fan_in), drawn from the config seed."""
    rng = np.random.default_rng(cfg.seed)
    w1 = rng.normal(0.0, cfg.init_scale / np.sqrt(num_features), size=(num_features, cfg.hidden_size))
    w2 = rng.normal(0.0, cfg.init_scale / np.sqrt(cfg.hidden_size), size=(cfg.hidden_size, num_features))
    return AutoencoderParams(w1, w2, cfg.act_hidden, cfg.act_output)


def train(x, cfg: TrainConfig, init: AutoencoderParams | None = None) -> tuple[AutoencoderParams, TrainTrace]:
    """Fit the autoencoder to ``x`` (callers normalize first).

    Deterministic for fixed (x, cfg): the initial weights come from the
    config seed unless an explicit ``init`` is passed. Full-batch unless
    cfg.batch_size is set; the mini-batch path requires a FixedStep policy
    and gives up the monotone-descent guarantee.
    """
    x = check_matrix(x, "x")
    if init is None:
        params0 = seeded_init(x.shape[1], cfg)
    else:
        if init.num_features != x.shape[1] or init.hidden_size != cfg.hidden_size:
            raise ValueError(
                f"init shapes (d={init.num_features}, h={init.hidden_size}) do not match "
                f"x shape {x.shape} and hidden_size {cfg.hidden_size}"
            )
        params0 = init

    if cfg.batch_size is not None:
        return _train_minibatch(x, cfg, params0)

    act_h, act_o, beta = cfg.act_hidden, cfg.act_output, cfg.hp.beta

    def value(ws):
        return _smooth_value_raw(x, ws[0], ws[1], act_h, act_o, beta)

    def grads(ws):
        return list(_smooth_gradients_raw(x, ws[0], ws[1], act_h, act_o, beta))

    ws, trace = proximal_gradient_descent(
        [params0.w1, params0.w2],
        value,
        grads,
        [cfg.hp.alpha, 0.0],
        cfg.step,
        max_epochs=cfg.max_epochs,
        tol=cfg.tol,
    )
    return AutoencoderParams(ws[0], ws[1], act_h, act_o), trace


def _train_minibatch(x, cfg: TrainConfig, params0: AutoencoderParams) -> tuple[AutoencoderParams, TrainTrace]:
    if not isinstance(cfg.step, FixedStep):
        raise ValueError("mini-batch training requires a FixedStep policy")
    m = x.shape[0]
    batch = min(cfg.batch_size, m)
    rng = np.random.default_rng(cfg.seed + 1)  # offset so init and batch order differ
    w1, w2 = params0.w1.copy(), params0.w2.copy()
    act_h, act_o = cfg.act_hidden, cfg.act_output
    alpha, beta = cfg.hp.alpha, cfg.hp.beta
    t = cfg.step.t

    history = [objective(params0, x, cfg.hp)]
    converged = False
    epochs = 0
    for k in range(cfg.max_epochs):
        order = rng.permutation(m)
        for start in range(0, m, batch):
            xb = x[order[start : start + batch]]
            g1, g2 = _smooth_gradients_raw(xb, w1, w2, act_h, act_o, beta)
            if not (np.all(np.isfinite(g1)) and np.all(np.isfinite(g2))):
                raise ValueError(f"non-finite gradient at epoch {k}: the fixed step {t} is too large")
            w1 = group_soft_threshold(w1 - t * g1, alpha * t)
            w2 = w2 - t * g2
        val = _smooth_value_raw(x, w1, w2, act_h, act_o, beta)
        val += alpha * float(np.sqrt((w1 * w1).sum(axis=1)).sum())
        if not np.isfinite(val):
            raise ValueError(f"objective diverged at epoch {k}: the fixed step {t} is too large")
        history.append(float(val))
        epochs = k + 1
        if len(history) > 5:
            ref = history[-6]
            if abs(ref - history[-1]) <= cfg.tol * max(1.0, abs(ref)):
                converged = True
                break

    support = int((np.sqrt((w1 * w1).sum(axis=1)) > SUPPORT_EPS).sum())
    params = AutoencoderParams(w1, w2, act_h, act_o)
    return params, TrainTrace(history, epochs, converged, support)
