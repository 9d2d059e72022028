"""Turn trained encoder weights into a feature ranking and a subset.

A feature's score is the euclidean norm of its row of the encoder matrix:
rows driven exactly to zero by the sparsity penalty score 0 and rank last.
"""

from dataclasses import dataclass, field

import numpy as np

from .model import AutoencoderParams, _check_input, forward
from .numerics import row_norms


@dataclass(frozen=True)
class FeatureRanking:
    """Per-feature scores and the descending order (ties broken by
    ascending feature index). ``provenance`` carries a JSON-able summary
    of how the ranking was produced; nothing here interprets it."""

    scores: np.ndarray
    order: np.ndarray
    provenance: dict = field(default_factory=dict)

    def __post_init__(self):
        scores = np.asarray(self.scores, dtype=np.float64)
        order = np.asarray(self.order, dtype=np.int64)
        if scores.ndim != 1 or order.shape != scores.shape:
            raise ValueError(f"scores shape {scores.shape} and order shape {order.shape} must be equal 1-D")
        if not np.array_equal(np.sort(order), np.arange(len(scores))):
            raise ValueError("order is not a permutation of the feature indices")
        if np.any(np.diff(scores[order]) > 0):
            raise ValueError("order does not sort scores in descending order")
        object.__setattr__(self, "scores", scores)
        object.__setattr__(self, "order", order)

    @property
    def d(self) -> int:
        return len(self.scores)


def rank_features(params: AutoencoderParams, provenance: dict | None = None) -> FeatureRanking:
    """Score every feature by the norm of its encoder row and sort.

    Depends on w1 only; ties rank by ascending feature index so the
    result is deterministic.
    """
    scores = row_norms(params.w1)
    order = np.argsort(-scores, kind="stable")
    return FeatureRanking(scores, order, dict(provenance or {}))


def select_top(ranking: FeatureRanking, s: int) -> np.ndarray:
    """The s best-ranked feature indices, in rank order."""
    if not 1 <= s <= ranking.d:
        raise ValueError(f"s must be in [1, {ranking.d}], got {s}")
    return ranking.order[:s].copy()


def reconstruct_from_selected(params: AutoencoderParams, x, selected, impute: str = "feature_mean") -> np.ndarray:
    """Reconstruct x through the trained network using only the selected
    feature columns; the rest are imputed (zeros or per-feature means of x)
    before the forward pass. An empty selection is allowed."""
    x = _check_input(params, x)
    sel = np.asarray(sorted(selected), dtype=np.int64)
    if sel.size and (sel.min() < 0 or sel.max() >= x.shape[1]):
        raise ValueError(f"selected indices must lie in [0, {x.shape[1] - 1}], got range [{sel.min()}, {sel.max()}]")
    if impute == "zero":
        masked = np.zeros_like(x)
    elif impute == "feature_mean":
        masked = np.tile(x.mean(axis=0), (x.shape[0], 1))
    else:
        raise ValueError(f"impute must be 'zero' or 'feature_mean', got {impute!r}")
    if sel.size:
        masked[:, sel] = x[:, sel]
    _, recon = forward(params, masked)
    return recon
