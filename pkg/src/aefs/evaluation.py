"""Evaluation harness: seeded k-means, clustering accuracy under the best
cluster-to-class assignment, 1-nearest-neighbor classification, and the
restart/averaging protocol that aggregates them into a report.
"""

from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import linear_sum_assignment

from .numerics import check_matrix
from .selector import FeatureRanking, select_top


@dataclass(frozen=True)
class LabelVector:
    """Dense integer labels in [0, num_classes)."""

    labels: np.ndarray
    num_classes: int

    def __post_init__(self):
        labels = np.asarray(self.labels, dtype=np.int64)
        if labels.ndim != 1 or labels.size < 1:
            raise ValueError(f"labels must be a nonempty 1-D vector, got shape {labels.shape}")
        if self.num_classes < 1 or labels.min() < 0 or labels.max() >= self.num_classes:
            raise ValueError(
                f"labels must lie in [0, {self.num_classes}), got range [{labels.min()}, {labels.max()}]"
            )
        object.__setattr__(self, "labels", labels)

    @classmethod
    def from_labels(cls, labels) -> "LabelVector":
        labels = np.asarray(labels, dtype=np.int64)
        return cls(labels, int(labels.max()) + 1 if labels.size else 1)

    @property
    def m(self) -> int:
        return len(self.labels)


@dataclass(frozen=True)
class EvalReport:
    task: str
    s: int
    acc_mean: float
    acc_std: float
    restarts: int
    config: dict = field(default_factory=dict)


def derive_seed(master_seed: int, index: int) -> int:
    """Stable, collision-free per-restart seed from (master seed, index)."""
    ss = np.random.SeedSequence(entropy=(int(master_seed), int(index)))
    a, b = ss.generate_state(2, np.uint32)
    return (int(a) << 32) | int(b)


def _sq_dists(a, b) -> np.ndarray:
    d2 = (a * a).sum(axis=1)[:, None] - 2.0 * (a @ b.T) + (b * b).sum(axis=1)[None, :]
    np.maximum(d2, 0.0, out=d2)
    return d2


def kmeans(x, k: int, seed: int, max_iters: int = 100) -> LabelVector:
    """Lloyd's iterations from k data points sampled by the seed.

    Deterministic per seed. A cluster that comes up empty is re-seeded at
    the point currently farthest from its assigned centroid.
    """
    x = check_matrix(x, "x")
    m = x.shape[0]
    if not 1 <= k <= m:
        raise ValueError(f"k must be in [1, {m}], got {k}")
    if max_iters < 1:
        raise ValueError(f"max_iters must be at least 1, got {max_iters}")

    rng = np.random.default_rng(seed)
    centers = x[rng.choice(m, size=k, replace=False)].copy()
    labels = None
    for _ in range(max_iters):
        d2 = _sq_dists(x, centers)
        new_labels = np.argmin(d2, axis=1)
        assigned_d2 = d2[np.arange(m), new_labels]
        for c in range(k):
            if not np.any(new_labels == c):
                far = int(np.argmax(assigned_d2))
                centers[c] = x[far]
                new_labels[far] = c
                assigned_d2[far] = 0.0
        if labels is not None and np.array_equal(new_labels, labels):
            break
        labels = new_labels
        for c in range(k):
            centers[c] = x[labels == c].mean(axis=0)
    return LabelVector(labels, k)


def best_map_accuracy(truth: LabelVector, pred: LabelVector) -> float:
    """Fraction of samples matched after the best injective relabeling of
    the predicted clusters, found by optimal assignment on the
    truth-by-prediction confusion matrix."""
    if truth.m != pred.m:
        raise ValueError(f"label vectors disagree in length: {truth.m} vs {pred.m}")
    confusion = np.zeros((truth.num_classes, pred.num_classes), dtype=np.int64)
    np.add.at(confusion, (truth.labels, pred.labels), 1)
    rows, cols = linear_sum_assignment(confusion, maximize=True)
    return float(confusion[rows, cols].sum()) / truth.m


def nn_classify_accuracy(x, labels: LabelVector, protocol: str = "leave_one_out",
                         ratio: float = 0.5, seed: int = 0) -> float:
    """1-nearest-neighbor accuracy under euclidean distance.

    leave_one_out predicts every sample from all the others. split holds
    out a seeded random test side, training on a ``ratio`` fraction;
    distance ties break toward the smallest training index.
    """
    x = check_matrix(x, "x")
    m = x.shape[0]
    if m < 2:
        raise ValueError(f"need at least 2 samples, got {m}")
    if labels.m != m:
        raise ValueError(f"labels length {labels.m} does not match {m} samples")
    y = labels.labels

    if protocol == "leave_one_out":
        d2 = _sq_dists(x, x)
        np.fill_diagonal(d2, np.inf)
        nearest = np.argmin(d2, axis=1)
        return float((y[nearest] == y).mean())

    if protocol == "split":
        if not 0.0 < ratio < 1.0:
            raise ValueError(f"split ratio must lie in (0, 1), got {ratio}")
        n_train = int(m * ratio)
        if n_train < 1 or n_train >= m:
            raise ValueError(f"split leaves an empty side: {n_train} train of {m} samples")
        perm = np.random.default_rng(seed).permutation(m)
        train_idx = np.sort(perm[:n_train])  # ascending, so argmin ties pick the smallest index
        test_idx = perm[n_train:]
        d2 = _sq_dists(x[test_idx], x[train_idx])
        nearest = train_idx[np.argmin(d2, axis=1)]
        return float((y[nearest] == y[test_idx]).mean())

    raise ValueError(f"protocol must be 'leave_one_out' or 'split', got {protocol!r}")


def run_experiment(x_full, labels: LabelVector, ranking: FeatureRanking, s: int, task: str,
                   restarts: int = 20, master_seed: int = 0, protocol: str = "leave_one_out",
                   ratio: float = 0.5, kmeans_max_iters: int = 100) -> EvalReport:
    """Project onto the top-s ranked features and measure accuracy.

    Clustering runs k-means once per restart (k = number of classes, seeds
    derived from the master seed and restart index), mapping each run
    through :func:`best_map_accuracy`. Classification runs the chosen
    protocol: leave_one_out is deterministic, so restarts collapse to 1;
    split redraws per restart. Reports mean and population std.
    """
    x = check_matrix(x_full, "x")
    if labels.m != x.shape[0]:
        raise ValueError(f"labels length {labels.m} does not match {x.shape[0]} samples")
    if restarts < 1:
        raise ValueError(f"restarts must be at least 1, got {restarts}")
    cols = np.sort(select_top(ranking, s))
    xs = x[:, cols]

    if task == "clustering":
        accs = [
            best_map_accuracy(labels, kmeans(xs, labels.num_classes, derive_seed(master_seed, i),
                                             max_iters=kmeans_max_iters))
            for i in range(restarts)
        ]
    elif task == "classification":
        if protocol == "leave_one_out":
            accs = [nn_classify_accuracy(xs, labels, "leave_one_out")]
        else:
            accs = [nn_classify_accuracy(xs, labels, "split", ratio, derive_seed(master_seed, i))
                    for i in range(restarts)]
    else:
        raise ValueError(f"task must be 'clustering' or 'classification', got {task!r}")

    accs = np.asarray(accs)
    config = {"master_seed": master_seed, "protocol": protocol if task == "classification" else None}
    return EvalReport(task, s, float(accs.mean()), float(accs.std()), len(accs), config)
