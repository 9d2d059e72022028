"""Shared test utilities: independent oracles and random instance factories."""

import numpy as np

from aefs import AutoencoderParams


def max_rel_error(a, b):
    """Entrywise |a-b| / max(1, |a|, |b|), maximized."""
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    denom = np.maximum(1.0, np.maximum(np.abs(a), np.abs(b)))
    return float(np.max(np.abs(a - b) / denom))


def random_instance(seed, m=10, d=6, h=4, act_hidden="sigmoid", act_output="identity"):
    """Seeded (params, x) pair with weights at training-init scale."""
    rng = np.random.default_rng(seed)
    x = rng.standard_normal((m, d))
    params = AutoencoderParams(
        rng.normal(0.0, 1.0 / np.sqrt(d), (d, h)),
        rng.normal(0.0, 1.0 / np.sqrt(h), (h, d)),
        act_hidden,
        act_output,
    )
    return params, x


def grid_search_prox_2d(v, lam, stages=14, points=81):
    """Dense zooming grid search for argmin_w 0.5*||w - v||^2 + lam*||w||_2.

    Independent of the closed-form operator: only evaluates the objective
    on successively finer 2-D grids. Boxes shrink 2.5x per stage, wide
    enough that the minimizer cannot escape as long as the case keeps a
    margin |lam - ||v||| >= 0.3 away from the threshold (at the threshold
    the argmin position is ill-conditioned and no finite grid resolves it).
    Final resolution is far below 1e-4.
    """
    v = np.asarray(v, dtype=np.float64)
    center = v / 2.0
    half = float(np.linalg.norm(v)) / 2.0 + lam + 1.0
    best = None
    for _ in range(stages):
        gx = np.linspace(center[0] - half, center[0] + half, points)
        gy = np.linspace(center[1] - half, center[1] + half, points)
        wx, wy = np.meshgrid(gx, gy, indexing="ij")
        obj = 0.5 * ((wx - v[0]) ** 2 + (wy - v[1]) ** 2) + lam * np.sqrt(wx**2 + wy**2)
        i, j = np.unravel_index(np.argmin(obj), obj.shape)
        best = np.array([gx[i], gy[j]])
        center = best
        half = 16.0 * (2.0 * half / (points - 1))
    return best


def random_prox_case(rng, threshold_margin=0.3):
    """A random (v, lam) pair kept clear of the degenerate ||v|| == lam band."""
    while True:
        v = rng.normal(0, 2, 2)
        lam = float(rng.uniform(0, 3))
        if abs(float(np.linalg.norm(v)) - lam) >= threshold_margin:
            return v, lam


def brute_force_best_map(truth_labels, pred_labels, num_truth, num_pred):
    """Maximize matches over every injective map from prediction labels to
    truth labels, by exhaustive permutation. Only viable for small label counts."""
    from itertools import permutations

    m = len(truth_labels)
    confusion = np.zeros((num_truth, num_pred), dtype=np.int64)
    np.add.at(confusion, (truth_labels, pred_labels), 1)
    best = 0
    if num_pred <= num_truth:
        # assign each predicted label a distinct truth label
        for perm in permutations(range(num_truth), num_pred):
            best = max(best, sum(confusion[perm[q], q] for q in range(num_pred)))
    else:
        # more clusters than classes: choose which predictions get matched
        for perm in permutations(range(num_pred), num_truth):
            best = max(best, sum(confusion[p, perm[p]] for p in range(num_truth)))
    return best / m
