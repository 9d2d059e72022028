"""Dataset ingestion, normalization, synthetic data, and artifact files.

Artifact formats:
  * ranking JSON: {"method": "aefs"|"rsr", "d": int, "scores": [d floats],
    "order": [d ints], "config": {...}} — self-contained, so evaluation
    can run without retraining.
  * report CSV: one row per (dataset, method, task, s) with accuracy
    mean/std and the producing configuration.

Floats are written with repr, which round-trips binary doubles exactly.
"""

import csv
import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .evaluation import LabelVector
from .numerics import _sigmoid, check_matrix
from .selector import FeatureRanking

NONLINEARITIES = ("square", "product", "sigmoid_mix")

REPORT_COLUMNS = ("dataset", "method", "task", "s", "acc_mean", "acc_std",
                  "restarts", "alpha", "beta", "hidden", "seed")


@dataclass
class Dataset:
    x: np.ndarray
    labels: LabelVector | None = None
    feature_names: list[str] | None = None
    source: str = ""

    def __post_init__(self):
        self.x = check_matrix(self.x, "x")
        if self.labels is not None and self.labels.m != self.x.shape[0]:
            raise ValueError(f"labels length {self.labels.m} does not match {self.x.shape[0]} rows")
        if self.feature_names is not None and len(self.feature_names) != self.x.shape[1]:
            raise ValueError(
                f"{len(self.feature_names)} feature names for {self.x.shape[1]} columns"
            )

    @property
    def num_samples(self) -> int:
        return self.x.shape[0]

    @property
    def num_features(self) -> int:
        return self.x.shape[1]


def load_csv(path, has_header: bool = False, label_column: int | None = None) -> Dataset:
    """Read a comma-separated numeric matrix, optionally peeling off one
    label column (values are coded to dense integers in first-appearance
    order, so string or numeric class labels both work).

    Errors name the offending 1-based file line and column.
    """
    path = Path(path)
    with open(path, newline="") as fh:
        raw = list(csv.reader(fh))
    # a trailing newline yields one empty record; drop fully-empty records
    rows = [(i + 1, r) for i, r in enumerate(raw) if len(r) > 0]
    if not rows:
        raise ValueError(f"{path}: empty file")

    header = None
    if has_header:
        header = rows[0][1]
        rows = rows[1:]
        if not rows:
            raise ValueError(f"{path}: no data rows after the header")

    width = len(rows[0][1])
    if label_column is not None and not 0 <= label_column < width:
        raise ValueError(f"{path}: label column {label_column} out of range for {width} columns")

    feature_cols = [j for j in range(width) if j != label_column]
    x = np.empty((len(rows), len(feature_cols)))
    label_codes: dict[str, int] = {}
    labels = []
    for i, (line_no, row) in enumerate(rows):
        if len(row) != width:
            raise ValueError(f"{path}: ragged row at line {line_no}: {len(row)} cells, expected {width}")
        for jj, j in enumerate(feature_cols):
            cell = row[j].strip()
            try:
                x[i, jj] = float(cell)
            except ValueError:
                raise ValueError(f"{path}: non-numeric value {cell!r} at line {line_no}, column {j + 1}") from None
        if label_column is not None:
            key = row[label_column].strip()
            labels.append(label_codes.setdefault(key, len(label_codes)))

    names = None
    if header is not None:
        names = [header[j].strip() for j in feature_cols]
    lv = LabelVector(np.asarray(labels), len(label_codes)) if label_column is not None else None
    source = f"{path} ({len(rows)} rows, {len(feature_cols)} features)"
    return Dataset(x, lv, names, source)


def write_dataset_csv(ds: Dataset, path) -> None:
    """Write features (and a trailing label column if present); the result
    reloads through :func:`load_csv` with X reproduced exactly."""
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        if ds.feature_names is not None:
            header = list(ds.feature_names) + (["label"] if ds.labels is not None else [])
            writer.writerow(header)
        for i in range(ds.num_samples):
            row = [repr(float(v)) for v in ds.x[i]]
            if ds.labels is not None:
                row.append(str(int(ds.labels.labels[i])))
            writer.writerow(row)


def normalize(ds: Dataset, mode: str = "zscore") -> Dataset:
    """Per-feature rescale: zscore to mean 0 / population variance 1,
    minmax to [0, 1]. Constant features map to all-zeros in both modes."""
    x = ds.x
    if mode == "zscore":
        mean = x.mean(axis=0)
        std = x.std(axis=0)
        out = np.zeros_like(x)
        live = std > 0
        out[:, live] = (x[:, live] - mean[live]) / std[live]
    elif mode == "minmax":
        lo = x.min(axis=0)
        span = x.max(axis=0) - lo
        out = np.zeros_like(x)
        live = span > 0
        out[:, live] = (x[:, live] - lo[live]) / span[live]
    else:
        raise ValueError(f"mode must be 'zscore' or 'minmax', got {mode!r}")
    return Dataset(out, ds.labels, ds.feature_names, f"{ds.source} [{mode}]")


@dataclass(frozen=True)
class SyntheticSpec:
    """Layout of a generated dataset: independent gaussian sources, then
    features that are a nonlinearity of randomly paired sources plus
    noise_std gaussian noise, then pure-noise features. Columns come out
    shuffled."""

    num_samples: int
    num_sources: int
    num_redundant: int = 0
    num_noise: int = 0
    nonlinearity: str = "square"
    noise_std: float = 0.0

    def __post_init__(self):
        if self.num_samples < 1:
            raise ValueError(f"num_samples must be at least 1, got {self.num_samples}")
        if self.num_sources < 1:
            raise ValueError(f"num_sources must be at least 1, got {self.num_sources}")
        if self.num_redundant < 0 or self.num_noise < 0:
            raise ValueError("num_redundant and num_noise must be nonnegative")
        if self.nonlinearity not in NONLINEARITIES:
            raise ValueError(f"nonlinearity must be one of {NONLINEARITIES}, got {self.nonlinearity!r}")
        if self.noise_std < 0:
            raise ValueError(f"noise_std must be nonnegative, got {self.noise_std}")

    @property
    def num_features(self) -> int:
        return self.num_sources + self.num_redundant + self.num_noise


def gen_synthetic(spec: SyntheticSpec, seed: int) -> tuple[Dataset, np.ndarray]:
    """Deterministic per seed. Returns the dataset and the post-shuffle
    column positions of the source features."""
    rng = np.random.default_rng(seed)
    m, ns = spec.num_samples, spec.num_sources
    sources = rng.standard_normal((m, ns))

    names = [f"src{j}" for j in range(ns)]
    parts = [sources]
    red = []
    for r in range(spec.num_redundant):
        i = int(rng.integers(ns))
        j = int(rng.integers(ns))
        if spec.nonlinearity == "square":
            col = sources[:, i] ** 2
        elif spec.nonlinearity == "product":
            col = sources[:, i] * sources[:, j]
        else:  # sigmoid_mix
            a, b = rng.standard_normal(2)
            col = _sigmoid(a * sources[:, i] + b * sources[:, j])
        if spec.noise_std:
            col = col + spec.noise_std * rng.standard_normal(m)
        red.append(col)
        names.append(f"red{r}")
    if red:
        parts.append(np.column_stack(red))
    if spec.num_noise:
        parts.append(rng.standard_normal((m, spec.num_noise)))
        names.extend(f"noise{j}" for j in range(spec.num_noise))

    full = np.hstack(parts)
    perm = rng.permutation(spec.num_features)
    shuffled = full[:, perm]
    source_indices = np.where(perm < ns)[0]
    ds = Dataset(
        shuffled,
        None,
        [names[p] for p in perm],
        source=f"synthetic m={m} sources={ns} redundant={spec.num_redundant} "
               f"noise={spec.num_noise} fn={spec.nonlinearity} seed={seed}",
    )
    return ds, source_indices


def source_sign_labels(x, source_indices) -> LabelVector:
    """Binary label from the sign of the summed source columns. Gives
    synthetic data a ground truth that any subset covering the sources can
    predict well."""
    x = check_matrix(x, "x")
    y = (x[:, np.asarray(source_indices, dtype=np.int64)].sum(axis=1) > 0).astype(np.int64)
    return LabelVector(y, 2)


def ranking_to_dict(ranking: FeatureRanking, method: str) -> dict:
    if method not in ("aefs", "rsr"):
        raise ValueError(f"method must be 'aefs' or 'rsr', got {method!r}")
    return {
        "method": method,
        "d": ranking.d,
        "scores": [float(v) for v in ranking.scores],
        "order": [int(v) for v in ranking.order],
        "config": ranking.provenance,
    }


def ranking_from_dict(obj: dict) -> tuple[FeatureRanking, str]:
    for key in ("method", "d", "scores", "order"):
        if key not in obj:
            raise ValueError(f"ranking artifact is missing the {key!r} field")
    ranking = FeatureRanking(
        np.asarray(obj["scores"], dtype=np.float64),
        np.asarray(obj["order"], dtype=np.int64),
        dict(obj.get("config") or {}),
    )
    if ranking.d != int(obj["d"]):
        raise ValueError(f"ranking artifact claims d={obj['d']} but carries {ranking.d} scores")
    return ranking, str(obj["method"])


def save_ranking(path, ranking: FeatureRanking, method: str) -> None:
    payload = json.dumps(ranking_to_dict(ranking, method), indent=2, sort_keys=True)
    Path(path).write_text(payload + "\n")


def load_ranking(path) -> tuple[FeatureRanking, str]:
    return ranking_from_dict(json.loads(Path(path).read_text()))


def write_report_csv(path, rows: list[dict]) -> None:
    """Rows are dicts keyed by REPORT_COLUMNS; missing values write empty."""
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(REPORT_COLUMNS)
        for row in rows:
            writer.writerow(["" if row.get(c) is None else _fmt(row.get(c)) for c in REPORT_COLUMNS])


def _fmt(v):
    return repr(float(v)) if isinstance(v, float) else str(v)
