"""Request/response models for the feature-selection service."""

from typing import Literal

from pydantic import BaseModel, Field, model_validator

Normalize = Literal["zscore", "minmax", "none"]
ActivationName = Literal["sigmoid", "tanh", "relu", "identity"]
TaskName = Literal["clustering", "classification"]


class InlineData(BaseModel):
    x: list[list[float]]
    labels: list[int] | None = None
    feature_names: list[str] | None = None


class DatasetRef(BaseModel):
    """Exactly one of: a CSV path on the service host, or inline rows."""

    path: str | None = None
    inline: InlineData | None = None
    has_header: bool = False
    label_column: int | None = None

    @model_validator(mode="after")
    def _exactly_one_source(self):
        if (self.path is None) == (self.inline is None):
            raise ValueError("provide exactly one of 'path' or 'inline'")
        return self

    @property
    def name(self) -> str:
        return self.path if self.path is not None else "inline"


class StepModel(BaseModel):
    mode: Literal["backtracking", "fixed"] = "backtracking"
    t0: float = Field(default=0.1, description="initial step (backtracking) or the constant step (fixed)")
    shrink: float = 0.5
    c: float = 1e-4


class TrainSettings(BaseModel):
    hidden_size: int = 256
    alpha: float = 0.001
    beta: float = 0.001
    max_epochs: int = 1000
    tol: float = 1e-6
    step: StepModel = StepModel()
    seed: int = 0
    init_scale: float = 1.0
    act_hidden: ActivationName = "sigmoid"
    act_output: ActivationName = "identity"
    batch_size: int | None = None


class TraceModel(BaseModel):
    objective_history: list[float]
    epochs_run: int
    converged: bool
    final_row_support: int


class RankingModel(BaseModel):
    """Mirrors the ranking JSON artifact."""

    method: Literal["aefs", "rsr"]
    d: int
    scores: list[float]
    order: list[int]
    config: dict = {}


class SelectRequest(BaseModel):
    dataset: DatasetRef
    normalize: Normalize = "zscore"
    train: TrainSettings = TrainSettings()


class SelectResponse(BaseModel):
    ranking: RankingModel
    trace: TraceModel


class RsrRequest(BaseModel):
    dataset: DatasetRef
    normalize: Normalize = "zscore"
    lam: float = 0.1
    max_iters: int = 1000
    tol: float = 1e-6
    step: StepModel = StepModel()
    seed: int = 0


class ReportRow(BaseModel):
    dataset: str
    method: str
    task: TaskName
    s: int
    acc_mean: float
    acc_std: float
    restarts: int
    alpha: float | None = None
    beta: float | None = None
    hidden: int | None = None
    seed: int | None = None


class EvaluateRequest(BaseModel):
    dataset: DatasetRef
    ranking: RankingModel
    s_values: list[int]
    task: TaskName = "clustering"
    normalize: Normalize = "zscore"
    restarts: int = 20
    master_seed: int = 0
    protocol: Literal["leave_one_out", "split"] = "leave_one_out"
    split_ratio: float = 0.5


class EvaluateResponse(BaseModel):
    reports: list[ReportRow]


class ReconstructRequest(BaseModel):
    dataset: DatasetRef
    normalize: Normalize = "zscore"
    train: TrainSettings = TrainSettings()
    s: int
    impute: Literal["zero", "feature_mean"] = "feature_mean"
    random_subsets: int = 0
    subset_seed: int = 0


class ReconstructResponse(BaseModel):
    ranking: RankingModel
    recon: list[list[float]]
    rmse_selected: float
    rmse_random: list[float]


class GradcheckRequest(BaseModel):
    seed: int = 0
    tol: float = 1e-5
    num_seeds: int = 5
    num_samples: int = 20
    num_features: int = 15
    hidden_size: int = 7
    eps: float = 1e-5
    activations: list[ActivationName] = ["sigmoid", "tanh", "identity"]


class GradcheckCase(BaseModel):
    act_hidden: ActivationName
    act_output: ActivationName
    seed_index: int
    max_rel_error: float


class GradcheckResponse(BaseModel):
    passed: bool
    tol: float
    max_rel_error: float
    cases: list[GradcheckCase]


class SynthRequest(BaseModel):
    num_samples: int
    num_sources: int
    num_redundant: int = 0
    num_noise: int = 0
    nonlinearity: Literal["square", "product", "sigmoid_mix"] = "square"
    noise_std: float = 0.0
    seed: int = 0
    label_rule: Literal["none", "source-sign"] = "none"


class SynthResponse(BaseModel):
    x: list[list[float]]
    labels: list[int] | None
    source_indices: list[int]
    feature_names: list[str]


class SweepRequest(BaseModel):
    dataset: DatasetRef
    normalize: Normalize = "zscore"
    alphas: list[float] = [0.001, 0.01, 0.1, 1.0, 10.0, 100.0, 1000.0]
    betas: list[float] = [0.001, 0.01, 0.1, 1.0, 10.0, 100.0, 1000.0]
    hidden_sizes: list[int] = [128, 256, 512, 1024]
    s_values: list[int] = [50, 100, 150, 200, 250, 300]
    task: TaskName = "clustering"
    restarts: int = 20
    master_seed: int = 0
    protocol: Literal["leave_one_out", "split"] = "leave_one_out"
    split_ratio: float = 0.5
    max_epochs: int = 1000
    tol: float = 1e-6
    step: StepModel = StepModel()
    seed: int = 0
    init_scale: float = 1.0


class SweepResponse(BaseModel):
    best: list[ReportRow]
    all: list[ReportRow]


class HealthResponse(BaseModel):
    status: str
    version: str
