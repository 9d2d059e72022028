"""FastAPI service wrapping the core package. The CLI is a thin client of
these endpoints; `aefs serve` exposes them over the network."""

from pathlib import Path

import numpy as np
from fastapi import FastAPI
from fastapi.responses import JSONResponse

from .. import __version__
from ..baselines import RsrConfig, rsr_solve
from ..data import Dataset, SyntheticSpec, gen_synthetic, load_csv, normalize, ranking_to_dict, source_sign_labels
from ..evaluation import LabelVector, derive_seed, run_experiment
from ..model import AutoencoderParams, Hyperparams, finite_difference_gradient, smooth_gradients
from ..prox import BacktrackingStep, FixedStep, TrainConfig, train
from ..selector import FeatureRanking, rank_features, reconstruct_from_selected, select_top
from . import schemas as sm


def _load_dataset(ref: sm.DatasetRef) -> Dataset:
    if ref.path is not None:
        path = Path(ref.path)
        if not path.is_file():
            raise ValueError(f"dataset file not found: {path}")
        return load_csv(path, has_header=ref.has_header, label_column=ref.label_column)
    inline = ref.inline
    labels = LabelVector.from_labels(inline.labels) if inline.labels is not None else None
    return Dataset(np.asarray(inline.x, dtype=np.float64), labels, inline.feature_names, "inline")


def _normalized(ds: Dataset, mode: str) -> Dataset:
    return ds if mode == "none" else normalize(ds, mode)


def _step_policy(step: sm.StepModel):
    if step.mode == "fixed":
        return FixedStep(step.t0)
    return BacktrackingStep(step.t0, step.shrink, step.c)


def _train_config(ts: sm.TrainSettings) -> TrainConfig:
    return TrainConfig(
        hidden_size=ts.hidden_size,
        hp=Hyperparams(alpha=ts.alpha, beta=ts.beta),
        max_epochs=ts.max_epochs,
        tol=ts.tol,
        step=_step_policy(ts.step),
        seed=ts.seed,
        init_scale=ts.init_scale,
        act_hidden=ts.act_hidden,
        act_output=ts.act_output,
        batch_size=ts.batch_size,
    )


def _trace_model(trace) -> sm.TraceModel:
    return sm.TraceModel(
        objective_history=[float(v) for v in trace.objective_history],
        epochs_run=trace.epochs_run,
        converged=trace.converged,
        final_row_support=trace.final_row_support,
    )


def _ranking_model(ranking: FeatureRanking, method: str) -> sm.RankingModel:
    return sm.RankingModel(**ranking_to_dict(ranking, method))


def _report_row(dataset_name: str, method: str, report, config: dict) -> sm.ReportRow:
    if method == "rsr":
        alpha, beta, hidden = config.get("lam"), None, None
    else:
        alpha, beta, hidden = config.get("alpha"), config.get("beta"), config.get("hidden")
    return sm.ReportRow(
        dataset=dataset_name,
        method=method,
        task=report.task,
        s=report.s,
        acc_mean=report.acc_mean,
        acc_std=report.acc_std,
        restarts=report.restarts,
        alpha=alpha,
        beta=beta,
        hidden=hidden,
        seed=config.get("seed"),
    )


def _rmse(a, b) -> float:
    return float(np.sqrt(np.mean((a - b) ** 2)))


def create_app() -> FastAPI:
    app = FastAPI(title="aefs", version=__version__)

    @app.exception_handler(ValueError)
    async def _value_error(request, exc):
        return JSONResponse(status_code=400, content={"detail": str(exc)})

    @app.get("/health", response_model=sm.HealthResponse)
    def health():
        return sm.HealthResponse(status="ok", version=__version__)

    @app.post("/select", response_model=sm.SelectResponse)
    def select(req: sm.SelectRequest):
        ds = _normalized(_load_dataset(req.dataset), req.normalize)
        cfg = _train_config(req.train)
        params, trace = train(ds.x, cfg)
        provenance = {
            "alpha": req.train.alpha,
            "beta": req.train.beta,
            "hidden": req.train.hidden_size,
            "seed": req.train.seed,
            "max_epochs": req.train.max_epochs,
            "tol": req.train.tol,
            "step": req.train.step.model_dump(),
            "init_scale": req.train.init_scale,
            "act_hidden": req.train.act_hidden,
            "act_output": req.train.act_output,
            "normalize": req.normalize,
            "dataset": req.dataset.name,
            "epochs_run": trace.epochs_run,
            "converged": trace.converged,
            "final_row_support": trace.final_row_support,
        }
        ranking = rank_features(params, provenance)
        return sm.SelectResponse(ranking=_ranking_model(ranking, "aefs"), trace=_trace_model(trace))

    @app.post("/baseline-rsr", response_model=sm.SelectResponse)
    def baseline_rsr(req: sm.RsrRequest):
        ds = _normalized(_load_dataset(req.dataset), req.normalize)
        cfg = RsrConfig(lam=req.lam, max_iters=req.max_iters, tol=req.tol,
                        step=_step_policy(req.step), seed=req.seed)
        w, trace = rsr_solve(ds.x, cfg)
        provenance = {
            "lam": req.lam,
            "max_iters": req.max_iters,
            "tol": req.tol,
            "step": req.step.model_dump(),
            "seed": req.seed,
            "normalize": req.normalize,
            "dataset": req.dataset.name,
            "epochs_run": trace.epochs_run,
            "converged": trace.converged,
            "final_row_support": trace.final_row_support,
        }
        scores = np.sqrt((w * w).sum(axis=1))
        ranking = FeatureRanking(scores, np.argsort(-scores, kind="stable"), provenance)
        return sm.SelectResponse(ranking=_ranking_model(ranking, "rsr"), trace=_trace_model(trace))

    @app.post("/evaluate", response_model=sm.EvaluateResponse)
    def evaluate(req: sm.EvaluateRequest):
        ds = _normalized(_load_dataset(req.dataset), req.normalize)
        if ds.labels is None:
            raise ValueError("evaluation needs ground-truth labels: pass label_column or inline labels")
        ranking = FeatureRanking(
            np.asarray(req.ranking.scores, dtype=np.float64),
            np.asarray(req.ranking.order, dtype=np.int64),
            dict(req.ranking.config),
        )
        if ranking.d != ds.num_features:
            raise ValueError(f"ranking covers {ranking.d} features but the dataset has {ds.num_features}")
        reports = []
        for s in req.s_values:
            rep = run_experiment(ds.x, ds.labels, ranking, s, req.task,
                                 restarts=req.restarts, master_seed=req.master_seed,
                                 protocol=req.protocol, ratio=req.split_ratio)
            reports.append(_report_row(req.dataset.name, req.ranking.method, rep, ranking.provenance))
        return sm.EvaluateResponse(reports=reports)

    @app.post("/reconstruct", response_model=sm.ReconstructResponse)
    def reconstruct(req: sm.ReconstructRequest):
        ds = _normalized(_load_dataset(req.dataset), req.normalize)
        cfg = _train_config(req.train)
        params, trace = train(ds.x, cfg)
        provenance = {
            "alpha": req.train.alpha, "beta": req.train.beta, "hidden": req.train.hidden_size,
            "seed": req.train.seed, "normalize": req.normalize, "dataset": req.dataset.name,
            "epochs_run": trace.epochs_run, "converged": trace.converged,
        }
        ranking = rank_features(params, provenance)
        selected = select_top(ranking, req.s)
        recon = reconstruct_from_selected(params, ds.x, selected, impute=req.impute)
        rmse_random = []
        rng = np.random.default_rng(req.subset_seed)
        for _ in range(req.random_subsets):
            subset = rng.choice(ds.num_features, size=req.s, replace=False)
            rmse_random.append(_rmse(ds.x, reconstruct_from_selected(params, ds.x, subset, impute=req.impute)))
        return sm.ReconstructResponse(
            ranking=_ranking_model(ranking, "aefs"),
            recon=[[float(v) for v in row] for row in recon],
            rmse_selected=_rmse(ds.x, recon),
            rmse_random=rmse_random,
        )

    @app.post("/gradcheck", response_model=sm.GradcheckResponse)
    def gradcheck(req: sm.GradcheckRequest):
        m, d, h = req.num_samples, req.num_features, req.hidden_size
        cases = []
        worst = 0.0
        case_idx = 0
        for act_h in req.activations:
            for act_o in req.activations:
                for seed_idx in range(req.num_seeds):
                    rng = np.random.default_rng(derive_seed(req.seed, case_idx))
                    case_idx += 1
                    x = rng.standard_normal((m, d))
                    params = AutoencoderParams(
                        rng.normal(0.0, 1.0 / np.sqrt(d), (d, h)),
                        rng.normal(0.0, 1.0 / np.sqrt(h), (h, d)),
                        act_h, act_o,
                    )
                    hp = Hyperparams(alpha=0.0, beta=0.01)
                    g = smooth_gradients(params, x, hp)
                    fd = finite_difference_gradient(params, x, hp, eps=req.eps)
                    err = 0.0
                    for a, b in ((g.g1, fd.g1), (g.g2, fd.g2)):
                        denom = np.maximum(1.0, np.maximum(np.abs(a), np.abs(b)))
                        err = max(err, float(np.max(np.abs(a - b) / denom)))
                    worst = max(worst, err)
                    cases.append(sm.GradcheckCase(act_hidden=act_h, act_output=act_o,
                                                  seed_index=seed_idx, max_rel_error=err))
        return sm.GradcheckResponse(passed=worst < req.tol, tol=req.tol, max_rel_error=worst, cases=cases)

    @app.post("/synth", response_model=sm.SynthResponse)
    def synth(req: sm.SynthRequest):
        spec = SyntheticSpec(
            num_samples=req.num_samples,
            num_sources=req.num_sources,
            num_redundant=req.num_redundant,
            num_noise=req.num_noise,
            nonlinearity=req.nonlinearity,
            noise_std=req.noise_std,
        )
        ds, source_indices = gen_synthetic(spec, req.seed)
        labels = None
        if req.label_rule == "source-sign":
            labels = [int(v) for v in source_sign_labels(ds.x, source_indices).labels]
        return sm.SynthResponse(
            x=[[float(v) for v in row] for row in ds.x],
            labels=labels,
            source_indices=[int(v) for v in source_indices],
            feature_names=ds.feature_names,
        )

    @app.post("/sweep", response_model=sm.SweepResponse)
    def sweep(req: sm.SweepRequest):
        ds = _normalized(_load_dataset(req.dataset), req.normalize)
        if ds.labels is None:
            raise ValueError("sweep needs ground-truth labels: pass label_column or inline labels")
        all_rows: list[sm.ReportRow] = []
        best: dict[int, sm.ReportRow] = {}
        for hidden in req.hidden_sizes:
            for alpha in req.alphas:
                for beta in req.betas:
                    cfg = TrainConfig(
                        hidden_size=hidden,
                        hp=Hyperparams(alpha=alpha, beta=beta),
                        max_epochs=req.max_epochs,
                        tol=req.tol,
                        step=_step_policy(req.step),
                        seed=req.seed,
                        init_scale=req.init_scale,
                    )
                    params, _ = train(ds.x, cfg)
                    config = {"alpha": alpha, "beta": beta, "hidden": hidden, "seed": req.seed}
                    ranking = rank_features(params, config)
                    for s in req.s_values:
                        rep = run_experiment(ds.x, ds.labels, ranking, s, req.task,
                                             restarts=req.restarts, master_seed=req.master_seed,
                                             protocol=req.protocol, ratio=req.split_ratio)
                        row = _report_row(req.dataset.name, "aefs", rep, config)
                        all_rows.append(row)
                        if s not in best or row.acc_mean > best[s].acc_mean:
                            best[s] = row
        return sm.SweepResponse(best=[best[s] for s in sorted(best)], all=all_rows)

    return app
