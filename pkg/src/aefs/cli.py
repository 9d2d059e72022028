"""Command-line surface: a thin client of the service endpoints.

Each subcommand builds one request, posts it to the service (in-process by
default, or to --server URL), and writes the response out as artifacts:
ranking JSON, report CSV, reconstruction/weight-map CSV, synthetic CSV.
`aefs serve` exposes the same endpoints over the network.
"""

import argparse
import asyncio
import csv
import json
import sys
from pathlib import Path

import httpx


class CliError(Exception):
    pass


_APP = None


def _inprocess_app():
    global _APP
    if _APP is None:
        from .service import create_app

        _APP = create_app()
    return _APP


def _post(server, path, payload):
    if server:
        with httpx.Client(base_url=server, timeout=None) as client:
            return _unwrap(client.post(path, json=payload), path)

    async def go():
        transport = httpx.ASGITransport(app=_inprocess_app())
        async with httpx.AsyncClient(transport=transport, base_url="http://aefs.internal",
                                     timeout=None) as client:
            return await client.post(path, json=payload)

    return _unwrap(asyncio.run(go()), path)


def _unwrap(resp, path):
    if resp.status_code != 200:
        try:
            detail = resp.json().get("detail")
        except Exception:
            detail = resp.text
        raise CliError(f"{path} failed (HTTP {resp.status_code}): {detail}")
    return resp.json()


def _int_list(text):
    try:
        return [int(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected a comma-separated list of integers, got {text!r}")


def _float_list(text):
    try:
        return [float(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected a comma-separated list of numbers, got {text!r}")


def _dataset_ref(args):
    return {"path": args.input, "has_header": args.has_header, "label_column": args.label_column}


def _step_model(args):
    return {"mode": args.step, "t0": args.step_size, "shrink": args.shrink, "c": args.step_c}


def _train_settings(args):
    return {
        "hidden_size": args.hidden,
        "alpha": args.alpha,
        "beta": args.beta,
        "max_epochs": args.epochs,
        "tol": args.tol,
        "step": _step_model(args),
        "seed": args.seed,
        "init_scale": args.init_scale,
        "act_hidden": args.act_hidden,
        "act_output": args.act_output,
        "batch_size": args.batch_size,
    }


def _write_ranking(path, ranking_dict):
    from .data import ranking_from_dict, save_ranking

    ranking, method = ranking_from_dict(ranking_dict)
    save_ranking(path, ranking, method)


def _write_matrix_csv(path, rows):
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        for row in rows:
            writer.writerow([repr(float(v)) for v in row])


def _write_vector_csv(path, values):
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        for v in values:
            writer.writerow([repr(float(v))])


def cmd_select(args):
    payload = {"dataset": _dataset_ref(args), "normalize": args.normalize, "train": _train_settings(args)}
    resp = _post(args.server, "/select", payload)
    _write_ranking(args.out, resp["ranking"])
    trace = resp["trace"]
    print(f"wrote {args.out}: {resp['ranking']['d']} features ranked "
          f"(epochs={trace['epochs_run']}, converged={trace['converged']}, "
          f"nonzero rows={trace['final_row_support']})")
    return 0


def cmd_baseline_rsr(args):
    payload = {
        "dataset": _dataset_ref(args),
        "normalize": args.normalize,
        "lam": args.lam,
        "max_iters": args.iters,
        "tol": args.tol,
        "step": _step_model(args),
        "seed": args.seed,
    }
    resp = _post(args.server, "/baseline-rsr", payload)
    _write_ranking(args.out, resp["ranking"])
    trace = resp["trace"]
    print(f"wrote {args.out}: {resp['ranking']['d']} features ranked "
          f"(iters={trace['epochs_run']}, converged={trace['converged']}, "
          f"nonzero rows={trace['final_row_support']})")
    return 0


def cmd_evaluate(args):
    from .data import write_report_csv

    ranking = json.loads(Path(args.ranking).read_text())
    payload = {
        "dataset": _dataset_ref(args),
        "normalize": args.normalize,
        "ranking": ranking,
        "s_values": args.s,
        "task": args.task,
        "restarts": args.restarts,
        "master_seed": args.master_seed,
        "protocol": args.protocol,
        "split_ratio": args.split_ratio,
    }
    resp = _post(args.server, "/evaluate", payload)
    write_report_csv(args.out, resp["reports"])
    for row in resp["reports"]:
        print(f"{row['task']} s={row['s']}: acc {row['acc_mean']:.4f} +/- {row['acc_std']:.4f} "
              f"({row['restarts']} restarts)")
    print(f"wrote {args.out}")
    return 0


def cmd_reconstruct(args):
    payload = {
        "dataset": _dataset_ref(args),
        "normalize": args.normalize,
        "train": _train_settings(args),
        "s": args.s,
        "impute": args.impute,
        "random_subsets": args.random_subsets,
        "subset_seed": args.subset_seed,
    }
    resp = _post(args.server, "/reconstruct", payload)
    _write_matrix_csv(args.out, resp["recon"])
    print(f"wrote {args.out}: reconstruction from top {args.s} features, "
          f"rmse={resp['rmse_selected']:.6f}")
    if args.weight_map:
        _write_vector_csv(args.weight_map, resp["ranking"]["scores"])
        print(f"wrote {args.weight_map}: per-feature weight map")
    if resp["rmse_random"]:
        import statistics

        med = statistics.median(resp["rmse_random"])
        print(f"random {args.s}-subsets ({len(resp['rmse_random'])}): median rmse={med:.6f}")
    return 0


def cmd_gradcheck(args):
    payload = {
        "seed": args.seed,
        "tol": args.tol,
        "num_seeds": args.num_seeds,
        "num_samples": args.samples,
        "num_features": args.features,
        "hidden_size": args.hidden,
        "eps": args.eps,
    }
    resp = _post(args.server, "/gradcheck", payload)
    status = "PASS" if resp["passed"] else "FAIL"
    print(f"gradcheck {status}: max relative error {resp['max_rel_error']:.3e} "
          f"over {len(resp['cases'])} cases (tol {resp['tol']:.1e})")
    return 0 if resp["passed"] else 1


def cmd_synth(args):
    import numpy as np

    from .data import Dataset, write_dataset_csv
    from .evaluation import LabelVector

    payload = {
        "num_samples": args.samples,
        "num_sources": args.sources,
        "num_redundant": args.redundant,
        "num_noise": args.noise,
        "nonlinearity": args.nonlinearity,
        "noise_std": args.noise_std,
        "seed": args.seed,
        "label_rule": args.label_rule,
    }
    resp = _post(args.server, "/synth", payload)
    labels = None
    if resp["labels"] is not None:
        labels = LabelVector.from_labels(np.asarray(resp["labels"]))
    ds = Dataset(np.asarray(resp["x"]), labels, resp["feature_names"])
    write_dataset_csv(ds, args.out)
    print(f"wrote {args.out}: {ds.num_samples}x{ds.num_features}"
          + (" with label column" if labels is not None else ""))
    if args.sources_out:
        truth = {"num_sources": args.sources, "seed": args.seed,
                 "source_indices": resp["source_indices"]}
        Path(args.sources_out).write_text(json.dumps(truth, indent=2, sort_keys=True) + "\n")
        print(f"wrote {args.sources_out}: source column positions")
    return 0


def cmd_sweep(args):
    from .data import write_report_csv

    payload = {
        "dataset": _dataset_ref(args),
        "normalize": args.normalize,
        "alphas": args.alphas,
        "betas": args.betas,
        "hidden_sizes": args.hiddens,
        "s_values": args.s,
        "task": args.task,
        "restarts": args.restarts,
        "master_seed": args.master_seed,
        "protocol": args.protocol,
        "split_ratio": args.split_ratio,
        "max_epochs": args.epochs,
        "tol": args.tol,
        "step": _step_model(args),
        "seed": args.seed,
        "init_scale": args.init_scale,
    }
    resp = _post(args.server, "/sweep", payload)
    write_report_csv(args.out, resp["best"])
    if args.all_out:
        write_report_csv(args.all_out, resp["all"])
        print(f"wrote {args.all_out}: all {len(resp['all'])} grid rows")
    for row in resp["best"]:
        print(f"best s={row['s']}: acc {row['acc_mean']:.4f} +/- {row['acc_std']:.4f} "
              f"(alpha={row['alpha']}, beta={row['beta']}, hidden={row['hidden']})")
    print(f"wrote {args.out}")
    return 0


def cmd_serve(args):
    import uvicorn

    from .service import create_app

    uvicorn.run(create_app(), host=args.host, port=args.port)
    return 0


def _add_dataset_args(sp):
    sp.add_argument("--input", required=True, help="CSV dataset path")
    sp.add_argument("--has-header", action="store_true", help="first row is a header")
    sp.add_argument("--label-column", type=int, default=None, help="0-based label column index")
    sp.add_argument("--normalize", choices=["zscore", "minmax", "none"], default="zscore")


def _add_step_args(sp):
    sp.add_argument("--step", choices=["backtracking", "fixed"], default="backtracking")
    sp.add_argument("--step-size", type=float, default=0.1,
                    help="initial step (backtracking) or the constant step (fixed)")
    sp.add_argument("--shrink", type=float, default=0.5)
    sp.add_argument("--step-c", type=float, default=1e-4, help="sufficient-decrease constant")


def _add_train_args(sp):
    sp.add_argument("--hidden", type=int, default=256)
    sp.add_argument("--alpha", type=float, default=0.001, help="row-sparsity penalty weight")
    sp.add_argument("--beta", type=float, default=0.001, help="weight-decay strength")
    sp.add_argument("--epochs", type=int, default=1000)
    sp.add_argument("--tol", type=float, default=1e-6)
    _add_step_args(sp)
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--init-scale", type=float, default=1.0)
    sp.add_argument("--act-hidden", choices=["sigmoid", "tanh", "relu", "identity"], default="sigmoid")
    sp.add_argument("--act-output", choices=["sigmoid", "tanh", "relu", "identity"], default="identity")
    sp.add_argument("--batch-size", type=int, default=None)


def build_parser():
    parser = argparse.ArgumentParser(
        prog="aefs",
        description="Row-sparse autoencoder feature selection: train, rank, evaluate.",
    )
    parser.add_argument("--server", default=None,
                        help="base URL of a running aefs service; default runs in-process")
    sub = parser.add_subparsers(dest="command", required=True)

    sp = sub.add_parser("select", help="train the selector and write a ranking JSON")
    _add_dataset_args(sp)
    _add_train_args(sp)
    sp.add_argument("--out", required=True, help="ranking JSON output path")
    sp.set_defaults(func=cmd_select)

    sp = sub.add_parser("baseline-rsr", help="linear self-representation baseline ranking")
    _add_dataset_args(sp)
    sp.add_argument("--lam", type=float, default=0.1, help="row-sparsity penalty weight")
    sp.add_argument("--iters", type=int, default=1000)
    sp.add_argument("--tol", type=float, default=1e-6)
    _add_step_args(sp)
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--out", required=True, help="ranking JSON output path")
    sp.set_defaults(func=cmd_baseline_rsr)

    sp = sub.add_parser("evaluate", help="ranking + labeled dataset -> accuracy report CSV")
    _add_dataset_args(sp)
    sp.add_argument("--ranking", required=True, help="ranking JSON produced by select/baseline-rsr")
    sp.add_argument("--task", choices=["clustering", "classification"], default="clustering")
    sp.add_argument("--s", type=_int_list, default=[50, 100, 150, 200, 250, 300],
                    help="comma-separated selection sizes")
    sp.add_argument("--restarts", type=int, default=20)
    sp.add_argument("--master-seed", type=int, default=0)
    sp.add_argument("--protocol", choices=["leave_one_out", "split"], default="leave_one_out")
    sp.add_argument("--split-ratio", type=float, default=0.5)
    sp.add_argument("--out", required=True, help="report CSV output path")
    sp.set_defaults(func=cmd_evaluate)

    sp = sub.add_parser("reconstruct", help="train, keep top-s features, write the reconstruction")
    _add_dataset_args(sp)
    _add_train_args(sp)
    sp.add_argument("--s", type=int, required=True, help="number of features to keep")
    sp.add_argument("--impute", choices=["zero", "feature_mean"], default="feature_mean")
    sp.add_argument("--random-subsets", type=int, default=0,
                    help="also report RMSE of this many random s-subsets")
    sp.add_argument("--subset-seed", type=int, default=0)
    sp.add_argument("--out", required=True, help="reconstructed matrix CSV path")
    sp.add_argument("--weight-map", default=None, help="per-feature score CSV path")
    sp.set_defaults(func=cmd_reconstruct)

    sp = sub.add_parser("gradcheck", help="verify analytic gradients against finite differences")
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--tol", type=float, default=1e-5)
    sp.add_argument("--num-seeds", type=int, default=5)
    sp.add_argument("--samples", type=int, default=20)
    sp.add_argument("--features", type=int, default=15)
    sp.add_argument("--hidden", type=int, default=7)
    sp.add_argument("--eps", type=float, default=1e-5)
    sp.set_defaults(func=cmd_gradcheck)

    sp = sub.add_parser("synth", help="generate a synthetic dataset CSV with known sources")
    sp.add_argument("--samples", type=int, required=True)
    sp.add_argument("--sources", type=int, required=True)
    sp.add_argument("--redundant", type=int, default=0)
    sp.add_argument("--noise", type=int, default=0)
    sp.add_argument("--nonlinearity", choices=["square", "product", "sigmoid_mix"], default="square")
    sp.add_argument("--noise-std", type=float, default=0.0)
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--label-rule", choices=["none", "source-sign"], default="none",
                    help="source-sign appends a binary label column derived from the sources")
    sp.add_argument("--out", required=True, help="dataset CSV path")
    sp.add_argument("--sources-out", default=None, help="ground-truth JSON path")
    sp.set_defaults(func=cmd_synth)

    sp = sub.add_parser("sweep", help="grid over alpha/beta/hidden, best report per selection size")
    _add_dataset_args(sp)
    sp.add_argument("--alphas", type=_float_list, default=[0.001, 0.01, 0.1, 1.0, 10.0, 100.0, 1000.0])
    sp.add_argument("--betas", type=_float_list, default=[0.001, 0.01, 0.1, 1.0, 10.0, 100.0, 1000.0])
    sp.add_argument("--hiddens", type=_int_list, default=[128, 256, 512, 1024])
    sp.add_argument("--s", type=_int_list, default=[50, 100, 150, 200, 250, 300])
    sp.add_argument("--task", choices=["clustering", "classification"], default="clustering")
    sp.add_argument("--restarts", type=int, default=20)
    sp.add_argument("--master-seed", type=int, default=0)
    sp.add_argument("--protocol", choices=["leave_one_out", "split"], default="leave_one_out")
    sp.add_argument("--split-ratio", type=float, default=0.5)
    sp.add_argument("--epochs", type=int, default=1000)
    sp.add_argument("--tol", type=float, default=1e-6)
    _add_step_args(sp)
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--init-scale", type=float, default=1.0)
    sp.add_argument("--out", required=True, help="best-per-s report CSV path")
    sp.add_argument("--all-out", default=None, help="optional CSV with every grid row")
    sp.set_defaults(func=cmd_sweep)

    sp = sub.add_parser("serve", help="run the HTTP service")
    sp.add_argument("--host", default="127.0.0.1")
    sp.add_argument("--port", type=int, default=8000)
    sp.set_defaults(func=cmd_serve)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args) or 0
    except (CliError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
