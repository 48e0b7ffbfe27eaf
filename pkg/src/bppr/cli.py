"""Command-line front end.

Subcommands: fit, predict, diagnose, ale, simulate, score. All data
interchange is CSV with a header row. Reports go to stdout as stable
key=value lines; prose goes to stderr. Errors exit with a one-line
machine-parseable message and a class-specific code: 2 for input
problems, 3 for schema violations, 4 for numerical failures.
"""

from __future__ import annotations

import argparse
import os
import sys
import time

import numpy as np
import pandas as pd

from .data import prepare_dataset
from .diagnostics import ale_curve, effective_sample_size, interval_coverage, split_rhat
from .errors import BpprError, InputError, NumericError, SchemaError
from .model import Hyperparams
from .multivariate import MultivariateChain, fit_multivariate, predict_multivariate
from .sampler import predict, run_chain
from .serialize import load_model, save_model
from .testbed import SCENARIOS, simulate

EXIT_CODES = {InputError: 2, SchemaError: 3, NumericError: 4}


def _read_csv(path: str) -> pd.DataFrame:
    try:
        return pd.read_csv(path)
    except FileNotFoundError as exc:
        raise InputError(f"cannot read '{path}': file not found") from exc
    except (pd.errors.ParserError, pd.errors.EmptyDataError, OSError) as exc:
        raise InputError(f"cannot parse '{path}': {exc}") from exc


def _load_model(path: str):
    try:
        return load_model(path)
    except FileNotFoundError as exc:
        raise InputError(f"cannot read '{path}': file not found") from exc
    except OSError as exc:
        raise InputError(f"cannot read '{path}': {exc}") from exc


def _write_csv(frame: pd.DataFrame, path) -> None:
    if path is None or path == "-":
        frame.to_csv(sys.stdout, index=False)
    else:
        frame.to_csv(path, index=False)


def _report(**kv) -> None:
    for key, value in kv.items():
        print(f"{key}={value}")


def _split_list(text):
    return [item.strip() for item in text.split(",") if item.strip()] if text else []


def _add_hyper_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--iters", type=int, default=10000,
                        help="total sampler iterations")
    parser.add_argument("--burn", type=int, default=9000,
                        help="iterations discarded before retention")
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--n-ridge-mean", type=float, default=None,
                        help="Poisson prior mean for the ridge count")
    parser.add_argument("--n-basis", type=int, default=None,
                        help="spline basis functions per ridge")
    parser.add_argument("--n-act-max", type=int, default=None,
                        help="max active features per ridge")
    parser.add_argument("--prob-relu", type=float, default=None,
                        help="prior probability of a partly-zero ridge")
    parser.add_argument("--q-upper", type=float, default=None,
                        help="projection quantile bounding the initial knot")
    parser.add_argument("--w-n-act0", type=float, default=None,
                        help="baseline weight for size proposals")
    parser.add_argument("--w-feat0", type=float, default=None,
                        help="baseline weight for feature proposals")
    parser.add_argument("--kappa-prop", type=float, default=None,
                        help="concentration of direction-change proposals")


def _hyper_from_args(args) -> Hyperparams:
    overrides = {
        "n_ridge_mean": args.n_ridge_mean,
        "n_basis": args.n_basis,
        "n_act_max": args.n_act_max,
        "prob_relu": args.prob_relu,
        "q_upper": args.q_upper,
        "w_n_act0": args.w_n_act0,
        "w_feat0": args.w_feat0,
        "kappa_prop": args.kappa_prop,
    }
    kwargs = {k: v for k, v in overrides.items() if v is not None}
    try:
        return Hyperparams(n_mcmc=args.iters, n_burn=args.burn,
                           seed=args.seed, **kwargs)
    except ValueError as exc:
        raise InputError(str(exc)) from exc


def _default_threads(flag_value):
    if flag_value is not None:
        return flag_value
    env = os.environ.get("BPPR_THREADS")
    if env is not None:
        try:
            return int(env)
        except ValueError as exc:
            raise InputError(f"BPPR_THREADS is not an integer: '{env}'") from exc
    return os.cpu_count() or 1


def _m_histogram(chain) -> str:
    counts = {}
    for state in chain.states:
        counts[state.n_ridge] = counts.get(state.n_ridge, 0) + 1
    return ";".join(f"{m}:{counts[m]}" for m in sorted(counts))


def _sigma_report(chain, suffix: str = "") -> dict:
    kept = chain.sigma_trace[chain.hyper.n_burn:]
    return {
        f"sigma_mean{suffix}": f"{kept.mean():.6g}",
        f"m_hist{suffix}": _m_histogram(chain),
        f"ess_sigma{suffix}": f"{effective_sample_size(kept):.6g}",
        f"split_rhat_sigma{suffix}": f"{split_rhat(kept):.6g}",
    }


def _cmd_fit(args) -> int:
    frame = _read_csv(args.data)
    hyper = _hyper_from_args(args)
    categorical = _split_list(args.categorical)
    start = time.perf_counter()
    if args.multivariate:
        response_cols = _split_list(args.response_cols)
        if not response_cols:
            raise InputError("--multivariate requires --response-cols")
        if (args.components is None) == (args.var_threshold is None):
            raise InputError(
                "--multivariate requires exactly one of --components "
                "and --var-threshold"
            )
        missing = [c for c in response_cols if c not in frame.columns]
        if missing:
            raise SchemaError(f"missing response column '{missing[0]}'")
        y_mat = frame[response_cols].to_numpy(dtype=float)
        if not np.all(np.isfinite(y_mat)):
            raise InputError("response columns contain missing values")
        x_df = frame.drop(columns=response_cols)
        fit = fit_multivariate(
            x_df, y_mat, hyper, categorical=categorical,
            n_components=args.components,
            var_threshold=args.var_threshold,
            n_workers=_default_threads(args.threads),
        )
        save_model(fit, args.out)
        print(f"fitted {fit.n_components} response components", file=sys.stderr)
        report = {"components": fit.n_components}
        for d, chain in enumerate(fit.chains):
            report.update(_sigma_report(chain, suffix=f"_c{d}"))
    else:
        dataset = prepare_dataset(frame, response=args.response,
                                  categorical=categorical)
        chain = run_chain(dataset, hyper)
        save_model(chain, args.out)
        print(f"fitted model written to {args.out}", file=sys.stderr)
        report = _sigma_report(chain)
    report["wall_time_s"] = f"{time.perf_counter() - start:.3f}"
    _report(**report)
    return 0


def _prediction_frame(model, frame, args) -> pd.DataFrame:
    if isinstance(model, MultivariateChain):
        result = predict_multivariate(
            model, frame, level=args.level, seed=args.seed,
            include_noise=args.kind == "predictive",
        )
        out = {"row": np.arange(result.mean.shape[0])}
        for d in range(result.mean.shape[1]):
            out[f"mean_d{d}"] = result.mean[:, d]
            if args.kind != "mean":
                out[f"lower_d{d}"] = result.lower[:, d]
                out[f"upper_d{d}"] = result.upper[:, d]
        return pd.DataFrame(out)
    result = predict(model, frame, level=args.level, seed=args.seed)
    out = {"row": np.arange(result.mean.size), "mean": result.mean}
    if args.kind == "credible":
        out["lower"], out["upper"] = result.cred_lower, result.cred_upper
    elif args.kind == "predictive":
        out["lower"], out["upper"] = result.pred_lower, result.pred_upper
    return pd.DataFrame(out)


def _cmd_predict(args) -> int:
    model = _load_model(args.model)
    frame = _read_csv(args.data)
    _write_csv(_prediction_frame(model, frame, args), args.out)
    return 0


def _trace_rows(chain, label_suffix: str = ""):
    kept = {
        "sigma": chain.sigma_trace[chain.hyper.n_burn:],
        "tau": chain.tau_trace[chain.hyper.n_burn:],
        "n_ridge": chain.n_ridge_trace[chain.hyper.n_burn:].astype(float),
    }
    rows = []
    for name, trace in kept.items():
        constant = np.all(trace == trace[0])
        rows.append({
            "trace": name + label_suffix,
            "n": trace.size,
            "mean": trace.mean(),
            "sd": trace.std(ddof=1),
            "ess": np.nan if constant else effective_sample_size(trace),
            "split_rhat": np.nan if constant else split_rhat(trace),
        })
    return rows


def _cmd_diagnose(args) -> int:
    model = _load_model(args.model)
    rows = []
    if isinstance(model, MultivariateChain):
        for d, chain in enumerate(model.chains):
            rows.extend(_trace_rows(chain, label_suffix=f"_c{d}"))
    else:
        rows.extend(_trace_rows(model))
    _write_csv(pd.DataFrame(rows), args.out)
    return 0


def _cmd_ale(args) -> int:
    model = _load_model(args.model)
    if isinstance(model, MultivariateChain):
        raise InputError("ALE curves are defined for univariate models")
    frame = _read_csv(args.data)
    curve = ale_curve(model, frame, args.feature, n_bins=args.bins,
                      level=args.level)
    _write_csv(
        pd.DataFrame({
            "bin_center": curve.centers,
            "effect_mean": curve.mean,
            "effect_lower": curve.lower,
            "effect_upper": curve.upper,
            "count": curve.counts,
        }),
        args.out,
    )
    return 0


def _cmd_simulate(args) -> int:
    data = simulate(args.scenario, n_train=args.n, n_feat=args.p,
                    noise_sd=args.sigma, seed=args.seed, n_test=args.n_test)
    _write_csv(data.train_frame(), args.out_train)
    if args.out_test:
        _write_csv(data.test_frame(), args.out_test)
    print(
        f"simulated '{args.scenario}' with n={args.n}, p={args.p}",
        file=sys.stderr,
    )
    return 0


def _cmd_score(args) -> int:
    preds = _read_csv(args.predictions)
    truth = _read_csv(args.truth)
    if args.truth_col not in truth.columns:
        raise SchemaError(f"missing truth column '{args.truth_col}'")
    if "mean" not in preds.columns:
        raise SchemaError("predictions file lacks a 'mean' column")
    if len(preds) != len(truth):
        raise InputError("prediction and truth row counts differ")
    target = truth[args.truth_col].to_numpy(dtype=float)
    mean = preds["mean"].to_numpy(dtype=float)
    report = {
        "n": len(preds),
        "rmse": f"{np.sqrt(np.mean((mean - target) ** 2)):.6g}",
    }
    if "lower" in preds.columns and "upper" in preds.columns:
        report["coverage"] = f"{interval_coverage(preds['lower'], preds['upper'], target):.6g}"
    _report(**report)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="bppr",
        description="Bayesian projection pursuit regression",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    fit = sub.add_parser("fit", help="fit a model to a CSV dataset")
    fit.add_argument("--data", required=True, help="training CSV with header")
    fit.add_argument("--response", default="y", help="response column name")
    fit.add_argument("--categorical", default="",
                     help="comma-separated categorical columns")
    fit.add_argument("--out", required=True, help="model file to write")
    _add_hyper_flags(fit)
    fit.add_argument("--multivariate", action="store_true",
                     help="fit a multivariate response")
    fit.add_argument("--response-cols", default="",
                     help="comma-separated response columns (multivariate)")
    fit.add_argument("--components", type=int, default=None,
                     help="number of response components to retain")
    fit.add_argument("--var-threshold", type=float, default=None,
                     help="retained share of response variance")
    fit.add_argument("--threads", type=int, default=None,
                     help="worker processes for multivariate fits "
                          "(default: BPPR_THREADS or all cores)")
    fit.set_defaults(func=_cmd_fit)

    pred = sub.add_parser("predict", help="predict from a fitted model")
    pred.add_argument("--model", required=True)
    pred.add_argument("--data", required=True)
    pred.add_argument("--out", default=None, help="output CSV (default stdout)")
    pred.add_argument("--level", type=float, default=0.95)
    pred.add_argument("--kind", choices=("mean", "credible", "predictive"),
                      default="credible")
    pred.add_argument("--seed", type=int, default=0,
                      help="seed for predictive-interval noise")
    pred.set_defaults(func=_cmd_predict)

    diag = sub.add_parser("diagnose", help="trace diagnostics of a model file")
    diag.add_argument("--model", required=True)
    diag.add_argument("--out", default=None, help="output CSV (default stdout)")
    diag.set_defaults(func=_cmd_diagnose)

    ale = sub.add_parser("ale", help="accumulated-local-effects curve")
    ale.add_argument("--model", required=True)
    ale.add_argument("--data", required=True)
    ale.add_argument("--feature", required=True)
    ale.add_argument("--bins", type=int, default=10)
    ale.add_argument("--level", type=float, default=0.95)
    ale.add_argument("--out", default=None, help="output CSV (default stdout)")
    ale.set_defaults(func=_cmd_ale)

    sim = sub.add_parser("simulate", help="write a benchmark dataset")
    sim.add_argument("scenario", choices=sorted(SCENARIOS))
    sim.add_argument("--n", type=int, default=300, help="training rows")
    sim.add_argument("--p", type=int, default=6, help="feature count")
    sim.add_argument("--sigma", type=float, default=1.0, help="noise sd")
    sim.add_argument("--seed", type=int, default=0)
    sim.add_argument("--n-test", type=int, default=2000)
    sim.add_argument("--out-train", required=True)
    sim.add_argument("--out-test", default=None)
    sim.set_defaults(func=_cmd_simulate)

    score = sub.add_parser("score", help="RMSE/coverage of predictions")
    score.add_argument("--predictions", required=True,
                       help="CSV from `bppr predict`")
    score.add_argument("--truth", required=True, help="CSV holding the truth")
    score.add_argument("--truth-col", default="f_true")
    score.set_defaults(func=_cmd_score)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except BpprError as exc:
        code = 4
        for klass, value in EXIT_CODES.items():
            if isinstance(exc, klass):
                code = value
        print(f'error code={code} message="{exc}"', file=sys.stderr)
        return code


if __name__ == "__main__":
    sys.exit(main())
