"""Command-line entry point.

Subcommands cover the full pipeline: ``generate`` produces benchmark
series, ``fit`` trains a model on a series CSV, ``predict`` scores a model
against a series, ``bench`` runs the cross-validated comparison plus timing
sweep, and ``tune`` searches the alpha grid.  Configuration is a single
JSON document per command; every command validates fully before writing
anything, echoes the effective configuration next to its output, and maps
errors to exit code 2 (configuration) or 3 (runtime/data).
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import sys
import time
from pathlib import Path

import numpy as np

from . import baselines, evalbench, fwf_core, model_io
from .errors import DataError, FilterError, ParameterError
from .signal_gen import (
    Series,
    embed,
    embed_pair,
    read_series_csv,
    standardize,
    write_series_csv,
)

__all__ = ["main"]

_EPILOG = (
    "Environment: FWF_THREADS caps worker parallelism for neighbor queries "
    "(0 = one worker per core; default 1)."
)


def _load_json(path) -> dict:
    try:
        with open(path) as f:
            text = f.read()
    except OSError as exc:
        raise DataError(f"cannot read config file {path}: {exc}") from exc
    try:
        cfg = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParameterError(f"config file {path} is not valid JSON: {exc}") from exc
    if not isinstance(cfg, dict):
        raise ParameterError(f"config file {path} must hold a JSON object")
    return cfg


def _echo_config(cfg: dict, out_path) -> None:
    """Write the fully resolved config next to the command's output."""
    out_path = Path(out_path)
    if out_path.suffix:
        echo = out_path.with_suffix("").as_posix() + ".config.json"
    else:
        echo = (out_path / "config.json").as_posix()
    with open(echo, "w") as f:
        json.dump(cfg, f, indent=2, sort_keys=True)
        f.write("\n")


def _read_series(path) -> Series:
    try:
        return read_series_csv(path)
    except OSError as exc:
        raise DataError(f"cannot read series file {path}: {exc}") from exc


def _embed_from(args, cfg: dict, L: int, horizon: int):
    s = _read_series(args.series)
    desired = _read_series(args.desired) if getattr(args, "desired", None) else None
    if cfg.get("standardize", True):
        s = standardize(s)
        if desired is not None:
            desired = standardize(desired)
    if desired is not None:
        return embed_pair(s, desired, L, horizon)
    return embed(s, L, horizon)


def cmd_generate(args) -> int:
    cfg = _load_json(args.config)
    dataset = cfg.get("dataset")
    if dataset not in evalbench.DATASETS:
        raise ParameterError(
            f"config must set dataset to one of {', '.join(evalbench.DATASETS)}"
        )
    n = cfg.get("n")
    if not (isinstance(n, int) and n >= 1):
        raise ParameterError("config must set n to a positive integer")
    seed = args.seed if args.seed is not None else int(cfg.get("seed", 0))
    params = {
        k: v for k, v in cfg.items() if k not in ("dataset", "n", "seed")
    }
    out = evalbench.make_series(dataset, params, seed, n)
    if dataset == "fir":
        x, z = out
        desired_path = Path(args.out).with_suffix("").as_posix() + ".desired.csv"
        write_series_csv(x, args.out)
        write_series_csv(z, desired_path)
        print(f"wrote {len(x)} samples to {args.out} (input) and {desired_path} (desired)")
        values = x.values
    else:
        write_series_csv(out, args.out)
        print(f"wrote {len(out)} samples to {args.out}")
        values = out.values
    print(
        "mean %.6g  std %.6g  min %.6g  max %.6g"
        % (values.mean(), values.std(), values.min(), values.max())
    )
    _echo_config({**cfg, "dataset": dataset, "n": n, "seed": seed}, args.out)
    return 0


_FIT_KEYS = ("method", "order_L", "horizon", "standardize", "seed")


def cmd_fit(args) -> int:
    cfg = _load_json(args.config)
    method = cfg.get("method")
    if method not in evalbench.METHODS:
        raise ParameterError(
            f"config must set method to one of {', '.join(evalbench.METHODS)}"
        )
    L = int(cfg.get("order_L", 10))
    horizon = int(cfg.get("horizon", 1))
    hyper = {k: v for k, v in cfg.items() if k not in _FIT_KEYS}
    fit_fn, _ = evalbench._make_fitter(method, hyper, L, horizon)
    data = _embed_from(args, cfg, L, horizon)
    tic = time.perf_counter()
    model = fit_fn(data)
    fit_seconds = time.perf_counter() - tic
    train_mse = _training_mse(model, data)
    model_io.save_model(model, args.out)
    print(f"fitted {method} on {len(data)} windows in {fit_seconds:.3f} s")
    print("training MSE %.17g" % train_mse)
    if isinstance(model, baselines.WienerModel):
        print("weights", " ".join("%.17g" % w for w in model.weights))
    _echo_config(
        {**cfg, "method": method, "order_L": L, "horizon": horizon,
         "standardize": cfg.get("standardize", True)},
        args.out,
    )
    return 0


def _training_mse(model, data) -> float:
    if isinstance(model, fwf_core.FwfModel):
        return model.train_mse
    pred = _predict_with(model, data.windows)
    return evalbench.mse(pred, data.targets)


def _predict_with(model, windows, k_neighbors=None):
    if isinstance(model, fwf_core.FwfModel):
        return fwf_core.predict_batch(model, windows, k_neighbors)
    if isinstance(model, baselines.WienerModel):
        return baselines.wiener_predict(model, windows)
    return baselines.kaf_predict(model, windows)


def _model_order(model) -> int:
    if isinstance(model, fwf_core.FwfModel):
        return model.config.order_L
    if isinstance(model, baselines.WienerModel):
        return model.order_L
    return model.centers.shape[1]


def cmd_predict(args) -> int:
    cfg = _load_json(args.config) if args.config else {}
    model = model_io.load_model(args.model)
    model_L = _model_order(model)
    L = int(cfg.get("order_L", model_L))
    if L != model_L:
        raise ParameterError(
            f"config order_L={L} does not match model order_L={model_L}"
        )
    if isinstance(model, fwf_core.FwfModel):
        horizon = int(cfg.get("horizon", model.config.horizon))
    else:
        horizon = int(cfg.get("horizon", 1))
    data = _embed_from(args, cfg, L, horizon)
    k = cfg.get("k_neighbors")
    pred = _predict_with(model, data.windows, k)
    pred = np.atleast_1d(np.asarray(pred, dtype=float))
    err = (pred - data.targets) ** 2
    with open(args.out, "w") as f:
        f.write("index,prediction,target,squared_error\n")
        for i in range(len(data)):
            f.write(
                "%d,%.17g,%.17g,%.17g\n" % (i, pred[i], data.targets[i], err[i])
            )
    total = evalbench.mse(pred, data.targets)
    print("test MSE %.17g over %d windows" % (total, len(data)))
    _echo_config({**cfg, "order_L": L, "horizon": horizon}, args.out)
    return 0


def cmd_bench(args) -> int:
    raw = _load_json(args.config)
    timing_cfg = raw.pop("timing", None)
    known = {f.name for f in dataclasses.fields(evalbench.ExperimentConfig)}
    unknown = set(raw) - known
    if unknown:
        raise ParameterError(f"unknown bench config fields: {sorted(unknown)}")
    if "dataset" not in raw:
        raise ParameterError("bench config must set dataset")
    if args.seed is not None:
        raw["seed"] = args.seed
    if "methods" in raw:
        raw["methods"] = tuple(raw["methods"])
    if "train_sizes" in raw:
        raw["train_sizes"] = tuple(raw["train_sizes"])
    cfg = evalbench.ExperimentConfig(**raw)
    if timing_cfg is None:
        timing_cfg = {}
    timing_method = timing_cfg.get("method", cfg.methods[0]["name"])
    timing_sizes = tuple(timing_cfg.get("sizes", cfg.train_sizes))
    timing_queries = int(timing_cfg.get("queries", 1000))
    timing_repeats = int(timing_cfg.get("repeats", 5))
    timing_hyper = next(
        (dict(m) for m in cfg.methods if m["name"] == timing_method), {}
    )
    timing_hyper.pop("name", None)

    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    table = evalbench.run_experiment(cfg)
    evalbench.write_results_csv(table, out_dir / "results.csv")
    summary = evalbench.summarize(table)
    timing = evalbench.timing_scaling(
        timing_method,
        timing_sizes,
        repeats=timing_repeats,
        queries=timing_queries,
        seed=cfg.seed,
        hyper=timing_hyper,
    )
    evalbench.write_timing_csv(timing, out_dir / "timing.csv")
    summary["timing"] = {
        "method": timing.method,
        "sizes": list(timing.sizes),
        "fit_slope": timing.fit_slope(),
        "predict_slope": timing.predict_slope(),
    }
    evalbench.write_summary_json(summary, out_dir / "summary.json")
    effective = dataclasses.asdict(cfg)
    effective["methods"] = list(cfg.methods)
    effective["train_sizes"] = list(cfg.train_sizes)
    effective["timing"] = {
        "method": timing_method,
        "sizes": list(timing_sizes),
        "queries": timing_queries,
        "repeats": timing_repeats,
    }
    _echo_config(effective, out_dir)
    print(
        f"wrote {len(table.rows)} result rows "
        f"({len(table.errors)} errored cells) to {out_dir / 'results.csv'}"
    )
    for entry in summary["results"]:
        print(
            "%s N=%d mean MSE %.6g (std %.6g)"
            % (entry["method"], entry["n_train"], entry["mean_mse"], entry["std_mse"])
        )
    return 0


def cmd_tune(args) -> int:
    cfg = _load_json(args.config)
    L = int(cfg.get("order_L", 10))
    horizon = int(cfg.get("horizon", 1))
    grid = cfg.get("grid")
    hyper = {
        k: v
        for k, v in cfg.items()
        if k not in ("order_L", "horizon", "standardize", "grid", "seed")
    }
    try:
        fwf_cfg = fwf_core.FwfConfig(order_L=L, horizon=horizon, **hyper)
    except TypeError as exc:
        raise ParameterError(f"invalid tuning parameters: {exc}") from exc
    data = _embed_from(args, cfg, L, horizon)
    alpha = fwf_core.tune_alpha(
        data, fwf_cfg, None if grid is None else np.asarray(grid, dtype=float)
    )
    print("alpha %.17g" % alpha)
    if args.out:
        with open(args.out, "w") as f:
            json.dump({"alpha": alpha}, f)
            f.write("\n")
        _echo_config({**cfg, "order_L": L, "horizon": horizon}, args.out)
    return 0


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="fwf",
        description="Correntropy-domain Wiener filtering toolkit",
        epilog=_EPILOG,
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, out_required=True):
        p.add_argument("--config", help="JSON configuration file")
        p.add_argument("--out", required=out_required, help="output path")
        p.add_argument("--seed", type=int, help="override the config seed")

    p = sub.add_parser("generate", help="produce a benchmark series CSV")
    common(p)
    p.set_defaults(handler=cmd_generate, config_required=True)

    p = sub.add_parser("fit", help="train a model on a series CSV")
    common(p)
    p.add_argument("--series", required=True, help="training series CSV")
    p.add_argument("--desired", help="optional desired-signal series CSV")
    p.set_defaults(handler=cmd_fit, config_required=True)

    p = sub.add_parser("predict", help="score a model against a series CSV")
    common(p)
    p.add_argument("--model", required=True, help="fitted model file (.npz)")
    p.add_argument("--series", required=True, help="evaluation series CSV")
    p.add_argument("--desired", help="optional desired-signal series CSV")
    p.set_defaults(handler=cmd_predict, config_required=False)

    p = sub.add_parser("bench", help="run the cross-validated benchmark")
    common(p)
    p.set_defaults(handler=cmd_bench, config_required=True)

    p = sub.add_parser("tune", help="search the alpha grid on a series")
    common(p, out_required=False)
    p.add_argument("--series", required=True, help="training series CSV")
    p.add_argument("--desired", help="optional desired-signal series CSV")
    p.set_defaults(handler=cmd_tune, config_required=True)
    return parser


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    if args.config_required and not args.config:
        print("error: --config is required for this command", file=sys.stderr)
        return 2
    try:
        return args.handler(args)
    except FilterError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.exit_code
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
