"""Cross-validated benchmark harness.

Runs method comparisons over chaotic-series prediction tasks with
contiguous-block cross validation, collects MSE and wall-time per
(method, train size, fold) cell, and measures how fit and per-query predict
times scale with training-set size.
"""

from __future__ import annotations

import json
import time
from dataclasses import dataclass, field

import numpy as np

from . import baselines, fwf_core
from .errors import ParameterError
from .signal_gen import (
    Dataset,
    LorenzParams,
    MGParams,
    Series,
    embed,
    embed_pair,
    gen_fir_process,
    gen_lorenz,
    gen_mackey_glass,
    standardize,
)

__all__ = [
    "ExperimentConfig",
    "ResultRow",
    "ResultTable",
    "TimingTable",
    "DATASETS",
    "METHODS",
    "kfold",
    "mse",
    "make_series",
    "make_dataset",
    "run_experiment",
    "timing_scaling",
    "write_results_csv",
    "write_timing_csv",
    "summarize",
    "write_summary_json",
]

DATASETS = ("mackey_glass", "lorenz", "fir")
METHODS = ("fwf", "wiener", "klms", "krls", "krr")

RESULTS_HEADER = "method,n_train,fold,mse,fit_seconds,predict_us_per_query"
TIMING_HEADER = "method,n_train,fit_seconds,predict_us_per_query"


@dataclass(frozen=True)
class ExperimentConfig:
    """Benchmark definition: data source, embedding, sizes, methods.

    ``generator`` holds dataset-specific parameters (missing fields use the
    generator defaults); each entry of ``methods`` is a mapping with a
    ``name`` key plus that method's hyperparameters.
    """

    dataset: str
    generator: dict = field(default_factory=dict)
    order_L: int = 10
    horizon: int = 1
    train_sizes: tuple[int, ...] = (500, 1000, 1500, 2000)
    folds: int = 5
    test_size: int = 200
    methods: tuple[dict, ...] = (
        {"name": "fwf"},
        {"name": "wiener"},
    )
    seed: int = 0

    def __post_init__(self):
        if self.dataset not in DATASETS:
            raise ParameterError(
                f"unknown dataset {self.dataset!r}; valid: {', '.join(DATASETS)}"
            )
        sizes = tuple(int(n) for n in self.train_sizes)
        if len(sizes) == 0 or any(n < 1 for n in sizes):
            raise ParameterError("train_sizes must be positive")
        if any(b <= a for a, b in zip(sizes, sizes[1:])):
            raise ParameterError("train_sizes must be strictly ascending")
        if self.folds < 2:
            raise ParameterError("folds must be >= 2")
        if self.test_size < 1:
            raise ParameterError("test_size must be >= 1")
        methods = tuple(dict(m) for m in self.methods)
        if len(methods) == 0:
            raise ParameterError("methods must be non-empty")
        for m in methods:
            name = m.get("name")
            if name not in METHODS:
                raise ParameterError(
                    f"unknown method {name!r}; valid: {', '.join(METHODS)}"
                )
        object.__setattr__(self, "train_sizes", sizes)
        object.__setattr__(self, "methods", methods)


@dataclass(frozen=True)
class ResultRow:
    method: str
    n_train: int
    fold: int
    mse: float
    fit_seconds: float
    predict_seconds_per_query: float

    def __post_init__(self):
        if not (np.isfinite(self.mse) and self.mse >= 0):
            raise ParameterError("result rows require finite non-negative mse")


@dataclass
class ResultTable:
    """Successful cells plus a separate record of failed ones.

    Failed (method, size, fold) cells never enter ``rows`` so aggregate
    statistics cannot be contaminated; they are preserved in ``errors`` as
    (method, n_train, fold, message) tuples.
    """

    rows: list[ResultRow] = field(default_factory=list)
    errors: list[tuple[str, int, int, str]] = field(default_factory=list)


@dataclass
class TimingTable:
    """Median wall times per (method, size) with log-log scaling slopes."""

    method: str
    sizes: tuple[int, ...]
    fit_seconds: tuple[float, ...]
    predict_seconds_per_query: tuple[float, ...]

    def _slope(self, times) -> float:
        return float(
            np.polyfit(np.log(np.asarray(self.sizes, float)), np.log(times), 1)[0]
        )

    def fit_slope(self) -> float:
        return self._slope(self.fit_seconds)

    def predict_slope(self) -> float:
        return self._slope(self.predict_seconds_per_query)


def kfold(data: Dataset, folds: int, test_size: int, seed=None):
    """Contiguous-block splits for time-series data.

    The test blocks are the last ``folds * test_size`` rows, partitioned in
    order; all folds share one training range at the start of the series,
    separated from the first test block by a gap of L + horizon rows so no
    training window overlaps test samples.  ``seed`` is accepted for
    interface uniformity but unused: the splits are deterministic.
    """
    if folds < 2:
        raise ParameterError("folds must be >= 2")
    if test_size < 1:
        raise ParameterError("test_size must be >= 1")
    n = len(data)
    t0 = n - folds * test_size
    if t0 < 0:
        raise ParameterError(
            f"{n} rows cannot hold {folds} test blocks of {test_size}"
        )
    gap = data.order_L + data.horizon
    train = np.arange(0, max(t0 - gap, 0))
    splits = []
    for f in range(folds):
        test = np.arange(t0 + f * test_size, t0 + (f + 1) * test_size)
        splits.append((train, test))
    return splits


def mse(pred, target) -> float:
    """Mean squared difference between two equal-length vectors."""
    p = np.asarray(pred, dtype=float)
    t = np.asarray(target, dtype=float)
    if p.shape != t.shape or p.ndim != 1 or p.size < 1:
        raise ParameterError("mse requires two equal-length non-empty vectors")
    d = p - t
    return float(np.mean(d * d))


def make_series(dataset: str, params: dict, seed: int, n: int):
    """Instantiate a generator config and produce ``n`` samples.

    Returns a Series for the chaotic systems and an (input, desired) pair
    for the FIR process.
    """
    params = dict(params)
    params.pop("n", None)
    if dataset == "mackey_glass":
        warmup = int(params.pop("warmup", 3000))
        init = float(params.pop("init", 1.2))
        return gen_mackey_glass(MGParams(**params), n, warmup=warmup, init=init)
    if dataset == "lorenz":
        warmup = int(params.pop("warmup", 1000))
        init = tuple(params.pop("init", (1.0, 1.0, 1.0)))
        return gen_lorenz(LorenzParams(**params), n, warmup=warmup, init=init)
    if dataset == "fir":
        coeffs = params.pop("coeffs", (0.3, -0.2, 0.1))
        noise_seed = int(params.pop("noise_seed", seed))
        if params:
            raise ParameterError(f"unknown fir parameters: {sorted(params)}")
        return gen_fir_process(coeffs, n, noise_seed)
    raise ParameterError(f"unknown dataset {dataset!r}")


def make_dataset(cfg: ExperimentConfig, n_rows: int) -> Dataset:
    """Generate, normalize, and embed the configured series.

    The chaotic series are standardized; the FIR pair is kept on its
    natural scale (zero-mean by construction) so recovered weights remain
    comparable to the generating coefficients.
    """
    n = cfg.order_L - 1 + cfg.horizon + n_rows
    n = int(cfg.generator.get("n", n))
    out = make_series(cfg.dataset, cfg.generator, cfg.seed, n)
    if cfg.dataset == "fir":
        x, z = out
        return embed_pair(x, z, cfg.order_L, cfg.horizon)
    return embed(standardize(out), cfg.order_L, cfg.horizon)


def _subset(data: Dataset, n_rows: int) -> Dataset:
    """First ``n_rows`` training rows with their matching source prefix."""
    if not (1 <= n_rows <= len(data)):
        raise ParameterError(f"subset size {n_rows} outside 1..{len(data)}")
    m = n_rows + data.order_L - 1
    return Dataset(
        windows=data.windows[:n_rows],
        targets=data.targets[:n_rows],
        order_L=data.order_L,
        horizon=data.horizon,
        source_x=data.source_x[:m],
        source_z=data.source_z[:m],
    )


def _make_fitter(name: str, hyper: dict, order_L: int, horizon: int):
    """Returns (fit, predict) closures: fit(Dataset) -> model,
    predict(model, B x L) -> vector."""
    hyper = dict(hyper)
    hyper.pop("name", None)
    if name == "fwf":
        try:
            fwf_cfg = fwf_core.FwfConfig(
                order_L=order_L, horizon=horizon, **hyper
            )
        except TypeError as exc:
            raise ParameterError(f"invalid fwf parameters: {exc}") from exc
        return (
            lambda d: fwf_core.fit(d, fwf_cfg),
            lambda m, X: fwf_core.predict_batch(m, X),
        )
    if name == "wiener":
        ridge = hyper.pop("ridge", "auto")
        if hyper:
            raise ParameterError(f"unknown wiener parameters: {sorted(hyper)}")
        return (
            lambda d: baselines.wiener_fit(d, order_L, ridge),
            baselines.wiener_predict,
        )
    if name == "klms":
        eta = float(hyper.pop("eta", 0.5))
        sigma = hyper.pop("sigma", None)
        if hyper:
            raise ParameterError(f"unknown klms parameters: {sorted(hyper)}")
        return (
            lambda d: baselines.klms_fit(d, eta=eta, sigma=sigma),
            baselines.kaf_predict,
        )
    if name in ("krls", "krr"):
        lam = float(hyper.pop("lam", 1e-6))
        sigma = hyper.pop("sigma", None)
        if hyper:
            raise ParameterError(f"unknown {name} parameters: {sorted(hyper)}")
        fit_fn = baselines.krls_fit if name == "krls" else baselines.krr_fit
        return (
            lambda d: fit_fn(d, lam=lam, sigma=sigma),
            baselines.kaf_predict,
        )
    raise ParameterError(f"unknown method {name!r}; valid: {', '.join(METHODS)}")


def run_experiment(cfg: ExperimentConfig) -> ResultTable:
    """Fit every configured method at every training size, score per fold.

    Each method is fitted once per training size on the first N training
    rows and evaluated on every fold's test block.  A failing cell is
    recorded in the error list and the run continues.
    """
    gap = cfg.order_L + cfg.horizon
    need = max(cfg.train_sizes) + gap + cfg.folds * cfg.test_size
    data = make_dataset(cfg, need)
    splits = kfold(data, cfg.folds, cfg.test_size, cfg.seed)
    if len(splits[0][0]) < max(cfg.train_sizes):
        raise ParameterError(
            f"training range has {len(splits[0][0])} rows; "
            f"largest requested size is {max(cfg.train_sizes)}"
        )
    table = ResultTable()
    for spec in cfg.methods:
        name = spec["name"]
        fit_fn, predict_fn = _make_fitter(name, spec, cfg.order_L, cfg.horizon)
        for n_train in cfg.train_sizes:
            sub = _subset(data, n_train)
            try:
                tic = time.perf_counter()
                model = fit_fn(sub)
                fit_seconds = time.perf_counter() - tic
            except Exception as exc:  # record and move on
                for f in range(cfg.folds):
                    table.errors.append((name, n_train, f, str(exc)))
                continue
            for f, (_, test_idx) in enumerate(splits):
                try:
                    tic = time.perf_counter()
                    pred = predict_fn(model, data.windows[test_idx])
                    per_query = (time.perf_counter() - tic) / len(test_idx)
                    table.rows.append(
                        ResultRow(
                            method=name,
                            n_train=n_train,
                            fold=f,
                            mse=mse(pred, data.targets[test_idx]),
                            fit_seconds=fit_seconds,
                            predict_seconds_per_query=per_query,
                        )
                    )
                except Exception as exc:
                    table.errors.append((name, n_train, f, str(exc)))
    return table


def timing_scaling(
    method: str,
    sizes,
    repeats: int = 5,
    queries: int = 2000,
    seed: int = 0,
    hyper: dict | None = None,
) -> TimingTable:
    """Median fit and per-query predict wall times across training sizes.

    Data come from one Mackey-Glass run large enough for the biggest size
    plus a held-out query block; per-query time divides a batched predict
    over ``queries`` windows.  Slopes are least-squares fits on log-log
    points, so ``sizes`` needs at least 3 values.
    """
    sizes = tuple(int(n) for n in sizes)
    if len(sizes) < 3 or any(b <= a for a, b in zip(sizes, sizes[1:])):
        raise ParameterError("sizes must be >= 3 ascending values")
    if repeats < 1:
        raise ParameterError("repeats must be >= 1")
    if queries < 1:
        raise ParameterError("queries must be >= 1")
    hyper = dict(hyper or {})
    if method == "fwf" and "alpha" not in hyper:
        # fixed alpha: grid search would only rescale the constant factor
        hyper["alpha"] = 0.5
    cfg = ExperimentConfig(
        dataset="mackey_glass",
        generator={"downsample": 1},
        order_L=10,
        horizon=1,
        train_sizes=(1, max(sizes[-1], queries)),
        methods=({"name": method, **hyper},),
        seed=seed,
    )
    data = make_dataset(cfg, sizes[-1] + queries)
    fit_fn, predict_fn = _make_fitter(method, cfg.methods[0], cfg.order_L, cfg.horizon)
    query_windows = data.windows[len(data) - queries :]
    fit_med, pred_med = [], []
    for n in sizes:
        sub = _subset(data, n)
        fit_times, pred_times = [], []
        model = None
        for _ in range(repeats):
            tic = time.perf_counter()
            model = fit_fn(sub)
            fit_times.append(time.perf_counter() - tic)
        for _ in range(repeats):
            tic = time.perf_counter()
            predict_fn(model, query_windows)
            pred_times.append(time.perf_counter() - tic)
        fit_med.append(float(np.median(fit_times)))
        pred_med.append(float(np.median(pred_times)) / queries)
    return TimingTable(
        method=method,
        sizes=sizes,
        fit_seconds=tuple(fit_med),
        predict_seconds_per_query=tuple(pred_med),
    )


def write_results_csv(table: ResultTable, path) -> None:
    """Emit result rows (errors excluded) in the documented CSV schema."""
    with open(path, "w") as f:
        f.write(RESULTS_HEADER + "\n")
        for r in table.rows:
            f.write(
                "%s,%d,%d,%.17g,%.17g,%.17g\n"
                % (
                    r.method,
                    r.n_train,
                    r.fold,
                    r.mse,
                    r.fit_seconds,
                    r.predict_seconds_per_query * 1e6,
                )
            )


def write_timing_csv(table: TimingTable, path) -> None:
    with open(path, "w") as f:
        f.write(TIMING_HEADER + "\n")
        for n, ft, pt in zip(
            table.sizes, table.fit_seconds, table.predict_seconds_per_query
        ):
            f.write("%s,%d,%.17g,%.17g\n" % (table.method, n, ft, pt * 1e6))


def summarize(table: ResultTable) -> dict:
    """Per-(method, size) mean and standard deviation of fold MSEs."""
    cells: dict[tuple[str, int], list[float]] = {}
    for r in table.rows:
        cells.setdefault((r.method, r.n_train), []).append(r.mse)
    results = [
        {
            "method": method,
            "n_train": n,
            "mean_mse": float(np.mean(v)),
            "std_mse": float(np.std(v)),
            "folds": len(v),
        }
        for (method, n), v in sorted(cells.items())
    ]
    return {
        "results": results,
        "errors": [
            {"method": m, "n_train": n, "fold": f, "message": msg}
            for (m, n, f, msg) in table.errors
        ],
    }


def write_summary_json(summary: dict, path) -> None:
    with open(path, "w") as f:
        json.dump(summary, f, indent=2, sort_keys=True)
        f.write("\n")
