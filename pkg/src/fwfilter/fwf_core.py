"""Correntropy-domain Wiener filtering with nearest-neighbor evaluation.

The filter solves a Toeplitz system built from correntropy lag profiles to
obtain a weight function over lags, then attaches to every training window
a "partner" vector — the point where the learned functional is evaluated so
its output approximates that window's target.  Test predictions evaluate
the functional at the partners of the K nearest training windows, average,
and subtract a bias estimated on the training set.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.linalg import cho_factor, cho_solve

from . import neighbors
from .errors import ConditioningError, DimensionError, ParameterError
from .kernel_stats import (
    KernelWidth,
    auto_ridge,
    autocorrentropy,
    crosscorrentropy,
    gaussian,
    gaussian_inverse,
    silverman_sigma,
    toeplitz,
)
from .signal_gen import Dataset

__all__ = [
    "FwfConfig",
    "FwfModel",
    "GVector",
    "DEFAULT_ALPHA_GRID",
    "G_FLOOR",
    "solve_weights",
    "evaluate_functional",
    "compute_g",
    "compute_partner",
    "fit",
    "predict",
    "predict_batch",
    "tune_alpha",
]

# default search grid for the output-scale hyperparameter
DEFAULT_ALPHA_GRID = np.logspace(np.log10(0.01), np.log10(2.0), 50)

# kernel values below this are clamped before inversion; the inverse
# distance diverges as g -> 0
G_FLOOR = 1e-300

# maximum relative residual accepted from the weight solve
RESIDUAL_TOL = 1e-10


@dataclass(frozen=True)
class FwfConfig:
    """Hyperparameters for the nearest-neighbor functional filter.

    ``sigma_input=None`` selects Silverman's rule on the training input;
    ``sigma_weight=None`` reuses ``sigma_input``; ``alpha="auto"`` tunes the
    output scale on the training set over ``DEFAULT_ALPHA_GRID``;
    ``ridge="auto"`` uses the smallest ridge that keeps the correntropy
    system positive definite.
    """

    order_L: int
    sigma_input: float | KernelWidth | None = None
    sigma_weight: float | KernelWidth | None = None
    alpha: float | str = "auto"
    k_neighbors: int = 2
    ridge: float | str = "auto"
    horizon: int = 1

    def __post_init__(self):
        if not (isinstance(self.order_L, int) and self.order_L >= 1):
            raise ParameterError("order_L must be a positive integer")
        if not (isinstance(self.k_neighbors, int) and self.k_neighbors >= 1):
            raise ParameterError("k_neighbors must be a positive integer")
        if self.horizon < 0:
            raise ParameterError("horizon must be >= 0")
        if isinstance(self.alpha, str):
            if self.alpha != "auto":
                raise ParameterError("alpha must be a positive real or 'auto'")
        elif not self.alpha > 0:
            raise ParameterError("alpha must be a positive real or 'auto'")
        if isinstance(self.ridge, str):
            if self.ridge != "auto":
                raise ParameterError("ridge must be a non-negative real or 'auto'")
        elif self.ridge < 0:
            raise ParameterError("ridge must be a non-negative real or 'auto'")


@dataclass(frozen=True)
class GVector:
    """Kernel similarities between one target value and every weight."""

    values: np.ndarray

    def __post_init__(self):
        values = np.asarray(self.values, dtype=float)
        if values.ndim != 1:
            raise DimensionError("GVector must be 1-d")
        if not np.all((values > 0) & (values <= 1)):
            raise ParameterError("GVector entries must lie in (0, 1]")
        object.__setattr__(self, "values", values)


@dataclass
class FwfModel:
    """Fitted filter state; immutable by convention after :func:`fit`."""

    weights: np.ndarray
    partners: np.ndarray
    train_windows: np.ndarray
    train_targets: np.ndarray
    bias: float
    config: FwfConfig
    sigma_input: float
    sigma_weight: float
    alpha: float
    ridge: float
    train_mse: float
    neighbor_index: neighbors.NeighborIndex

    @property
    def n_train(self) -> int:
        return self.train_windows.shape[0]


def solve_weights(V, Pv, ridge: float) -> np.ndarray:
    """Solve (V + ridge I) W = Pv by Cholesky factorization.

    Never forms an inverse; failure to factor raises a conditioning error
    reporting the offending pivot.
    """
    A = np.asarray(getattr(V, "entries", V), dtype=float)
    b = np.asarray(getattr(Pv, "values", Pv), dtype=float)
    if A.ndim != 2 or A.shape[0] != A.shape[1] or A.shape[0] != b.shape[0]:
        raise DimensionError("system dimensions do not match")
    A_r = A + ridge * np.eye(A.shape[0])
    try:
        factor = cho_factor(A_r, lower=True)
    except np.linalg.LinAlgError as exc:
        # scipy reports the 1-based index of the first non-positive pivot
        pivot = None
        msg = str(exc)
        for tok in msg.split():
            if tok.rstrip("-th").isdigit():
                pivot = int(tok.rstrip("-th"))
                break
        raise ConditioningError(
            f"correntropy system not positive definite (pivot {pivot}); "
            f"increase the ridge (current {ridge:g})",
            pivot=pivot,
        ) from exc
    w = cho_solve(factor, b)
    resid = np.linalg.norm(A_r @ w - b)
    if resid > RESIDUAL_TOL * np.linalg.norm(b):
        raise ConditioningError(
            f"weight solve residual {resid:.3e} exceeds tolerance; "
            "the system is too ill-conditioned"
        )
    return w


def evaluate_functional(weights, centers, point, w) -> float:
    """Evaluate sum_tau weights(tau) * G_sigma(centers(tau), point(tau))."""
    weights = np.asarray(weights, dtype=float)
    centers = np.asarray(centers, dtype=float)
    point = np.asarray(point, dtype=float)
    if weights.shape != centers.shape or centers.shape != point.shape:
        raise DimensionError("weights, centers, and point must share a length")
    return float(np.sum(weights * gaussian(centers, point, w)))


def compute_g(z: float, weights, w_weight) -> GVector:
    """Kernel similarity of a target value to each weight entry.

    Values are floored at ``G_FLOOR`` so the later inversion stays finite.
    """
    weights = np.asarray(weights, dtype=float)
    g = np.maximum(gaussian(weights, z, w_weight), G_FLOOR)
    return GVector(g)


def compute_partner(x, g: GVector, alpha: float, w) -> np.ndarray:
    """Partner vector: x shifted by alpha times the kernel-inverse distance.

    The non-negative inverse branch is subtracted by convention; either
    branch yields the same kernel evaluations.
    """
    x = np.asarray(x, dtype=float)
    gv = g.values if isinstance(g, GVector) else GVector(np.asarray(g)).values
    if x.shape != gv.shape:
        raise DimensionError("window and g vector must share a length")
    return x - alpha * gaussian_inverse(gv, w)


def _g_matrix(targets: np.ndarray, weights: np.ndarray, sigma_weight: float):
    """Row i = compute_g(targets[i], weights).values, vectorized."""
    d = weights[None, :] - targets[:, None]
    g = np.exp(-(d * d) / (2.0 * sigma_weight * sigma_weight))
    return np.maximum(g, G_FLOOR)


def _partner_offsets(g_mat: np.ndarray, sigma_input: float) -> np.ndarray:
    """Kernel-inverse distances (the alpha-independent partner offsets)."""
    return sigma_input * np.sqrt(-2.0 * np.log(g_mat))


def _functional_outputs(
    weights, partners, nbr_idx, queries, sigma_input, chunk=65536
):
    """Mean over neighbors of the functional evaluated at their partners.

    ``nbr_idx`` is B x K neighbor rows per query; returns length-B raw
    predictions (no bias subtraction).
    """
    B = queries.shape[0]
    out = np.empty(B)
    s2 = 2.0 * sigma_input * sigma_input
    for lo in range(0, B, chunk):
        hi = min(lo + chunk, B)
        p = partners[nbr_idx[lo:hi]]  # b x K x L
        d = p - queries[lo:hi, None, :]
        ker = np.exp(-(d * d) / s2)
        out[lo:hi] = (ker * weights[None, None, :]).sum(axis=2).mean(axis=1)
    return out


def _resolve_widths(data: Dataset, cfg: FwfConfig):
    if cfg.sigma_input is None:
        s_in = silverman_sigma(data.source_x).sigma
    elif isinstance(cfg.sigma_input, KernelWidth):
        s_in = cfg.sigma_input.sigma
    else:
        s_in = KernelWidth(float(cfg.sigma_input)).sigma
    if cfg.sigma_weight is None:
        s_w = s_in
    elif isinstance(cfg.sigma_weight, KernelWidth):
        s_w = cfg.sigma_weight.sigma
    else:
        s_w = KernelWidth(float(cfg.sigma_weight)).sigma
    return s_in, s_w


def _prepare(data: Dataset, cfg: FwfConfig):
    """Everything in the pipeline that does not depend on alpha."""
    if len(data) < 1:
        raise ParameterError("dataset must be non-empty")
    if data.order_L != cfg.order_L:
        raise DimensionError(
            f"dataset order {data.order_L} != config order {cfg.order_L}"
        )
    s_in, s_w = _resolve_widths(data, cfg)
    V = toeplitz(autocorrentropy(data.source_x, cfg.order_L, s_in))
    Pv = crosscorrentropy(data.source_x, data.source_z, cfg.order_L, s_in)
    ridge = auto_ridge(V) if cfg.ridge == "auto" else float(cfg.ridge)
    weights = solve_weights(V, Pv, ridge)
    g_mat = _g_matrix(data.targets, weights, s_w)
    offsets = _partner_offsets(g_mat, s_in)
    index = neighbors.build(data.windows)
    k_eff = min(cfg.k_neighbors, len(data))
    nbr_idx, _ = neighbors.query_batch(index, data.windows, k_eff)
    return s_in, s_w, ridge, weights, offsets, index, nbr_idx


def _train_stats(weights, partners, nbr_idx, windows, targets, s_in):
    raw = _functional_outputs(weights, partners, nbr_idx, windows, s_in)
    bias = float(np.mean(raw) - np.mean(targets))
    mse = float(np.mean((raw - bias - targets) ** 2))
    return bias, mse


def tune_alpha(data: Dataset, cfg: FwfConfig, grid=None) -> float:
    """Pick the alpha minimizing training MSE over a grid.

    Weights, kernel-inverse offsets, and the neighbor assignment are
    computed once; only partners and bias vary per candidate.  Ties break
    toward smaller alpha.
    """
    grid = DEFAULT_ALPHA_GRID if grid is None else np.asarray(grid, dtype=float)
    if grid.size == 0:
        raise ParameterError("alpha grid must be non-empty")
    if not np.all(grid > 0):
        raise ParameterError("alpha grid entries must be positive")
    s_in, _, _, weights, offsets, _, nbr_idx = _prepare(data, cfg)
    best_alpha, best_mse = None, np.inf
    for a in np.sort(grid):
        partners = data.windows - a * offsets
        _, mse = _train_stats(
            weights, partners, nbr_idx, data.windows, data.targets, s_in
        )
        if mse < best_mse:
            best_alpha, best_mse = float(a), mse
    return best_alpha


def fit(data: Dataset, cfg: FwfConfig) -> FwfModel:
    """Fit the filter: weights, partner set, neighbor index, bias.

    With ``alpha="auto"`` the grid search of :func:`tune_alpha` runs inline
    on the same precomputed state.
    """
    s_in, s_w, ridge, weights, offsets, index, nbr_idx = _prepare(data, cfg)

    if cfg.alpha == "auto":
        alpha, best = None, np.inf
        for a in np.sort(DEFAULT_ALPHA_GRID):
            partners = data.windows - a * offsets
            _, mse = _train_stats(
                weights, partners, nbr_idx, data.windows, data.targets, s_in
            )
            if mse < best:
                alpha, best = float(a), mse
    else:
        alpha = float(cfg.alpha)

    partners = data.windows - alpha * offsets
    bias, mse = _train_stats(
        weights, partners, nbr_idx, data.windows, data.targets, s_in
    )
    return FwfModel(
        weights=weights,
        partners=partners,
        train_windows=data.windows,
        train_targets=data.targets,
        bias=bias,
        config=cfg,
        sigma_input=s_in,
        sigma_weight=s_w,
        alpha=alpha,
        ridge=ridge,
        train_mse=mse,
        neighbor_index=index,
    )


def predict_batch(m: FwfModel, X, K: int | None = None) -> np.ndarray:
    """Predict a batch of windows; K defaults to the fitted configuration
    clamped to the training-set size."""
    X = np.ascontiguousarray(X, dtype=float)
    if X.ndim != 2 or X.shape[1] != m.train_windows.shape[1]:
        raise DimensionError("query windows must be B x L matching the model")
    if K is None:
        K = min(m.config.k_neighbors, m.n_train)
    if not (1 <= K <= m.n_train):
        raise ParameterError(f"K must be in 1..{m.n_train}, got {K}")
    nbr_idx, _ = neighbors.query_batch(m.neighbor_index, X, K)
    raw = _functional_outputs(m.weights, m.partners, nbr_idx, X, m.sigma_input)
    return raw - m.bias


def predict(m: FwfModel, x, K: int | None = None) -> float:
    """Predict a single window (see :func:`predict_batch`)."""
    x = np.asarray(x, dtype=float)
    if x.ndim != 1:
        raise DimensionError("predict expects a single window; use predict_batch")
    return float(predict_batch(m, x[None, :], K)[0])
