"""Reference filters: linear Wiener, KLMS, KRLS, and kernel ridge regression.

The kernel adaptive models share one container; KRLS and KRR are the same
batch regularized Gram solution here and differ only by variant tag.  KLMS
keeps the standard online recursion semantics but evaluates it in blocks so
large runs stay matrix-bound.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.spatial.distance import cdist

from .errors import ConditioningError, DimensionError, ParameterError
from .fwf_core import solve_weights
from .kernel_stats import (
    KernelWidth,
    autocovariance,
    crosscovariance,
    toeplitz,
)
from .signal_gen import Dataset

__all__ = [
    "WienerModel",
    "KafModel",
    "wiener_fit",
    "wiener_predict",
    "klms_fit",
    "krls_fit",
    "krr_fit",
    "kaf_predict",
]

KAF_VARIANTS = ("klms", "krls", "krr")

# within-block sequential span for the KLMS recursion
_KLMS_BLOCK = 1024
# center-axis slab for cross-block kernel accumulation (memory bound)
_KLMS_SLAB = 8192


@dataclass(frozen=True)
class WienerModel:
    """Linear filter weights; output is the inner product with a window."""

    weights: np.ndarray

    def __post_init__(self):
        w = np.asarray(self.weights, dtype=float)
        if w.ndim != 1 or w.size < 1:
            raise DimensionError("weights must be a non-empty 1-d vector")
        if not np.all(np.isfinite(w)):
            raise ParameterError("weights must be finite")
        object.__setattr__(self, "weights", w)

    @property
    def order_L(self) -> int:
        return self.weights.size


@dataclass(frozen=True)
class KafModel:
    """Kernel expansion f(x) = sum_i coefficients[i] * G_sigma(centers[i], x)."""

    centers: np.ndarray
    coefficients: np.ndarray
    sigma: KernelWidth
    variant: str

    def __post_init__(self):
        c = np.ascontiguousarray(self.centers, dtype=float)
        a = np.asarray(self.coefficients, dtype=float)
        if c.ndim != 2:
            raise DimensionError("centers must be an N x L matrix")
        if a.ndim != 1 or a.shape[0] != c.shape[0]:
            raise DimensionError("coefficients must pair 1:1 with centers")
        if self.variant not in KAF_VARIANTS:
            raise ParameterError(f"variant must be one of {KAF_VARIANTS}")
        if not isinstance(self.sigma, KernelWidth):
            object.__setattr__(self, "sigma", KernelWidth(float(self.sigma)))
        object.__setattr__(self, "centers", c)
        object.__setattr__(self, "coefficients", a)

    @property
    def n_centers(self) -> int:
        return self.centers.shape[0]


def _fit_arrays(data) -> tuple[np.ndarray, np.ndarray, int | None]:
    """Aligned (input, desired) sample arrays from a Dataset or bare series.

    A bare series is its own desired signal (identity system)."""
    if isinstance(data, Dataset):
        return data.source_x, data.source_z, data.order_L
    x = np.asarray(getattr(data, "values", data), dtype=float)
    if x.ndim != 1 or x.size < 1:
        raise DimensionError("series input must be a non-empty 1-d array")
    return x, x, None


def wiener_fit(data, L: int, ridge: float | str = "auto") -> WienerModel:
    """Solve the covariance normal equations (R + ridge I) W = P.

    ``ridge="auto"`` picks the smallest value keeping R positive definite.
    """
    if not (isinstance(L, int) and L >= 1):
        raise ParameterError("L must be a positive integer")
    x, z, data_L = _fit_arrays(data)
    if data_L is not None and data_L != L:
        raise DimensionError(f"dataset order {data_L} != requested order {L}")
    if x.size < L:
        raise ParameterError("series shorter than the filter order")
    R = toeplitz(autocovariance(x, L))
    P = crosscovariance(x, z, L)
    if ridge == "auto":
        from .kernel_stats import auto_ridge

        ridge = auto_ridge(R)
    w = solve_weights(R, P, float(ridge))
    return WienerModel(w)


def wiener_predict(m: WienerModel, x) -> float | np.ndarray:
    """Inner product of the weights with one window or a batch of rows."""
    x = np.asarray(x, dtype=float)
    if x.ndim == 1:
        if x.shape[0] != m.order_L:
            raise DimensionError("window length does not match filter order")
        return float(np.dot(m.weights, x))
    if x.ndim == 2:
        if x.shape[1] != m.order_L:
            raise DimensionError("window length does not match filter order")
        return x @ m.weights
    raise DimensionError("expected a window or a B x L batch")


def _sq_dists(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    return cdist(a, b, "sqeuclidean")


def klms_fit(data: Dataset, eta: float = 0.5, sigma=None) -> KafModel:
    """One pass of the kernel LMS recursion over the training set.

    Every sample becomes a center: e_i = z_i - f_{i-1}(x_i), alpha_i = eta e_i,
    with the empty-model prediction defined as 0.  Contributions from earlier
    blocks are accumulated with matrix kernels; the result matches the scalar
    recursion to rounding.
    """
    if eta < 0:
        raise ParameterError("eta must be non-negative")
    sig = _resolve_sigma(data, sigma)
    X, z = data.windows, data.targets
    N = X.shape[0]
    alpha = np.zeros(N)
    inv2s2 = 1.0 / (2.0 * sig * sig)
    for lo in range(0, N, _KLMS_BLOCK):
        hi = min(lo + _KLMS_BLOCK, N)
        Xb = X[lo:hi]
        # prior-block contribution to every prediction in this block
        carry = np.zeros(hi - lo)
        for s in range(0, lo, _KLMS_SLAB):
            e = min(s + _KLMS_SLAB, lo)
            carry += np.exp(-_sq_dists(Xb, X[s:e]) * inv2s2) @ alpha[s:e]
        Kb = np.exp(-_sq_dists(Xb, Xb) * inv2s2)
        for r in range(hi - lo):
            pred = carry[r] + float(np.dot(Kb[r, :r], alpha[lo : lo + r]))
            alpha[lo + r] = eta * (z[lo + r] - pred)
    return KafModel(X, alpha, KernelWidth(sig), "klms")


def _resolve_sigma(data: Dataset, sigma) -> float:
    if sigma is None:
        from .kernel_stats import silverman_sigma

        return silverman_sigma(data.source_x).sigma
    if isinstance(sigma, KernelWidth):
        return sigma.sigma
    return KernelWidth(float(sigma)).sigma


def _gram_solve(data: Dataset, lam: float, sigma, variant: str) -> KafModel:
    if lam < 0:
        raise ParameterError("lambda must be non-negative")
    sig = _resolve_sigma(data, sigma)
    X, z = data.windows, data.targets
    K = np.exp(-_sq_dists(X, X) / (2.0 * sig * sig))
    from scipy.linalg import cho_factor, cho_solve

    try:
        factor = cho_factor(K + lam * np.eye(X.shape[0]), lower=True)
    except np.linalg.LinAlgError as exc:
        raise ConditioningError(
            f"regularized Gram matrix not positive definite (lambda={lam:g})"
        ) from exc
    alpha = cho_solve(factor, z)
    return KafModel(X, alpha, KernelWidth(sig), variant)


def krls_fit(data: Dataset, lam: float = 1e-6, sigma=None) -> KafModel:
    """Batch solution of the regularized Gram system (K + lambda I) a = z.

    The exact recursive update converges to the same coefficients, so the
    batch solve is the contract.
    """
    return _gram_solve(data, lam, sigma, "krls")


def krr_fit(data: Dataset, lam: float = 1e-6, sigma=None) -> KafModel:
    """Kernel ridge regression; identical estimator to krls_fit."""
    return _gram_solve(data, lam, sigma, "krr")


def kaf_predict(m: KafModel, x, chunk: int = 4096) -> float | np.ndarray:
    """Evaluate the kernel expansion at one window or a batch of rows."""
    x = np.asarray(x, dtype=float)
    single = x.ndim == 1
    X = x[None, :] if single else x
    if X.ndim != 2:
        raise DimensionError("expected a window or a B x L batch")
    if m.n_centers == 0:
        out = np.zeros(X.shape[0])
        return 0.0 if single else out
    if X.shape[1] != m.centers.shape[1]:
        raise DimensionError("window length does not match model centers")
    inv2s2 = 1.0 / (2.0 * m.sigma.sigma**2)
    out = np.empty(X.shape[0])
    for lo in range(0, X.shape[0], chunk):
        hi = min(lo + chunk, X.shape[0])
        out[lo:hi] = np.exp(-_sq_dists(X[lo:hi], m.centers) * inv2s2) @ m.coefficients
    return float(out[0]) if single else out
