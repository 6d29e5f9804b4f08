"""Benchmark signal generation and supervised embedding.

Provides the Mackey-Glass delay differential equation, the Lorenz system,
and a synthetic FIR/white-noise process, plus the windowing step that turns
a scalar series into (window, target) pairs for filtering experiments.

All generators are deterministic given their parameters (the FIR process
additionally takes a seed; noise comes from ``numpy.random.default_rng``,
i.e. the PCG64 generator).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.signal import lfilter

from .errors import (
    DataError,
    DegenerateSeriesError,
    DimensionError,
    IntegrationDivergenceError,
    ParameterError,
)

__all__ = [
    "Series",
    "MGParams",
    "LorenzParams",
    "Dataset",
    "gen_mackey_glass",
    "gen_lorenz",
    "gen_fir_process",
    "embed",
    "embed_pair",
    "standardize",
    "write_series_csv",
    "read_series_csv",
]


@dataclass(frozen=True)
class Series:
    """A uniformly sampled scalar time series.

    ``mean`` and ``std`` are populated by :func:`standardize` and record the
    statistics of the original series so predictions can be mapped back.
    """

    values: np.ndarray
    dt: float = 1.0
    mean: float | None = None
    std: float | None = None

    def __post_init__(self):
        values = np.asarray(self.values, dtype=float)
        if values.ndim != 1 or values.size < 1:
            raise ParameterError("series must be a 1-d array with length >= 1")
        if not np.all(np.isfinite(values)):
            raise DataError("series contains non-finite samples")
        object.__setattr__(self, "values", values)

    def __len__(self):
        return self.values.size


@dataclass(frozen=True)
class MGParams:
    """Mackey-Glass equation parameters.

    Defaults are the standard benchmark configuration; ``tau_delay`` must be
    an integer multiple of ``step`` so the delay maps onto whole history
    slots.
    """

    beta: float = 0.2
    gamma: float = 0.1
    n_exp: float = 10.0
    tau_delay: float = 30.0
    step: float = 0.1
    downsample: int = 6

    def __post_init__(self):
        for name in ("beta", "gamma", "n_exp", "tau_delay", "step"):
            if not getattr(self, name) > 0:
                raise ParameterError(f"MGParams.{name} must be positive")
        if not (isinstance(self.downsample, int) and self.downsample >= 1):
            raise ParameterError("MGParams.downsample must be a positive integer")
        slots = self.tau_delay / self.step
        if abs(slots - round(slots)) > 1e-9:
            raise ParameterError(
                "tau_delay/step must be an integer number of history slots"
            )

    @property
    def history_slots(self) -> int:
        return int(round(self.tau_delay / self.step))


@dataclass(frozen=True)
class LorenzParams:
    """Lorenz system parameters (x component is the output)."""

    sigma: float = 10.0
    rho: float = 28.0
    beta: float = 8.0 / 3.0
    step: float = 0.01
    downsample: int = 5

    def __post_init__(self):
        for name in ("sigma", "rho", "beta", "step"):
            if not getattr(self, name) > 0:
                raise ParameterError(f"LorenzParams.{name} must be positive")
        if not (isinstance(self.downsample, int) and self.downsample >= 1):
            raise ParameterError("LorenzParams.downsample must be a positive integer")


@dataclass(frozen=True)
class Dataset:
    """Embedded windows paired with prediction targets.

    ``windows[r]`` holds the L most recent samples newest-first for time
    index ``i = order_L - 1 + r``; ``targets[r]`` is the source value at
    ``i + horizon``.  ``source_x``/``source_z`` are the aligned scalar pair
    arrays the lag-profile estimators consume: ``source_z[t]`` is the
    desired value paired with input sample ``source_x[t]``.
    """

    windows: np.ndarray
    targets: np.ndarray
    order_L: int
    horizon: int
    source_x: np.ndarray = field(repr=False)
    source_z: np.ndarray = field(repr=False)

    def __post_init__(self):
        if self.windows.ndim != 2 or self.windows.shape[1] != self.order_L:
            raise DimensionError("windows must be N x order_L")
        if self.windows.shape[0] != self.targets.shape[0]:
            raise DimensionError("windows row count must equal targets length")
        if len(self.source_x) != len(self.source_z):
            raise DimensionError("source pair arrays must be aligned")

    def __len__(self):
        return self.windows.shape[0]


def gen_mackey_glass(
    p: MGParams, n: int, warmup: int = 3000, init: float = 1.2
) -> Series:
    """Integrate the Mackey-Glass equation and return ``n`` samples.

    Fourth-order Runge-Kutta with the delayed term held constant within a
    step; the pre-history is a constant buffer at ``init``.  ``warmup`` raw
    integration steps are discarded, then every ``downsample``-th sample is
    kept.
    """
    if n < 1:
        raise ParameterError("n must be >= 1")
    slots = p.history_slots
    if warmup < slots:
        raise ParameterError(
            f"warmup must cover the delay history ({slots} steps), got {warmup}"
        )
    beta, gamma, n_exp, step = p.beta, p.gamma, p.n_exp, p.step

    def deriv(xc, xd):
        return beta * xd / (1.0 + xd**n_exp) - gamma * xc

    hist = [float(init)] * slots
    x = float(init)
    total = warmup + n * p.downsample
    out = np.empty(total)
    idx = 0
    for i in range(total):
        out[i] = x
        xd = hist[idx]
        try:
            k1 = step * deriv(x, xd)
            k2 = step * deriv(x + 0.5 * k1, xd)
            k3 = step * deriv(x + 0.5 * k2, xd)
            k4 = step * deriv(x + k3, xd)
        except OverflowError:
            raise IntegrationDivergenceError(i) from None
        xn = x + (k1 + 2.0 * k2 + 2.0 * k3 + k4) / 6.0
        if not math.isfinite(xn):
            raise IntegrationDivergenceError(i)
        hist[idx] = xn
        idx = (idx + 1) % slots
        x = xn
    return Series(out[warmup :: p.downsample][:n], dt=p.step * p.downsample)


def gen_lorenz(
    p: LorenzParams,
    n: int,
    warmup: int = 1000,
    init: tuple[float, float, float] = (1.0, 1.0, 1.0),
) -> Series:
    """Integrate the Lorenz system with RK4 and return the x component."""
    if n < 1:
        raise ParameterError("n must be >= 1")
    init = np.asarray(init, dtype=float)
    if init.shape != (3,):
        raise ParameterError("init must be a 3-vector")
    sig, rho, beta, dt = p.sigma, p.rho, p.beta, p.step

    def deriv(s):
        x, y, z = s
        return np.array([sig * (y - x), x * (rho - z) - y, x * y - beta * z])

    state = init.copy()
    total = warmup + n * p.downsample
    out = np.empty(total)
    with np.errstate(over="ignore", invalid="ignore"):
        for i in range(total):
            out[i] = state[0]
            k1 = dt * deriv(state)
            k2 = dt * deriv(state + 0.5 * k1)
            k3 = dt * deriv(state + 0.5 * k2)
            k4 = dt * deriv(state + k3)
            state = state + (k1 + 2.0 * k2 + 2.0 * k3 + k4) / 6.0
            if not np.all(np.isfinite(state)):
                raise IntegrationDivergenceError(i)
    return Series(out[warmup :: p.downsample][:n], dt=dt * p.downsample)


def gen_fir_process(coeffs, n: int, noise_seed: int) -> tuple[Series, Series]:
    """White Gaussian noise through a known FIR filter.

    Returns ``(input, desired)`` with
    ``desired(t) = sum_k coeffs[k] * input(t - k)`` (zero initial state).
    """
    coeffs = np.asarray(coeffs, dtype=float)
    if coeffs.ndim != 1 or coeffs.size == 0:
        raise ParameterError("coeffs must be a non-empty 1-d sequence")
    if n < 1:
        raise ParameterError("n must be >= 1")
    rng = np.random.default_rng(noise_seed)
    x = rng.standard_normal(n)
    z = lfilter(coeffs, [1.0], x)
    return Series(x), Series(z)


def embed(s: Series, L: int, horizon: int) -> Dataset:
    """Window a single series for the self-prediction task.

    Window row r is ``[X(i), X(i-1), ..., X(i-L+1)]`` with ``i = L-1+r``;
    the target is ``X(i+horizon)``.
    """
    return embed_pair(s, s, L, horizon)


def embed_pair(x: Series, z: Series, L: int, horizon: int) -> Dataset:
    """Window input series ``x`` against desired series ``z``.

    The prediction task maps window ``x_i`` to ``z`` at index
    ``i + horizon``; :func:`embed` is the ``z = x`` special case.
    """
    if L < 1:
        raise ParameterError("order L must be >= 1")
    if horizon < 0:
        raise ParameterError("horizon must be >= 0")
    xv, zv = x.values, z.values
    if len(xv) != len(zv):
        raise DimensionError("input and desired series must have equal length")
    M = len(xv)
    n_rows = M - (L - 1) - horizon
    if n_rows < 1:
        raise DimensionError(
            f"series of length {M} too short for L={L}, horizon={horizon}"
        )
    # sliding_window_view row r = x[r:r+L]; reverse columns for newest-first
    windows = np.ascontiguousarray(
        np.lib.stride_tricks.sliding_window_view(xv[: M - horizon], L)[:, ::-1]
    )[:n_rows]
    targets = zv[L - 1 + horizon :].copy()
    # pair arrays: z at t+horizon against x at t, both length M - horizon
    source_x = xv[: M - horizon].copy()
    source_z = zv[horizon:].copy()
    return Dataset(
        windows=windows,
        targets=targets,
        order_L=L,
        horizon=horizon,
        source_x=source_x,
        source_z=source_z,
    )


def standardize(s: Series) -> Series:
    """Center and scale to zero mean, unit population variance.

    The original mean and standard deviation are recorded on the result.
    """
    if len(s) < 2:
        raise ParameterError("standardize requires at least 2 samples")
    mu = float(np.mean(s.values))
    sd = float(np.std(s.values))
    if sd == 0.0:
        raise DegenerateSeriesError("cannot standardize a zero-variance series")
    return Series((s.values - mu) / sd, dt=s.dt, mean=mu, std=sd)


def write_series_csv(s: Series, path) -> None:
    """Write a series as single-column CSV with header ``value``."""
    with open(path, "w") as f:
        f.write("value\n")
        for v in s.values:
            f.write("%.17g\n" % v)


def read_series_csv(path) -> Series:
    """Read a series written by :func:`write_series_csv`."""
    with open(path) as f:
        header = f.readline().strip()
        if header != "value":
            raise DataError(f"expected header 'value' in {path}, got {header!r}")
        try:
            values = np.array([float(line) for line in f if line.strip()])
        except ValueError as exc:
            raise DataError(f"non-numeric sample in {path}: {exc}") from exc
    if values.size == 0:
        raise DataError(f"no samples in {path}")
    return Series(values)
