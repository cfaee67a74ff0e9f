"""Disorder ensembles and exponent fits.

Realization ``i`` of an ensemble is fully determined by ``(config, i)``, and
reductions are performed in realization order with :func:`math.fsum`, so
statistics do not depend on the number of worker threads and the statistics
of the first ``s`` samples are a prefix of those of any larger ensemble.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Callable, NamedTuple, Sequence

import numpy as np

from .disorder import DisorderConfig, OneBodyOperator, build_one_body, free_chain, sample_potential
from .errors import ArgumentError, BoundaryError, ConfigurationError, EnsembleError
from .quasifree import BOUNDARY_TOL, estimate_beta, moment_series
from .spectral import SpectralDecomposition, correlator_row, diagonalize

KAPPA_CEILING = 5.0 / 16.0

KAPPA_CAVEAT = (
    "kappa_estimate is read off the decay of the disorder-averaged eigenfunction "
    "correlator, which the localization bound only majorizes; it is a one-sided proxy "
    "for the exponent in that bound, not a measurement of it."
)


@dataclass(frozen=True)
class Realization:
    index: int
    potential: np.ndarray
    operator: OneBodyOperator
    spectrum: SpectralDecomposition


def make_realization(config: DisorderConfig, index: int) -> Realization:
    potential = sample_potential(config, index)
    H = build_one_body(config, potential)
    return Realization(index, potential, H, diagonalize(H))


def free_realization(n: int) -> Realization:
    """The lambda -> 0 limit: zero potential, a single deterministic 'realization'."""
    H = free_chain(n)
    return Realization(0, np.zeros(n), H, diagonalize(H))


@dataclass(frozen=True)
class EnsembleStats:
    mean: float
    stderr: float
    samples: int
    observable_id: str = ""


def default_threads() -> int:
    """Worker count from ``PLR_THREADS``, else the available parallelism."""
    env = os.environ.get("PLR_THREADS")
    if env:
        try:
            value = int(env)
        except ValueError:
            raise ConfigurationError(f"PLR_THREADS must be an integer, got {env!r}") from None
        if value < 1:
            raise ConfigurationError("PLR_THREADS must be >= 1")
        return value
    return os.cpu_count() or 1


def collect(
    config: DisorderConfig,
    samples: int,
    observable: Callable[[Realization], object],
    threads: int | None = None,
) -> np.ndarray:
    """Evaluate ``observable`` on realizations ``0..samples-1``.

    Returns the stacked results, first axis indexed by realization.
    """
    if isinstance(samples, bool) or not isinstance(samples, (int, np.integer)) or samples < 1:
        raise ArgumentError(f"samples must be a positive integer, got {samples!r}")
    threads = default_threads() if threads is None else threads

    def task(i):
        try:
            return np.asarray(observable(make_realization(config, i)), dtype=float)
        except Exception as exc:
            raise EnsembleError(i, exc) from exc

    if threads <= 1:
        results = [task(i) for i in range(samples)]
    else:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            results = list(pool.map(task, range(samples)))
    return np.stack(results)


def aggregate(values, observable_id: str = "") -> EnsembleStats:
    """Mean and standard error (sample std / sqrt(samples)) of a 1-d sample."""
    values = np.asarray(values, dtype=float).ravel()
    s = values.size
    if s < 1:
        raise ArgumentError("cannot aggregate an empty sample")
    mean = math.fsum(values) / s
    if s == 1:
        return EnsembleStats(mean, 0.0, 1, observable_id)
    var = math.fsum((values - mean) ** 2) / (s - 1)
    return EnsembleStats(mean, math.sqrt(var / s), s, observable_id)


def run_ensemble(
    config: DisorderConfig,
    samples: int,
    observable: Callable[[Realization], float],
    observable_id: str = "observable",
    threads: int | None = None,
) -> EnsembleStats:
    """Monte Carlo estimate of the disorder average of a scalar observable."""
    values = collect(config, samples, observable, threads)
    if values.ndim != 1:
        raise ArgumentError(f"observable must return a scalar, got shape {values.shape[1:]}")
    return aggregate(values, observable_id)


def geometric_sites(k_min: int, k_max: int, ratio: float = math.sqrt(2.0)) -> list[int]:
    """Distinct integer sites ``round(k_min * ratio**i)`` up to ``k_max``."""
    if not (1 <= k_min <= k_max and ratio > 1):
        raise ArgumentError("need 1 <= k_min <= k_max and ratio > 1")
    sites = []
    x = float(k_min)
    while round(x) <= k_max:
        k = int(round(x))
        if not sites or k != sites[-1]:
            sites.append(k)
        x *= ratio
    return sites


def correlator_decay(
    config: DisorderConfig, samples: int, j: int, k_list: Sequence[int], threads: int | None = None
) -> list[EnsembleStats]:
    """Disorder averages of ``Q(j, k)`` for each k in ``k_list``."""
    k_arr = np.asarray(k_list, dtype=int)
    if k_arr.size == 0:
        raise ArgumentError("k_list is empty")
    if np.any(np.diff(k_arr) <= 0):
        raise ArgumentError("k_list must be strictly ascending")
    if not 1 <= j < k_arr[0]:
        raise ArgumentError(f"need 1 <= j < min(k_list), got j={j}, min={k_arr[0]}")
    if k_arr[-1] > config.n:
        raise ArgumentError(f"site {k_arr[-1]} in k_list exceeds n={config.n}")

    def observable(r):
        return correlator_row(r.spectrum, j)[k_arr - 1]

    values = collect(config, samples, observable, threads)
    return [aggregate(values[:, i], f"Q({j},{k})") for i, k in enumerate(k_arr)]


@dataclass(frozen=True)
class DecayFit:
    slope: float
    intercept: float
    slope_stderr: float
    k_range: tuple[int, int]
    kappa_estimate: float
    kappa_stderr: float


def fit_decay(k_list: Sequence[int], stats: Sequence[EnsembleStats], lam: float) -> DecayFit:
    """Fit ``log E[Q(1,k)] = intercept + slope * log k``.

    Weighted least squares with per-point log-variance ``(stderr/mean)**2``
    (delta method) when every point has a positive stderr, otherwise ordinary
    least squares with residual-based errors.  ``kappa_estimate`` is
    ``(1/4 - slope) / lam**2``.
    """
    k = np.asarray(k_list, dtype=float)
    if k.size != len(stats):
        raise ArgumentError("k_list and stats differ in length")
    if k.size < 6:
        raise ArgumentError(f"need at least 6 points, got {k.size}")
    if k.min() < 2:
        raise ArgumentError("fit requires k >= 2")
    if not lam > 0:
        raise ArgumentError("lambda must be > 0")
    means = np.array([s.mean for s in stats])
    errs = np.array([s.stderr for s in stats])
    for kk, m in zip(k, means):
        if not m > 0:
            raise ArgumentError(f"nonpositive mean {m} at k={int(kk)}; cannot take log")
    x, y = np.log(k), np.log(means)
    A = np.column_stack([x, np.ones_like(x)])
    if np.all(errs > 0):
        sigma = errs / means
        Aw, yw = A / sigma[:, None], y / sigma
        coef, *_ = np.linalg.lstsq(Aw, yw, rcond=None)
        cov = np.linalg.inv(Aw.T @ Aw)
    else:
        coef, *_ = np.linalg.lstsq(A, y, rcond=None)
        resid = y - A @ coef
        cov = np.linalg.inv(A.T @ A) * (float(resid @ resid) / (x.size - 2))
    slope, intercept = float(coef[0]), float(coef[1])
    slope_err = math.sqrt(max(cov[0, 0], 0.0))
    return DecayFit(
        slope=slope,
        intercept=intercept,
        slope_stderr=slope_err,
        k_range=(int(k.min()), int(k.max())),
        kappa_estimate=(0.25 - slope) / lam**2,
        kappa_stderr=slope_err / lam**2,
    )


class KappaReport(NamedTuple):
    kappa_estimate: float
    kappa_stderr: float
    ceiling: float
    consistent: bool
    caveat: str


def kappa_consistency(fit: DecayFit) -> KappaReport:
    """Compare the fitted kappa with the ceiling 5/16 at three standard errors."""
    consistent = fit.kappa_estimate <= KAPPA_CEILING + 3.0 * fit.kappa_stderr
    return KappaReport(fit.kappa_estimate, fit.kappa_stderr, KAPPA_CEILING, bool(consistent), KAPPA_CAVEAT)


class BetaRow(NamedTuple):
    lam: float
    beta: float
    beta_mean: float
    stderr: float
    samples: int
    window: tuple[float, float]
    max_boundary_mass: float


def realization_beta(realization: Realization, p: float, times, window, boundary_tol=BOUNDARY_TOL):
    """Per-realization transport exponent and the worst boundary mass in the window."""
    series = moment_series(realization.spectrum, p, times)
    est = estimate_beta(series, p, window, boundary_tol)
    inside = (series.times >= window[0]) & (series.times <= window[1])
    return est.beta, float(series.boundary_mass[inside].max())


def beta_vs_lambda(
    config: DisorderConfig,
    samples: int,
    p: float,
    lambda_list: Sequence[float],
    times,
    window,
    threads: int | None = None,
) -> list[BetaRow]:
    """Median finite-window transport exponent for each disorder strength.

    ``lambda = 0`` is accepted as the free-chain limit and evaluated on a
    single deterministic realization.
    """
    if not p > 0:
        raise ArgumentError("p must be > 0")
    rows = []
    for lam in lambda_list:
        lam = float(lam)
        try:
            if lam == 0.0:
                values = np.array([realization_beta(free_realization(config.n), p, times, window)])
            elif lam > 0:
                cfg = config.replace(lam=lam)
                values = collect(cfg, samples, lambda r: realization_beta(r, p, times, window), threads)
            else:
                raise ArgumentError(f"lambda must be >= 0, got {lam}")
        except EnsembleError as exc:
            if isinstance(exc.cause, BoundaryError):
                raise BoundaryError(f"lambda={lam}: {exc.cause}; use a larger n") from exc
            raise
        except BoundaryError as exc:
            raise BoundaryError(f"lambda={lam}: {exc}; use a larger n") from exc
        betas = values[:, 0]
        stats = aggregate(betas)
        rows.append(
            BetaRow(
                lam=lam,
                beta=float(np.median(betas)),
                beta_mean=stats.mean,
                stderr=stats.stderr,
                samples=stats.samples,
                window=(float(window[0]), float(window[1])),
                max_boundary_mass=float(values[:, 1].max()),
            )
        )
    return rows
