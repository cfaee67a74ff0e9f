"""Many-body dynamical quantities of the XY chain reduced to one-body data.

Every function here takes a :class:`~plr_chain.spectral.SpectralDecomposition`
and evaluates sums of propagator amplitudes ``U_jk(t) = <delta_j,
exp(-2itH_n) delta_k>``:

* commutator bounds for ``[tau_t(a_j), B]`` with B supported right of a cut,
* the one-body lower witness ``|U_1k(t)|`` for ``||[tau_t(c_1), a_k*]||``,
* position moments ``|X|^p(t)`` and their Abel time average,
* finite-window transport exponents,
* number-operator expectations in diagonal product states,
* the polynomial Lieb-Robinson witness ``max (k / t**a)**b |U_1k(t)|``.

The infinite half line is approximated by finite n.  Moments carry the mass
beyond n/2 as a diagnostic, and exponent fits refuse windows where that mass
is not negligible.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, NamedTuple

import numpy as np

from .errors import ArgumentError, BoundaryError
from .spectral import SpectralDecomposition, _site, propagator, propagator_row, propagator_table

BOUNDARY_TOL = 1e-6


@dataclass(frozen=True)
class ProductState:
    """Diagonal product state with up-spin occupation ``eta[j]`` on site j+1."""

    eta: np.ndarray

    def __post_init__(self):
        eta = np.array(self.eta, dtype=float)
        if eta.ndim != 1 or eta.size < 1:
            raise ArgumentError("eta must be a non-empty vector")
        if np.any(eta < 0) or np.any(eta > 1) or not np.all(np.isfinite(eta)):
            raise ArgumentError("occupations must lie in [0, 1]")
        eta.setflags(write=False)
        object.__setattr__(self, "eta", eta)

    @property
    def n(self) -> int:
        return self.eta.size

    @classmethod
    def domain_wall(cls, n: int, m: int) -> "ProductState":
        """Spins down on sites 1..m and up on m+1..n."""
        if not 0 <= m <= n:
            raise ArgumentError(f"wall position {m} outside 0..{n}")
        eta = np.zeros(n)
        eta[m:] = 1.0
        return cls(eta)


@dataclass(frozen=True)
class TimeSeries:
    """Samples of a nonnegative dynamical observable on an ascending time grid.

    ``boundary_mass`` optionally carries the edge diagnostic at each time.
    """

    times: np.ndarray
    values: np.ndarray
    boundary_mass: np.ndarray | None = field(default=None)

    def __post_init__(self):
        times = np.asarray(self.times, dtype=float)
        values = np.asarray(self.values, dtype=float)
        if times.ndim != 1 or times.shape != values.shape:
            raise ArgumentError("times and values must be vectors of equal length")
        if np.any(times <= 0) or np.any(np.diff(times) <= 0):
            raise ArgumentError("times must be positive and strictly ascending")
        if not np.all(np.isfinite(values)) or np.any(values < 0):
            raise ArgumentError("values must be finite and nonnegative")
        object.__setattr__(self, "times", times)
        object.__setattr__(self, "values", values)
        if self.boundary_mass is not None:
            mass = np.asarray(self.boundary_mass, dtype=float)
            if mass.shape != times.shape:
                raise ArgumentError("boundary_mass must match times")
            object.__setattr__(self, "boundary_mass", mass)


class MomentSample(NamedTuple):
    value: float
    boundary_mass: float


class AbelAverage(NamedTuple):
    value: float
    error: float
    panels: int


class BetaEstimate(NamedTuple):
    beta: float
    stderr: float


def _check_cut(spec, k):
    if isinstance(k, bool) or not isinstance(k, (int, np.integer)) or not 1 <= k <= spec.n:
        raise ArgumentError(f"cut site {k!r} outside 1..{spec.n}")
    return int(k) - 1


def commutator_upper(spec: SpectralDecomposition, j: int, k: int, t: float) -> float:
    """``D(j, k, t) = sum_{m >= k} |U_jm(t)|``.

    For any B supported on sites k..n with ``||B|| <= 1`` and A one of
    ``a_j, a_j*``, ``||[tau_t(A), B]|| <= 8 D``; for ``a_j* a_j`` the Leibniz
    rule gives ``16 D``.
    """
    cut = _check_cut(spec, k)
    return float(np.sum(np.abs(propagator_row(spec, j, t)[cut:])))


def commutator_upper_profile(spec: SpectralDecomposition, j: int, t: float) -> np.ndarray:
    """``D(j, k, t)`` for every cut k = 1..n (non-increasing in k)."""
    mags = np.abs(propagator_row(spec, j, t))
    return np.cumsum(mags[::-1])[::-1]


def commutator_lower_witness(spec: SpectralDecomposition, k: int, t: float) -> float:
    """``|U_1k(t)|``, a lower bound on ``||[tau_t(c_1), a_k*]||``."""
    return abs(propagator(spec, 1, k, t))


def _moment_weights(n, p):
    return np.arange(1, n + 1, dtype=float) ** p


def _moments_from_table(table, p):
    n = table.shape[0]
    prob = np.abs(table) ** 2
    values = _moment_weights(n, p) @ prob
    boundary = prob[n // 2 :].sum(axis=0)
    return values, boundary


def position_moment(spec: SpectralDecomposition, p: float, t: float) -> MomentSample:
    """``|X|^p(t) = sum_k k**p |U_1k(t)|**2`` and the mass on sites k > n/2."""
    if not p >= 0:
        raise ArgumentError(f"p must be >= 0, got {p}")
    values, boundary = _moments_from_table(propagator_table(spec, 1, [t]), p)
    return MomentSample(float(values[0]), float(boundary[0]))


def moment_series(spec: SpectralDecomposition, p: float, times, batch: int = 64) -> TimeSeries:
    """``|X|^p`` on a grid of positive times, with the boundary diagnostic."""
    if not p >= 0:
        raise ArgumentError(f"p must be >= 0, got {p}")
    times = np.asarray(times, dtype=float)
    values = np.empty(times.size)
    boundary = np.empty(times.size)
    for start in range(0, times.size, batch):
        chunk = slice(start, start + batch)
        values[chunk], boundary[chunk] = _moments_from_table(propagator_table(spec, 1, times[chunk]), p)
    return TimeSeries(times, values, boundary)


_GL_NODES, _GL_WEIGHTS = np.polynomial.legendre.leggauss(16)


def _abel_panels(f, T, panels):
    edges = np.linspace(0.0, 10.0 * T, panels + 1)
    half = 0.5 * np.diff(edges)
    mid = 0.5 * (edges[1:] + edges[:-1])
    t = (mid[:, None] + half[:, None] * _GL_NODES[None, :]).ravel()
    w = (half[:, None] * _GL_WEIGHTS[None, :]).ravel()
    return math.fsum(w * (2.0 / T) * np.exp(-2.0 * t / T) * f(t))


def abel_average(
    f: Callable[[np.ndarray], np.ndarray],
    T: float,
    rtol: float = 1e-6,
    sup_bound: float | None = None,
    panels: int = 8,
    max_panels: int = 1 << 20,
) -> AbelAverage:
    """``(2/T) int_0^inf exp(-2t/T) f(t) dt`` by composite Gauss-Legendre on ``[0, 10T]``.

    The panel count doubles until two successive estimates agree to ``rtol``
    relative.  ``f`` must accept an array of times.  If ``sup_bound`` bounds
    ``|f|``, the neglected tail ``sup_bound * exp(-20)`` is added to the
    returned error.
    """
    if not T > 0:
        raise ArgumentError(f"T must be > 0, got {T}")
    previous = _abel_panels(f, T, panels)
    while True:
        panels *= 2
        current = _abel_panels(f, T, panels)
        diff = abs(current - previous)
        if diff <= rtol * abs(current) or panels >= max_panels:
            break
        previous = current
    tail = 0.0 if sup_bound is None else sup_bound * math.exp(-20.0)
    return AbelAverage(current, diff + tail, panels)


def time_averaged_moment(spec: SpectralDecomposition, p: float, T: float, rtol: float = 1e-6) -> AbelAverage:
    """Abel time average ``<|X|^p>(T)`` of the position moment."""
    if not p >= 0:
        raise ArgumentError(f"p must be >= 0, got {p}")
    spread = float(spec.eigenvalues[-1] - spec.eigenvalues[0])
    # resolve the fastest phase exp(-2i t (E - E')) with a few panels per period
    start = max(8, int(math.ceil(10.0 * T * 2.0 * spread / math.pi)))

    def integrand(t):
        return moment_series_values(spec, p, t)

    return abel_average(integrand, T, rtol=rtol, sup_bound=float(spec.n) ** p, panels=start)


def moment_series_values(spec, p, times, batch=256):
    values = np.empty(np.size(times))
    times = np.atleast_1d(times)
    for start in range(0, times.size, batch):
        chunk = slice(start, start + batch)
        values[chunk] = _moments_from_table(propagator_table(spec, 1, times[chunk]), p)[0]
    return values


def estimate_beta(
    series: TimeSeries, p: float, window, boundary_tol: float = BOUNDARY_TOL
) -> BetaEstimate:
    """Least-squares slope of ``ln |X|^p`` against ``p ln t`` over ``window``.

    A finite-window estimator of the upper transport exponent.  Raises
    :class:`BoundaryError` when the series carries a boundary diagnostic that
    exceeds ``boundary_tol`` inside the window.
    """
    if not p > 0:
        raise ArgumentError(f"p must be > 0, got {p}")
    t_lo, t_hi = map(float, window)
    if not (t_lo < t_hi and series.times[0] <= t_lo and t_hi <= series.times[-1]):
        raise ArgumentError(
            f"window [{t_lo}, {t_hi}] not contained in [{series.times[0]}, {series.times[-1]}]"
        )
    inside = (series.times >= t_lo) & (series.times <= t_hi)
    if inside.sum() < 8:
        raise ArgumentError(f"window holds {inside.sum()} samples, need at least 8")
    if series.boundary_mass is not None:
        worst = float(series.boundary_mass[inside].max())
        if not worst < boundary_tol:
            raise BoundaryError(
                f"boundary mass {worst:.3g} >= {boundary_tol:g} at t <= {t_hi}; increase n"
            )
    values = series.values[inside]
    if np.any(values <= 0):
        raise ArgumentError("values must be positive to take logarithms")
    x = p * np.log(series.times[inside])
    y = np.log(values)
    A = np.column_stack([x, np.ones_like(x)])
    coef, *_ = np.linalg.lstsq(A, y, rcond=None)
    dof = x.size - 2
    resid = y - A @ coef
    sigma2 = float(resid @ resid) / dof
    sxx = float(np.sum((x - x.mean()) ** 2))
    return BetaEstimate(float(coef[0]), math.sqrt(sigma2 / sxx))


def number_expectation(spec: SpectralDecomposition, state: ProductState, sites, t: float) -> float:
    """``<N_S>`` at time t starting from a diagonal product state.

    Evaluates ``sum_{j in S} sum_k |U_jk(t)|**2 eta_k``; the sign of the time
    in the propagator does not matter because H_n is real symmetric.
    """
    if state.n != spec.n:
        raise ArgumentError(f"state has {state.n} sites, operator has {spec.n}")
    idx = [_site(spec, j, "site in S") for j in sites]
    if len(set(idx)) != len(idx):
        raise ArgumentError("site set contains duplicates")
    if not idx:
        return 0.0
    V = spec.eigenvectors
    U = (V[idx] * np.exp(-2j * t * spec.eigenvalues)) @ V.T
    return float(np.sum(np.abs(U) ** 2 @ state.eta))


def number_bound(spec: SpectralDecomposition, state: ProductState, sites) -> float:
    """Time-independent bound on ``<N_S>``.

    ``sum_{j in S} min(1, sum_k eta_k min(1, Q(j, k))**2)``, using
    ``|U_jk(t)| <= min(1, Q(j, k))`` and unit row norms of U.
    """
    idx = [_site(spec, j, "site in S") for j in sites]
    absV = np.abs(spec.eigenvectors)
    Q = np.minimum(absV[idx] @ absV.T, 1.0)
    return float(np.sum(np.minimum(Q**2 @ state.eta, 1.0)))


def geometric_times(t_min: float, t_max: float, ratio: float = math.sqrt(2.0)) -> np.ndarray:
    """``t_min * ratio**i`` for all i with the value not exceeding ``t_max``."""
    if not (0 < t_min <= t_max and ratio > 1):
        raise ArgumentError("need 0 < t_min <= t_max and ratio > 1")
    count = int(math.floor(math.log(t_max / t_min) / math.log(ratio) + 1e-9)) + 1
    return t_min * ratio ** np.arange(count)


def witness_grid(spec: SpectralDecomposition, ks, times) -> np.ndarray:
    """``|U_1k(t)|`` as a ``(len(ks), len(times))`` array."""
    ks = np.asarray(ks)
    for k in ks:
        _site(spec, int(k), "k")
    return np.abs(propagator_table(spec, 1, times))[ks - 1]


def plr_witness(witnesses, ks, times, a: float, b: float) -> float:
    """``W(a, b) = max_{k, t} (k / t**a)**b * witness[k, t]``.

    If PLR(a, b) holds with constant C then ``W <= C`` for every grid and every
    n, so growth of W over nested grids is evidence against PLR(a, b).
    """
    witnesses = np.asarray(witnesses, dtype=float)
    ks = np.asarray(ks, dtype=float)
    times = np.asarray(times, dtype=float)
    if ks.size == 0 or times.size == 0:
        raise ArgumentError("witness grid is empty")
    if witnesses.shape != (ks.size, times.size):
        raise ArgumentError(f"witnesses have shape {witnesses.shape}, expected {(ks.size, times.size)}")
    if np.any(ks < 2) or np.any(times <= 0):
        raise ArgumentError("grid needs k >= 2 and t > 0")
    if not (0 <= a <= 1 and b > 0):
        raise ArgumentError(f"need 0 <= a <= 1 and b > 0, got a={a}, b={b}")
    scale = (ks[:, None] / times[None, :] ** a) ** b
    return float(np.max(scale * witnesses))
