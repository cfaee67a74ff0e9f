"""Eigendecomposition of the one-body operator and derived amplitudes.

All time dependence uses the physical one-body propagator ``exp(-2itH_n)``;
the factor 2 comes from ``H_XY = 2 C* H_n C + const`` and is applied here
only.  Sites are 1-based throughout the public API.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

import numpy as np
from scipy.linalg import LinAlgError, eigh_tridiagonal

from .disorder import OneBodyOperator
from .errors import ArgumentError, ConvergenceError

#: eigenvalues closer than this are treated as one degenerate cluster
DEGENERACY_GAP = 1e-12
#: entries below this magnitude are skipped when fixing eigenvector signs
_SIGN_TOL = 1e-300


@dataclass(frozen=True)
class SpectralDecomposition:
    """Ascending eigenvalues and orthonormal eigenvectors (as columns)."""

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray

    @property
    def n(self) -> int:
        return self.eigenvalues.size

    def residual(self, H: OneBodyOperator) -> float:
        """Largest column residual ``||H psi - E psi||_2``."""
        V = self.eigenvectors
        HV = H.diag[:, None] * V
        HV[:-1] += H.offdiag[:, None] * V[1:]
        HV[1:] += H.offdiag[:, None] * V[:-1]
        return float(np.max(np.linalg.norm(HV - V * self.eigenvalues, axis=0)))

    def orthonormality_error(self) -> float:
        V = self.eigenvectors
        return float(np.max(np.abs(V.T @ V - np.eye(self.n))))


def _fix_degenerate(w, V):
    clusters = np.flatnonzero(np.diff(w) < DEGENERACY_GAP)
    if clusters.size == 0:
        return V
    V = V.copy()
    start = None
    for i in range(w.size - 1):
        close = w[i + 1] - w[i] < DEGENERACY_GAP
        if close and start is None:
            start = i
        if not close and start is not None:
            V[:, start : i + 1] = np.linalg.qr(V[:, start : i + 1])[0]
            start = None
    if start is not None:
        V[:, start:] = np.linalg.qr(V[:, start:])[0]
    return V


def _fix_signs(V):
    nonzero = np.abs(V) > _SIGN_TOL
    first = np.argmax(nonzero, axis=0)
    signs = np.sign(V[first, np.arange(V.shape[1])])
    signs[signs == 0] = 1.0
    return V * signs


def diagonalize(H: OneBodyOperator) -> SpectralDecomposition:
    """Diagonalize ``H`` with LAPACK's tridiagonal solver.

    Eigenvectors are returned with their first nonzero entry positive, so the
    decomposition is deterministic for a given input.
    """
    if H.n == 1:
        w = H.diag.copy()
        V = np.ones((1, 1))
    else:
        try:
            w, V = eigh_tridiagonal(H.diag, H.offdiag, check_finite=True)
        except LinAlgError as exc:
            match = re.search(r"(-?\d+)", str(exc))
            index = int(match.group(1)) if match else None
            raise ConvergenceError(f"tridiagonal eigensolver failed: {exc}", index) from exc
        V = _fix_degenerate(w, V)
    V = _fix_signs(V)
    w.setflags(write=False)
    V.setflags(write=False)
    return SpectralDecomposition(w, V)


def _site(spec: SpectralDecomposition, j, name="site") -> int:
    if isinstance(j, bool) or not isinstance(j, (int, np.integer)):
        raise ArgumentError(f"{name} must be an integer, got {j!r}")
    if not 1 <= j <= spec.n:
        raise ArgumentError(f"{name} {j} outside 1..{spec.n}")
    return int(j) - 1


def propagator(spec: SpectralDecomposition, j: int, k: int, t: float) -> complex:
    """``<delta_j, exp(-2itH) delta_k>``."""
    V = spec.eigenvectors
    a, b = _site(spec, j, "j"), _site(spec, k, "k")
    return complex(np.sum(np.exp(-2j * t * spec.eigenvalues) * V[a] * V[b]))


def propagator_row(spec: SpectralDecomposition, j: int, t: float) -> np.ndarray:
    """``k -> <delta_j, exp(-2itH) delta_k>`` for all k at once."""
    a = _site(spec, j, "j")
    V = spec.eigenvectors
    return V @ (np.exp(-2j * t * spec.eigenvalues) * V[a])


def propagator_table(spec: SpectralDecomposition, j: int, times) -> np.ndarray:
    """Rows of the propagator from site ``j`` at several times.

    Returns an ``(n, len(times))`` complex array whose column ``i`` equals
    ``propagator_row(spec, j, times[i])``.
    """
    a = _site(spec, j, "j")
    times = np.atleast_1d(np.asarray(times, dtype=float))
    V = spec.eigenvectors
    phases = np.exp(-2j * np.outer(spec.eigenvalues, times)) * V[a][:, None]
    return V @ phases


def eigenfunction_correlator(spec: SpectralDecomposition, j: int, k: int) -> float:
    """``Q(j, k) = sum_E |psi_E(j)| |psi_E(k)|``.

    Q dominates ``|<delta_j, g(H) delta_k>|`` for every ``|g| <= 1``.  Within an
    exactly degenerate eigenspace Q depends on the chosen basis, but the
    domination holds for any orthonormal choice.
    """
    V = spec.eigenvectors
    a, b = _site(spec, j, "j"), _site(spec, k, "k")
    return float(np.abs(V[a]) @ np.abs(V[b]))


def correlator_row(spec: SpectralDecomposition, j: int) -> np.ndarray:
    """``Q(j, k)`` for k = 1..n."""
    a = _site(spec, j, "j")
    absV = np.abs(spec.eigenvectors)
    return absV @ absV[a]


def dump(spec: SpectralDecomposition, provenance: dict | None = None) -> dict:
    """JSON-serializable debug dump; not a stable format."""
    return {
        "provenance": provenance or {},
        "eigenvalues": spec.eigenvalues.tolist(),
        "eigenvectors": spec.eigenvectors.tolist(),
    }
