"""Dense many-body reference for small chains (n <= 10).

Builds Pauli, spin-ladder and Jordan-Wigner fermion operators on the full
``2**n`` dimensional space and checks the quasi-free formulas of
:mod:`plr_chain.quasifree` against brute-force Heisenberg evolution.

Conventions: site 1 is the leftmost Kronecker factor; the local basis is
(up, down) with ``sz = diag(1, -1)`` and the lowering operator
``a = [[0, 0], [1, 0]]``.
"""

from __future__ import annotations

from functools import reduce
from typing import NamedTuple

import numpy as np

from .disorder import DisorderConfig, OneBodyOperator, build_one_body, sample_potential
from .errors import ArgumentError, ResourceError
from .quasifree import ProductState, commutator_upper, number_expectation
from .spectral import diagonalize, propagator, propagator_row

MAX_SITES = 10

_I2 = np.eye(2, dtype=complex)
_LOCAL = {
    "sx": np.array([[0, 1], [1, 0]], dtype=complex),
    "sy": np.array([[0, -1j], [1j, 0]], dtype=complex),
    "sz": np.array([[1, 0], [0, -1]], dtype=complex),
    "a": np.array([[0, 0], [1, 0]], dtype=complex),
    "a*": np.array([[0, 1], [0, 0]], dtype=complex),
}


def _guard(n):
    if n > MAX_SITES:
        raise ResourceError(f"dense oracle is capped at n <= {MAX_SITES}, got n={n}")
    if n < 1:
        raise ArgumentError("n must be >= 1")


def _embed(factors):
    return reduce(np.kron, factors)


def build_site_operator(kind: str, j: int, n: int) -> np.ndarray:
    """Operator ``kind`` on site j of an n-site chain as a dense ``2**n`` matrix.

    ``kind`` is one of ``sx, sy, sz, a, a*, c, c*``; the fermionic ``c`` and
    ``c*`` carry the Jordan-Wigner string ``sz_1 ... sz_{j-1}``.
    """
    _guard(n)
    if not 1 <= j <= n:
        raise ArgumentError(f"site {j} outside 1..{n}")
    if kind in _LOCAL:
        factors = [_I2] * n
        factors[j - 1] = _LOCAL[kind]
    elif kind in ("c", "c*"):
        factors = [_LOCAL["sz"]] * (j - 1) + [_LOCAL["a" if kind == "c" else "a*"]] + [_I2] * (n - j)
    else:
        raise ArgumentError(f"unknown operator kind {kind!r}")
    return _embed(factors)


def xy_hamiltonian(H: OneBodyOperator) -> np.ndarray:
    """Spin form ``-sum (sx sx + sy sy) + sum V~_j sz_j`` with ``V~ = H.diag``."""
    n = H.n
    _guard(n)
    dim = 2**n
    out = np.zeros((dim, dim), dtype=complex)
    sx = [build_site_operator("sx", j, n) for j in range(1, n + 1)]
    sy = [build_site_operator("sy", j, n) for j in range(1, n + 1)]
    for j in range(n - 1):
        out -= sx[j] @ sx[j + 1] + sy[j] @ sy[j + 1]
    for j in range(n):
        out += H.diag[j] * build_site_operator("sz", j + 1, n)
    return out


def build_xy_hamiltonian(config: DisorderConfig, potential) -> np.ndarray:
    return xy_hamiltonian(build_one_body(config, potential))


def fermionic_hamiltonian(H: OneBodyOperator, include_constant: bool = True) -> np.ndarray:
    """``2 sum_jk (H_n)_jk c_j* c_k``, minus ``sum V~_j`` times identity if requested."""
    n = H.n
    _guard(n)
    c = [build_site_operator("c", j, n) for j in range(1, n + 1)]
    cd = [m.conj().T for m in c]
    h = H.to_dense()
    out = np.zeros((2**n, 2**n), dtype=complex)
    for j in range(n):
        for k in range(n):
            if h[j, k] != 0:
                out += 2.0 * h[j, k] * (cd[j] @ c[k])
    if include_constant:
        out -= np.sum(H.diag) * np.eye(2**n)
    return out


def _check_hermitian(H):
    scale = max(np.linalg.norm(H, 2), 1.0)
    if np.linalg.norm(H - H.conj().T, 2) > 1e-12 * scale:
        raise ArgumentError("generator is not Hermitian")


class Evolver:
    """Heisenberg evolution ``A -> exp(itH) A exp(-itH)`` with H diagonalized once."""

    def __init__(self, H: np.ndarray):
        _check_hermitian(H)
        self.dim = H.shape[0]
        self.w, self.V = np.linalg.eigh(H)

    def unitary(self, t: float) -> np.ndarray:
        """``exp(-itH)``."""
        return (self.V * np.exp(-1j * t * self.w)) @ self.V.conj().T

    def heisenberg(self, A: np.ndarray, t: float) -> np.ndarray:
        if A.shape != (self.dim, self.dim):
            raise ArgumentError(f"operator shape {A.shape} does not match dimension {self.dim}")
        U = self.unitary(t)
        return U.conj().T @ A @ U

    def schroedinger(self, rho: np.ndarray, t: float) -> np.ndarray:
        U = self.unitary(t)
        return U @ rho @ U.conj().T


def heisenberg_evolve(H: np.ndarray, A: np.ndarray, t: float) -> np.ndarray:
    return Evolver(H).heisenberg(A, t)


def exact_commutator_norm(H: np.ndarray, A: np.ndarray, B: np.ndarray, t: float, evolver: Evolver | None = None) -> float:
    """Operator norm of ``[tau_t(A), B]``."""
    if A.shape != B.shape or A.shape != H.shape:
        raise ArgumentError("dimension mismatch between H, A and B")
    At = (evolver or Evolver(H)).heisenberg(A, t)
    return float(np.linalg.norm(At @ B - B @ At, 2))


def product_state_density(state: ProductState) -> np.ndarray:
    _guard(state.n)
    return _embed([np.diag([eta, 1.0 - eta]).astype(complex) for eta in state.eta])


def number_operator(sites, n: int) -> np.ndarray:
    _guard(n)
    out = np.zeros((2**n, 2**n), dtype=complex)
    for j in sites:
        a = build_site_operator("a", j, n)
        out += a.conj().T @ a
    return out


def exact_number_expectation(H: np.ndarray, state: ProductState, sites, t: float, evolver: Evolver | None = None) -> float:
    """``tr(N_S exp(-itH) rho exp(itH))`` by dense linear algebra."""
    if H.shape != (2**state.n, 2**state.n):
        raise ArgumentError("state and Hamiltonian dimensions differ")
    rho_t = (evolver or Evolver(H)).schroedinger(product_state_density(state), t)
    return float(np.real(np.trace(number_operator(sites, state.n) @ rho_t)))


def random_observable(rng: np.random.Generator, first: int, n: int) -> np.ndarray:
    """Random operator of unit norm supported on sites ``first..n``."""
    d = 2 ** (n - first + 1)
    M = rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))
    M /= np.linalg.norm(M, 2)
    return np.kron(np.eye(2 ** (first - 1)), M)


class CheckResult(NamedTuple):
    name: str
    passed: bool
    worst: float
    tolerance: float
    count: int


def run_oracle_suite(
    n_values=(2, 3, 4, 5, 6),
    lambdas=(0.5, 2.0, 6.0),
    times=(0.0, 0.3, 0.7, 1.3, 2.1),
    seeds=(0, 1),
    master_seed: int = 20240601,
) -> list[CheckResult]:
    """Cross-check every quasi-free formula against the dense simulator.

    Instances are all combinations of ``n_values``, ``lambdas`` and ``seeds``
    (realization indices of an ensemble rooted at ``master_seed``).
    """
    worst = {
        "hermitian": 0.0,
        "xy-identity": 0.0,
        "car": 0.0,
        "heisenberg-c": 0.0,
        "constant-dynamics": 0.0,
        "number": 0.0,
        "sandwich-lower": 0.0,
        "sandwich-upper": 0.0,
        "leibniz": 0.0,
    }
    tol = {
        "hermitian": 1e-12,
        "xy-identity": 1e-10,
        "car": 1e-12,
        "heisenberg-c": 1e-9,
        "constant-dynamics": 1e-10,
        "number": 1e-8,
        "sandwich-lower": 1e-10,
        "sandwich-upper": 1e-10,
        "leibniz": 1e-10,
    }
    count = dict.fromkeys(worst, 0)

    def record(name, value):
        worst[name] = max(worst[name], float(value))
        count[name] += 1

    for n in n_values:
        c = [build_site_operator("c", j, n) for j in range(1, n + 1)]
        cd = [m.conj().T for m in c]
        eye = np.eye(2**n)
        for j in range(n):
            for k in range(n):
                record("car", np.max(np.abs(c[j] @ cd[k] + cd[k] @ c[j] - (j == k) * eye)))
                record("car", np.max(np.abs(c[j] @ c[k] + c[k] @ c[j])))
        a1 = build_site_operator("a", 1, n)
        n1 = a1.conj().T @ a1
        adag = [build_site_operator("a*", k, n) for k in range(1, n + 1)]
        for lam in lambdas:
            cfg = DisorderConfig(n=n, lam=lam, master_seed=master_seed)
            for seed in seeds:
                rng = np.random.default_rng([master_seed, n, int(lam * 10), seed])
                H1 = build_one_body(cfg, sample_potential(cfg, seed))
                spec = diagonalize(H1)
                Hxy = xy_hamiltonian(H1)
                record("hermitian", np.linalg.norm(Hxy - Hxy.conj().T, 2) / np.linalg.norm(Hxy, 2))
                record("xy-identity", np.max(np.abs(Hxy - fermionic_hamiltonian(H1, True))))
                ev = Evolver(Hxy)
                ev_free = Evolver(fermionic_hamiltonian(H1, False))
                eta = rng.uniform(0, 1, n)
                states = [ProductState(eta), ProductState.domain_wall(n, n // 2)]
                S = sorted(rng.choice(np.arange(1, n + 1), size=rng.integers(1, n + 1), replace=False).tolist())
                Bs = [random_observable(rng, k, n) for k in range(2, n + 1)]
                for t in times:
                    for j in range(1, n + 1):
                        row = propagator_row(spec, j, t)
                        lhs = ev.heisenberg(c[j - 1], t)
                        rhs = sum(row[m] * c[m] for m in range(n))
                        record("heisenberg-c", np.max(np.abs(lhs - rhs)))
                    ct = ev.heisenberg(c[0], t)
                    nt = ev.heisenberg(n1, t)
                    for k in range(2, n + 1):
                        D = commutator_upper(spec, 1, k, t)
                        exact = np.linalg.norm(ct @ adag[k - 1] - adag[k - 1] @ ct, 2)
                        wit = abs(propagator(spec, 1, k, t))
                        record("sandwich-lower", wit - exact)
                        record("sandwich-upper", exact - 8 * D)
                        B = Bs[k - 2]
                        record("sandwich-upper", np.linalg.norm(ct @ B - B @ ct, 2) - 8 * D)
                        record("leibniz", np.linalg.norm(nt @ B - B @ nt, 2) - 16 * D)
                        alt = exact_commutator_norm(Hxy, c[0], B, t, ev_free)
                        record("constant-dynamics", abs(alt - np.linalg.norm(ct @ B - B @ ct, 2)))
                    for state in states:
                        exact = exact_number_expectation(Hxy, state, S, t, ev)
                        record("number", abs(exact - number_expectation(spec, state, S, t)))
    return [CheckResult(name, worst[name] <= tol[name], worst[name], tol[name], count[name]) for name in worst]


def format_suite(results) -> str:
    lines = [f"{'check':<20}{'status':<8}{'worst':>12}{'tol':>10}{'count':>8}"]
    for r in results:
        status = "PASS" if r.passed else "FAIL"
        lines.append(f"{r.name:<20}{status:<8}{r.worst:>12.3e}{r.tolerance:>10.0e}{r.count:>8}")
    return "\n".join(lines)
