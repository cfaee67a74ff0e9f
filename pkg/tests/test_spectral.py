import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from plr_chain.disorder import DisorderConfig, OneBodyOperator, build_one_body, free_chain, sample_potential
from plr_chain.errors import ArgumentError
from plr_chain.spectral import (
    correlator_row,
    diagonalize,
    eigenfunction_correlator,
    propagator,
    propagator_row,
    propagator_table,
)


def random_spec(n, lam, index, seed=5):
    cfg = DisorderConfig(n=n, lam=lam, master_seed=seed)
    H = build_one_body(cfg, sample_potential(cfg, index))
    return H, diagonalize(H)


def test_single_site():
    spec = diagonalize(OneBodyOperator([0.3], []))
    assert spec.eigenvalues.tolist() == [0.3]
    assert spec.eigenvectors.tolist() == [[1.0]]


def test_two_sites():
    spec = diagonalize(free_chain(2))
    np.testing.assert_allclose(spec.eigenvalues, [-1, 1], atol=1e-15)
    s = 1 / math.sqrt(2)
    np.testing.assert_allclose(spec.eigenvectors, [[s, s], [-s, s]], atol=1e-15)


def test_three_sites_against_characteristic_polynomial():
    roots = np.sort(np.roots([1, 0, -2, 0]).real)
    dense = np.linalg.eigvalsh(free_chain(3).to_dense())
    np.testing.assert_allclose(roots, [-math.sqrt(2), 0, math.sqrt(2)], atol=1e-14)
    np.testing.assert_allclose(dense, roots, atol=1e-14)
    np.testing.assert_allclose(diagonalize(free_chain(3)).eigenvalues, roots, atol=1e-12)


@pytest.mark.parametrize("n,lam", [(2, 0.5), (17, 3.0), (300, 1.0), (300, 8.0)])
def test_decomposition_invariants(n, lam):
    H, spec = random_spec(n, lam, 0)
    assert np.all(np.diff(spec.eigenvalues) >= 0)
    assert spec.residual(H) <= 1e-10 * max(1.0, H.norm_bound())
    assert spec.orthonormality_error() <= 1e-10
    bound = 2 + np.max(np.abs(H.diag))
    assert np.all(np.abs(spec.eigenvalues) <= bound)
    assert abs(spec.eigenvalues.sum() - H.diag.sum()) <= 1e-9 * n


def test_sign_convention_and_determinism():
    _, a = random_spec(50, 2.0, 3)
    _, b = random_spec(50, 2.0, 3)
    assert a.eigenvectors.tobytes() == b.eigenvectors.tobytes()
    first = a.eigenvectors[np.argmax(np.abs(a.eigenvectors) > 1e-300, axis=0), np.arange(50)]
    assert np.all(first > 0)


def test_decomposition_is_read_only():
    _, spec = random_spec(5, 1.0, 0)
    with pytest.raises(ValueError):
        spec.eigenvalues[0] = 1.0


def test_degenerate_cluster_orthonormalized():
    from plr_chain.spectral import _fix_degenerate

    w = np.array([-1.0, 0.5, 0.5 + 1e-14, 2.0])
    rng = np.random.default_rng(0)
    V = np.linalg.qr(rng.normal(size=(4, 4)))[0]
    V[:, 2] = (V[:, 1] + 1e-3 * V[:, 2]) / np.linalg.norm(V[:, 1] + 1e-3 * V[:, 2])
    fixed = _fix_degenerate(w, V)
    np.testing.assert_allclose(fixed.T @ fixed, np.eye(4), atol=1e-12)
    np.testing.assert_array_equal(fixed[:, [0, 3]], V[:, [0, 3]])


@settings(max_examples=30, deadline=None)
@given(n=st.integers(1, 8), lam=st.floats(0.1, 10), index=st.integers(0, 1000))
def test_matches_dense_solver(n, lam, index):
    H, spec = random_spec(n, lam, index)
    np.testing.assert_allclose(spec.eigenvalues, np.linalg.eigvalsh(H.to_dense()), atol=1e-10, rtol=0)


def test_propagator_identity_at_zero():
    _, spec = random_spec(6, 2.0, 1)
    for j in range(1, 7):
        for k in range(1, 7):
            assert abs(propagator(spec, j, k, 0.0) - (j == k)) < 1e-14


def test_propagator_single_site():
    spec = diagonalize(OneBodyOperator([0.7], []))
    for t in (0.0, 0.4, 3.3):
        assert abs(propagator(spec, 1, 1, t) - np.exp(-2j * t * 0.7)) < 1e-15


@pytest.mark.parametrize("t", [0.0, 0.25, 1.1, 7.9])
def test_propagator_two_sites(t):
    spec = diagonalize(free_chain(2))
    assert abs(propagator(spec, 1, 1, t) - math.cos(2 * t)) < 1e-12
    assert abs(propagator(spec, 1, 2, t) - (-1j * math.sin(2 * t))) < 1e-12


def test_propagator_matches_dense_expm():
    from scipy.linalg import expm

    H, spec = random_spec(12, 1.5, 4)
    U = expm(-2j * 0.83 * H.to_dense())
    for j in range(1, 13):
        np.testing.assert_allclose(propagator_row(spec, j, 0.83), U[j - 1], atol=1e-12)


def test_free_propagator_bessel_closed_form():
    from scipy.special import jv

    # half-line image formula: <d_1, exp(-2itH) d_k> = (-i)**(k-1) k J_k(4t) / (2t)
    spec = diagonalize(free_chain(400))
    k = np.arange(1, 401)
    for t in (0.5, 3.0, 20.0):
        expected = (-1j) ** (k - 1) * k * jv(k, 4 * t) / (2 * t)
        np.testing.assert_allclose(propagator_row(spec, 1, t), expected, atol=1e-11)


def test_row_and_table_agree_with_elementwise():
    _, spec = random_spec(20, 2.0, 2)
    times = [0.0, 0.3, 5.0]
    table = propagator_table(spec, 3, times)
    for i, t in enumerate(times):
        row = propagator_row(spec, 3, t)
        assert np.max(np.abs(row - table[:, i])) < 1e-12
        elem = np.array([propagator(spec, 3, k, t) for k in range(1, 21)])
        assert np.max(np.abs(row - elem)) < 1e-12
    np.testing.assert_allclose(propagator_row(spec, 3, 0.0), np.eye(20)[2], atol=1e-14)


def test_out_of_range_sites():
    _, spec = random_spec(4, 1.0, 0)
    for bad in (0, 5, -1):
        with pytest.raises(ArgumentError):
            propagator(spec, bad, 1, 0.0)
        with pytest.raises(ArgumentError):
            eigenfunction_correlator(spec, 1, bad)
        with pytest.raises(ArgumentError):
            propagator_row(spec, bad, 0.0)


def test_correlator_examples():
    assert eigenfunction_correlator(diagonalize(OneBodyOperator([0.1], [])), 1, 1) == 1.0
    assert abs(eigenfunction_correlator(diagonalize(free_chain(2)), 1, 2) - 1.0) < 1e-15
    _, spec = random_spec(30, 3.0, 0)
    for j in range(1, 31):
        assert abs(eigenfunction_correlator(spec, j, j) - 1.0) < 1e-12


def test_correlator_symmetric_and_row():
    _, spec = random_spec(25, 2.0, 1)
    row = correlator_row(spec, 4)
    for k in range(1, 26):
        assert eigenfunction_correlator(spec, 4, k) == pytest.approx(eigenfunction_correlator(spec, k, 4), abs=1e-15)
        assert row[k - 1] == pytest.approx(eigenfunction_correlator(spec, 4, k), abs=1e-14)


@pytest.mark.parametrize("lam,index", [(0.5, 0), (2.0, 1), (6.0, 2)])
def test_unitarity_and_domination(lam, index):
    _, spec = random_spec(60, lam, index)
    times = np.linspace(0, 100, 200)
    for j in (1, 7, 30):
        table = propagator_table(spec, j, times)
        np.testing.assert_allclose(np.sum(np.abs(table) ** 2, axis=0), 1.0, atol=1e-10)
        Q = correlator_row(spec, j)
        assert np.all(np.abs(table).max(axis=1) <= Q + 1e-10)
