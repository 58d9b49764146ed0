import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from vibron2d import DomainError, ModelParams
from vibron2d.algebra import (
    _pairing_diagonal,
    _pairing_offdiag,
    assemble_hamiltonian,
    assemble_interaction,
    assemble_lambda_hamiltonian,
    block_basis,
    number_block,
    pairing_block,
    so3_labels,
    u2_label,
)


@st.composite
def params_and_ell(draw, max_N=60):
    N = draw(st.integers(2, max_N))
    xi = draw(st.floats(0.0, 1.0))
    alpha = draw(st.floats(-1.5, 0.5))
    ell = draw(st.integers(0, N))
    return ModelParams(N, xi, alpha), ell


# --- basis ----------------------------------------------------------------


@pytest.mark.parametrize(
    "N, ell, expected",
    [(4, 0, [0, 2, 4]), (4, 1, [1, 3]), (5, 5, [5]), (5, -3, [3, 5])],
)
def test_block_basis_examples(N, ell, expected):
    b = block_basis(N, ell)
    assert list(b.n_values) == expected
    assert b.dim == len(expected)


def test_block_basis_rejects_large_ell():
    with pytest.raises(DomainError, match="7"):
        block_basis(6, 7)


@given(st.integers(2, 200), st.data())
def test_basis_invariants(N, data):
    ell = data.draw(st.integers(-N, N))
    b = block_basis(N, ell)
    n = np.asarray(b.n_values)
    assert b.dim == (N - abs(ell)) // 2 + 1 == len(n)
    assert np.all(np.diff(n) == 2)
    assert n[0] == abs(ell) and n[-1] <= N
    assert np.all((n - ell) % 2 == 0)
    for k, nv in enumerate(n):
        assert b.ordinal(int(nv)) == k == (nv - abs(ell)) // 2


def test_model_params_validation():
    for bad in [dict(N=1, xi=0.1), dict(N=10, xi=1.2), dict(N=10, xi=-0.1), dict(N=2.5, xi=0.1)]:
        with pytest.raises(DomainError):
            ModelParams(**bad)
    with pytest.raises(DomainError):
        ModelParams(10, 0.1, float("nan"))
    p = ModelParams(10, 0.1, -0.6)
    assert p.symmetric_phase and p.in_studied_regime
    assert not ModelParams(10, 0.1, -0.7).in_studied_regime  # alpha_t(0.1) = -0.65


# --- Hamiltonian blocks ------------------------------------------------------


def test_harmonic_limit_is_number_operator():
    for N in (2, 7, 40):
        T = assemble_hamiltonian(ModelParams(N, 0.0, 0.0), block_basis(N, 0))
        np.testing.assert_array_equal(T.diag, np.arange(0, N + 1, 2, dtype=float))
        assert np.all(T.offdiag == 0.0)


def test_two_by_two_example():
    T = assemble_hamiltonian(ModelParams(2, 1.0, 0.0), block_basis(2, 0))
    np.testing.assert_allclose(T.to_dense(), [[2, 2 * math.sqrt(2)], [2 * math.sqrt(2), 4]], atol=1e-15)


def test_anharmonic_diagonal_limit():
    p = ModelParams(11, 0.0, -0.6)
    T = assemble_hamiltonian(p, block_basis(p, 1))
    n = np.array([1, 3, 5, 7, 9, 11], dtype=float)
    np.testing.assert_allclose(T.diag, n - 0.06 * n * (n + 1), rtol=0, atol=1e-13)
    assert np.all(T.offdiag == 0.0)


def test_pairing_elements_by_hand():
    # N=4, l=0: <0|P|0> = 20 - 8 = 12, <2|P|2> = 20 - 2*4 - 3*2 = 6, <4|P|4> = 20 - 0 - 1*4 = 16
    np.testing.assert_array_equal(_pairing_diagonal(4, 0, np.array([0, 2, 4])), [12, 6, 16])
    # couplings sqrt((N-n+2)(N-n+1) n^2) at n = 2 and n = 4
    np.testing.assert_allclose(_pairing_offdiag(4, 0, np.array([0, 2, 4])), [math.sqrt(4 * 3 * 4), math.sqrt(2 * 1 * 16)])


def test_pairing_is_casimir_difference_small_N():
    # P = N(N+1) - W^2 has eigenvalues N(N+1) - w(w+1) with l <= w, w = N, N-2, ...
    for N in range(2, 9):
        for ell in range(N + 1):
            p = ModelParams(N, 0.5, 0.0)
            P = pairing_block(p, block_basis(p, ell)).to_dense()
            w = np.arange(N, -1, -2)
            w = w[w >= ell]
            expect = np.sort(N * (N + 1) - w * (w + 1.0))
            np.testing.assert_allclose(np.linalg.eigvalsh(P), expect, atol=1e-10)


@given(params_and_ell())
@settings(max_examples=60)
def test_parity_invariance(pl):
    p, ell = pl
    a = assemble_hamiltonian(p, block_basis(p, ell))
    b = assemble_hamiltonian(p, block_basis(p, -ell))
    np.testing.assert_array_equal(a.diag, b.diag)
    np.testing.assert_array_equal(a.offdiag, b.offdiag)


@given(params_and_ell())
@settings(max_examples=60)
def test_offdiagonals_positive_when_coupled(pl):
    p, ell = pl
    T = assemble_hamiltonian(p, block_basis(p, ell))
    if p.xi > 0 and T.dim >= 2:
        assert np.all(T.offdiag > 0)
    if p.xi == 0:
        assert np.all(T.offdiag == 0)


@given(st.integers(2, 300), st.data())
@settings(max_examples=60)
def test_redundant_offdiag_lines_agree(N, data):
    # upper line: <n|P|n+2> evaluated from the n -> n+2 formula
    ell = data.draw(st.integers(0, N))
    n = np.asarray(block_basis(N, ell).n_values)
    low = _pairing_offdiag(N, ell, n)
    m = n[:-1]
    up = np.sqrt((N - m) * (N - m - 1.0) * (m + ell + 2.0) * (m - ell + 2.0))
    np.testing.assert_allclose(low, up, rtol=1e-14, atol=0)


def test_xi_zero_diagonal_exact():
    for alpha in (0.0, -0.6, 0.3):
        p = ModelParams(30, 0.0, alpha)
        for ell in (0, 3, 30):
            T = assemble_hamiltonian(p, block_basis(p, ell))
            n = np.asarray(T.basis.n_values, dtype=float)
            np.testing.assert_array_equal(T.diag, 1.0 * n + alpha / 29 * n * (n + 1.0))


def test_number_block():
    p = ModelParams(9, 0.3, -0.2)
    T = number_block(p, block_basis(p, 1))
    np.testing.assert_array_equal(T.diag, [1, 3, 5, 7, 9])
    assert np.all(T.offdiag == 0)


# --- lambda family and interaction -----------------------------------------------


def test_lambda_zero_identical():
    p = ModelParams(25, 0.37, -0.6)
    b = block_basis(p, 3)
    H = assemble_hamiltonian(p, b)
    H0 = assemble_lambda_hamiltonian(p, 0.0, b)
    assert np.array_equal(H.diag, H0.diag) and np.array_equal(H.offdiag, H0.offdiag)


def test_lambda_endpoints():
    p = ModelParams(12, 0.4, -0.6)
    b = block_basis(p, 0)
    P = pairing_block(p, b)
    s = p.xi / (p.N - 1)
    H1 = assemble_lambda_hamiltonian(p, 1.0, b)
    np.testing.assert_allclose(H1.diag, 2 * s * P.diag, rtol=1e-14)
    np.testing.assert_allclose(H1.offdiag, 2 * s * P.offdiag, rtol=1e-14)
    Hm = assemble_lambda_hamiltonian(p, -1.0, b)
    n = np.asarray(b.n_values, dtype=float)
    np.testing.assert_allclose(Hm.diag, 2 * ((1 - p.xi) * n + p.alpha / (p.N - 1) * n * (n + 1)), rtol=1e-14)
    assert np.all(Hm.offdiag == 0)


def test_interaction_is_lambda_derivative():
    p = ModelParams(20, 0.4, -0.6)
    b = block_basis(p, 2)
    H0 = assemble_lambda_hamiltonian(p, 0.0, b)
    H3 = assemble_lambda_hamiltonian(p, 0.3, b)
    HI = assemble_interaction(p, b)
    np.testing.assert_allclose(H3.diag - H0.diag, 0.3 * HI.diag, rtol=1e-12, atol=1e-12)
    np.testing.assert_allclose(H3.offdiag - H0.offdiag, 0.3 * HI.offdiag, rtol=1e-12)


@given(params_and_ell(max_N=40))
@settings(max_examples=40)
def test_interaction_offdiag_matches_hamiltonian(pl):
    p, ell = pl
    b = block_basis(p, ell)
    np.testing.assert_array_equal(assemble_interaction(p, b).offdiag, assemble_hamiltonian(p, b).offdiag)


def test_interaction_diagonal_at_xi_zero():
    p = ModelParams(15, 0.0, -0.6)
    assert np.all(assemble_interaction(p, block_basis(p, 1)).offdiag == 0)


# --- so(3) labels ------------------------------------------------------------------------


@pytest.mark.parametrize(
    "n, ell, nu, omega",
    [(0, 0, 0, 10), (5, 1, 2, 6), (10, 0, 5, 0)],
)
def test_so3_label_examples(n, ell, nu, omega):
    lab = so3_labels(n, ell, 10)
    assert (lab.nu_b, lab.omega, lab.K) == (nu, omega, ell)


def test_so3_label_errors():
    with pytest.raises(DomainError):
        so3_labels(3, 0, 10)
    with pytest.raises(DomainError):
        so3_labels(12, 0, 10)
    with pytest.raises(DomainError):
        so3_labels(1, 3, 10)


@given(st.integers(2, 120), st.data())
def test_so3_round_trip(N, data):
    ell = data.draw(st.integers(-N, N))
    for n in block_basis(N, ell).n_values:
        lab = so3_labels(int(n), ell, N)
        assert lab.nu_b == (N - lab.omega) // 2 and (N - lab.omega) % 2 == 0
        assert 2 * lab.nu_b + abs(ell) == n
        assert u2_label(lab, N) == (n, ell)


def test_blocks_are_immutable():
    T = assemble_hamiltonian(ModelParams(6, 0.3, -0.6), block_basis(6, 0))
    with pytest.raises(ValueError):
        T.diag[0] = 1.0
