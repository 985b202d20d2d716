import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from polarrep.numkernel import (
    DegenerateFormError,
    InvalidInputError,
    NotPositiveDefiniteError,
    TolerancePolicy,
    complement,
    complex_spectrum,
    expand_spectrum,
    hermitian_fourth_root,
    hermitian_power,
    intersection,
    match_spectra,
    null_space,
    orthonormal_basis,
    projection_residual,
    rank_with_tol,
    real_dim,
    real_subspace,
    span_sum,
)

finite = st.floats(-10, 10, allow_nan=False, allow_infinity=False)


def test_policy_rejects_bad_values():
    with pytest.raises(InvalidInputError):
        TolerancePolicy(rank_tol=0)
    with pytest.raises(InvalidInputError):
        TolerancePolicy(rank_tol=1.5)
    with pytest.raises(InvalidInputError):
        TolerancePolicy(eig_tol=-1e-3)


def test_rank_relative_and_absolute_scale():
    m = np.diag([1.0, 1e-12, 0.0])
    assert rank_with_tol(m) == 1
    tiny = 1e-14 * np.eye(2)
    assert rank_with_tol(tiny) == 2           # relative to its own norm
    assert rank_with_tol(tiny, scale=1.0) == 0


def test_non_finite_input_rejected():
    with pytest.raises(InvalidInputError):
        rank_with_tol(np.array([[np.nan]]))


def test_null_space_and_subspace_ops():
    m = np.array([[1.0, 1.0, 0.0]])
    k = null_space(m)
    assert k.shape == (3, 2)
    assert np.allclose(m @ k, 0)
    a = np.eye(3)[:, :2]
    b = np.eye(3)[:, 1:]
    assert intersection(a, b).shape[1] == 1
    assert projection_residual(intersection(a, b), np.eye(3)[:, 1]) < 1e-14
    assert span_sum(a, b).shape[1] == 3


def test_complement_bilinear_and_degenerate():
    g = np.diag([1.0, -1.0, 1.0])
    a = np.array([[1.0], [1.0], [0.0]])  # null vector, contained in its own complement
    c = complement(a, g)
    assert c.shape[1] == 2
    assert np.allclose(a.T @ g @ c, 0)
    assert projection_residual(c, a) < 1e-12
    with pytest.raises(DegenerateFormError):
        complement(a, np.diag([1.0, 0.0, 1.0]))


def test_real_subspace_of_conjugation():
    # fixed points of x -> conj(x) in C^2 form R^2; of x -> -conj(x) form iR^2
    assert real_dim(real_subspace(np.eye(2), [(np.eye(2), 1)])) == 2
    b = real_subspace(np.eye(2), [(np.eye(2), -1)])
    assert b.shape[1] == 2 and np.allclose(b.real, 0)
    # no condition: C^2 has real dimension 4
    assert real_subspace(np.eye(2)).shape[1] == 4


def test_real_subspace_linear_condition():
    swap = np.array([[0.0, 1.0], [1.0, 0.0]])
    b = real_subspace(np.eye(2), [(np.eye(2), 1), (swap, 1, "linear")])
    assert b.shape[1] == 1
    assert np.allclose(b[0], b[1])


def test_complex_spectrum_diagonalizable_and_defective():
    rot = np.array([[0.0, -2.0], [2.0, 0.0]])
    pairs, diag = complex_spectrum(rot)
    assert diag
    assert match_spectra(expand_spectrum(pairs), [2j, -2j], 1e-12) < 1e-12
    jordan = np.array([[3.0, 1.0], [0.0, 3.0]])
    pairs, diag = complex_spectrum(jordan)
    assert not diag
    assert pairs == [(3.0, 2)]
    pairs, diag = complex_spectrum(np.eye(3))
    assert diag and pairs == [(1.0, 3)]


def test_match_spectra_length_mismatch():
    assert match_spectra([1.0], [1.0, 2.0], 1e-9) == float("inf")


def test_hermitian_power_rejects_non_positive():
    with pytest.raises(NotPositiveDefiniteError):
        hermitian_power(np.diag([1.0, -1.0]), np.eye(2), 0.5)
    with pytest.raises(NotPositiveDefiniteError):
        hermitian_power(np.eye(2), np.diag([1.0, -1.0]), 0.5)


def test_fourth_root_known_value():
    phi = hermitian_fourth_root(np.diag([16.0, 81.0]))
    assert np.allclose(phi, np.diag([2.0, 3.0]))


@settings(max_examples=40, deadline=None)
@given(arrays(np.float64, (4, 4), elements=finite), st.floats(0.1, 3.0))
def test_fourth_root_property(a, shift):
    # positive w.r.t. a non-trivial Gram matrix G: M = G^-1 P with P positive
    p = a @ a.T + shift * np.eye(4)
    g = np.diag([1.0, 2.0, 3.0, 4.0])
    m = np.linalg.solve(g, p) @ np.linalg.solve(g, p)
    phi = hermitian_fourth_root(m, g)
    assert np.allclose(np.linalg.matrix_power(phi, 4), m, rtol=1e-7, atol=1e-7 * np.abs(m).max())
    # phi is self-adjoint for the form y^T G x
    assert np.allclose(g @ phi, (g @ phi).T, atol=1e-8 * np.abs(g @ phi).max())


@settings(max_examples=40, deadline=None)
@given(arrays(np.float64, (5, 3), elements=finite))
def test_orthonormal_basis_property(a):
    q = orthonormal_basis(a)
    assert q.shape[1] == rank_with_tol(a)
    assert np.allclose(q.conj().T @ q, np.eye(q.shape[1]), atol=1e-10)
    if q.shape[1]:
        assert projection_residual(q, a) < 1e-7


@settings(max_examples=40, deadline=None)
@given(arrays(np.float64, (3, 5), elements=finite))
def test_null_space_property(m):
    k = null_space(m)
    assert k.shape[1] + rank_with_tol(m) == 5
    if k.shape[1]:
        assert np.linalg.norm(m @ k) <= 1e-7 * max(np.linalg.norm(m), 1.0)


@settings(max_examples=40, deadline=None)
@given(arrays(np.float64, (4,), elements=st.floats(-5, 5)), st.integers(0, 3))
def test_spectrum_is_similarity_invariant(diag_vals, seed):
    rng = np.random.default_rng(seed)
    s = rng.standard_normal((4, 4)) + 4 * np.eye(4)
    m = s @ np.diag(diag_vals) @ np.linalg.inv(s)
    pairs, _ = complex_spectrum(m)
    err = match_spectra(expand_spectrum(pairs), list(diag_vals.astype(complex)), 1e-6)
    assert err <= 1e-5 * max(1.0, np.abs(diag_vals).max()) * np.linalg.cond(s)
