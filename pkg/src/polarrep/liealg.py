"""Lie algebra arithmetic from structure constants."""
from dataclasses import dataclass, field

import numpy as np

from .numkernel import (
    DEFAULT_POLICY,
    InvalidInputError,
    as_matrix,
    complex_spectrum,
    null_space,
    orthonormal_basis,
)


class LieAlgebraError(ValueError):
    """Structure constants or realization fail the Lie algebra axioms."""


@dataclass(frozen=True, eq=False)
class LieAlgebraModel:
    """Basis-indexed Lie algebra, ``[X_i, X_j] = sum_k c[i, j, k] X_k``."""

    labels: tuple
    structure_constants: np.ndarray
    matrix_realization: tuple | None = None
    residuals: dict = field(default_factory=dict)

    @property
    def dim(self):
        return len(self.labels)

    def bracket(self, x, y):
        return np.einsum("i,j,ijk->k", x, y, self.structure_constants)


def make_algebra(labels, structure_constants, matrix_realization=None, pol=DEFAULT_POLICY,
                 tol=1e-9):
    """Validate structure constants (and a realization) and build the model."""
    c = np.asarray(structure_constants)
    n = len(labels)
    if c.shape != (n, n, n):
        raise InvalidInputError(f"structure constants must have shape {(n, n, n)}, got {c.shape}")
    if not np.all(np.isfinite(c)):
        raise InvalidInputError("structure constants are not finite")
    if np.isrealobj(c) or np.allclose(c.imag, 0, atol=1e-14):
        c = np.real(c).astype(float)
    scale = max(np.abs(c).max(), 1.0) if c.size else 1.0
    antisym = float(np.abs(c + c.transpose(1, 0, 2)).max()) if c.size else 0.0
    # Jacobi: [[e_i, e_j], e_k] + cyclic = 0
    jac = np.einsum("ijm,mkl->ijkl", c, c)
    jac = jac + jac.transpose(1, 2, 0, 3) + jac.transpose(2, 0, 1, 3)
    jacobi = float(np.abs(jac).max()) if jac.size else 0.0
    residuals = {"antisymmetry": antisym / scale, "jacobi": jacobi / scale**2}
    mats = None
    if matrix_realization is not None:
        mats = tuple(as_matrix(m) for m in matrix_realization)
        if len(mats) != n:
            raise InvalidInputError("matrix realization needs one matrix per basis element")
        worst = 0.0
        for i in range(n):
            for j in range(n):
                comm = mats[i] @ mats[j] - mats[j] @ mats[i]
                pred = sum(c[i, j, k] * mats[k] for k in range(n)) if n else 0
                worst = max(worst, float(np.abs(comm - pred).max()))
        residuals["realization"] = worst / scale
    bad = {k: v for k, v in residuals.items() if v > tol}
    if bad:
        detail = ", ".join(f"{k} residual {v:.3e}" for k, v in bad.items())
        raise LieAlgebraError(f"not a Lie algebra: {detail}")
    return LieAlgebraModel(tuple(labels), c, mats, residuals)


def algebra_from_matrices(mats, labels=None, tol=1e-9):
    """Structure constants of the span of linearly independent matrices.

    The span must be closed under commutators.  Real-linear combinations are
    used, so a real basis of a real form gives real structure constants.
    """
    mats = [np.asarray(m) for m in mats]
    n = len(mats)
    labels = labels or [f"X{i}" for i in range(n)]
    flat = np.array([m.ravel() for m in mats]).T
    real = np.vstack([flat.real, flat.imag])
    c = np.zeros((n, n, n))
    for i in range(n):
        for j in range(i + 1, n):
            comm = (mats[i] @ mats[j] - mats[j] @ mats[i]).ravel()
            rhs = np.concatenate([comm.real, comm.imag])
            coef, *_ = np.linalg.lstsq(real, rhs, rcond=None)
            if np.linalg.norm(real @ coef - rhs) > tol * max(1.0, np.linalg.norm(rhs)):
                raise LieAlgebraError(f"span not closed under [{labels[i]}, {labels[j]}]")
            c[i, j] = coef
            c[j, i] = -coef
    return make_algebra(labels, c, mats, tol=tol)


def ad_matrix(alg, v):
    """Matrix of ``x -> [v, x]`` in the algebra basis."""
    v = np.asarray(v)
    if v.shape != (alg.dim,):
        raise InvalidInputError(f"vector of length {alg.dim} expected, got shape {v.shape}")
    if not np.all(np.isfinite(v)):
        raise InvalidInputError("vector has non-finite entries")
    # column j holds the coordinates of [v, e_j]
    return np.einsum("i,ijk->kj", v, alg.structure_constants)


def ad_matrices(alg):
    """Stack of ad matrices of the basis elements, shape (dim, dim, dim)."""
    return np.transpose(alg.structure_constants, (0, 2, 1))


def killing_form(alg):
    """Gram matrix of the Killing form ``trace(ad_x ad_y)``."""
    ads = ad_matrices(alg)
    gram = np.einsum("iab,jba->ij", ads, ads)
    return (gram + gram.T) / 2


def centralizer(alg, s, pol=DEFAULT_POLICY, action=None):
    """Orthonormal basis of the elements commuting with every column of ``s``.

    With ``action`` (a stack of matrices, one per basis element of ``alg``)
    the columns of ``s`` are vectors of the representation space and the
    result is their joint isotropy algebra.
    """
    s = as_matrix(s)
    if s.shape[1] == 0:
        return np.eye(alg.dim)
    if action is None:
        # [x, w] = -ad_w x
        blocks = [ad_matrix(alg, s[:, j]) for j in range(s.shape[1])]
    else:
        action = np.asarray(action)
        blocks = [np.einsum("aij,j->ia", action, s[:, j]) for j in range(s.shape[1])]
    stacked = np.vstack(blocks)
    scale = max(np.linalg.norm(stacked, 2), 1e-300)
    return orthonormal_basis(null_space(stacked, pol, scale=scale), pol, scale=1.0)


def is_semisimple_element(alg, v, pol=DEFAULT_POLICY):
    """True iff ad_v is diagonalizable over C."""
    return complex_spectrum(ad_matrix(alg, v), pol)[1]
