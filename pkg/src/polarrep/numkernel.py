"""Tolerance-aware dense linear algebra shared by the rest of the package.

Matrices are plain numpy arrays.  Conjugate-linear maps are stored as a
matrix ``M`` acting by ``x -> M @ conj(x)``.
"""
from dataclasses import dataclass

import numpy as np
import scipy.linalg as sla


class InvalidInputError(ValueError):
    """Raised for malformed or non-finite input."""


class DegenerateFormError(ValueError):
    """Raised when a bilinear or Hermitian form is degenerate where it must not be."""


class NotPositiveDefiniteError(ValueError):
    """Raised when a matrix expected to be positive-definite is not."""


@dataclass(frozen=True)
class TolerancePolicy:
    rank_tol: float = 1e-8
    eig_tol: float = 1e-7
    flow_tol: float = 1e-8

    def __post_init__(self):
        for name in ("rank_tol", "eig_tol", "flow_tol"):
            if not getattr(self, name) > 0:
                raise InvalidInputError(f"{name} must be strictly positive")
        if self.rank_tol >= 1:
            raise InvalidInputError("rank_tol must be < 1")


DEFAULT_POLICY = TolerancePolicy()


def as_matrix(m):
    a = np.asarray(m)
    if a.ndim == 1:
        a = a.reshape(-1, 1)
    if a.ndim != 2:
        raise InvalidInputError(f"expected a 2-d array, got shape {a.shape}")
    if a.size and not np.all(np.isfinite(a)):
        raise InvalidInputError("matrix has non-finite entries")
    return a


def rank_with_tol(m, pol=DEFAULT_POLICY, scale=None):
    """Numerical rank: singular values above ``rank_tol`` times ``scale``.

    ``scale`` defaults to the largest singular value; pass an absolute scale
    when the matrix itself may be numerically zero.
    """
    a = as_matrix(m)
    if a.size == 0:
        return 0
    s = np.linalg.svd(a, compute_uv=False)
    ref = s[0] if scale is None else scale
    if ref == 0:
        return 0
    return int(np.sum(s > pol.rank_tol * ref))


def _scale(a):
    return max(np.linalg.norm(a, 2), 1.0) if a.size else 1.0


# ---------------------------------------------------------------- subspaces

def orthonormal_basis(vectors, pol=DEFAULT_POLICY, gram=None, scale=None):
    """Orthonormal basis (columns) of the column span of ``vectors``.

    Orthonormality is w.r.t. the Hermitian form ``y^H gram x`` (identity by
    default), which must be positive-definite.  ``scale`` sets the absolute
    size against which small singular values are discarded; by default it is
    the largest singular value.
    """
    a = as_matrix(vectors)
    n = a.shape[0]
    if a.shape[1] == 0:
        return np.zeros((n, 0), dtype=a.dtype)
    if gram is not None:
        chol = _cholesky_upper(gram)
        a = chol @ a
    u, s, _ = np.linalg.svd(a, full_matrices=False)
    ref = s[0] if scale is None else scale
    if ref == 0:
        return np.zeros((n, 0), dtype=a.dtype)
    basis = u[:, s > pol.rank_tol * ref]
    if gram is not None:
        basis = sla.solve_triangular(chol, basis)
    return basis


def null_space(m, pol=DEFAULT_POLICY, scale=None):
    """Orthonormal basis of the kernel of ``m``."""
    a = as_matrix(m)
    ncols = a.shape[1]
    if a.shape[0] == 0 or ncols == 0:
        return np.eye(ncols, dtype=a.dtype if a.dtype.kind == "c" else float)
    _, s, vh = np.linalg.svd(a, full_matrices=True)
    ref = s[0] if scale is None else scale
    if ref == 0:
        return np.eye(ncols, dtype=vh.dtype)
    r = int(np.sum(s > pol.rank_tol * ref))
    return vh[r:].conj().T


def intersection(a, b, pol=DEFAULT_POLICY):
    """Orthonormal basis of span(a) ∩ span(b)."""
    a = orthonormal_basis(a, pol)
    b = orthonormal_basis(b, pol)
    if a.shape[1] == 0 or b.shape[1] == 0:
        return np.zeros((a.shape[0], 0), dtype=np.result_type(a, b))
    k = null_space(np.hstack([a, -b]), pol, scale=1.0)
    return orthonormal_basis(a @ k[: a.shape[1]], pol, scale=1.0)


def span_sum(a, b, pol=DEFAULT_POLICY):
    """Orthonormal basis of span(a) + span(b)."""
    return orthonormal_basis(np.hstack([as_matrix(a), as_matrix(b)]), pol)


def complement(a, gram, pol=DEFAULT_POLICY, within=None, hermitian=False):
    """Orthogonal complement of span(a) w.r.t. a Gram matrix.

    With ``hermitian`` false the form is bilinear, ``<x, y> = x^T G y``;
    otherwise it is ``(x, y) = y^H G x``.  The complement is taken inside
    span(within) (the whole space by default).
    """
    g = as_matrix(gram)
    n = g.shape[0]
    if rank_with_tol(g, pol) < n:
        raise DegenerateFormError("Gram matrix is degenerate")
    a = as_matrix(a)
    w = np.eye(n) if within is None else orthonormal_basis(within, pol)
    if a.shape[1] == 0:
        return w
    pairing = (a.conj().T @ g @ w) if hermitian else (a.T @ g @ w)
    k = null_space(pairing, pol, scale=max(np.linalg.norm(pairing, 2), _scale(g) * 1e-3))
    return orthonormal_basis(w @ k, pol, scale=1.0)


def coordinates(basis, vectors):
    """Least-squares coordinates of ``vectors`` in the column basis."""
    return np.linalg.lstsq(as_matrix(basis), as_matrix(vectors), rcond=None)[0]


def projection_residual(basis, vectors):
    """Norm of the part of ``vectors`` outside span(basis), relative to ``vectors``."""
    v = as_matrix(vectors)
    nv = np.linalg.norm(v)
    if nv == 0:
        return 0.0
    b = as_matrix(basis)
    if b.shape[1] == 0:
        return 1.0
    q = orthonormal_basis(b)
    return float(np.linalg.norm(v - q @ (q.conj().T @ v)) / nv)


# ------------------------------------------------------- real structures

def realify(m):
    """Stack real and imaginary parts: C^n -> R^{2n} row-wise."""
    a = as_matrix(m)
    return np.vstack([a.real, a.imag])


def conj_apply(cmat, x):
    """Apply the conjugate-linear map ``x -> cmat @ conj(x)``."""
    return cmat @ np.conj(x)


def real_subspace(basis, conditions=(), pol=DEFAULT_POLICY):
    """Real basis of {x in span_C(basis) : J x = s x for each (J, s)}.

    ``conditions`` holds pairs ``(J, s)`` with ``J`` the matrix of a
    conjugate-linear map, or triples ``(L, s, "linear")`` for complex-linear
    maps.  The returned columns are complex vectors whose real span is the
    requested real subspace.
    """
    b = as_matrix(basis).astype(complex)
    n, k = b.shape
    if k == 0:
        return np.zeros((n, 0), dtype=complex)
    # x = b (a + i c), parameters (a, c) in R^{2k}
    gens = np.hstack([b, 1j * b])
    rows = []
    for cond in conditions:
        if len(cond) == 3:
            lin, s, _ = cond
            img = lin @ gens
        else:
            jm, s = cond
            img = jm @ np.conj(gens)
        rows.append(realify(img - s * gens))
    if rows:
        params = null_space(np.vstack(rows), pol, scale=max(1.0, np.linalg.norm(b, 2)))
    else:
        params = np.eye(2 * k)
    vecs = gens @ params
    if vecs.shape[1] == 0:
        return np.zeros((n, 0), dtype=complex)
    # real orthonormalisation: QR on the realified vectors
    r = realify(vecs)
    u, s, _ = np.linalg.svd(r, full_matrices=False)
    keep = s > pol.rank_tol * max(s[0], 1e-300)
    u = u[:, keep]
    return u[:n] + 1j * u[n:]


def real_dim(vectors, pol=DEFAULT_POLICY, scale=None):
    """Dimension over R of the real span of complex vectors."""
    return rank_with_tol(realify(vectors), pol, scale)


def real_operator(basis, images):
    """Real matrix of a real-linear map given images of a real basis."""
    return np.linalg.lstsq(realify(basis), realify(images), rcond=None)[0]


# ---------------------------------------------------------------- spectra

def _cluster(values, radius):
    """Greedy clustering of complex numbers in lexicographic order."""
    order = sorted(range(len(values)), key=lambda i: (values[i].real, values[i].imag))
    clusters = []
    for i in order:
        z = values[i]
        best = None
        for c in clusters:
            d = abs(np.mean(c) - z)
            if d <= radius and (best is None or d < best[0]):
                best = (d, c)
        if best is None:
            clusters.append([z])
        else:
            best[1].append(z)
    return clusters


def _tidy(z, scale, tol):
    re = 0.0 if abs(z.real) <= tol * scale else z.real
    im = 0.0 if abs(z.imag) <= tol * scale else z.imag
    return complex(re, im)


def complex_spectrum(m, pol=DEFAULT_POLICY):
    """Eigenvalues with algebraic multiplicities and a diagonalizability flag.

    Returns ``(pairs, diagonalizable)`` where ``pairs`` lists
    ``(eigenvalue, multiplicity)`` sorted by (real, imaginary) part.
    Eigenvalues of a defective block split like eps**(1/k) under rounding,
    so clustering and the geometric-multiplicity rank use the looser radius
    sqrt(eig_tol) relative to the matrix norm.
    """
    a = as_matrix(m)
    if a.shape[0] != a.shape[1]:
        raise InvalidInputError("complex_spectrum needs a square matrix")
    n = a.shape[0]
    if n == 0:
        return [], True
    scale = _scale(a)
    vals = np.linalg.eigvals(a)
    radius = np.sqrt(pol.eig_tol) * scale
    clusters = _cluster(list(vals), radius)
    pairs = []
    diagonalizable = True
    for c in clusters:
        mu = complex(np.mean(c))
        k = len(c)
        if k > 1:
            s = np.linalg.svd(a - mu * np.eye(n), compute_uv=False)
            geo = int(np.sum(s <= radius))
            if geo < k:
                diagonalizable = False
        pairs.append((_tidy(mu, scale, pol.eig_tol), k))
    pairs.sort(key=lambda p: (round(p[0].real, 9), round(p[0].imag, 9)))
    return pairs, diagonalizable


def match_spectra(a, b, tol):
    """Greedy nearest pairing of two eigenvalue lists; returns max mismatch.

    Lists of different length give ``inf``.
    """
    a = sorted(a, key=lambda z: (z.real, z.imag))
    rest = list(b)
    if len(a) != len(rest):
        return float("inf")
    worst = 0.0
    for z in a:
        d = [abs(z - w) for w in rest]
        j = int(np.argmin(d))
        worst = max(worst, d[j])
        rest.pop(j)
    return worst


def expand_spectrum(pairs):
    out = []
    for z, k in pairs:
        out.extend([z] * k)
    return out


# ------------------------------------------------------ Hermitian roots

def _cholesky_upper(gram):
    g = as_matrix(gram)
    g = (g + g.conj().T) / 2
    try:
        return sla.cholesky(g, lower=False)
    except np.linalg.LinAlgError as exc:
        raise NotPositiveDefiniteError("Gram matrix is not positive-definite") from exc


def hermitian_power(m, gram, power, pol=DEFAULT_POLICY):
    """Positive power of an operator self-adjoint and positive w.r.t. ``gram``.

    The Hermitian form is ``(x, y) = y^H gram x``.  Raises
    NotPositiveDefiniteError when ``gram`` or ``m`` is not positive.
    """
    a = as_matrix(m)
    chol = _cholesky_upper(gram)
    h = chol @ a @ np.linalg.inv(chol)
    asym = np.linalg.norm(h - h.conj().T) / max(np.linalg.norm(h), 1e-300)
    if asym > np.sqrt(pol.eig_tol):
        raise NotPositiveDefiniteError(f"operator is not self-adjoint (residual {asym:.2e})")
    h = (h + h.conj().T) / 2
    w, u = np.linalg.eigh(h)
    if w.min() <= pol.eig_tol * max(abs(w).max(), 1.0) * 1e-3:
        raise NotPositiveDefiniteError(f"non-positive eigenvalue {w.min():.3e}")
    root = (u * w**power) @ u.conj().T
    out = np.linalg.solve(chol, root @ chol)
    if np.isrealobj(a) and np.isrealobj(gram):
        out = out.real
    return out


def hermitian_fourth_root(m, gram=None, pol=DEFAULT_POLICY):
    """Unique positive self-adjoint ``phi`` with ``phi^4 = m``."""
    a = as_matrix(m)
    g = np.eye(a.shape[0]) if gram is None else gram
    return hermitian_power(a, g, 0.25, pol)
