"""Symmetric pairs, their isotropy representations and Cartan pairs.

A symmetric pair is a complex Lie algebra (coordinates of a real basis of a
real form, so real structure constants in the catalog) with a complex-linear
involution ``tau`` and two commuting conjugate-linear involutions ``sigma``
(the real form) and ``theta`` (a Cartan involution).  Conjugate-linear maps
are stored as matrices acting by ``x -> M @ conj(x)``.
"""
from dataclasses import dataclass, field
import warnings

import numpy as np
import scipy.linalg as sla

from .liealg import LieAlgebraModel, ad_matrices, ad_matrix, algebra_from_matrices, killing_form
from .numkernel import (
    DEFAULT_POLICY,
    DegenerateFormError,
    InvalidInputError,
    NotPositiveDefiniteError,
    complex_spectrum,
    hermitian_fourth_root,
    rank_with_tol,
    real_subspace,
)


class PairValidationError(ValueError):
    """A symmetric-pair or representation identity fails; carries the residuals."""

    def __init__(self, violations):
        self.violations = dict(violations)
        detail = "; ".join(f"{k}: residual {v:.3e}" for k, v in self.violations.items())
        super().__init__(f"validation failed: {detail}")


class InconsistentInputError(ValueError):
    """Input that contradicts the hypotheses of a construction."""


class NotFoundError(KeyError):
    """Unknown catalog entry."""


class DegeneratePairWarning(UserWarning):
    """The involution tau is the identity, so V = 0."""


VALIDATION_TOL = 1e-9


def _cl_compose(a, b):
    """Matrix of (x -> a conj x) o (x -> b conj x), which is complex-linear."""
    return a @ np.conj(b)


@dataclass(frozen=True, eq=False)
class SymmetricPairModel:
    ambient: LieAlgebraModel
    tau_hat: np.ndarray
    sigma_hat: np.ndarray
    theta_hat: np.ndarray
    g_basis: np.ndarray
    v_basis: np.ndarray
    residuals: dict
    warnings: tuple = ()
    name: str = "custom"
    params: dict = field(default_factory=dict)

    @property
    def dim_g(self):
        return self.g_basis.shape[1]

    @property
    def dim_v(self):
        return self.v_basis.shape[1]

    def ambient_coords(self, matrix):
        """Coordinates of a matrix of the realization in the ambient basis."""
        mats = self.ambient.matrix_realization
        if mats is None:
            raise InvalidInputError("pair has no matrix realization")
        flat = np.array([m.ravel() for m in mats]).T.astype(complex)
        coef = np.linalg.lstsq(flat, np.asarray(matrix, dtype=complex).ravel(), rcond=None)[0]
        return coef.real if np.allclose(coef.imag, 0, atol=1e-14) else coef

    def v_coords(self, x):
        """Coordinates in the V basis of an ambient vector lying in V."""
        return np.linalg.lstsq(self.v_basis, np.asarray(x), rcond=None)[0]

    def v_from_matrix(self, matrix):
        return self.v_coords(self.ambient_coords(matrix))


def _real_points_basis(sigma, pol):
    n = sigma.shape[0]
    if np.allclose(sigma, np.eye(n), atol=1e-13):
        return np.eye(n)
    return real_subspace(np.eye(n), [(sigma, 1)], pol)


def _eigen_basis(tau, real_pts, sign, pol):
    proj = (real_pts + sign * tau @ real_pts) / 2
    r = rank_with_tol(proj, pol)
    if r == 0:
        return np.zeros((tau.shape[0], 0), dtype=proj.dtype)
    _, _, piv = sla.qr(proj, pivoting=True, mode="economic")
    cols = proj[:, np.sort(piv[:r])]
    return cols.real if np.allclose(cols.imag, 0) else cols


def pair_residuals(alg, tau, sigma, theta):
    """Residuals of every identity a symmetric pair must satisfy."""
    n = alg.dim
    eye = np.eye(n)
    c = alg.structure_constants
    res = {
        "tau∘tau − id": np.linalg.norm(tau @ tau - eye),
        "sigma∘sigma − id": np.linalg.norm(_cl_compose(sigma, sigma) - eye),
        "theta∘theta − id": np.linalg.norm(_cl_compose(theta, theta) - eye),
        "tau∘sigma − sigma∘tau": np.linalg.norm(tau @ sigma - sigma @ np.conj(tau)),
        "tau∘theta − theta∘tau": np.linalg.norm(tau @ theta - theta @ np.conj(tau)),
        "sigma∘theta − theta∘sigma": np.linalg.norm(_cl_compose(sigma, theta) - _cl_compose(theta, sigma)),
    }
    scale = max(np.abs(c).max(), 1.0) if c.size else 1.0
    # automorphism checks on basis pairs: phi[e_i, e_j] = [phi e_i, phi e_j]
    for name, m, conj in (("tau", tau, False), ("sigma", sigma, True), ("theta", theta, True)):
        lhs = np.einsum("kl,ijl->ijk", m, np.conj(c) if conj else c)
        rhs = np.einsum("ai,bj,abk->ijk", m, m, c)
        res[f"{name} bracket-preserving"] = np.abs(lhs - rhs).max() / scale if c.size else 0.0
    return {k: float(v) for k, v in res.items()}


def build_pair(alg, tau_hat, sigma_hat, theta_hat, pol=DEFAULT_POLICY, tol=VALIDATION_TOL,
               name="custom", params=None):
    """Validate the involutions and split the algebra into g and V."""
    n = alg.dim
    mats = [np.asarray(m) for m in (tau_hat, sigma_hat, theta_hat)]
    for label, m in zip(("tau", "sigma", "theta"), mats):
        if m.shape != (n, n):
            raise InvalidInputError(f"{label} must be {n}x{n}, got {m.shape}")
        if not np.all(np.isfinite(m)):
            raise InvalidInputError(f"{label} has non-finite entries")
    tau, sigma, theta = (m.real.astype(float) if np.allclose(np.imag(m), 0) else m.astype(complex)
                         for m in mats)
    res = pair_residuals(alg, tau, sigma, theta)
    bad = {k: v for k, v in res.items() if v > tol}
    if bad:
        raise PairValidationError(bad)
    real_pts = _real_points_basis(sigma, pol)
    g_basis = _eigen_basis(tau, real_pts, 1, pol)
    v_basis = _eigen_basis(tau, real_pts, -1, pol)
    if g_basis.shape[1] + v_basis.shape[1] != n:
        raise PairValidationError({"dim g + dim V − dim ĝ": abs(g_basis.shape[1] + v_basis.shape[1] - n)})
    notes = []
    if v_basis.shape[1] == 0:
        notes.append("tau is the identity: V = 0")
        warnings.warn("tau is the identity: V = 0", DegeneratePairWarning, stacklevel=2)
    return SymmetricPairModel(alg, tau, sigma, theta, g_basis, v_basis, res, tuple(notes),
                              name, dict(params or {}))


# -------------------------------------------------------------- representation

@dataclass(frozen=True, eq=False)
class RepresentationModel:
    """Action of g on V with the invariant form and real structures.

    ``action[a]`` is the matrix of the a-th basis element of g.  ``g_sigma``
    and ``g_theta`` are the real structures on g; ``g_form`` is the invariant
    form on g used for the Hermitian form ``-beta(X, theta Y)``.
    """

    algebra: LieAlgebraModel
    action: np.ndarray
    form: np.ndarray
    sigma_tilde: np.ndarray
    theta_tilde: np.ndarray
    herm: np.ndarray
    g_sigma: np.ndarray
    g_theta: np.ndarray | None
    g_form: np.ndarray
    residuals: dict
    pair: SymmetricPairModel | None = None
    name: str = "custom"

    @property
    def dim_g(self):
        return self.action.shape[0]

    @property
    def dim_v(self):
        return self.action.shape[1]

    def act(self, x):
        """Operator of the algebra element with coordinates ``x``."""
        return np.einsum("a,aij->ij", np.asarray(x), self.action)

    def orbit_map(self, v):
        """Matrix of X -> X.v, columns indexed by the basis of g."""
        return np.einsum("aij,j->ia", self.action, np.asarray(v))

    def inner(self, x, y):
        return np.asarray(x).T @ self.form @ np.asarray(y)

    def sigma(self, x):
        return self.sigma_tilde @ np.conj(x)

    def theta(self, x):
        return self.theta_tilde @ np.conj(x)

    def ad_g(self, x):
        """ad of an element of g in the basis of g."""
        return ad_matrix(self.algebra, x)

    def is_semisimple(self, v, pol=DEFAULT_POLICY):
        """ad-diagonalizability in the ambient algebra; None when there is none."""
        if self.pair is None:
            return None
        x = self.pair.v_basis @ np.asarray(v)
        return complex_spectrum(ad_matrix(self.pair.ambient, x), pol)[1]

    def real_v_basis(self):
        """Real basis of V_R (complex vectors spanning it over R)."""
        return real_subspace(np.eye(self.dim_v), [(self.sigma_tilde, 1)])

    def real_g_basis(self):
        return real_subspace(np.eye(self.dim_g), [(self.g_sigma, 1)])


def representation_residuals(alg, action, form, sigma_t, theta_t, herm, g_sigma, g_theta):
    dv = form.shape[0]
    c = alg.structure_constants
    scale_a = max(np.abs(action).max(), 1.0) if action.size else 1.0
    scale_f = max(np.abs(form).max(), 1.0) if form.size else 1.0
    comm = np.einsum("aij,bjk->abik", action, action)
    comm = comm - comm.transpose(1, 0, 2, 3)
    pred = np.einsum("abc,cik->abik", c, action)
    res = {
        "action homomorphism": np.abs(comm - pred).max() / scale_a**2 if comm.size else 0.0,
        "form symmetric": np.abs(form - form.T).max() / scale_f if form.size else 0.0,
        "form invariance": (np.abs(np.einsum("aji,jk->aik", action, form)
                                   + np.einsum("ij,ajk->aik", form, action)).max()
                            / (scale_a * scale_f)) if action.size else 0.0,
        "sigma_tilde∘sigma_tilde − id": np.linalg.norm(_cl_compose(sigma_t, sigma_t) - np.eye(dv)),
        "theta_tilde∘theta_tilde − id": np.linalg.norm(_cl_compose(theta_t, theta_t) - np.eye(dv)),
        "sigma_tilde∘theta_tilde − theta_tilde∘sigma_tilde":
            np.linalg.norm(_cl_compose(sigma_t, theta_t) - _cl_compose(theta_t, sigma_t)),
        "form real w.r.t. sigma_tilde": np.abs(sigma_t.T @ form @ sigma_t - np.conj(form)).max() / scale_f,
        "herm Hermitian": np.abs(herm - herm.conj().T).max() / scale_f,
    }
    # equivariance of the real structures: J(X.v) = j(X).J(v)
    for label, jv, jg in (("sigma", sigma_t, g_sigma), ("theta", theta_t, g_theta)):
        if jg is None:
            continue
        lhs = np.einsum("ij,ajk->aik", jv, np.conj(action))
        rhs = np.einsum("ba,bij,jk->aik", jg, action, jv)
        res[f"{label} equivariance"] = np.abs(lhs - rhs).max() / scale_a if action.size else 0.0
    w = np.linalg.eigvalsh((herm + herm.conj().T) / 2) if dv else np.array([1.0])
    res["herm positivity deficit"] = float(max(0.0, -w.min())) / scale_f
    if dv and w.min() <= 1e-12 * scale_f:
        res["herm positivity deficit"] = max(res["herm positivity deficit"], 1.0)
    return {k: float(v) for k, v in res.items()}


def make_representation(algebra, action, form, sigma_tilde, theta_tilde, g_sigma=None,
                        g_theta=None, g_form=None, name="custom", tol=VALIDATION_TOL, pair=None):
    """Build and validate a representation given explicit matrices."""
    action = np.asarray(action)
    if action.ndim != 3 or action.shape[0] != algebra.dim or action.shape[1] != action.shape[2]:
        raise InvalidInputError("action must have shape (dim g, dim V, dim V)")
    action = action.real if np.allclose(action.imag, 0) else action
    form = np.asarray(form)
    form = form.real if np.allclose(np.imag(form), 0) else form
    sigma_tilde = np.asarray(sigma_tilde)
    theta_tilde = np.asarray(theta_tilde)
    dv = form.shape[0]
    if rank_with_tol(form) < dv:
        raise DegenerateFormError("invariant form is degenerate on V")
    herm = -theta_tilde.T @ form
    herm = herm.real if np.allclose(np.imag(herm), 0) else herm
    if g_sigma is None:
        g_sigma = np.eye(algebra.dim)
    if g_form is None:
        g_form = np.einsum("aij,bji->ab", action, action)
    res = representation_residuals(algebra, action, form, sigma_tilde, theta_tilde, herm,
                                   g_sigma, g_theta)
    bad = {k: v for k, v in res.items() if v > tol}
    if bad:
        raise PairValidationError(bad)
    return RepresentationModel(algebra, action, form, sigma_tilde, theta_tilde, herm,
                               np.asarray(g_sigma), None if g_theta is None else np.asarray(g_theta),
                               np.asarray(g_form), res, pair, name)


def _restrict_cl(basis, m):
    """Matrix of a conjugate-linear map restricted to an invariant subspace."""
    return np.linalg.lstsq(basis, m @ np.conj(basis), rcond=None)[0]


def isotropy_representation(pair, tol=VALIDATION_TOL):
    """The action of g on V with the Killing form of the ambient algebra."""
    alg = pair.ambient
    pg, pv = pair.g_basis, pair.v_basis
    ads = ad_matrices(alg)
    ad_g = np.einsum("ia,ijk->ajk", pg, ads)
    pv_pinv = np.linalg.pinv(pv) if pv.size else np.zeros((0, alg.dim))
    pg_pinv = np.linalg.pinv(pg) if pg.size else np.zeros((0, alg.dim))
    action = np.einsum("ij,ajk,kl->ail", pv_pinv, ad_g, pv)
    leak = np.abs(np.einsum("ajk,kl->ajl", ad_g, pv) - np.einsum("jk,akl->ajl", pv, action))
    c_g = np.einsum("ci,aij,jb->abc", pg_pinv, ad_g, pg)
    c_g = c_g.real if np.allclose(np.imag(c_g), 0) else c_g
    g_alg = LieAlgebraModel(tuple(f"g{i}" for i in range(pg.shape[1])), c_g)
    kill = killing_form(alg)
    form = pv.T @ kill @ pv
    if pv.size and rank_with_tol(form) < pv.shape[1]:
        raise DegenerateFormError("Killing form is degenerate on V (non-semisimple input?)")
    rep = make_representation(
        g_alg,
        action,
        form,
        _restrict_cl(pv, pair.sigma_hat),
        _restrict_cl(pv, pair.theta_hat),
        g_sigma=_restrict_cl(pg, pair.sigma_hat),
        g_theta=_restrict_cl(pg, pair.theta_hat),
        g_form=pg.T @ kill @ pg,
        name=pair.name,
        tol=tol,
        pair=pair,
    )
    rep.residuals["V invariance"] = float(leak.max()) if leak.size else 0.0
    return rep


def subrepresentation(rep, g_basis, v_basis, name=None, tol=VALIDATION_TOL):
    """Restriction of ``rep`` to a subalgebra acting on an invariant subspace.

    Columns of ``g_basis`` (coordinates in g) must span a subalgebra stable
    under the real structure and Cartan involution of g; columns of
    ``v_basis`` an invariant subspace stable under sigma_tilde and theta_tilde
    on which the form is nondegenerate.
    """
    gb = np.asarray(g_basis, dtype=complex)
    vb = np.asarray(v_basis, dtype=complex)
    gb_pinv = np.linalg.pinv(gb)
    vb_pinv = np.linalg.pinv(vb)
    c = rep.algebra.structure_constants
    brackets = np.einsum("ia,jb,ijk->abk", gb, gb, c)
    leak_g = np.abs(brackets - np.einsum("abk,kl,lm->abm", brackets, gb_pinv.T, gb.T)).max() \
        if gb.shape[1] else 0.0
    if leak_g > tol * max(1.0, np.abs(c).max()):
        raise InconsistentInputError(f"g_basis does not span a subalgebra (residual {leak_g:.2e})")
    c_sub = np.einsum("abk,lk->abl", brackets, gb_pinv)
    c_sub = c_sub.real if np.allclose(c_sub.imag, 0, atol=1e-12) else c_sub
    ops = np.einsum("ia,ijk->ajk", gb, rep.action)
    action = np.einsum("ij,ajk,kl->ail", vb_pinv, ops, vb)
    leak_v = np.abs(np.einsum("ajk,kl->ajl", ops, vb) - np.einsum("jk,akl->ajl", vb, action)).max() \
        if gb.shape[1] else 0.0
    if leak_v > tol * max(1.0, np.abs(rep.action).max()):
        raise InconsistentInputError(f"v_basis is not invariant (residual {leak_v:.2e})")
    alg = LieAlgebraModel(tuple(f"{l}" for l in range(gb.shape[1])), c_sub)
    g_theta = None if rep.g_theta is None else _restrict_cl(gb, rep.g_theta)
    return make_representation(alg, action, vb.T @ rep.form @ vb, _restrict_cl(vb, rep.sigma_tilde),
                               _restrict_cl(vb, rep.theta_tilde), g_sigma=_restrict_cl(gb, rep.g_sigma),
                               g_theta=g_theta, g_form=gb.T @ rep.g_form @ gb,
                               name=name or f"{rep.name}-sub", tol=tol)


# ------------------------------------------------------ combined decomposition

@dataclass(frozen=True)
class CombinedDecomposition:
    k_r: np.ndarray
    p_r: np.ndarray
    v_r_w: np.ndarray
    v_r_iw: np.ndarray

    @property
    def dims(self):
        return tuple(b.shape[1] for b in (self.k_r, self.p_r, self.v_r_w, self.v_r_iw))


def combined_decomposition(pair, pol=DEFAULT_POLICY):
    """Joint (tau, theta)-eigenspaces inside the sigma-fixed real form."""
    n = pair.ambient.dim
    eye = np.eye(n)
    parts = []
    for tsign, hsign in ((1, 1), (1, -1), (-1, 1), (-1, -1)):
        conds = [(pair.sigma_hat, 1), (pair.theta_hat, hsign), (pair.tau_hat, tsign, "linear")]
        parts.append(real_subspace(eye, conds, pol))
    dec = CombinedDecomposition(*parts)
    total = np.hstack(parts)
    if sum(dec.dims) != n or rank_with_tol(np.vstack([total.real, total.imag]), pol) != n:
        raise PairValidationError({"combined decomposition dimension deficit": float(n - sum(dec.dims))})
    return dec


# ------------------------------------------------------------- Cartan pairs

@dataclass(frozen=True)
class CartanPairResult:
    eta: np.ndarray
    eta_tilde: np.ndarray
    phi: np.ndarray
    phi_tilde: np.ndarray
    residuals: dict


def cartan_pair_residuals(rep, eta, eta_tilde):
    """Residuals of the defining properties of a Cartan pair commuting with sigma."""
    dv, dg = rep.dim_v, rep.dim_g
    res = {
        "eta∘sigma − sigma∘eta": np.linalg.norm(_cl_compose(eta, rep.g_sigma) - _cl_compose(rep.g_sigma, eta)),
        "eta_tilde∘sigma_tilde − sigma_tilde∘eta_tilde":
            np.linalg.norm(_cl_compose(eta_tilde, rep.sigma_tilde) - _cl_compose(rep.sigma_tilde, eta_tilde)),
        "eta∘eta − id": np.linalg.norm(_cl_compose(eta, eta) - np.eye(dg)),
        "eta_tilde∘eta_tilde − id": np.linalg.norm(_cl_compose(eta_tilde, eta_tilde) - np.eye(dv)),
    }
    lhs = np.einsum("ij,ajk->aik", eta_tilde, np.conj(rep.action))
    rhs = np.einsum("ba,bij,jk->aik", eta, rep.action, eta_tilde)
    res["equivariance"] = np.abs(lhs - rhs).max() if lhs.size else 0.0
    herm = -eta_tilde.T @ rep.form
    herm = (herm + herm.conj().T) / 2
    w = np.linalg.eigvalsh(herm) if dv else np.array([1.0])
    res["negativity deficit"] = float(max(0.0, -w.min()))
    res["min positivity"] = float(w.min())
    return {k: float(v) for k, v in res.items()}


def construct_cartan_pair(rep, mu, mu_tilde, pol=DEFAULT_POLICY):
    """Cartan pair commuting with (sigma, sigma_tilde) built from (mu, mu_tilde).

    With omega = sigma mu, take the positive fourth root phi of omega^2 (w.r.t.
    the Hermitian form -beta(X, mu Y)) and return eta = phi mu phi^-1; the same
    on V with the form -<x, mu_tilde y>.
    """
    mu = np.asarray(mu, dtype=complex)
    mu_tilde = np.asarray(mu_tilde, dtype=complex)
    omega = _cl_compose(rep.g_sigma, mu)
    omega_t = _cl_compose(rep.sigma_tilde, mu_tilde)
    gram_g = -mu.T @ rep.g_form
    gram_v = -mu_tilde.T @ rep.form
    try:
        phi = hermitian_fourth_root(omega @ omega, gram_g, pol)
        phi_t = hermitian_fourth_root(omega_t @ omega_t, gram_v, pol)
    except NotPositiveDefiniteError as exc:
        raise InconsistentInputError(f"omega^2 is not positive-definite: {exc}") from exc
    eta = phi @ mu @ np.conj(np.linalg.inv(phi))
    eta_t = phi_t @ mu_tilde @ np.conj(np.linalg.inv(phi_t))
    return CartanPairResult(eta, eta_t, phi, phi_t, cartan_pair_residuals(rep, eta, eta_t))


def group_element(rep, y):
    """(Ad_g on g, tau(g) on V) for g = exp(y), y in coordinates of g."""
    y = np.asarray(y)
    return sla.expm(rep.ad_g(y)), sla.expm(rep.act(y))


def conjugated_cartan_pair(rep, y):
    """The reference pair (theta, theta_tilde) conjugated by g = exp(y)."""
    ad, op = group_element(rep, y)
    mu = ad @ rep.g_theta @ np.conj(np.linalg.inv(ad))
    mu_t = op @ rep.theta_tilde @ np.conj(np.linalg.inv(op))
    return mu, mu_t


# ------------------------------------------------------------------ catalog

def _pair_from_matrices(mats, labels, tau_fn, sigma_fn, theta_fn, name, params, pol=DEFAULT_POLICY):
    """Symmetric pair on the real span of ``mats`` with involutions given on matrices.

    ``sigma_fn`` is None for the real form spanned by the basis (sigma = id in
    these coordinates).  All maps are real-linear on the span, so their
    coordinate matrices are real.
    """
    alg = algebra_from_matrices(mats, labels)
    flat = np.array([m.ravel() for m in mats]).T
    real = np.vstack([flat.real, flat.imag])

    def coord_matrix(fn):
        cols = []
        for m in mats:
            x = np.asarray(fn(m), dtype=complex).ravel()
            cols.append(np.linalg.lstsq(real, np.concatenate([x.real, x.imag]), rcond=None)[0])
        return np.array(cols).T

    tau = coord_matrix(tau_fn)
    sigma = np.eye(len(mats)) if sigma_fn is None else coord_matrix(sigma_fn)
    theta = coord_matrix(theta_fn)
    return build_pair(alg, tau, sigma, theta, pol, name=name, params=params)


def _unit(n, i, j):
    e = np.zeros((n, n))
    e[i, j] = 1.0
    return e


def _sl_basis(n):
    mats, labels = [], []
    for k in range(n - 1):
        mats.append(_unit(n, k, k) - _unit(n, k + 1, k + 1))
        labels.append(f"H{k + 1}")
    for i in range(n):
        for j in range(n):
            if i != j:
                mats.append(_unit(n, i, j))
                labels.append(f"E{i + 1}{j + 1}")
    return mats, labels


def _block(a, b):
    n = a.shape[0]
    out = np.zeros((2 * n, 2 * n), dtype=np.result_type(a, b))
    out[:n, :n] = a
    out[n:, n:] = b
    return out


def _sln_adjoint(n):
    base, labels = _sl_basis(n)
    z = np.zeros((n, n))
    mats = [_block(m, z) for m in base] + [_block(z, m) for m in base]
    labels = [f"{l}'" for l in labels] + [f"{l}''" for l in labels]

    def swap(x):
        return _block(x[n:, n:], x[:n, :n])

    return mats, labels, swap


def sl2_adjoint():
    """sl(2,R) + sl(2,R) with the swap; V is sl(2,R) with the adjoint action."""
    mats, _, swap = _sln_adjoint(2)
    labels = ["H'", "E'", "F'", "H''", "E''", "F''"]
    mats = [mats[0], mats[1], mats[2], mats[3], mats[4], mats[5]]
    return _pair_from_matrices(mats, labels, swap, None, lambda x: -x.T, "sl2-adjoint", {})


def sln_adjoint(n=3):
    mats, labels, swap = _sln_adjoint(n)
    return _pair_from_matrices(mats, labels, swap, None, lambda x: -x.T, "sln-adjoint", {"n": n})


def sln_son(n=3):
    """sl(n,R) with tau = theta = -transpose: V is symmetric traceless matrices."""
    mats, labels = _sl_basis(n)
    return _pair_from_matrices(mats, labels, lambda x: -x.T, None, lambda x: -x.T, "sln-son", {"n": n})


def _su_basis(signs):
    n = len(signs)
    mats, labels = [], []
    for k in range(n - 1):
        mats.append(1j * (_unit(n, k, k) - _unit(n, k + 1, k + 1)))
        labels.append(f"iH{k + 1}")
    for k in range(n):
        for l in range(k + 1, n):
            mats.append(signs[k] * _unit(n, k, l) - signs[l] * _unit(n, l, k))
            labels.append(f"A{k + 1}{l + 1}")
            mats.append(1j * (signs[k] * _unit(n, k, l) + signs[l] * _unit(n, l, k)))
            labels.append(f"S{k + 1}{l + 1}")
    return mats, labels


def supq(p=1, q=1, r=None, s=0, compact=False):
    """SU(r+s, p+q-r-s) / S(U(r, p-r) x U(s, q-s)).

    Defaults give the Riemannian SU(p,q)/S(U(p) x U(q)); ``compact`` selects
    SU(p+q)/S(U(p) x U(q)), where sigma = theta.
    """
    r = p if r is None else r
    if compact:
        r, s = p, q
    if not (p >= 1 and q >= 1 and 0 <= r <= p and 0 <= s <= q and p + q <= 8):
        raise InvalidInputError("supq needs p, q >= 1, 0 <= r <= p, 0 <= s <= q, p + q <= 8")
    signs = [1.0] * r + [-1.0] * (p - r) + [1.0] * s + [-1.0] * (q - s)
    mats, labels = _su_basis(signs)
    d = np.diag([1.0] * p + [-1.0] * q)
    params = {"p": p, "q": q, "r": r, "s": s, "compact": bool(r + s in (0, p + q))}
    return _pair_from_matrices(mats, labels, lambda x: d @ x @ d, None,
                               lambda x: -x.conj().T, "supq", params)


CATALOG = {
    "sl2-adjoint": (sl2_adjoint, {}),
    "sln-adjoint": (sln_adjoint, {"n": int}),
    "sln-son": (sln_son, {"n": int}),
    "supq": (supq, {"p": int, "q": int, "r": int, "s": int, "compact": int}),
}


def catalog_pair(name, params=None):
    """Builtin symmetric pair by name; params must fit total matrix size <= 8."""
    if name not in CATALOG:
        raise NotFoundError(f"unknown catalog pair {name!r}; known: {sorted(CATALOG)}")
    fn, allowed = CATALOG[name]
    params = dict(params or {})
    unknown = set(params) - set(allowed)
    if unknown:
        raise InvalidInputError(f"unknown parameters for {name}: {sorted(unknown)}")
    kwargs = {k: allowed[k](v) for k, v in params.items()}
    if name == "sln-son" and not 2 <= kwargs.get("n", 3) <= 8:
        raise InvalidInputError("sln-son needs 2 <= n <= 8")
    if name == "sln-adjoint" and not 2 <= kwargs.get("n", 3) <= 4:
        raise InvalidInputError("sln-adjoint needs 2 <= n <= 4")
    return fn(**kwargs)


# -------------------------------------------------- non-pair representations

def _so_generator(n, i, j, metric):
    """Infinitesimal isometry of diag(metric) mixing axes i and j."""
    a = np.zeros((n, n))
    a[i, j] = -metric[j]
    a[j, i] = metric[i]
    return a


def lorentz_two_parameter(boost=1.0, rotation=0.7):
    """Non-polar negative fixture: a loxodromic one-parameter subgroup of SO(3,1) on R^{3,1}.

    The generator is ``boost`` times the boost mixing the third and fourth
    axes plus ``rotation`` times the rotation of the first two; the form is
    x1^2 + x2^2 + x3^2 - x4^2.  Both rates nonzero gives a non-polar action.
    """
    metric = [1.0, 1.0, 1.0, -1.0]
    gen = boost * _so_generator(4, 2, 3, metric) + rotation * _so_generator(4, 0, 1, metric)
    alg = algebra_from_matrices([gen], ["L"])
    theta_t = np.diag([-1.0, -1.0, -1.0, 1.0])
    return make_representation(alg, np.array([gen]), np.diag(metric), np.eye(4), theta_t,
                               name="lorentz-2param")


def rotation_representation(sub=False):
    """so(3) (or its so(2) subalgebra when ``sub``) acting on R^3, form -identity."""
    gens = [_so_generator(3, 0, 1, [1, 1, 1]), _so_generator(3, 1, 2, [1, 1, 1]),
            _so_generator(3, 0, 2, [1, 1, 1])]
    if sub:
        gens = gens[:1]
    alg = algebra_from_matrices(gens, [f"L{i}" for i in range(len(gens))])
    eye = np.eye(len(gens))
    return make_representation(alg, np.array(gens), -np.eye(3), np.eye(3), np.eye(3),
                               g_sigma=eye, g_theta=eye, name="so2-r3" if sub else "so3-r3")


REP_CATALOG = {
    "lorentz-2param": (lorentz_two_parameter, {"boost": float, "rotation": float}),
    "so3-r3": (lambda: rotation_representation(False), {}),
    "so2-r3": (lambda: rotation_representation(True), {}),
}


def catalog_representation(name, params=None):
    """Representation by name: any catalog pair, or one of the extra fixtures."""
    if name in REP_CATALOG:
        fn, allowed = REP_CATALOG[name]
        params = dict(params or {})
        unknown = set(params) - set(allowed)
        if unknown:
            raise InvalidInputError(f"unknown parameters for {name}: {sorted(unknown)}")
        return fn(**{k: allowed[k](v) for k, v in params.items()})
    return isotropy_representation(catalog_pair(name, params))
