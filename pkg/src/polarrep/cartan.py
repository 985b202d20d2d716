"""Cartan subspaces: regularity, c_v, stabilization, conjugacy and enumeration."""
from dataclasses import dataclass, field, replace
from functools import lru_cache

import numpy as np
import scipy.linalg as sla
from scipy.optimize import minimize

from .numkernel import (
    DEFAULT_POLICY,
    complement,
    hermitian_power,
    null_space,
    orthonormal_basis,
    projection_residual,
    rank_with_tol,
    real_subspace,
)
from .sympair import _cl_compose, construct_cartan_pair

STABLE_TOL = 1e-6


class PreconditionError(ValueError):
    """Input does not satisfy the precondition of the operation."""


class SearchFailure(RuntimeError):
    """An iterative search did not converge; ``diagnostics`` explains why."""

    def __init__(self, message, diagnostics=None):
        super().__init__(message)
        self.diagnostics = diagnostics or {}


@dataclass(frozen=True, eq=False)
class CartanSubspaceRecord:
    basis: np.ndarray
    sigma_stable: bool
    theta_stable: bool
    real_points: np.ndarray | None
    compact_basis: np.ndarray | None
    noncompact_basis: np.ndarray | None
    fixed_part: np.ndarray
    rank: int

    @property
    def dim(self):
        return self.basis.shape[1]

    @property
    def compact_dim(self):
        return None if self.compact_basis is None else self.compact_basis.shape[1]

    @property
    def noncompact_dim(self):
        return None if self.noncompact_basis is None else self.noncompact_basis.shape[1]

    @property
    def signature(self):
        return (self.compact_dim, self.noncompact_dim)


def _stable(rep, basis, jmat):
    if basis.shape[1] == 0:
        return True
    return projection_residual(basis, jmat @ np.conj(basis)) < STABLE_TOL


def make_record(rep, basis, pol=DEFAULT_POLICY):
    """Record for the complex span of ``basis`` with stability data filled in."""
    b = orthonormal_basis(np.asarray(basis, dtype=complex), pol, gram=rep.herm)
    s_ok = _stable(rep, b, rep.sigma_tilde)
    t_ok = _stable(rep, b, rep.theta_tilde)
    # eigenspaces are read at the stability tolerance so that they add up
    loose = replace(pol, rank_tol=max(pol.rank_tol, STABLE_TOL))
    real_pts = real_subspace(b, [(rep.sigma_tilde, 1)], loose) if s_ok else None
    comp = noncomp = None
    if s_ok and t_ok:
        comp = real_subspace(b, [(rep.sigma_tilde, 1), (rep.theta_tilde, 1)], loose)
        noncomp = real_subspace(b, [(rep.sigma_tilde, 1), (rep.theta_tilde, -1)], loose)
    stacked = np.vstack([a @ b for a in rep.action]) if rep.dim_g else np.zeros((0, b.shape[1]))
    k = null_space(stacked, pol, scale=max(1.0, np.linalg.norm(stacked, 2))) if b.shape[1] else \
        np.zeros((0, 0))
    fixed = b @ k if b.shape[1] else np.zeros((rep.dim_v, 0))
    return CartanSubspaceRecord(b, s_ok, t_ok, real_pts, comp, noncomp, fixed,
                                b.shape[1] - fixed.shape[1])


# ----------------------------------------------------------------- regularity

@dataclass(frozen=True)
class Regularity:
    is_semisimple: bool | None
    is_regular: bool
    orbit_dim: int


@lru_cache(maxsize=64)
def action_scale(rep):
    """Operator-norm bound of the action, used as an absolute rank scale."""
    return max(float(np.linalg.norm(rep.action.reshape(rep.dim_g, -1), 2)), 1e-300)


def orbit_dim(rep, v, pol=DEFAULT_POLICY):
    v = np.asarray(v)
    if not np.any(v):
        return 0
    return rank_with_tol(rep.orbit_map(v), pol, scale=action_scale(rep) * np.linalg.norm(v))


@lru_cache(maxsize=64)
def generic_orbit_dim(rep, samples=6):
    """Maximal orbit dimension, observed on random complex vectors."""
    rng = np.random.default_rng(12345)
    best = 0
    for _ in range(samples):
        v = rng.standard_normal(rep.dim_v) + 1j * rng.standard_normal(rep.dim_v)
        best = max(best, orbit_dim(rep, v))
    return best


def regularity(rep, v, pol=DEFAULT_POLICY):
    """(semisimple, regular, orbit dimension) of a vector of V.

    Semisimplicity uses ad-diagonalizability in the ambient algebra; for a
    representation without one it falls back to the minimal-vector flow when
    a Cartan involution on g is known, and is None otherwise.
    """
    v = np.asarray(v)
    dim = orbit_dim(rep, v, pol)
    if not np.any(v):
        semi = True
    else:
        semi = rep.is_semisimple(v, pol)
        if semi is None and rep.g_theta is not None:
            semi = minimal_vector(rep, v, pol).closed
    regular = semi is not False and dim == generic_orbit_dim(rep)
    return Regularity(semi, bool(regular), dim)


def tangent_space(rep, v):
    return rep.orbit_map(v)


def cartan_space_at(rep, v, pol=DEFAULT_POLICY):
    """c_v = (g.v)^perp for a regular semisimple v."""
    reg = regularity(rep, v, pol)
    if not reg.is_regular:
        raise PreconditionError(f"vector is not regular semisimple ({reg})")
    c = complement(orthonormal_basis(rep.orbit_map(v), pol), rep.form, pol)
    if c.shape[1] != rep.dim_v - reg.orbit_dim:
        raise PreconditionError("dim c_v differs from dim V - orbit dim")
    return make_record(rep, c, pol)


def random_real_vector(rep, rng, basis=None):
    b = rep.real_v_basis() if basis is None else basis
    return b @ rng.standard_normal(b.shape[1])


def random_regular_real(rep, rng, pol=DEFAULT_POLICY, tries=50, basis=None):
    for _ in range(tries):
        v = random_real_vector(rep, rng, basis)
        if regularity(rep, v, pol).is_regular:
            return v
    raise SearchFailure("no regular real point found", {"tries": tries})


def cartan_containing(rep, x, pol=DEFAULT_POLICY, seed=0):
    """A sigma-stable Cartan subspace containing the real semisimple ``x``.

    Regular x gives c_x.  Otherwise the slice N_x = (g.x)^perp is used: for a
    generic real y in N_x, x + eps*y is regular and its Cartan subspace is a
    Cartan subspace of the slice representation, which contains x.
    """
    x = np.asarray(x, dtype=complex)
    rng = np.random.default_rng(seed)
    if np.linalg.norm(x) < 1e-14:
        return cartan_space_at(rep, random_regular_real(rep, rng, pol), pol)
    if np.linalg.norm(rep.sigma(x) - x) > 1e-8 * np.linalg.norm(x):
        raise PreconditionError("x is not a real point")
    reg = regularity(rep, x, pol)
    if reg.is_semisimple is False:
        raise PreconditionError("x is not semisimple")
    if reg.is_regular:
        return cartan_space_at(rep, x, pol)
    slice_space = complement(orthonormal_basis(rep.orbit_map(x), pol), rep.form, pol)
    slice_real = real_subspace(slice_space, [(rep.sigma_tilde, 1)], pol)
    scale = np.linalg.norm(x)
    for eps in (1e-1, 1e-2, 1e-3):
        for _ in range(20):
            y = slice_real @ rng.standard_normal(slice_real.shape[1])
            v = x + eps * scale * y / np.linalg.norm(y)
            if not regularity(rep, v, pol).is_regular:
                continue
            rec = cartan_space_at(rep, v, pol)
            if projection_residual(rec.basis, x[:, None]) < STABLE_TOL:
                return rec
    raise SearchFailure("slice search found no Cartan subspace through x")


# ------------------------------------------------------------- minimal vector

@dataclass(frozen=True, eq=False)
class MinimalVectorResult:
    vector: np.ndarray
    op: np.ndarray          # tau(g) on V, with vector = op @ v
    ad: np.ndarray          # Ad_g on g
    residual: float
    iterations: int
    converged: bool
    closed: bool
    norm_ratio: float


@lru_cache(maxsize=64)
def _hermitian_directions(rep):
    """Basis of i u = g^{-theta}, acting by self-adjoint operators."""
    if rep.g_theta is None:
        raise PreconditionError("representation has no Cartan involution on g")
    p = real_subspace(np.eye(rep.dim_g), [(rep.g_theta, -1)])
    return p, np.einsum("ab,bij->aij", p.T, rep.action)


def _herm_inner(h, x, y):
    return np.conj(y) @ h @ x


def moment_residual(rep, w):
    _, ops = _hermitian_directions(rep)
    nw = _herm_inner(rep.herm, w, w).real
    if nw == 0:
        return 0.0
    if not len(ops):
        return 0.0
    vals = np.abs(np.einsum("aij,j,ik,k->a", ops, w, rep.herm.T, np.conj(w)))
    return float(vals.max() / (nw * _direction_scale(rep)))


@lru_cache(maxsize=64)
def _direction_scale(rep):
    _, ops = _hermitian_directions(rep)
    return max(1.0, max(np.linalg.norm(op, 2) for op in ops))


def minimal_vector(rep, v, pol=DEFAULT_POLICY, max_iter=10_000):
    """Minimize ||g.v|| over the complex group by Newton steps on i u.

    Each step minimizes the convex function t -> ||exp(tS) w||^2 along the
    Newton direction S with backtracking.  Stops when the moment-map residual
    max |(X w, w)| / ||w||^2 drops below ``flow_tol``.
    """
    v = np.asarray(v, dtype=complex)
    dirs, ops = _hermitian_directions(rep)
    h = rep.herm
    w = v.copy()
    op_total = np.eye(rep.dim_v, dtype=complex)
    ad_total = np.eye(rep.dim_g, dtype=complex)
    n0 = _herm_inner(h, v, v).real
    if n0 == 0:
        return MinimalVectorResult(w, op_total, ad_total, 0.0, 0, True, False, 0.0)
    it = 0
    res = moment_residual(rep, w)
    while res >= pol.flow_tol and it < max_iter:
        it += 1
        xw = np.array([op @ w for op in ops])
        grad = 2 * np.array([_herm_inner(h, y, w).real for y in xw])
        hess = 4 * np.real(np.einsum("bi,ij,cj->bc", np.conj(xw), h, xw))
        step = -np.linalg.lstsq(hess, grad, rcond=1e-10)[0]
        if grad @ step >= 0:
            step = -grad
        s_op = np.einsum("b,bij->ij", step, ops)
        f0 = _herm_inner(h, w, w).real
        t = 1.0
        slope = grad @ step
        while True:
            e = sla.expm(t * s_op)
            w_new = e @ w
            f1 = _herm_inner(h, w_new, w_new).real
            if f1 <= f0 + 1e-4 * t * slope or t < 1e-12:
                break
            t /= 2
        if f1 > f0:
            break
        stalled = f0 - f1 <= 1e-15 * f0
        w = w_new
        op_total = e @ op_total
        ad_total = sla.expm(t * rep.ad_g(dirs @ step)) @ ad_total
        if f1 < 1e-20 * n0:
            break
        res = moment_residual(rep, w)
        if stalled:
            break
    ratio = float(np.sqrt(_herm_inner(h, w, w).real / n0))
    converged = res < pol.flow_tol
    closed = converged and ratio > 1e-6
    return MinimalVectorResult(w, op_total, ad_total, res, it, converged, closed, ratio)


# ------------------------------------------------------------ stabilization

@dataclass(frozen=True, eq=False)
class StabilizationResult:
    conjugator: np.ndarray      # operator on V, an element of G_R
    conjugator_g: np.ndarray    # the same element acting on g
    record: CartanSubspaceRecord
    residuals: dict = field(default_factory=dict)


def _g_herm(rep):
    return -rep.g_theta.T @ rep.g_form


def stabilize_theta(rep, c, pol=DEFAULT_POLICY, seed=0):
    """Move a sigma-stable Cartan subspace to a theta-stable one inside its G_R-class."""
    if not c.sigma_stable:
        raise PreconditionError("Cartan subspace is not sigma-stable")
    eye_v, eye_g = np.eye(rep.dim_v), np.eye(rep.dim_g)
    if c.theta_stable:
        return StabilizationResult(eye_v, eye_g, c, {})
    rng = np.random.default_rng(seed)
    v = random_regular_real(rep, rng, pol, basis=c.real_points)
    # polish well past flow_tol: the error in c scales with the moment residual
    mv = minimal_vector(rep, v, replace(pol, flow_tol=min(pol.flow_tol, 1e-13)))
    if mv.residual >= pol.flow_tol:
        raise SearchFailure("minimal-vector flow did not converge",
                            {"residual": mv.residual, "iterations": mv.iterations})
    # Cartan pair for which c is stable: theta pulled back along the flow
    op_inv = np.linalg.inv(mv.op)
    mu_t = op_inv @ rep.theta_tilde @ np.conj(mv.op)
    mu = np.linalg.inv(mv.ad) @ rep.g_theta @ np.conj(mv.ad)
    cp = construct_cartan_pair(rep, mu, mu_t, pol)
    # G_R-element taking eta_tilde to theta_tilde: square root of theta_tilde eta_tilde
    n_v = _cl_compose(rep.theta_tilde, cp.eta_tilde)
    n_g = _cl_compose(rep.g_theta, cp.eta)
    phi_v = hermitian_power(n_v, rep.herm, 0.5, pol)
    phi_g = hermitian_power(n_g, _g_herm(rep), 0.5, pol)
    rec = make_record(rep, phi_v @ c.basis, pol)
    residuals = {
        "c mu_tilde-stable": projection_residual(c.basis, mu_t @ np.conj(c.basis)),
        "c eta_tilde-stable": projection_residual(c.basis, cp.eta_tilde @ np.conj(c.basis)),
        "conjugated eta_tilde − theta_tilde":
            float(np.linalg.norm(phi_v @ cp.eta_tilde @ np.conj(np.linalg.inv(phi_v)) - rep.theta_tilde)),
        "conjugator real": float(np.linalg.norm(rep.sigma_tilde @ np.conj(phi_v) - phi_v @ rep.sigma_tilde)),
    }
    residuals.update({f"cartan pair: {k}": v for k, v in cp.residuals.items()})
    if not (rec.sigma_stable and rec.theta_stable):
        raise SearchFailure("stabilized subspace is not sigma- and theta-stable", residuals)
    return StabilizationResult(phi_v, phi_g, rec, residuals)


# ----------------------------------------------------------------- conjugacy

@lru_cache(maxsize=64)
def compact_basis_g(rep):
    """Real basis of k_R = g^sigma ∩ g^theta, in coordinates of g."""
    return real_subspace(np.eye(rep.dim_g), [(rep.g_sigma, 1), (rep.g_theta, 1)])


@dataclass(frozen=True, eq=False)
class ConjugacyOutcome:
    result: bool | None
    reason: str
    conjugator: np.ndarray | None = None

    def __bool__(self):
        return bool(self.result)


def root_type_multiset(rep, c, pol=DEFAULT_POLICY):
    from .roots import compute_roots

    rs = compute_roots(rep, c, pol)
    return sorted((d.type, d.subtype, d.multiplicity) for d in rs.roots)


def _k_search(rep, c1, c2, rng, restarts):
    kb = compact_basis_g(rep)
    r1 = orthonormal_basis(c1.real_points, gram=rep.herm)
    q2 = orthonormal_basis(c2.basis, gram=rep.herm)
    proj = q2 @ (q2.conj().T @ rep.herm)
    resid = np.eye(rep.dim_v) - proj
    k_ops = np.einsum("ab,bij->aij", kb.T, rep.action)

    def gap(x):
        op = sla.expm(np.einsum("a,aij->ij", x, k_ops))
        d = resid @ op @ r1
        return float(np.real(np.sum(np.conj(d) * (rep.herm @ d))))

    if gap(np.zeros(kb.shape[1])) < 1e-18:
        return np.eye(rep.dim_v)
    if kb.shape[1] == 0:
        return None
    best = None
    accept = 1e-14 * max(1, c1.dim)
    for i in range(restarts):
        x0 = np.zeros(kb.shape[1]) if i == 0 else rng.uniform(-np.pi, np.pi, kb.shape[1])
        out = minimize(gap, x0, method="BFGS", options={"gtol": 1e-12, "maxiter": 400})
        if best is None or out.fun < best.fun:
            best = out
        if out.fun < accept:
            break
    if best.fun < accept:
        return sla.expm(np.einsum("a,aij->ij", best.x, k_ops))
    return None


def conjugacy_test(rep, c1, c2, pol=DEFAULT_POLICY, seed=0, restarts=12, invariants=None):
    """Tri-state conjugacy test for sigma- and theta-stable Cartan subspaces.

    False when signatures or root-type multisets differ, True with a K_R
    conjugator when the compact search aligns the real forms, None otherwise.
    ``invariants`` may supply precomputed root-type multisets.
    """
    for c in (c1, c2):
        if not (c.sigma_stable and c.theta_stable):
            raise PreconditionError("conjugacy_test needs sigma- and theta-stable subspaces")
    if c1.signature != c2.signature:
        return ConjugacyOutcome(False, "signatures differ")
    t1, t2 = invariants if invariants is not None else (
        root_type_multiset(rep, c1, pol), root_type_multiset(rep, c2, pol))
    if t1 != t2:
        return ConjugacyOutcome(False, "root types differ")
    k = _k_search(rep, c1, c2, np.random.default_rng(seed), restarts)
    if k is not None:
        return ConjugacyOutcome(True, "K_R conjugator found", k)
    return ConjugacyOutcome(None, "undetermined: invariants agree, no conjugator found")


# --------------------------------------------------------------- enumeration

@dataclass(frozen=True, eq=False)
class ConjugacyClassTable:
    representatives: list
    signatures: list
    root_types: list
    sample_counts: dict
    incomplete: bool
    seed: int


def enumerate_classes(rep, budget=200, seed=0, pol=DEFAULT_POLICY):
    """Conjugacy classes of standard Cartan subspaces by sampling plus Cayley closure."""
    from .cayley import NotApplicableError, cayley_transform
    from .roots import compute_roots

    rng = np.random.default_rng(seed)
    reps, sigs, types, hits, origin = [], [], [], [], []
    undetermined = 0
    regular = 0

    def classify(rec):
        nonlocal undetermined
        t = sorted((d.type, d.subtype, d.multiplicity) for d in compute_roots(rep, rec, pol).roots)
        unknown = False
        for i, other in enumerate(reps):
            out = conjugacy_test(rep, rec, other, pol, seed=int(rng.integers(2**31)),
                                 invariants=(t, types[i]))
            if out.result:
                return i, t
            if out.result is None:
                unknown = True
        if unknown:
            undetermined += 1
            return -1, t
        return None, t

    def add(rec, t, how):
        reps.append(rec)
        sigs.append(rec.signature)
        types.append(t)
        hits.append(1 if how == "sample" else 0)
        origin.append(how)

    real_basis = rep.real_v_basis()
    for _ in range(budget):
        v = random_real_vector(rep, rng, real_basis)
        if not regularity(rep, v, pol).is_regular:
            continue
        regular += 1
        rec = stabilize_theta(rep, cartan_space_at(rep, v, pol), pol,
                              seed=int(rng.integers(2**31))).record
        idx, t = classify(rec)
        if idx is None:
            add(rec, t, "sample")
        elif idx >= 0:
            hits[idx] += 1

    # Cayley closure: make sure every class reachable by transforms is present
    frontier = list(range(len(reps)))
    while frontier:
        i = frontier.pop(0)
        for datum in compute_roots(rep, reps[i], pol).roots:
            kind = {("imaginary", "noncompact"): "noncompact-imaginary",
                    ("real", "compact"): "compact-real"}.get((datum.type, datum.subtype))
            if kind is None:
                continue
            try:
                target = cayley_transform(rep, reps[i], datum, kind, pol).target
            except NotApplicableError:
                continue
            idx, t = classify(target)
            if idx is None:
                add(target, t, "cayley")
                frontier.append(len(reps) - 1)

    order = sorted(range(len(reps)), key=lambda i: (sigs[i][1], sigs[i][0], str(types[i])))
    counts = {
        "budget": budget,
        "regular_samples": regular,
        "hits": [hits[i] for i in order],
        "origin": [origin[i] for i in order],
        "undetermined": undetermined,
    }
    return ConjugacyClassTable([reps[i] for i in order], [sigs[i] for i in order],
                               [types[i] for i in order], counts, undetermined > 0, seed)
