"""Restricted roots on a sigma- and theta-stable Cartan subspace."""
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import minimize_scalar

from .cartan import PreconditionError, action_scale, generic_orbit_dim, orbit_dim
from .liealg import ad_matrix, centralizer
from .numkernel import (
    DEFAULT_POLICY,
    complement,
    null_space,
    orthonormal_basis,
    rank_with_tol,
    real_subspace,
    realify,
)
from .sympair import _cl_compose

RAYS = 64
JUMP_TOL = 1e-8
VANISH_TOL = 1e-6


class RootError(ValueError):
    """Inconsistent root data (a functional vanishing identically)."""


@dataclass(frozen=True, eq=False)
class RootDatum:
    hyperplane: np.ndarray      # basis of c_alpha (complex)
    coroot: np.ndarray          # v_alpha in c^{-theta}, <v_alpha, v_alpha> = 1
    functional: np.ndarray      # alpha(v) = functional @ v
    type: str = ""
    subtype: str = ""
    root_space: np.ndarray | None = None   # basis of the root space, coordinates of g
    centralizer: np.ndarray | None = None  # basis of g_alpha

    def value(self, v):
        return complex(self.functional @ np.asarray(v))

    @property
    def multiplicity(self):
        return 0 if self.root_space is None else self.root_space.shape[1]


@dataclass(frozen=True, eq=False)
class RootSystemReport:
    roots: list
    m: np.ndarray
    chamber: np.ndarray
    sigma_action: list
    flags: list = field(default_factory=list)


def _minus_theta_basis(rep, c):
    """Real basis of c^{-theta}, orthonormal for the (positive) form there."""
    e = real_subspace(c.basis, [(rep.theta_tilde, -1)])
    gram = np.real(e.T @ rep.form @ e)
    w, u = np.linalg.eigh((gram + gram.T) / 2)
    if e.shape[1] and w.min() <= 0:
        raise RootError("form is not positive on c^{-theta}")
    return e @ (u / np.sqrt(w))


def _jump(rep, x, r):
    s = np.linalg.svd(rep.orbit_map(x), compute_uv=False)
    if r == 0 or s[0] == 0:
        return 0.0
    return float(s[r - 1] / s[0])


def _hyperplane_at(rep, e, fixed_dim, p, pol):
    """Real basis coefficients (in e) of the hyperplane through the singular point p."""
    m = rep.orbit_map(p)
    _, s, vh = np.linalg.svd(m, full_matrices=True)
    r_loose = int(np.sum(s > 1e-6 * s[0]))
    kern = vh[r_loose:].conj().T
    rows = np.vstack([rep.act(kern[:, j]) @ e for j in range(kern.shape[1])])
    coef = null_space(realify(rows), pol, scale=max(np.linalg.norm(rows, 2), 1e-300) * 1e2)
    return coef


def singular_hyperplanes(rep, c, pol=DEFAULT_POLICY, rays=RAYS, seed=0, flags=None):
    """Normals (in c^{-theta}, unit for <,>) of the singular hyperplanes of c.

    Scans the isotropy-jump indicator (the smallest generically nonzero
    singular value of X -> X.x) on ``rays`` directions of 2-plane sections,
    refines each dip, and reads the hyperplane off the jumped isotropy.
    """
    flags = [] if flags is None else flags
    if not (c.sigma_stable and c.theta_stable):
        raise PreconditionError("singular_hyperplanes needs a sigma- and theta-stable c")
    e = _minus_theta_basis(rep, c)
    k = e.shape[1]
    fixed = real_subspace(c.fixed_part, [(rep.theta_tilde, -1)]) if c.fixed_part.shape[1] else \
        np.zeros((rep.dim_v, 0))
    k_eff = k - fixed.shape[1]
    r = generic_orbit_dim(rep)
    if k_eff <= 0 or r == 0:
        return []
    gram = np.real(e.T @ rep.form @ e)
    if rep.pair is not None:
        normals = _ambient_normals(rep, e, gram, flags, seed)
    elif k_eff == 1:
        fcoef = np.linalg.lstsq(e, fixed, rcond=None)[0].real if fixed.shape[1] else np.zeros((k, 0))
        normals = [_unit_normal(fcoef, gram)]
    else:
        rng = np.random.default_rng(seed)
        normals = []
        for _ in range(2):
            q, _ = np.linalg.qr(rng.standard_normal((k, 2)))
            u1, u2 = q[:, 0], q[:, 1]
            pts = _scan_section(rep, e, u1, u2, r, rays)
            for coef_p in pts:
                hyp = _hyperplane_at(rep, e, fixed.shape[1], e @ coef_p, pol)
                if hyp.shape[1] != k - 1:
                    flags.append(f"hyperplane fit dimension {hyp.shape[1]} at a dip (expected {k - 1})")
                    if k == 2:
                        hyp = coef_p[:, None]
                    else:
                        continue
                normals.append(_unit_normal(hyp, gram))
        normals = _cluster_normals(normals, gram, flags)
    # verification: a generic point of each hyperplane has a larger isotropy algebra
    rng = np.random.default_rng(seed + 1)
    out = []
    for n in normals:
        hyp = null_space((gram @ n)[None, :], pol)
        x = e @ (hyp @ rng.standard_normal(hyp.shape[1])) if hyp.shape[1] else np.zeros(rep.dim_v)
        if np.any(x) and orbit_dim(rep, x, pol) >= r:
            flags.append("detected hyperplane failed the isotropy-jump verification")
            continue
        out.append(e @ n)
    return out


def _ambient_normals(rep, e, gram, flags, seed):
    """Normals from the joint eigenvalues of ad(c^{-theta}) on the ambient algebra.

    c is an abelian subalgebra of semisimple elements of the ambient
    algebra, so a generic element has the joint eigenspaces as eigenspaces;
    each nonzero eigen-functional is real on c^{-theta} and its kernel is a
    singular hyperplane.
    """
    pair = rep.pair
    ads = [ad_matrix(pair.ambient, pair.v_basis @ e[:, j]) for j in range(e.shape[1])]
    rng = np.random.default_rng(seed + 3)
    gen = sum(rng.standard_normal() * a for a in ads)
    vals, vecs = np.linalg.eig(gen)
    pinv = np.linalg.pinv(vecs)
    funcs = np.array([np.diag(pinv @ a @ vecs) for a in ads]).T   # (eigvec, basis of e)
    scale = max(np.abs(funcs).max(), 1e-300)
    normals = []
    for f in funcs:
        if np.linalg.norm(f) <= 1e-6 * scale:
            continue
        if np.abs(f.imag).max() > 1e-6 * scale:
            flags.append("root functional not real on c^{-theta}")
        n = np.linalg.solve(gram, f.real)
        normals.append(n / np.sqrt(n @ gram @ n))
    return _cluster_normals(normals, gram, [])


def _unit_normal(hyp_coef, gram):
    k = gram.shape[0]
    if hyp_coef.shape[1] == 0:
        n = np.eye(k)[:, 0]
    else:
        n = null_space((hyp_coef.T @ gram))[:, 0].real
    return n / np.sqrt(n @ gram @ n)


def _cluster_normals(normals, gram, flags):
    out = []
    for n in normals:
        dup = False
        for m in out:
            cos = abs(n @ gram @ m)
            if cos > 1 - 1e-6:
                dup = True
                break
            if cos > 1 - 1e-3:
                flags.append("two detected normals within clustering tolerance were kept apart")
        if not dup:
            out.append(n)
    return out


def _scan_section(rep, e, u1, u2, r, rays):
    """Angles of singular lines in the plane spanned by e@u1, e@u2."""
    angles = np.arange(rays) * np.pi / rays

    def f(phi):
        return _jump(rep, e @ (np.cos(phi) * u1 + np.sin(phi) * u2), r)

    vals = np.array([f(a) for a in angles])
    found = []
    for j in range(rays):
        if vals[j] <= vals[j - 1] and vals[j] <= vals[(j + 1) % rays]:
            lo, hi = angles[j] - np.pi / rays, angles[j] + np.pi / rays
            res = minimize_scalar(f, bounds=(lo, hi), method="bounded",
                                  options={"xatol": 1e-14, "maxiter": 500})
            if res.fun < JUMP_TOL:
                phi = res.x
                found.append(np.cos(phi) * u1 + np.sin(phi) * u2)
    return found


def coroot_and_functional(rep, c, normal, chamber):
    """(v_alpha, functional) with the coroot sign positive on the chamber point."""
    v = np.asarray(normal, dtype=complex)
    v = v / np.sqrt((v @ rep.form @ v).real)
    if (np.asarray(chamber) @ rep.form @ v).real < 0:
        v = -v
    w = rep.form @ v
    hyp = null_space((w @ c.basis)[None, :])
    return v, w, orthonormal_basis(c.basis @ hyp) if hyp.shape[1] else np.zeros((rep.dim_v, 0))


def _vanishes(w, basis):
    if basis.shape[1] == 0:
        return True
    vals = np.abs(w @ basis) / np.maximum(np.linalg.norm(basis, axis=0), 1e-300)
    return bool(vals.max() <= VANISH_TOL * max(np.linalg.norm(w), 1.0))


def root_space(rep, c, hyperplane, m=None, pol=DEFAULT_POLICY):
    """(g_alpha, root space): centralizer of c_alpha and the B_theta-complement of m in it."""
    g_alpha = centralizer(rep.algebra, hyperplane, pol, action=rep.action)
    if m is None:
        m = centralizer(rep.algebra, c.basis, pol, action=rep.action)
    g_herm = -rep.g_theta.T @ rep.g_form
    rs = complement(m, g_herm, pol, within=g_alpha, hermitian=True)
    return g_alpha, rs


def classify_root(rep, c, datum, pol=DEFAULT_POLICY, m=None):
    """Fill in type, subtype and root space of a datum."""
    w = datum.functional
    ns = real_subspace(c.basis, [(rep.sigma_tilde, -1), (rep.theta_tilde, -1)])
    cs = real_subspace(c.basis, [(rep.sigma_tilde, 1), (rep.theta_tilde, -1)])
    real = _vanishes(w, ns)
    imag = _vanishes(w, cs)
    if real and imag:
        raise RootError("root functional vanishes on c^{-theta}")
    kind = "real" if real else "imaginary" if imag else "complex"
    g_alpha, rs = root_space(rep, c, datum.hyperplane, m, pol)
    subtype = "n/a"
    if kind != "complex":
        omega = _cl_compose(rep.g_sigma, rep.g_theta)
        minus = null_space((omega + np.eye(rep.dim_g)) @ rs, pol,
                           scale=max(1.0, np.linalg.norm(omega, 2))).shape[1] if rs.shape[1] else 0
        if kind == "imaginary":
            subtype = "noncompact" if minus else "compact"
        else:
            subtype = "compact" if minus else "noncompact"
    return RootDatum(datum.hyperplane, datum.coroot, w, kind, subtype, rs, g_alpha)


def _sigma_pairing(rep, c, roots):
    b = c.basis
    sb = rep.sigma_tilde @ np.conj(b)
    table = []
    for d in roots:
        target = np.conj(d.functional @ sb)
        best = (None, 0, np.inf)
        for j, e in enumerate(roots):
            vals = e.functional @ b
            for sign in (1, -1):
                gap = np.linalg.norm(target - sign * vals)
                if gap < best[2]:
                    best = (j, sign, gap)
        table.append((best[0], best[1], float(best[2])))
    return table


def compute_roots(rep, c, pol=DEFAULT_POLICY, seed=0):
    """Roots, root spaces and the sigma-action on a sigma- and theta-stable c."""
    flags = []
    normals = singular_hyperplanes(rep, c, pol, seed=seed, flags=flags)
    e = _minus_theta_basis(rep, c)
    rng = np.random.default_rng(seed + 7)
    chamber = None
    for _ in range(100):
        x = e @ rng.standard_normal(e.shape[1])
        if all(abs(x @ rep.form @ n) > 1e-3 * np.linalg.norm(x) for n in normals):
            chamber = x
            break
    if chamber is None:
        chamber = e @ rng.standard_normal(e.shape[1]) if e.shape[1] else np.zeros(rep.dim_v)
        flags.append("chamber point close to a wall")
    m = centralizer(rep.algebra, c.basis, pol, action=rep.action)
    roots = []
    for n in normals:
        v, w, hyp = coroot_and_functional(rep, c, n, chamber)
        roots.append(classify_root(rep, c, RootDatum(hyp, v, w), pol, m))
    roots.sort(key=lambda d: -d.value(chamber).real)
    return RootSystemReport(roots, m, chamber, _sigma_pairing(rep, c, roots), flags)


# ------------------------------------------------------------------ checks

def orbit_span(rep, algebra_basis, vectors):
    cols = [rep.act(algebra_basis[:, a]) @ vectors[:, j]
            for a in range(algebra_basis.shape[1]) for j in range(vectors.shape[1])]
    return np.array(cols).T if cols else np.zeros((rep.dim_v, 0))


def _pairing_residual(rep, x, y):
    if x.shape[1] == 0 or y.shape[1] == 0:
        return 0.0
    xq = orthonormal_basis(x)
    yq = orthonormal_basis(y)
    return float(np.abs(xq.T @ rep.form @ yq).max() / max(np.linalg.norm(rep.form, 2), 1e-300))


def orthogonality_residuals(rep, c, report):
    """max |<c, g.c>| and max over root pairs of |<g_a.c, g_b.c>| (normalized)."""
    g_c = orbit_span(rep, np.eye(rep.dim_g), c.basis)
    out = {"<c, g.c>": _pairing_residual(rep, c.basis, g_c)}
    spans = [orbit_span(rep, d.centralizer, c.basis) for d in report.roots]
    worst = 0.0
    for i in range(len(spans)):
        for j in range(i + 1, len(spans)):
            worst = max(worst, _pairing_residual(rep, spans[i], spans[j]))
    out["<g_a.c, g_b.c>"] = worst
    sc = action_scale(rep) * max(np.linalg.norm(c.basis, 2), 1e-300)
    total = c.dim + sum(rank_with_tol(s, scale=sc) for s in spans)
    out["dim deficit"] = float(rep.dim_v - total)
    return out
