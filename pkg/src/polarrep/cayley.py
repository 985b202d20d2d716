"""Cayley transforms, extremal Cartan subspaces and the restricted polar check."""
from dataclasses import dataclass, field

import numpy as np
import scipy.linalg as sla

from .cartan import PreconditionError, action_scale, compact_basis_g, make_record
from .numkernel import (
    DEFAULT_POLICY,
    null_space,
    orthonormal_basis,
    projection_residual,
    real_dim,
    real_subspace,
)
from .roots import compute_roots
from .sympair import _cl_compose

KINDS = ("noncompact-imaginary", "compact-real")
CHECK_TOL = 1e-8


class NotApplicableError(ValueError):
    """The root admits no Cayley transform of the requested kind."""


@dataclass(frozen=True, eq=False)
class CayleyRecord:
    kind: str
    root: object
    generator: np.ndarray      # coordinates in g
    operator: np.ndarray       # exp((pi/2) X) on V
    source: object
    target: object
    residuals: dict = field(default_factory=dict)
    note: str = ""


def _required_kind(datum):
    return {("imaginary", "noncompact"): "noncompact-imaginary",
            ("real", "compact"): "compact-real"}.get((datum.type, datum.subtype))


def _hnorm(rep, x):
    return float(np.sqrt(np.real(np.conj(x) @ rep.herm @ x)))


def generator_space(rep, datum, pol=DEFAULT_POLICY):
    """Real basis of the theta-fixed, sigma-anti-fixed part of the root space."""
    if datum.root_space is None:
        raise PreconditionError("root space is not populated")
    return real_subspace(datum.root_space, [(rep.g_theta, 1), (rep.g_sigma, -1)], pol)


def cayley_transform(rep, c, root, kind, pol=DEFAULT_POLICY):
    """Cayley transform of a sigma- and theta-stable c along ``root``.

    ``kind`` is "noncompact-imaginary" (raises the noncompact dimension by
    one) or "compact-real" (raises the compact dimension by one).
    """
    if kind not in KINDS:
        raise ValueError(f"kind must be one of {KINDS}")
    if not (c.sigma_stable and c.theta_stable):
        raise PreconditionError("cayley_transform needs a sigma- and theta-stable c")
    if _required_kind(root) != kind:
        raise NotApplicableError(f"root of type {root.type}/{root.subtype} does not admit a {kind} transform")
    gens = generator_space(rep, root, pol)
    if gens.shape[1] == 0:
        raise NotApplicableError("no generator: the required part of the root space is trivial")
    x = gens[:, 0]
    va = root.coroot
    seed = 1j * va if kind == "noncompact-imaginary" else va
    d = rep.act(x)
    d2v = d @ (d @ seed)
    lam2 = -float(np.real(np.vdot(seed, d2v) / np.vdot(seed, seed)))
    if lam2 <= 0:
        raise NotApplicableError("generator does not rotate the coroot")
    lam = np.sqrt(lam2)
    x = x / lam
    d = d / lam
    op = sla.expm((np.pi / 2) * d)
    hyp = root.hyperplane
    target = make_record(rep, np.hstack([hyp, (op @ va)[:, None]]), pol)
    inv = np.linalg.inv(op)
    theta_g = rep.theta_tilde @ np.conj(op) @ np.conj(rep.theta_tilde)
    sigma_g = rep.sigma_tilde @ np.conj(op) @ np.conj(rep.sigma_tilde)
    op2 = op @ op
    scale = max(1.0, np.linalg.norm(op, 2))
    res = {
        "theta(g) − g": float(np.linalg.norm(theta_g - op) / scale),
        "sigma(g) − g^-1": float(np.linalg.norm(sigma_g - inv) / scale),
        "g^2 v_alpha + v_alpha": float(np.linalg.norm(op2 @ va + va) / np.linalg.norm(va)),
        "g^2 − id on c_alpha": float(np.linalg.norm(op2 @ hyp - hyp)) if hyp.shape[1] else 0.0,
        "unit speed": float(abs(_hnorm(rep, d @ seed) - _hnorm(rep, seed)) / _hnorm(rep, seed)),
    }
    if not (target.sigma_stable and target.theta_stable):
        raise PreconditionError(f"Cayley target is not sigma- and theta-stable ({res})")
    if kind == "noncompact-imaginary":
        res["noncompact dim step"] = float(target.noncompact_dim - c.noncompact_dim - 1)
    else:
        res["compact dim step"] = float(target.compact_dim - c.compact_dim - 1)
    note = "" if kind == "noncompact-imaginary" else \
        "compact-real transform mirrors the noncompact-imaginary construction"
    return CayleyRecord(kind, root, x, op, c, target, res, note)


def extremal_search(rep, direction, seed_c, pol=DEFAULT_POLICY, history=None):
    """Greedy Cayley transforms until no applicable root remains.

    ``direction`` is "max-noncompact" or "max-compact".  Applied records are
    appended to ``history`` when given.
    """
    kind = {"max-noncompact": "noncompact-imaginary", "max-compact": "compact-real"}.get(direction)
    if kind is None:
        raise ValueError("direction must be max-noncompact or max-compact")
    if not (seed_c.sigma_stable and seed_c.theta_stable):
        raise PreconditionError("extremal_search needs a sigma- and theta-stable seed")
    c = seed_c
    for _ in range(seed_c.dim + 1):
        step = None
        for datum in compute_roots(rep, c, pol).roots:
            if _required_kind(datum) != kind:
                continue
            try:
                step = cayley_transform(rep, c, datum, kind, pol)
                break
            except NotApplicableError:
                continue
        if step is None:
            return c
        if history is not None:
            history.append(step)
        c = step.target
    return c


def is_extremal(rep, c, direction, pol=DEFAULT_POLICY):
    kind = "noncompact-imaginary" if direction == "max-noncompact" else "compact-real"
    return all(_required_kind(d) != kind for d in compute_roots(rep, c, pol).roots)


@dataclass(frozen=True)
class RestrictedPolarReport:
    passed: bool
    dims: dict
    residuals: dict
    counterexample: bool
    vacuous: bool


def _omega_eigenspace(rep, sign, pol):
    omega = _cl_compose(rep.g_sigma, rep.g_theta)
    return null_space(omega - sign * np.eye(rep.dim_g), pol, scale=max(1.0, np.linalg.norm(omega, 2)))


def _span(rep, algebra_basis, v):
    cols = [rep.act(algebra_basis[:, a]) @ v for a in range(algebra_basis.shape[1])]
    return np.array(cols).T if cols else np.zeros((rep.dim_v, 0), dtype=complex)


def restricted_polar_check(rep, c, dual=False, pol=DEFAULT_POLICY, seed=0):
    """Check that c^sigma ∩ c^{-theta} is a section for K_R on V_R ∩ iW.

    With ``dual`` the section is c^sigma ∩ c^theta in V_R ∩ W and c must be
    maximally compact.  Works at a generic point of the section.
    """
    direction = "max-compact" if dual else "max-noncompact"
    if not (c.sigma_stable and c.theta_stable):
        raise PreconditionError("restricted_polar_check needs a sigma- and theta-stable c")
    if not is_extremal(rep, c, direction, pol):
        raise PreconditionError(f"c is not {direction.replace('max-', 'maximally ')}")
    sign = 1 if dual else -1
    section, other = (c.compact_basis, c.noncompact_basis) if dual else \
        (c.noncompact_basis, c.compact_basis)
    space = real_subspace(np.eye(rep.dim_v), [(rep.sigma_tilde, 1), (rep.theta_tilde, sign)], pol)
    dim_space = space.shape[1]
    dim_sec = section.shape[1]
    if dim_space == 0:
        return RestrictedPolarReport(True, {"space": 0, "section": 0, "orbit": 0}, {}, False, True)
    rng = np.random.default_rng(seed)
    v2 = section @ rng.standard_normal(dim_sec) if dim_sec else np.zeros(rep.dim_v, dtype=complex)
    v1 = other @ rng.standard_normal(other.shape[1]) if other.shape[1] else \
        np.zeros(rep.dim_v, dtype=complex)
    kb = compact_basis_g(rep)
    orbit = _span(rep, kb, v2)
    dim_orbit = real_dim(orbit, pol, scale=action_scale(rep) * np.linalg.norm(v2)) \
        if orbit.shape[1] else 0
    norm_form = max(np.linalg.norm(rep.form, 2), 1e-300)
    res = {"<section, k_R.v2>": 0.0, "k_R.v2 outside space": 0.0}
    if dim_orbit and dim_sec:
        oq = real_subspace(orbit, [], pol)
        res["<section, k_R.v2>"] = float(np.abs(section.T @ rep.form @ oq).max() / norm_form)
    if dim_orbit:
        res["k_R.v2 outside space"] = projection_residual(space, orbit)
    # p.v1 ⊆ k.v2 (complex spans), v1 generic in the complementary part of c
    k_c = _omega_eigenspace(rep, 1, pol)
    p_c = _omega_eigenspace(rep, -1, pol)
    pv1 = _span(rep, p_c, v1)
    kv2 = _span(rep, k_c, v2)
    if np.linalg.norm(pv1) < 1e-12:
        res["p.v1 outside k.v2"] = 0.0
    else:
        kq = orthonormal_basis(kv2, pol) if kv2.shape[1] else kv2
        res["p.v1 outside k.v2"] = projection_residual(kq, pv1) if kq.shape[1] else 1.0
    dims = {"space": dim_space, "section": dim_sec, "orbit": dim_orbit}
    ok = dim_orbit + dim_sec == dim_space and all(v <= CHECK_TOL for v in res.values())
    return RestrictedPolarReport(bool(ok), dims, res, not ok, False)
