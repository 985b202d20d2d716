"""Submanifold geometry of real orbits: Weingarten operators and the isoparametric test."""
from dataclasses import dataclass, field

import numpy as np
import scipy.linalg as sla

from .cartan import (
    PreconditionError,
    SearchFailure,
    cartan_space_at,
    minimal_vector,
    orbit_dim,
    regularity,
    stabilize_theta,
)
from .numkernel import (
    DEFAULT_POLICY,
    DegenerateFormError,
    InvalidInputError,
    complex_spectrum,
    expand_spectrum,
    match_spectra,
    null_space,
    realify,
)
from .roots import compute_roots

FLAT_TOL = 1e-9
SAMPLES = 10
FD_STEP = 1e-5


class DegenerateMetricError(DegenerateFormError):
    """The form restricted to the orbit's tangent space is degenerate."""


@dataclass(frozen=True, eq=False)
class OrbitFrame:
    """Real tangent and normal frames of the orbit through ``point``.

    ``tangent[:, j] = generators[:, j] . point`` with ``generators`` in
    coordinates of g; all vectors are real points in complex coordinates.
    """

    point: np.ndarray
    tangent: np.ndarray
    generators: np.ndarray
    normal: np.ndarray
    metric: np.ndarray
    signature: tuple
    degenerate: bool

    @property
    def dim(self):
        return self.tangent.shape[1]

    def split(self, vectors):
        """Coefficients (tangent part, normal part) of real vectors."""
        frame = np.hstack([self.tangent, self.normal])
        coef = np.linalg.lstsq(realify(frame), realify(vectors), rcond=None)[0]
        return coef[: self.dim], coef[self.dim:]


def orbit_frame(rep, v, pol=DEFAULT_POLICY):
    """Tangent space g_R.v, its orthogonal complement in V_R and the induced metric."""
    v = np.asarray(v, dtype=complex)
    gr = rep.real_g_basis()
    cols = np.array([rep.act(gr[:, a]) @ v for a in range(gr.shape[1])]).T
    r = realify(cols)
    u, s, wt = np.linalg.svd(r.real, full_matrices=False)
    scale = max(np.linalg.norm(np.abs(rep.action).reshape(rep.dim_g, -1), 2) * np.linalg.norm(v), 1e-300)
    k = int(np.sum(s > pol.rank_tol * scale))
    w = wt[:k].T / s[:k]
    gens = gr @ w
    tangent = cols @ w
    vr = rep.real_v_basis()
    pair = np.real(tangent.T @ rep.form @ vr)
    if k:
        coef = null_space(pair, pol, scale=max(np.linalg.norm(pair, 2), 1e-300))
        normal = vr @ coef.real
    else:
        normal = vr
    metric = np.real(tangent.T @ rep.form @ tangent)
    metric = (metric + metric.T) / 2
    ev = np.linalg.eigvalsh(metric) if k else np.zeros(0)
    mscale = max(np.abs(ev).max(), 1e-300) if k else 1.0
    degenerate = bool(k and np.abs(ev).min() <= pol.rank_tol * 1e2 * mscale)
    nmetric = np.real(normal.T @ rep.form @ normal)
    if normal.shape[1]:
        nev = np.linalg.eigvalsh((nmetric + nmetric.T) / 2)
        degenerate = degenerate or bool(np.abs(nev).min() <= pol.rank_tol * 1e2 * max(np.abs(nev).max(), 1e-300))
    sig = (int(np.sum(ev > 0)), int(np.sum(ev < 0)))
    return OrbitFrame(v, tangent, gens, normal, metric, sig, degenerate)


def _require_regular(rep, v, pol):
    reg = regularity(rep, v, pol)
    if not reg.is_regular:
        raise PreconditionError(f"point is not regular semisimple ({reg})")


def _check_real(rep, v):
    v = np.asarray(v, dtype=complex)
    if np.linalg.norm(rep.sigma(v) - v) > 1e-8 * max(np.linalg.norm(v), 1e-300):
        raise PreconditionError("point is not real")
    return v


def spectrum_blocks(pairs, pol=DEFAULT_POLICY, scale=1.0):
    """Eigenvalues as real entries or 2x2 rotation-scaling blocks for conjugate pairs."""
    blocks = []
    tol = pol.eig_tol * max(scale, 1.0)
    for z, k in pairs:
        if abs(z.imag) <= tol:
            blocks.append({"value": float(z.real), "multiplicity": k})
        elif z.imag > 0:
            blocks.append({"block": [[float(z.real), float(-z.imag)], [float(z.imag), float(z.real)]],
                           "multiplicity": k})
        if abs(z.imag) > tol and abs(z.imag) <= np.sqrt(tol):
            blocks[-1]["borderline"] = True
    return blocks


@dataclass(frozen=True, eq=False)
class WeingartenResult:
    matrix: np.ndarray          # in the tangent basis of the frame
    spectrum: list              # (eigenvalue, multiplicity)
    diagonalizable: bool
    blocks: list
    self_adjoint_residual: float
    frame: OrbitFrame


def weingarten_matrix(rep, frame, xi):
    """Matrix of A_xi on the tangent space: A_xi(Y.v) = -(Y.xi)^T."""
    images = np.array([rep.act(frame.generators[:, j]) @ xi for j in range(frame.dim)]).T
    tan, _ = frame.split(images)
    return -tan


def weingarten_operator(rep, v, xi, pol=DEFAULT_POLICY, frame=None, check=True):
    """Weingarten operator of the orbit through v along the equivariant extension of xi."""
    v = _check_real(rep, v)
    xi = np.asarray(xi, dtype=complex)
    if check:
        _require_regular(rep, v, pol)
    frame = orbit_frame(rep, v, pol) if frame is None else frame
    if frame.degenerate:
        raise DegenerateMetricError("induced metric on the orbit is degenerate")
    _, nrm = frame.split(xi[:, None])
    tan, _ = frame.split(xi[:, None])
    if np.linalg.norm(tan) > 1e-8 * max(np.linalg.norm(nrm), 1e-300):
        raise InvalidInputError("xi is not normal to the orbit")
    a = weingarten_matrix(rep, frame, xi)
    pairs, diag = complex_spectrum(a, pol)
    g = frame.metric
    sa = np.linalg.norm(g @ a - a.T @ g) / max(np.linalg.norm(g) * np.linalg.norm(a), 1e-300)
    scale = max(np.linalg.norm(a, 2), 1.0)
    return WeingartenResult(a, pairs, diag, spectrum_blocks(pairs, pol, scale), float(sa), frame)


def normal_flatness_check(rep, v, pol=DEFAULT_POLICY, frame=None):
    """(flat, residual): max normal component of X.xi over bases of g_R and the normal space."""
    v = _check_real(rep, v)
    frame = orbit_frame(rep, v, pol) if frame is None else frame
    gr = rep.real_g_basis()
    worst = 0.0
    for i in range(frame.normal.shape[1]):
        xi = frame.normal[:, i]
        imgs = np.array([rep.act(gr[:, a]) @ xi for a in range(gr.shape[1])]).T
        if imgs.size == 0:
            continue
        _, nrm = frame.split(imgs)
        comp = frame.normal @ nrm
        denom = max(np.linalg.norm(rep.act(gr[:, a])) for a in range(gr.shape[1])) * np.linalg.norm(xi)
        worst = max(worst, float(np.linalg.norm(comp, axis=0).max() / max(denom, 1e-300)))
    return worst <= FLAT_TOL, worst


def second_fundamental_form(rep, frame, x, y):
    """B(X.v, Y.v) = normal part of Y.(X.v) for X, Y in g (coordinates)."""
    w = rep.act(y) @ (rep.act(x) @ frame.point)
    _, nrm = frame.split(w[:, None])
    return frame.normal @ nrm[:, 0]


def second_fundamental_form_fd(rep, frame, x, y, h=FD_STEP):
    """Central difference of u -> Y.u along t -> exp(tX).v, projected to the normal space."""
    ax, ay = rep.act(x), rep.act(y)
    plus = ay @ (sla.expm(h * ax) @ frame.point)
    minus = ay @ (sla.expm(-h * ax) @ frame.point)
    w = (plus - minus) / (2 * h)
    _, nrm = frame.split(w[:, None])
    return frame.normal @ nrm[:, 0]


def fd_check(rep, v, trials=50, seed=0, pol=DEFAULT_POLICY, h=FD_STEP):
    """Max relative error between the analytic and finite-difference second fundamental form."""
    frame = orbit_frame(rep, _check_real(rep, v), pol)
    rng = np.random.default_rng(seed)
    gr = rep.real_g_basis()
    worst = 0.0
    for _ in range(trials):
        x = gr @ rng.standard_normal(gr.shape[1])
        y = gr @ rng.standard_normal(gr.shape[1])
        exact = second_fundamental_form(rep, frame, x, y)
        approx = second_fundamental_form_fd(rep, frame, x, y, h)
        ax, ay = rep.act(x), rep.act(y)
        # floor the reference so X in the stabilizer does not divide noise by noise
        natural = np.linalg.norm(ax, 2) * np.linalg.norm(ay, 2) * np.linalg.norm(frame.point)
        ref = max(np.linalg.norm(ay @ (ax @ frame.point)), 1e-8 * natural)
        if ref == 0:
            continue
        worst = max(worst, float(np.linalg.norm(exact - approx) / ref))
    return worst


def predicted_spectrum(rep, v, xi, pol=DEFAULT_POLICY, seed=0):
    """Eigenvalues -alpha(xi)/alpha(v) with multiplicity dim of the root space.

    c_v is moved to a theta-stable Cartan subspace by a G_R-element, which
    maps v and xi along with it and leaves the spectrum unchanged.
    """
    c = cartan_space_at(rep, v, pol)
    st = stabilize_theta(rep, c, pol, seed=seed)
    v2 = st.conjugator @ np.asarray(v)
    xi2 = st.conjugator @ np.asarray(xi)
    out = []
    for d in compute_roots(rep, st.record, pol, seed=seed).roots:
        out.extend([-d.value(xi2) / d.value(v2)] * d.multiplicity)
    return out


def spectrum_vs_roots(rep, v, xi, pol=DEFAULT_POLICY, seed=0):
    """Max mismatch between the Weingarten spectrum and the root prediction, relative."""
    w = weingarten_operator(rep, v, xi, pol)
    pred = predicted_spectrum(rep, v, xi, pol, seed)
    got = expand_spectrum(w.spectrum)
    scale = max([abs(z) for z in pred] + [1.0])
    return match_spectra(got, pred, pol.eig_tol) / scale


@dataclass(frozen=True, eq=False)
class OrbitGeometryReport:
    base_point: np.ndarray
    tangent_basis: np.ndarray
    normal_basis: np.ndarray
    metric_signature: tuple
    weingarten_spectra: list
    normal_flat: bool
    flat_residual: float
    verdict: str
    samples: int
    residuals: dict = field(default_factory=dict)
    notes: list = field(default_factory=list)


def _sample_group_elements(rep, rng, k, size=0.5):
    gr = rep.real_g_basis()
    out = []
    for _ in range(k):
        y = gr @ rng.standard_normal(gr.shape[1])
        y = size * y / max(np.linalg.norm(rep.act(y), 2), 1e-300)
        out.append(sla.expm(rep.act(y)))
    return out


def isoparametric_verdict(rep, v, pol=DEFAULT_POLICY, samples=SAMPLES, seed=0):
    """Isoparametric test of the orbit through a regular semisimple real v.

    Checks that equivariant normal fields are parallel (flat normal bundle)
    and that the Weingarten operators along them are C-diagonalizable with
    the same eigenvalues at ``samples`` orbit points g.v.
    """
    v = _check_real(rep, v)
    _require_regular(rep, v, pol)
    frame = orbit_frame(rep, v, pol)
    notes = [f"constancy sampled at {samples} orbit points"]
    if frame.degenerate:
        return OrbitGeometryReport(v, frame.tangent, frame.normal, frame.signature, [], False,
                                   float("nan"), "degenerate-metric", 0, {}, notes)
    flat, flat_res = normal_flatness_check(rep, v, pol, frame)
    spectra, base = [], []
    diag = True
    sa = 0.0
    for i in range(frame.normal.shape[1]):
        w = weingarten_operator(rep, v, frame.normal[:, i], pol, frame=frame, check=False)
        spectra.append(w.blocks)
        base.append(expand_spectrum(w.spectrum))
        diag = diag and w.diagonalizable
        sa = max(sa, w.self_adjoint_residual)
    rng = np.random.default_rng(seed)
    drift = 0.0
    degenerate_samples = 0
    for g in _sample_group_elements(rep, rng, samples):
        gv = g @ v
        f2 = orbit_frame(rep, gv, pol)
        if f2.degenerate:
            degenerate_samples += 1
            continue
        for i in range(frame.normal.shape[1]):
            w = weingarten_operator(rep, gv, g @ frame.normal[:, i], pol, frame=f2, check=False)
            diag = diag and w.diagonalizable
            scale = max([abs(z) for z in base[i]] + [1.0])
            drift = max(drift, match_spectra(expand_spectrum(w.spectrum), base[i], pol.eig_tol) / scale)
    if degenerate_samples:
        notes.append(f"{degenerate_samples} samples had a degenerate induced metric")
    constant = drift <= pol.eig_tol * 10
    verdict = "isoparametric" if (flat and diag and constant) else "not-isoparametric"
    res = {"normal flatness": flat_res, "spectrum drift": float(drift), "self-adjointness": sa}
    if not diag:
        notes.append("a Weingarten operator is not diagonalizable over C")
    return OrbitGeometryReport(v, frame.tangent, frame.normal, frame.signature, spectra, flat,
                               flat_res, verdict, samples, res, notes)


# ------------------------------------------------------------ closure probe

@dataclass(frozen=True)
class ClosureProbeReport:
    samples: list
    all_equal: bool
    direction: str


def _inclusion(rep_a, rep_b, tol=1e-9):
    """Coordinates in g_A of the basis of g_B, from the action matrices."""
    if rep_a.dim_v != rep_b.dim_v:
        raise InvalidInputError("representations act on spaces of different dimension")
    fa = rep_a.action.reshape(rep_a.dim_g, -1).T
    fb = rep_b.action.reshape(rep_b.dim_g, -1).T
    coef = np.linalg.lstsq(fa, fb, rcond=None)[0]
    if np.linalg.norm(fa @ coef - fb) > tol * max(np.linalg.norm(fb), 1.0):
        raise InvalidInputError("second algebra is not a subalgebra of the first")
    return coef


def orbit_closure_probe(rep_a, rep_b, points, pol=DEFAULT_POLICY):
    """Compare orbit dimensions of g_A and its subalgebra g_B at minimal vectors."""
    _inclusion(rep_a, rep_b)
    out = []
    for i, v in enumerate(points):
        entry = {"index": i}
        try:
            if rep_a.g_theta is None:
                raise SearchFailure("no Cartan involution on g for the flow")
            mv = minimal_vector(rep_a, v, pol)
            if not mv.converged:
                raise SearchFailure("minimal-vector flow did not converge", {"residual": mv.residual})
            w = mv.vector
            da, db = orbit_dim(rep_a, w, pol), orbit_dim(rep_b, w, pol)
            entry.update({"dim_a": da, "dim_b": db, "equal": da == db, "flow_residual": mv.residual})
        except (SearchFailure, PreconditionError) as exc:
            entry.update({"error": str(exc), "equal": None})
        out.append(entry)
    all_equal = all(e.get("equal") is True for e in out)
    return ClosureProbeReport(out, all_equal, "g_B ⊆ g_A")
