import numpy as np
import pytest
import scipy.linalg as sla

from conftest import rep_for
from polarrep.liealg import ad_matrix
from polarrep.numkernel import InvalidInputError
from polarrep.sympair import (
    InconsistentInputError,
    NotFoundError,
    PairValidationError,
    build_pair,
    catalog_pair,
    catalog_representation,
    combined_decomposition,
    conjugated_cartan_pair,
    construct_cartan_pair,
    isotropy_representation,
    subrepresentation,
)


@pytest.mark.parametrize("n", [2, 3, 4])
def test_sln_son_dimensions(n):
    pair = catalog_pair("sln-son", {"n": n})
    assert pair.dim_g == n * (n - 1) // 2          # so(n)
    assert pair.dim_v == n * (n + 1) // 2 - 1      # symmetric traceless
    # so(n) is compact and V_R is the noncompact part
    assert combined_decomposition(pair).dims == (n * (n - 1) // 2, 0, 0, n * (n + 1) // 2 - 1)


@pytest.mark.parametrize("n", [2, 3])
def test_sln_adjoint_dimensions(n):
    pair = catalog_pair("sln-adjoint", {"n": n})
    d = n * n - 1
    k = n * (n - 1) // 2
    assert (pair.dim_g, pair.dim_v) == (d, d)
    assert combined_decomposition(pair).dims == (k, d - k, k, d - k)


@pytest.mark.parametrize("p,q,r,s,dims", [
    (1, 1, 1, 0, (1, 0, 0, 2)),
    (1, 1, 1, 1, (1, 0, 2, 0)),     # compact: sigma = theta
    (2, 2, 1, 1, (3, 4, 4, 4)),
])
def test_supq_dimensions(p, q, r, s, dims):
    pair = catalog_pair("supq", {"p": p, "q": q, "r": r, "s": s})
    assert pair.dim_v == 2 * p * q
    assert pair.dim_g == p * p + q * q - 1
    assert combined_decomposition(pair).dims == dims


def test_catalog_pairs_validate():
    for name, params in [("sl2-adjoint", {}), ("sln-son", {"n": 3}), ("supq", {"p": 1, "q": 1}),
                         ("sln-adjoint", {"n": 3})]:
        pair = catalog_pair(name, params)
        assert max(pair.residuals.values()) < 1e-12
        rep = isotropy_representation(pair)
        assert max(rep.residuals.values()) < 1e-10


def test_catalog_errors():
    with pytest.raises(NotFoundError):
        catalog_pair("nope")
    with pytest.raises(InvalidInputError):
        catalog_pair("sln-son", {"m": 3})
    with pytest.raises(InvalidInputError):
        catalog_pair("sln-son", {"n": 9})
    with pytest.raises(InvalidInputError):
        catalog_pair("supq", {"p": 0, "q": 1})
    with pytest.raises(InvalidInputError):
        catalog_representation("lorentz-2param", {"spin": 1.0})


def test_wrong_shapes_rejected():
    pair = catalog_pair("sl2-adjoint")
    with pytest.raises(InvalidInputError):
        build_pair(pair.ambient, np.eye(5), pair.sigma_hat, pair.theta_hat)


def test_noncommuting_involutions_named():
    pair = catalog_pair("sl2-adjoint")
    # conjugate theta by exp(i t ad(X)), X = (E - F)' + (E - F)'': still a
    # tau-compatible involution, but i X is not theta-fixed, so the result no
    # longer commutes with the real structure sigma
    x = np.array([0, 1, -1, 0, 1, -1.0])
    a = sla.expm(0.4j * ad_matrix(pair.ambient, x))
    theta = a @ pair.theta_hat @ np.conj(np.linalg.inv(a))
    with pytest.raises(PairValidationError) as info:
        build_pair(pair.ambient, pair.tau_hat, pair.sigma_hat, theta)
    assert "sigma∘theta − theta∘sigma" in info.value.violations
    assert "sigma∘theta − theta∘sigma" in str(info.value)


def test_non_involution_rejected():
    pair = catalog_pair("sl2-adjoint")
    with pytest.raises(PairValidationError) as info:
        build_pair(pair.ambient, 2 * pair.tau_hat, pair.sigma_hat, pair.theta_hat)
    assert "tau∘tau − id" in info.value.violations


def test_isotropy_action_is_bracket(sl2, sl2_vectors):
    # [H, E] = 2E in V: the g-element H' + H'' acts on V by ad(H)
    pair = sl2.pair
    h_g = np.linalg.lstsq(pair.g_basis, np.array([1, 0, 0, 1, 0, 0.0]), rcond=None)[0]
    assert np.allclose(sl2.act(h_g) @ sl2_vectors["E"], 2 * sl2_vectors["E"])
    assert np.allclose(sl2.act(h_g) @ sl2_vectors["F"], -2 * sl2_vectors["F"])


def test_form_invariance(son3):
    rng = np.random.default_rng(1)
    x, y = rng.standard_normal(son3.dim_v), rng.standard_normal(son3.dim_v)
    for a in range(son3.dim_g):
        op = son3.action[a]
        assert abs(son3.inner(op @ x, y) + son3.inner(x, op @ y)) < 1e-12


def test_reference_cartan_pair_is_fixed(sl2):
    cp = construct_cartan_pair(sl2, sl2.g_theta, sl2.theta_tilde)
    assert np.allclose(cp.eta, sl2.g_theta)
    assert np.allclose(cp.eta_tilde, sl2.theta_tilde)
    assert cp.residuals["negativity deficit"] == 0


def test_cartan_pair_from_conjugate(sl2):
    rng = np.random.default_rng(3)
    y = 0.3 * (rng.standard_normal(3) + 1j * rng.standard_normal(3))
    mu, mu_t = conjugated_cartan_pair(sl2, y)
    cp = construct_cartan_pair(sl2, mu, mu_t)
    assert cp.residuals["eta∘sigma − sigma∘eta"] < 1e-10
    assert cp.residuals["equivariance"] < 1e-10
    assert cp.residuals["min positivity"] > 0


def test_subrepresentation_of_rotations():
    so3 = rep_for("so3-r3")
    sub = subrepresentation(so3, np.eye(3)[:, :1], np.eye(3))
    assert sub.dim_g == 1 and sub.dim_v == 3
    assert np.allclose(sub.action[0], so3.action[0])
    with pytest.raises(InconsistentInputError):
        subrepresentation(so3, np.eye(3)[:, :2], np.eye(3))   # [L0, L1] leaves the span
    with pytest.raises(InconsistentInputError):
        subrepresentation(so3, np.eye(3)[:, :1], np.eye(3)[:, :1])


def test_lorentz_fixture():
    rep = catalog_representation("lorentz-2param", {"boost": 1.0, "rotation": 0.5})
    assert (rep.dim_g, rep.dim_v) == (1, 4)
    assert rep.pair is None
