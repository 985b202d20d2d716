import numpy as np
import pytest
import scipy.linalg as sla
from hypothesis import given, settings
from hypothesis import strategies as st

from polarrep.cartan import (
    PreconditionError,
    cartan_space_at,
    conjugacy_test,
    enumerate_classes,
    generic_orbit_dim,
    make_record,
    minimal_vector,
    moment_residual,
    orbit_dim,
    random_regular_real,
    regularity,
    stabilize_theta,
)


def test_regularity_of_sl2_elements(sl2, sl2_vectors):
    assert generic_orbit_dim(sl2) == 2
    h = regularity(sl2, sl2_vectors["H"])
    assert h.is_semisimple and h.is_regular and h.orbit_dim == 2
    e = regularity(sl2, sl2_vectors["E"])
    assert e.is_semisimple is False and not e.is_regular and e.orbit_dim == 2
    zero = regularity(sl2, 0 * sl2_vectors["H"])
    assert zero.orbit_dim == 0 and not zero.is_regular


@pytest.mark.parametrize("fixture,dim", [("son3", 3), ("su11", 1), ("sl3adj", 6)])
def test_generic_orbit_dim(request, fixture, dim):
    # dim V minus the rank: 5 - 2, 2 - 1, 8 - 2
    assert generic_orbit_dim(request.getfixturevalue(fixture)) == dim


def test_orbit_dim_scale_invariant(sl2, sl2_vectors):
    for s in (1e-6, 1.0, 1e6):
        assert orbit_dim(sl2, s * sl2_vectors["H"]) == 2


def test_cartan_space_signatures(sl2, sl2_vectors):
    split = cartan_space_at(sl2, sl2_vectors["H"])
    assert split.signature == (0, 1) and split.dim == 1 and split.rank == 1
    compact = cartan_space_at(sl2, sl2_vectors["E-F"])
    assert compact.signature == (1, 0)
    with pytest.raises(PreconditionError):
        cartan_space_at(sl2, sl2_vectors["E"])


def test_conjugacy_tri_state(sl2, sl2_vectors):
    a = cartan_space_at(sl2, sl2_vectors["H"])
    b = cartan_space_at(sl2, sl2_vectors["E-F"])
    assert conjugacy_test(sl2, a, b).result is False
    assert conjugacy_test(sl2, a, a).result is True
    # rotate H inside the compact group: still conjugate, with the K_R conjugator found
    k = sla.expm(0.7 * sl2.act(np.linalg.lstsq(sl2.pair.g_basis, np.array([0, 1, -1, 0, 1, -1.0]),
                                               rcond=None)[0]))
    c = make_record(sl2, k @ a.basis)
    out = conjugacy_test(sl2, a, c)
    assert out.result is True and out.conjugator is not None


def test_stabilize_moves_boosted_split_subspace(sl2, sl2_vectors):
    # boost H by a real non-compact group element: sigma-stable, not theta-stable
    boost = sla.expm(0.8 * sl2.act(np.linalg.lstsq(sl2.pair.g_basis, np.array([0, 1, 1, 0, 1, 1.0]),
                                                   rcond=None)[0]))
    c = cartan_space_at(sl2, boost @ sl2_vectors["E-F"])
    assert c.sigma_stable and not c.theta_stable
    st_ = stabilize_theta(sl2, c)
    assert st_.record.theta_stable and st_.record.signature == (1, 0)
    assert st_.residuals["conjugator real"] < 1e-8


def test_minimal_vector_detects_closed_orbits(sl2, sl2_vectors):
    nil = minimal_vector(sl2, sl2_vectors["E"])
    assert not nil.closed and nil.norm_ratio < 1e-6
    mv = minimal_vector(sl2, sl2_vectors["H"] + 0.3 * sl2_vectors["E"])
    assert mv.closed and mv.residual < 1e-8
    assert np.allclose(mv.op @ (sl2_vectors["H"] + 0.3 * sl2_vectors["E"]), mv.vector)


def test_enumeration_sl2(sl2):
    t = enumerate_classes(sl2, budget=60, seed=3)
    assert sorted(t.signatures) == [(0, 1), (1, 0)]
    assert not t.incomplete
    assert t.sample_counts["regular_samples"] > 0


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 2**31 - 1), st.floats(1e-3, 1e3))
def test_moment_residual_scale_invariant(seed, scale):
    from conftest import rep_for
    rep = rep_for("sl2-adjoint")
    rng = np.random.default_rng(seed)
    v = rng.standard_normal(3) + 1j * rng.standard_normal(3)
    assert abs(moment_residual(rep, v) - moment_residual(rep, scale * v)) < 1e-10


def test_moment_residual_vanishes_on_real_semisimple(sl2, sl2_vectors):
    assert moment_residual(sl2, sl2_vectors["H"]) < 1e-14
    assert moment_residual(sl2, sl2_vectors["E"]) > 0.1


@settings(max_examples=10, deadline=None)
@given(st.integers(0, 2**31 - 1))
def test_regular_real_points_give_stable_records(seed):
    from conftest import rep_for
    rep = rep_for("sln-son", {"n": 3})
    v = random_regular_real(rep, np.random.default_rng(seed))
    c = cartan_space_at(rep, v)
    assert c.sigma_stable and c.dim == 2
    rec = stabilize_theta(rep, c, seed=seed).record
    assert rec.theta_stable and rec.signature == (0, 2)
