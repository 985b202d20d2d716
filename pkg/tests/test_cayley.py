import numpy as np
import pytest
import scipy.linalg as sla

from conftest import rep_for
from polarrep.cartan import PreconditionError, cartan_space_at, conjugacy_test, enumerate_classes
from polarrep.cayley import (
    NotApplicableError,
    cayley_transform,
    extremal_search,
    generator_space,
    is_extremal,
    restricted_polar_check,
)
from polarrep.roots import compute_roots
from polarrep.sympair import _block


@pytest.fixture(scope="module")
def sl2_classes(sl2, sl2_vectors):
    return cartan_space_at(sl2, sl2_vectors["E-F"]), cartan_space_at(sl2, sl2_vectors["H"])


def _g_to_matrix(rep, x):
    """Upper-left block of the ambient matrix of a g-element."""
    amb = rep.pair.g_basis @ x
    m = sum(a * mm for a, mm in zip(amb, rep.pair.ambient.matrix_realization))
    return m[:2, :2]


def test_sl2_noncompact_imaginary_transform(sl2, sl2_vectors, sl2_classes):
    compact, split = sl2_classes
    root = compute_roots(sl2, compact).roots[0]
    assert generator_space(sl2, root).shape[1] == 2
    rec = cayley_transform(sl2, compact, root, "noncompact-imaginary")
    assert rec.target.signature == (0, 1)
    assert conjugacy_test(sl2, rec.target, split).result is True
    assert max(rec.residuals.values()) < 1e-9
    # independent oracle: conjugate E - F by exp((pi/2) X) with 2x2 matrices
    x2 = _g_to_matrix(sl2, rec.generator)
    g2 = sla.expm((np.pi / 2) * x2)
    ef = np.array([[0.0, 1.0], [-1.0, 0.0]])
    image = g2 @ ef @ np.linalg.inv(g2)
    got = sl2.pair.v_from_matrix(_block(image, -image))
    assert np.allclose(rec.operator @ sl2_vectors["E-F"], got, atol=1e-12)
    # the image is i times a real split element: squares to -id, and image / i is real
    assert np.allclose(image @ image, -np.eye(2), atol=1e-12)
    assert np.allclose((image / 1j).imag, 0, atol=1e-12)
    # g^2 = -id on c
    assert np.allclose(rec.operator @ rec.operator @ compact.basis, -compact.basis, atol=1e-12)


def test_sl2_compact_real_transform(sl2, sl2_classes):
    compact, split = sl2_classes
    root = compute_roots(sl2, split).roots[0]
    rec = cayley_transform(sl2, split, root, "compact-real")
    assert rec.target.signature == (1, 0)
    assert conjugacy_test(sl2, rec.target, compact).result is True
    assert rec.residuals["compact dim step"] == 0
    assert rec.note


def test_wrong_kind_not_applicable(sl2, sl2_classes):
    compact, split = sl2_classes
    with pytest.raises(NotApplicableError):
        cayley_transform(sl2, split, compute_roots(sl2, split).roots[0], "noncompact-imaginary")
    with pytest.raises(ValueError):
        cayley_transform(sl2, split, compute_roots(sl2, split).roots[0], "sideways")


def test_compact_pair_has_no_transforms():
    rep = rep_for("supq", {"p": 1, "q": 1, "compact": 1})
    c = enumerate_classes(rep, budget=10, seed=0).representatives[0]
    assert [(d.type, d.subtype) for d in compute_roots(rep, c).roots] == [("imaginary", "compact")]
    assert extremal_search(rep, "max-noncompact", c) is c
    assert is_extremal(rep, c, "max-noncompact") and is_extremal(rep, c, "max-compact")


def test_extremal_search_sl2(sl2, sl2_classes):
    compact, split = sl2_classes
    history = []
    top = extremal_search(sl2, "max-noncompact", compact, history=history)
    assert top.signature == (0, 1) and len(history) == 1
    assert extremal_search(sl2, "max-compact", split).signature == (1, 0)
    with pytest.raises(ValueError):
        extremal_search(sl2, "sideways", split)


def test_extremal_search_sl3_adjoint(sl3adj):
    t = enumerate_classes(sl3adj, budget=30, seed=0)
    mixed = t.representatives[t.signatures.index((1, 1))]
    assert extremal_search(sl3adj, "max-noncompact", mixed).signature == (0, 2)


def test_restricted_polar_sl2(sl2, sl2_classes):
    compact, split = sl2_classes
    r = restricted_polar_check(sl2, split)
    assert r.passed and r.dims == {"space": 2, "section": 1, "orbit": 1}
    dual = restricted_polar_check(sl2, compact, dual=True)
    assert dual.passed and dual.dims == {"space": 1, "section": 1, "orbit": 0}
    with pytest.raises(PreconditionError):
        restricted_polar_check(sl2, compact)
    with pytest.raises(PreconditionError):
        restricted_polar_check(sl2, split, dual=True)


def test_restricted_polar_son3(son3):
    c = enumerate_classes(son3, budget=10, seed=0).representatives[0]
    r = restricted_polar_check(son3, c)
    # K_R = SO(3) acting on symmetric traceless matrices: orbits of dim 3, diagonal section of dim 2
    assert r.passed and r.dims == {"space": 5, "section": 2, "orbit": 3}
