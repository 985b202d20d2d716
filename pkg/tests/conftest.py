import functools

import numpy as np
import pytest

from polarrep.sympair import _block, catalog_representation

# criterion number -> (title, passed, detail); filled by test_acceptance
ACCEPTANCE = {}

POLAR_FIXTURES = [("sl2-adjoint", {}), ("sln-son", {"n": 3}), ("supq", {"p": 1, "q": 1})]


@functools.lru_cache(maxsize=None)
def _rep(name, frozen):
    return catalog_representation(name, dict(frozen))


def rep_for(name, params=None):
    return _rep(name, tuple(sorted((params or {}).items())))


@pytest.fixture(scope="session")
def sl2():
    return rep_for("sl2-adjoint")


@pytest.fixture(scope="session")
def sl2_vectors(sl2):
    """V coordinates of H, E, F, E - F in sl2-adjoint (V = {(x, -x)})."""
    h = np.diag([1.0, -1.0])
    e = np.array([[0.0, 1.0], [0.0, 0.0]])
    f = e.T

    def v(m):
        return sl2.pair.v_from_matrix(_block(m, -m)).astype(complex)

    return {"H": v(h), "E": v(e), "F": v(f), "E-F": v(e - f), "E+F": v(e + f)}


@pytest.fixture(scope="session")
def son3():
    return rep_for("sln-son", {"n": 3})


@pytest.fixture(scope="session")
def su11():
    return rep_for("supq", {"p": 1, "q": 1})


@pytest.fixture(scope="session")
def sl3adj():
    return rep_for("sln-adjoint", {"n": 3})


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(ACCEPTANCE):
        title, ok, detail = ACCEPTANCE[n]
        terminalreporter.write_line(f"criterion {n:2d} {'PASS' if ok else 'FAIL'}: {title} ({detail})")
