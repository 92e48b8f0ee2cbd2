import sys
from functools import lru_cache
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).resolve().parent))

from laginv.mesh import genus2_mesh, standard_fixture, tetrahedron_mesh, torus_mesh  # noqa: E402

ROOT = Path(__file__).resolve().parent.parent
FIXTURES = ROOT / "fixtures"


@lru_cache(maxsize=None)
def cached_torus(n):
    return torus_mesh(n)


@lru_cache(maxsize=None)
def cached_sphere(r):
    return standard_fixture("sphere", r)


@lru_cache(maxsize=None)
def cached_genus2(n):
    return genus2_mesh(n)


@pytest.fixture
def tet():
    return tetrahedron_mesh()


@pytest.fixture
def sphere():
    return cached_sphere(4)


@pytest.fixture
def torus8():
    return cached_torus(8)


@pytest.fixture
def torus16():
    return cached_torus(16)


@pytest.fixture
def genus2():
    return cached_genus2(4)


@pytest.fixture
def fixtures_dir():
    return FIXTURES


# acceptance bookkeeping: one line per criterion in the terminal summary
ACCEPTANCE = {}


def record_criterion(number, ok, detail=""):
    ACCEPTANCE.setdefault(number, []).append((bool(ok), detail))


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(ACCEPTANCE):
        entries = ACCEPTANCE[number]
        ok = all(e[0] for e in entries)
        failed = [d for good, d in entries if not good]
        detail = "; ".join(failed) if failed else entries[-1][1]
        terminalreporter.write_line(f"criterion {number}: {'PASS' if ok else 'FAIL'}  {detail}")
