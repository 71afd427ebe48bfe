import time

import pytest

from nlgw import cohoring, gwnl, nlforms, redgw

_ACCEPTANCE = {}


def record(n: int, ok: bool, text: str):
    _ACCEPTANCE[n] = (ok, text)


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(_ACCEPTANCE):
        ok, text = _ACCEPTANCE[n]
        terminalreporter.write_line("criterion %2d: %s  %s" % (n, "PASS" if ok else "FAIL", text))


class Timed:
    def __init__(self):
        self.seconds = {}

    def run(self, key, fn):
        t = time.time()
        out = fn()
        self.seconds[key] = time.time() - t
        return out


@pytest.fixture(scope="session")
def timer():
    return Timed()


@pytest.fixture(scope="session")
def dv_phi():
    return nlforms.dv_phi(61)


@pytest.fixture(scope="session")
def dv_locus():
    return cohoring.ZeroLocus(cohoring.dv_pencil())


@pytest.fixture(scope="session")
def fano_locus():
    return cohoring.ZeroLocus(cohoring.fano_pencil())


@pytest.fixture(scope="session")
def cubic_phi(fano_locus):
    nl0 = cohoring.grr_hodge_degree(fano_locus.fam, fano_locus) / 3
    return nlforms.solve_cubic_form(nl0, gwnl.CUBIC_NL3)


@pytest.fixture(scope="session")
def prim():
    return redgw.prim_tables(12)


@pytest.fixture(scope="session")
def dv_lhs(timer):
    fam = cohoring.dv_pencil()
    return timer.run("dv_lhs", lambda: gwnl.family_lhs(fam, 5))


@pytest.fixture(scope="session")
def fano_lhs(timer):
    fam = cohoring.fano_pencil()
    return timer.run("fano_lhs", lambda: gwnl.family_lhs(fam, 8))
