import pytest

from bfspec.symbols import make_catalog_symbol

# one representative per catalog kind
CATALOG_SAMPLES = [
    ("whitham", {"tth": 2.0}),
    ("capillary_whitham", {"tth": 1.0, "kappa": 0.5}),
    ("vorticity_whitham", {"tth": 1.0, "gamma": 0.7}),
    ("kawahara", {"ta": -4.0, "tb": 1.0}),
    ("ilw", {"tth": 1.0}),
    ("kdv", {}),
    ("fkdv", {"alpha": 3.0}),
    ("benjamin_ono", {}),
]


@pytest.fixture
def whitham2():
    return make_catalog_symbol("whitham", tth=2.0)


@pytest.fixture
def kdv():
    return make_catalog_symbol("kdv")


# criterion number -> (passed, detail); filled by test_acceptance.py
ACCEPTANCE = {}


def record(n, passed, detail):
    ACCEPTANCE[n] = (bool(passed), detail)
    return passed


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(ACCEPTANCE):
        passed, detail = ACCEPTANCE[n]
        terminalreporter.write_line(f"criterion {n:2d}: {'PASS' if passed else 'FAIL'}  {detail}")
