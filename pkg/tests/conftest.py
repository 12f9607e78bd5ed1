import numpy as np
import pytest

from aximinimal import LightconeTriple, get_solution, make_grid
from aximinimal.catalog import family_spec


def chart_for(family, counts=(65, 65), bounds=None):
    spec = family_spec(family)
    sol = get_solution(family)
    return make_grid(bounds or spec.default_chart, counts, singular_lines=sol.singular_lines)


def sampled(family, counts=(65, 65), params=None, bounds=None):
    sol = get_solution(family, params)
    spec = family_spec(family)
    dom = make_grid(bounds or spec.default_chart, counts, singular_lines=sol.singular_lines)
    return LightconeTriple.from_solution(sol, dom)


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


@pytest.fixture(scope="session")
def hyperboloid_129():
    return sampled("hyperboloid", (129, 129))


@pytest.fixture(scope="session")
def elliptic_65():
    return sampled("elliptic", (65, 65))


# -- acceptance summary ---------------------------------------------------------------

ACCEPTANCE: dict[str, tuple[bool, str]] = {}


def record(criterion: str, ok: bool, detail: str) -> None:
    """Remember one acceptance verdict; printed now and again in the run summary."""
    ACCEPTANCE[criterion] = (bool(ok), detail)
    print(f"{criterion} {'PASS' if ok else 'FAIL'}: {detail}")


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for key in sorted(ACCEPTANCE, key=lambda k: int(k[1:])):
        ok, detail = ACCEPTANCE[key]
        terminalreporter.write_line(f"{key} {'PASS' if ok else 'FAIL'}: {detail}")
