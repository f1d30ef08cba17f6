import pytest
from hypothesis import settings

from pcfv.sites import CFPresentation, build_site
from pcfv.ssp import full_ssp

# fixed example streams so that every run checks the same inputs
settings.register_profile("repro", derandomize=True)
settings.load_profile("repro")


def two_atom_cf():
    """One object σ over {a, b} with the full system and only its identity."""
    return CFPresentation({"s": full_ssp({"a", "b"})},
                          [("id_s", "s", "s", {"a": "a", "b": "b"})])


@pytest.fixture(scope="session")
def five_site():
    return build_site(two_atom_cf())


# one line per acceptance criterion, repeated at the end of the run
ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda l: int(l.split("criterion")[1].split(":")[0])):
            terminalreporter.write_line(line)
