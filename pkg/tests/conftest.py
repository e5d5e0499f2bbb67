import pytest

from coxtree.congruence import build_context, gamma_orbits
from coxtree.group import group_of
from coxtree.system import builtin

ACCEPTANCE_LINES: list[str] = []


@pytest.fixture(scope="session")
def figure():
    return builtin("figure")


@pytest.fixture(scope="session")
def dinf():
    return builtin("dinf")


@pytest.fixture(scope="session")
def a2():
    return builtin("a2")


@pytest.fixture(scope="session")
def figure_ctx(figure):
    ctx = build_context(figure, 3)
    return ctx, gamma_orbits(ctx, 7, 8)


@pytest.fixture(scope="session")
def dinf_ctx(dinf):
    ctx = build_context(dinf, 3)
    return ctx, gamma_orbits(ctx, 7, 8)


@pytest.fixture(scope="session")
def G_figure(figure):
    return group_of(figure)


@pytest.fixture(scope="session")
def G_dinf(dinf):
    return group_of(dinf)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[1])):
            terminalreporter.write_line(line)
