from __future__ import annotations

import pytest

from metric_mend.core import Graph, parse_instance

import helpers

K3_TEXT = "3 3\n0 1 1\n1 2 1\n0 2 5"


@pytest.fixture
def k3() -> Graph:
    """Triangle with a weight-5 chord over two unit edges; deficit 3."""
    return parse_instance(K3_TEXT)


@pytest.fixture
def chorded_square() -> Graph:
    """Unit 4-cycle a-b-c-d plus a weight-5 chord (a, c); two deficit-3 triangles."""
    return Graph(4, [(0, 1, 1), (1, 2, 1), (2, 3, 1), (0, 3, 1), (0, 2, 5)])


@pytest.fixture(scope="session")
def corpus() -> list[helpers.CorpusEntry]:
    return helpers.build_corpus(500)


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if not helpers.ACCEPTANCE_RESULTS:
        return
    terminalreporter.ensure_newline()
    terminalreporter.section("acceptance criteria")
    for number, name, ok, detail in sorted(helpers.ACCEPTANCE_RESULTS):
        status = "PASS" if ok else "FAIL"
        line = f"criterion {number} [{status}] {name}"
        if detail:
            line += f" ({detail})"
        terminalreporter.write_line(line)
