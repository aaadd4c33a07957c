import sys
from pathlib import Path

import pytest

HERE = Path(__file__).parent
sys.path.insert(0, str(HERE))

from pemb import load_pg, spanning_tree_from_edges  # noqa: E402

FIG1_TREE_IDS = [2, 3, 4, 7, 8, 11, 12]


@pytest.fixture(scope="session")
def data_dir():
    return HERE / "data"


@pytest.fixture(scope="session")
def fig1_graph():
    return load_pg(HERE / "data" / "fig1.pg1")


@pytest.fixture(scope="session")
def fig1_tree(fig1_graph):
    return spanning_tree_from_edges(fig1_graph, [e - 1 for e in FIG1_TREE_IDS])


# one line per acceptance criterion, printed at the end of the run
ACCEPTANCE: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE:
        terminalreporter.write_sep("=", "acceptance criteria")
        for line in sorted(ACCEPTANCE, key=lambda s: int(s.split()[1].lstrip("#"))):
            terminalreporter.write_line(line)
