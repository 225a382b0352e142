import os
import sys

import pytest
from hypothesis import settings

sys.path.insert(0, os.path.dirname(__file__))

from seqtopo.seq_io import normalize  # noqa: E402

settings.register_profile("repo", deadline=None, derandomize=True, print_blob=True)
settings.load_profile("repo")

N_CHINA_F = "GGGGAACTTCTCCTGCTAGAAT"

ACCEPTANCE_LINES = []


@pytest.fixture(scope="session")
def primer():
    return normalize(N_CHINA_F, id="N-China-F")


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[1].rstrip(":"))):
            terminalreporter.write_line(line)
