import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from chaoscrypt.cipher import ChaosKey  # noqa: E402
from chaoscrypt.keys import EccKey  # noqa: E402
from chaoscrypt.ppm import reference_image  # noqa: E402

ACCEPTANCE_LINES: list[str] = []


@pytest.fixture(scope="session")
def ref_img():
    return reference_image()


@pytest.fixture(scope="session")
def chaos_key():
    return ChaosKey()


@pytest.fixture(scope="session")
def ecc_key():
    return EccKey()


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
