import json
import sys
from pathlib import Path

import pytest

TESTS = Path(__file__).parent
sys.path.insert(0, str(TESTS))

FIXTURE_ROOT = TESTS / "fixtures" / "geolife"


@pytest.fixture(scope="session")
def fixture_root():
    return FIXTURE_ROOT


@pytest.fixture(scope="session")
def fixture_manifest():
    return json.loads((FIXTURE_ROOT / "manifest.json").read_text())


def pytest_terminal_summary(terminalreporter):
    module = sys.modules.get("test_acceptance")
    verdicts = getattr(module, "VERDICTS", None)
    if verdicts:
        terminalreporter.section("acceptance criteria")
        for n in sorted(verdicts):
            terminalreporter.write_line(verdicts[n])
