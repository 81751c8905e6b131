import random

import pytest
from hypothesis import HealthCheck, settings

from logdrw.weights import LocalModel

settings.register_profile(
    "logdrw",
    max_examples=60,
    deadline=None,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("logdrw")

# The four model families of the axiom suite.
AXIOM_MODELS = [
    LocalModel(2, 2, 1, 1, 0),
    LocalModel(3, 3, 2, 0, 0),
    LocalModel(2, 2, 2, 0, 2),
    LocalModel(3, 3, 3, 0, 2),
]


@pytest.fixture
def rng():
    return random.Random(20240611)


# criterion number -> (passed, detail); filled by test_acceptance.py
ACCEPTANCE = {}


def record_criterion(number, passed, detail=""):
    prev = ACCEPTANCE.get(number)
    if prev is not None:
        passed = passed and prev[0]
        detail = "; ".join(x for x in (prev[1], detail) if x)
    ACCEPTANCE[number] = (passed, detail)
    print(f"criterion {number:2d}: {'PASS' if passed else 'FAIL'}  {detail}")


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.write_sep("-", "acceptance criteria")
    for number in sorted(ACCEPTANCE):
        passed, detail = ACCEPTANCE[number]
        terminalreporter.write_line(f"criterion {number:2d}: {'PASS' if passed else 'FAIL'}  {detail}")
