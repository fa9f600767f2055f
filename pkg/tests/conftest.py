import math

import pytest

from siet.constellation import Constellation

_ACCEPTANCE: dict[str, str] = {}


def pytest_runtest_logreport(report):
    if "test_acceptance.py" not in report.nodeid or "::test_criterion_" not in report.nodeid:
        return
    name = report.nodeid.split("::")[-1]
    if report.when == "call" or (report.when == "setup" and report.outcome != "passed"):
        _ACCEPTANCE[name] = "PASS" if report.outcome == "passed" else "FAIL"


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for name in sorted(_ACCEPTANCE):
        num, _, label = name[len("test_criterion_"):].partition("_")
        terminalreporter.write_line(f"{_ACCEPTANCE[name]}  criterion {int(num):2d}  {label.replace('_', ' ')}")


@pytest.fixture
def toy_constellation():
    """Two layers of four symbols, amplitudes 4.5 and 2, radii 1.2 and 0.9."""
    return Constellation.from_arrays([4.5, 2.0], [4, 4], [0.0, math.pi / 8], [1.2, 0.9])


@pytest.fixture
def two_layer_20_10():
    return Constellation.from_arrays([20.0, 10.0], [5, 5], radii=[1.0, 1.0])


@pytest.fixture(scope="session")
def enumerated_n10():
    """Full constant-composition class at n=10 over two layers of five symbols (10! words)."""
    from siet.code import CodeSpec, enumerate_codebook

    c = Constellation.from_arrays([20.0, 10.0], [5, 5])
    return c, enumerate_codebook(CodeSpec(10, c, (0.5, 0.5)), cap=4_000_000)
