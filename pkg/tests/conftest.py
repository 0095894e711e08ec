import pytest

from qbox import kernels
from qbox.qcore import Deformation, PhysicalConfig

# filled by test_acceptance; echoed after the run, one line per criterion
ACCEPTANCE_LINES = {}


@pytest.fixture
def d15():
    return Deformation(1.5)


@pytest.fixture
def cfg15():
    return PhysicalConfig(Deformation(1.5))


@pytest.fixture(params=kernels.available_backends())
def backend(request):
    previous = kernels.backend()
    kernels.use_backend(request.param)
    yield request.param
    kernels.use_backend(previous)


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(ACCEPTANCE_LINES):
        terminalreporter.write_line(ACCEPTANCE_LINES[n])
