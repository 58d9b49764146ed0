import pytest
from hypothesis import settings

# fixed example streams so a red run can be replayed exactly
settings.register_profile("repro", derandomize=True, deadline=None, print_blob=True)
settings.load_profile("repro")

_LINES = pytest.StashKey[list]()


def pytest_configure(config):
    config.stash[_LINES] = []


@pytest.fixture(scope="session")
def acceptance_log(request):
    return request.config.stash[_LINES]


def pytest_terminal_summary(terminalreporter, config):
    lines = config.stash.get(_LINES, [])
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in lines:
            terminalreporter.write_line(line)
