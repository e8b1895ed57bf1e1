import pytest

from flagmirror.numerics import sample_params


@pytest.fixture(scope="session")
def p2():
    return sample_params(2, 7)


@pytest.fixture(scope="session")
def p3():
    return sample_params(3, 7, D=4)


@pytest.fixture(scope="session")
def exact2():
    # short products keep the rationals small
    return sample_params(2, 0, N=6, D=3, backend="exact")


def pytest_terminal_summary(terminalreporter):
    from test_acceptance import RESULTS

    if RESULTS:
        terminalreporter.section("acceptance criteria")
        for k in sorted(RESULTS):
            terminalreporter.write_line(RESULTS[k])
