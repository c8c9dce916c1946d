import pytest

from topodiv._reduction import warm_up


@pytest.fixture(scope="session", autouse=True)
def jit_kernels():
    """Compile the numba kernels once so no single test pays for it."""
    warm_up()
