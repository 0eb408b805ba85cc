import pytest

from mollicrit import kernels


@pytest.fixture(params=["numba", "numpy"])
def backend(request):
    """Run the test once per kernel backend."""
    if request.param == "numba" and not kernels.HAVE_NUMBA:
        pytest.skip("numba not importable")
    prev = kernels.set_backend(request.param)
    yield request.param
    kernels.set_backend(prev)
