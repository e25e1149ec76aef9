import numpy as np
import pytest
from click.testing import CliRunner

from bench.fixtures import cyclic_tensor, load_fixture
from markov.tensor import StochasticTensor
from markov.tensor_io import save_tensor
from pagerank.generator import gen_random_tensor


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


@pytest.fixture
def random_tensor():
    """Builder: random_tensor(order, dim, seed=0, density=1.0, blend=0.0)."""
    def build(order=3, dim=4, seed=0, density=1.0, blend=0.0):
        return gen_random_tensor(order, dim, density, seed, uniform_blend=blend)
    return build


@pytest.fixture
def fixture_i():
    return load_fixture("i")


@pytest.fixture
def cyclic():
    return cyclic_tensor(3, 3)


@pytest.fixture
def tensor_file(tmp_path):
    """Builder writing a tensor to tmp_path and returning the path."""
    def write(tensor: StochasticTensor, name="t.txt"):
        return save_tensor(tensor, tmp_path / name)
    return write


@pytest.fixture
def runner():
    return CliRunner(mix_stderr=False)


@pytest.fixture
def random_simplex(rng):
    def draw(n):
        x = rng.random(n)
        return x / x.sum()
    return draw
