import pytest

from djsim import make_function

# Worked reference tables, flat big-endian indexing f(x) = table[x], x = u.w.
TWO_NODE_TABLE = [1, 0, 0, 0, 0, 1, 1, 1]  # n=3: f_0=(1,0,0,1), f_1=(0,0,1,1)
DELTA_TABLE = [1, 0, 1, 0, 1, 0, 1, 1, 0, 1, 0, 0, 1, 1, 0, 0]  # n=4: delta=(0,-2,2,0)
PAIR_TABLE = [1, 1, 0, 0, 1, 0, 1, 1, 0, 1, 0, 0, 1, 0, 1, 0]  # n=4: Delta=(0,-1,1,0)
XOR_KERNEL_TABLE = [1, 0, 0, 1, 0, 0, 1, 1, 0, 1, 0, 1, 1, 0, 1, 0]  # n=4: 4-node counterexample


@pytest.fixture
def two_node_example():
    return make_function(3, TWO_NODE_TABLE)


@pytest.fixture
def delta_example():
    return make_function(4, DELTA_TABLE)


@pytest.fixture
def pair_example():
    return make_function(4, PAIR_TABLE)


@pytest.fixture
def xor_kernel_example():
    return make_function(4, XOR_KERNEL_TABLE)
