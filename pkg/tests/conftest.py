import pytest

from nsplab.dfa import BINARY, Dfa

# z1 and z3 over {0,1}^4: q0..q4 along the top, R (id 5) the dead state
Z1Z3 = Dfa(BINARY, [[5, 1], [2, 2], [5, 3], [4, 4], [5, 5], [5, 5]], 0, {4})

# the padded version drawn by hand: q0..q4, q_fin=5, chain q'1..q'4 = 6..9, R=10
Z1Z3_PADDED = Dfa(
    BINARY,
    [
        [6, 1],    # q0: 0 -> q'1, 1 -> q1
        [2, 2],    # q1
        [8, 3],    # q2: 0 -> q'3, 1 -> q3
        [4, 4],    # q3
        [5, 5],    # q4 -> q_fin
        [10, 10],  # q_fin -> R
        [7, 7],    # q'1
        [8, 8],    # q'2
        [9, 9],    # q'3
        [10, 5],   # q'4: 0 -> R, 1 -> q_fin
        [10, 10],  # R
    ],
    0,
    {5},
    dead=10,
)

EMPTY3 = Dfa(BINARY, [[1, 2], [2, 1], [2, 2]], 0, set())
SIGMA_STAR = Dfa(BINARY, [[0, 0]], 0, {0})
ALL_4 = Dfa(BINARY, [[1, 1], [2, 2], [3, 3], [4, 4], [5, 5], [5, 5]], 0, {4})


@pytest.fixture
def z1z3():
    return Z1Z3


@pytest.fixture
def z1z3_padded():
    return Z1Z3_PADDED


@pytest.fixture
def empty3():
    return EMPTY3


@pytest.fixture
def sigma_star():
    return SIGMA_STAR


@pytest.fixture
def all4():
    return ALL_4
