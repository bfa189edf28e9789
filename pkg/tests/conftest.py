import math

import pytest

import coverentropy as ce

GOLDEN = (1 + math.sqrt(5)) / 2
LOG_GOLDEN = math.log(GOLDEN)
LOG2 = math.log(2.0)
H_THIRD = math.log(3.0) - (2.0 / 3.0) * LOG2


@pytest.fixture
def full2():
    return ce.full_shift(2)


@pytest.fixture
def full3():
    return ce.full_shift(3)


@pytest.fixture
def gm():
    return ce.golden_mean()


@pytest.fixture
def parry(gm):
    return ce.markov(gm, [[1 / GOLDEN, 1 / GOLDEN**2], [1.0, 0.0]])


@pytest.fixture
def three_points():
    """Identity permutation on {a,b,c} = {0,1,2} with the uniform measure."""
    sys = ce.permutation([0, 1, 2])
    return sys, ce.uniform_cycle_measure(sys)


@pytest.fixture
def overlap_cover(three_points):
    sys, _ = three_points
    return ce.family_of_points(sys, [[0, 1], [1, 2]], "cover")
