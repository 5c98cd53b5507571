import numpy as np
import pytest

from fdual.space import OutcomeSpace, make_dist, FeatureMap


@pytest.fixture
def two_point():
    """The workhorse 2-point instance: P=(1/2,1/2), Q=(3/4,1/4), phi=(0,1)."""
    space = OutcomeSpace.of_size(2)
    P = make_dist(space, [1.0, 1.0])
    Q = make_dist(space, [3.0, 1.0])
    phi = FeatureMap(space, [[0.0, 1.0]])
    return space, P, Q, phi
