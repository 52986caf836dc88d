import numpy as np
import pytest

from superres.harness import random_separated_support


@pytest.fixture
def rng():
    return np.random.default_rng(20260810)


def separated_support(rng, count, delta):
    return random_separated_support(rng, count, delta)


def separated_support_2d(rng, count, delta):
    pts = []
    while len(pts) < count:
        c = rng.random(2)
        ok = all(
            max(min(abs(c[0] - p[0]), 1 - abs(c[0] - p[0])),
                min(abs(c[1] - p[1]), 1 - abs(c[1] - p[1]))) >= delta
            for p in pts
        )
        if ok:
            pts.append(c)
    return np.array(pts)
