import random
from math import comb

import pytest
from hypothesis import settings

from multistage.core import Board, Family

settings.register_profile("default", max_examples=60, deadline=None)
settings.load_profile("default")


def random_family(rng: random.Random, size: int, count: int, lo: int = 1, hi: int | None = None) -> Family:
    """``count`` distinct random sets on ``size`` elements."""
    hi = size if hi is None else hi
    count = min(count, sum(comb(size, k) for k in range(lo, hi + 1)))
    seen = set()
    while len(seen) < count:
        k = rng.randint(lo, hi)
        seen.add(frozenset(rng.sample(range(size), k)))
    return Family.single(sorted(map(sorted, seen)))


@pytest.fixture
def small_board():
    return Board.abstract(6)
