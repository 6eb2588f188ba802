import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

from shortlist_secretary.constraints import GraphicMatroid, PartitionMatroid, UniformMatroid, matching_matchoid
from shortlist_secretary.submodular import make_coverage


@pytest.fixture
def toy_coverage():
    # e1 covers {u0, u1}, e2 covers {u1}
    return make_coverage(2, [{0, 1}, {1}], [1.0, 1.0])


def random_coverage(rng, n, universe=None, max_cover=4):
    universe = universe or max(n, 2)
    covers = [rng.choice(universe, size=int(rng.integers(1, max_cover + 1)), replace=False) for _ in range(n)]
    return make_coverage(universe, covers, rng.uniform(0.5, 1.5, size=universe))


def random_partition(rng, n, blocks, capacity=1):
    labels = rng.integers(0, blocks, size=n)
    return PartitionMatroid([np.flatnonzero(labels == b).tolist() for b in range(blocks)], capacity)


def random_graphic(rng, n, vertices):
    return GraphicMatroid(vertices, [tuple(rng.choice(vertices, size=2, replace=False)) for _ in range(n)])


def random_matching(rng, n, vertices):
    return matching_matchoid(vertices, [tuple(rng.choice(vertices, size=2, replace=False)) for _ in range(n)])


def matroid_families(rng, n):
    return {
        "uniform": UniformMatroid(n, max(1, n // 3)),
        "partition": random_partition(rng, n, 3, capacity=2),
        "graphic": random_graphic(rng, n, 5),
    }
