import os
import sys

import numpy as np
import pytest
from hypothesis import HealthCheck, settings

sys.path.insert(0, os.path.dirname(os.path.dirname(os.path.abspath(__file__))))

settings.register_profile(
    'dev',
    max_examples=50,
    deadline=None,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.register_profile(
    'ci',
    max_examples=300,
    deadline=None,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile(os.environ.get('HYPOTHESIS_PROFILE', 'dev'))


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


def random_disk_points(rng, count, radius=0.8, min_distance=0.0, attempts=10_000):
    """Uniform points in ``|z| <= radius`` with pairwise pseudo-distance at least ``min_distance``."""
    points = []
    for _ in range(attempts):
        candidate = radius * np.sqrt(rng.random()) * np.exp(2j * np.pi * rng.random())
        if all(abs((p - candidate) / (1 - np.conj(p) * candidate)) >= min_distance for p in points):
            points.append(complex(candidate))
            if len(points) == count:
                return points
    raise RuntimeError("could not place the requested points")


@pytest.fixture
def disk_points():
    return random_disk_points
