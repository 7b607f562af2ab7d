import numpy as np
import pytest

from splitdg.geometry import build_box_mesh


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


_MESHES = {}


def cached_mesh(counts=(2, 2, 2), warp=0.0, N=3, metric_mode="curl"):
    key = (tuple(counts), warp, N, metric_mode)
    if key not in _MESHES:
        _MESHES[key] = build_box_mesh(counts=counts, warp=warp, N=N, metric_mode=metric_mode)
    return _MESHES[key]


def state_scale(*arrays):
    return max(1.0, *(float(np.max(np.abs(a))) for a in arrays))
