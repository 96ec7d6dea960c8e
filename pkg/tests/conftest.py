import numpy as np
import pytest

from sizedepth.crf import available_backends


@pytest.fixture(params=available_backends())
def backend(request):
    """Run a test once per installed solver backend."""
    return request.param


def rand_raster(rng, height, width):
    """Random raster with intensity already attached."""
    from sizedepth.raster import raster_from_array

    return raster_from_array(rng.uniform(0.0, 1.0, size=(height, width, 3)))


def rand_full_targets(rng, n, lo=0.5, hi=5.0):
    """Fully annotated targets with positive random depths."""
    from sizedepth.annotation import DepthTargets

    return DepthTargets(d=rng.uniform(lo, hi, size=n), mask=np.ones(n, dtype=bool))


def rand_partial_targets(rng, n, lo=0.5, hi=5.0):
    """Targets with a random nonempty strict subset of pixels masked."""
    from sizedepth.annotation import DepthTargets

    mask = rng.random(n) < 0.5
    if not mask.any():
        mask[rng.integers(n)] = True
    if mask.all():
        mask[rng.integers(n)] = False
    d = np.where(mask, rng.uniform(lo, hi, size=n), 0.0)
    return DepthTargets(d=d, mask=mask)
