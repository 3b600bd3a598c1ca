"""Shared fixtures.

The compiled kernels JIT on first use; the session-scoped warm-up below
touches every one of them on tiny inputs so that tests asserting wall-clock
budgets measure steady-state speed, not compilation.
"""

import numpy as np
import pytest

from owpnf import FilterParams, oracle_filter, owpnf, sample_poisson
from owpnf.noise import pixel_uniforms


@pytest.fixture(scope="session", autouse=True)
def warm_engines():
    f = np.full((8, 8), 3.0)
    y = sample_poisson(f, seed=0).astype(np.float64)
    pixel_uniforms(0, 0, 0, 4)
    params = FilterParams(search_radius_px=1, patch_radius_px=1)
    oracle_filter(f, y, params)
    owpnf(y, params)
    owpnf(y, FilterParams(search_radius_px=1, patch_radius_px=1, split=True))
