import numpy as np
import pytest

from waverad6.grid import RadialGrid

PI3 = np.pi**3

# closed forms from the Beta-function reductions (verified symbolically
# in test_profiles.py)
NORM_LAMW_SQ = 18432.0 / 5.0 * PI3
KAPPA1 = 2304.0 * PI3
KAPPA2 = 1.0 / NORM_LAMW_SQ
KAPPA0 = 4608.0 * PI3
ENERGY_W = 192.0 / 5.0 * PI3
NORM_W_H1_SQ = 1152.0 / 5.0 * PI3   # ||grad W||^2 = ||W||_L3^3
NORM_W_L2_SQ = 2304.0 * PI3


@pytest.fixture(scope="session")
def ref_grid():
    """The reference graded grid of the acceptance criteria."""
    return RadialGrid(1e-3, 1e3, 96)


@pytest.fixture(scope="session")
def coarse_grid():
    return RadialGrid(1e-2, 1e2, 64)
