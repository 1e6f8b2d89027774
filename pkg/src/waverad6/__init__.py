"""waverad6: a numerical laboratory for the radial energy-critical wave
equation in six spatial dimensions."""

__version__ = "0.1.0"

from .grid import RadialGrid, SOLID_ANGLE_6D
from .fields import RadialField, StatePair, rescale_h1, rescale_l2, extend_inward
from .constants import ConstantsTable, compute_constants, default_constants
