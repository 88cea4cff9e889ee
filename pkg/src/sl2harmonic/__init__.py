"""Spherical analysis of K-central functions on SL(2, R)."""

__version__ = "0.1.0"

from .errors import *  # noqa: F401,F403
from .group import (  # noqa: F401
    CartanCoords, GroupElement, IwasawaCoords, KTypeSample, a, cartan_decompose, convolve_ktype,
    from_cartan, from_iwasawa, iwasawa_decompose, n_elem, nbar_elem, random_element, u,
)
from .spherical import (  # noqa: F401
    B0, ROUTES, c_constant, c_fn, calibrate_b0, discrete_set, functional_equation_residual,
    gamma_coeffs, global_expansion, local_leading, zeta_axis, zeta_group, zeta_table,
)
from .transform import (  # noqa: F401
    DEFAULT_TAIL_TOL, PLANCHEREL_NORM, TransformData, apply_multiplier, forward_transform,
    inverse_transform, plancherel_sides,
)
from .multipliers import Multiplier, mh_norm, parse_multiplier  # noqa: F401
from .kernel import KernelTable, herz_integral, synthesize_kernel  # noqa: F401
from .spectrum import SpectrumRegion, boundary_points, contains, par_region  # noqa: F401
