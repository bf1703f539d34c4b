"""Transport hierarchy, assembled logarithmic kernels and discrete parametrices."""

from .checks import parametrix_residual_check, ppa_v0_invariance
from .expansion import (HadamardExpansion, build_expansion, coefficient_sum,
                        coincidence_shift, hadamard_kernel, rescaled_expansion,
                        scaling_shift_check)
from .parametrix import (DiscreteParametrix, build_discrete_parametrix,
                         constant_w_smooth, diagonal_regularisation,
                         separable_w_smooth)
from .transport import (Bitensor, RadialFrame, solve_V0, solve_Vn,
                        transport_residual)

__all__ = [
    "Bitensor", "DiscreteParametrix", "HadamardExpansion", "RadialFrame",
    "build_discrete_parametrix", "build_expansion", "coefficient_sum",
    "coincidence_shift", "constant_w_smooth", "diagonal_regularisation",
    "hadamard_kernel", "parametrix_residual_check", "ppa_v0_invariance",
    "rescaled_expansion", "scaling_shift_check", "separable_w_smooth",
    "solve_V0", "solve_Vn", "transport_residual",
]
