from .fixed_point import (
    FixedPointReport,
    FixedPointStatus,
    Objective,
    SolverOptions,
    async_fixed_point,
    fixed_point_load,
    mixed_fixed_point,
)
from .maps import (
    as_kappa,
    load_step,
    load_vector,
    sinr_step,
    sinr_vector,
    spectral_efficiency,
)
