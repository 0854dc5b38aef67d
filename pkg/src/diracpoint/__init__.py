"""Point-coupled 1D Dirac field: solitary waves, evolution, diagnostics."""

__version__ = "0.1.0"

from .model import (
    ALPHA,
    BETA,
    Grid,
    ModelParams,
    SpinorField,
    dirac_apply,
    dirac_inverse_delta,
    energy,
    nonlinearity_F,
    norms,
    potential_U,
    validate_params,
)
from .solitary import (
    DispersionPoint,
    SolitaryParams,
    amplitude_roots,
    dispersion_point,
    helmholtz_green,
    jump_residual,
    linear_frequencies,
    profile,
    solitary_field,
    solitary_params,
    stable_b,
)
from .evolution import (
    RunResult,
    SimConfig,
    SimState,
    TraceSeries,
    absorbing_mask,
    duhamel_solution,
    free_step,
    point_kick,
    run,
    run_with_source,
    strang_step,
)
from .diagnostics import (
    AttractorFit,
    SpectrumReport,
    attraction_metrics,
    fit_solitary,
    modulus_flatness,
    split_free,
    trace_spectrum,
)

__all__ = [name for name in dir() if not name.startswith("_")]
