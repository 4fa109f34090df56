"""Speed limits of a damped coherent oscillator coupled to an Ohmic-family bath."""
from .errors import NumericError
from .spectral import (
    SpectralParams,
    frequency_shift,
    markov_decay_rate,
    memory_kernel,
    semi_infinite_quadrature,
    spectral_density,
)
from .dynamics import (
    AmplitudeTrajectory,
    discretized_bath_oracle,
    markov_amplitude,
    markov_trajectory,
    master_equation_coefficients,
    solve_amplitude,
)
from .spectrum import (
    BoundState,
    asymptotic_amplitude,
    find_bound_state,
    numeric_threshold,
    spectral_function_y,
    threshold_coupling,
)
from .gaussian import (
    CoherentTrajectory,
    GaussianState,
    bures_angle,
    fidelity,
    quantum_fisher_information,
)
from .qsl import (
    QslReport,
    average_speed,
    qsl_ratio,
    qsl_series,
    tightness_compare,
    wasserstein_distance,
    wigner_speed_and_ratio,
)

__version__ = "0.1.0"

__all__ = [
    "SpectralParams",
    "frequency_shift",
    "markov_decay_rate",
    "memory_kernel",
    "semi_infinite_quadrature",
    "spectral_density",
    "AmplitudeTrajectory",
    "discretized_bath_oracle",
    "markov_amplitude",
    "markov_trajectory",
    "master_equation_coefficients",
    "solve_amplitude",
    "BoundState",
    "asymptotic_amplitude",
    "find_bound_state",
    "numeric_threshold",
    "spectral_function_y",
    "threshold_coupling",
    "CoherentTrajectory",
    "GaussianState",
    "bures_angle",
    "fidelity",
    "quantum_fisher_information",
    "QslReport",
    "average_speed",
    "qsl_ratio",
    "qsl_series",
    "tightness_compare",
    "wasserstein_distance",
    "wigner_speed_and_ratio",
    "NumericError",
]
