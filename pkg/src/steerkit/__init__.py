"""Linear steering criteria: nonsteering thresholds, verdicts and adapted criteria."""

from .adapted import (
    AdaptedCriterion,
    CorrelationMatrix,
    chsh_from_r2,
    chsh_settings_from_steering,
    chsh_value,
    correlation_matrix,
    max_correlation,
    r2_criterion,
    r3_criterion,
    r_infinity_criterion,
    steer_chsh_operator_pair,
)
from .errors import BudgetExceeded, ConvergenceError, InputError, QuadratureError, SteerkitError
from .linalg import (
    BipartiteState,
    bloch_to_density,
    correlation_tensor,
    density_to_bloch,
    jacobi_eigh,
    partial_trace_A,
    partial_trace_B,
    partial_transpose_B,
)
from .measurements import (
    MeasurementAssembly,
    ProjectiveMeasurement,
    four_vector_candidate,
    fourier_mub_pair,
    mub_pair_assembly,
    planar_family,
    qubit_assembly,
    qubit_measurement,
    rotated_pair,
    tetrahedron_family,
)
from .steering import (
    Assemblage,
    SteeringVerdict,
    assemblage_from_state,
    averaged_fidelity,
    isotropic_state,
    planar_lhs_witness,
    pure_state,
    verdict,
    visibility_reference,
    werner_state,
)
from .thresholds import (
    DirectionDensity,
    ThresholdReport,
    continuous_nst,
    general_nst,
    geometric_from_fidelity,
    planar_nst,
    probabilistic_oracle,
    qubit_nst,
)

__version__ = "0.1.0"
