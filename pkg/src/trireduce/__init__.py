"""Reduced (ro-vibrational) dynamics of three-body systems in Jacobi shape
coordinates, with a well-defined Hamiltonian value at collinear shapes and
a Cartesian-dynamics oracle for validation."""

from .errors import (
    CollinearInput,
    CollinearShape,
    ConfigError,
    DegenerateShape,
    DomainError,
    MisalignedFrame,
    NotCollinear,
    NumericalBlowup,
    PotentialSyntaxError,
    SingularInertia,
    TrireduceError,
    UnknownIdentifier,
    ZeroAngularMomentum,
)
from .geometry import (
    CartesianState,
    EulerAngles,
    JacobiVectors,
    MassTriple,
    ReducedMasses,
    ShapeCoordinates,
    body_frame_fit,
    cartesian_from_jacobi,
    jacobi_from_cartesian,
    omega_from_euler_rates,
    omega_from_rotation_rate,
    reduced_masses,
    rotation_from_euler,
    shape_to_distances,
    spatial_angular_momentum,
)
from .reduction import (
    BodyMomenta,
    BodyVelocityState,
    ReductionTensors,
    body_angular_momentum,
    body_velocities,
    gauge_potential,
    horizontal_metric,
    inertia_inverse,
    inertia_tensor,
    kinetic_energy_body,
    mechanical_connection,
    reduction_tensors,
    shape_momenta,
    velocities_from_momenta,
)
from .hamiltonian import (
    ReducedEvaluation,
    ReducedState,
    align_collinear_frame,
    collinear_hamiltonian,
    evaluate_reduced,
    reduced_hamiltonian,
    singular_term,
)
from .potential import (
    EvalContext,
    PotentialSpec,
    builtin_potential,
    eval_potential,
    forces_cartesian,
    parse_potential,
)
from .dynamics import (
    CollinearPassage,
    IntegratorConfig,
    Trajectory,
    conservation_report,
    detect_collinear_passages,
    integrate,
    total_energy,
)

__version__ = "0.1.0"
