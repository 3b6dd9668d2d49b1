"""Numerical laboratory for the noncanonical Hamiltonian structure of
2D incompressible Euler flow on the unit square: conservative bracket
dynamics, Casimir functionals (including singular, plateau-supported
ones), and semilinear equilibrium solves with existence/nonexistence
certificates."""

__version__ = "0.1.0"

from .errors import (
    BoundaryConditionError,
    FieldFormatError,
    SolverError,
    SupnormError,
)
from .grid import (
    Grid,
    ScalarField,
    VectorField2,
    boundary_trace,
    curl2d,
    divergence,
    gradient,
    inner,
    inner2,
    make_grid,
    norm,
    norm2,
    read_field,
    supnorm,
    velocity_from_streamfunction,
    write_field,
)
from .elliptic import (
    SpectralData,
    apply_laplacian,
    eigenpairs,
    greens_energy,
    project_solenoidal,
    solve_poisson,
)
from .bracket import bracket, poisson_operator, weak_residual
from .casimir import (
    Interval,
    KernelReport,
    PiecewiseMonotone,
    Plateau,
    PlateauReport,
    Primitive,
    casimir_functional,
    casimir_gradient_velocity,
    check_kernel_membership,
    clarke_gradient_of_primitive,
    detect_plateaus,
    evaluate,
    kernel_field,
    load_function,
    primitive,
    save_function,
)
from .dynamics import (
    DiagnosticsRow,
    SimConfig,
    hamiltonian,
    rhs,
    simulate,
    step_rk4,
    write_diagnostics_csv,
)
from .equilibrium import (
    Certificate,
    EquilibriumResult,
    EquilibriumSpec,
    LReport,
    MEstimate,
    certificate_csv,
    certificate_text,
    estimate_L,
    estimate_L_report,
    estimate_M,
    existence_condition,
    fixed_point_solve,
    prop1_certificate,
    prop2_certificate,
    residual_semilinear,
    write_trace_csv,
)
