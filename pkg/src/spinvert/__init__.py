"""spinvert: seismic impedance inversion via spin encoding and annealing.

The pipeline builds a convolutional forward operator from a background
model, collects the regularized least-squares objective into an explicit
quadratic, expands it through a fixed-point spin encoding into an Ising
Hamiltonian, and minimizes that with simulated annealing or exhaustive
enumeration (or exports it for an external annealer).
"""

from .elastic import (
    AngleSet,
    ElasticModel,
    Mode,
    TimeAxis,
    Wavelet,
    acoustic_equivalent,
    low_frequency_model,
    make_blocky_model,
    make_ricker,
    to_impedances,
)
from .encoding import SpinAssignment, SpinEncoding
from .errors import FileFormatError, SolverError, ValidationError
from .forward import (
    AvoCoefficients,
    ForwardOperator,
    SeismicGather,
    assemble_operator,
    avo_attributes,
    avo_coefficients,
    forward_model,
    reflection_coefficient,
)
from .inversion import (
    InversionConfig,
    InversionReport,
    SweepRow,
    invert,
    rms_error,
    spin_sweep,
)
from .qubo import (
    IsingProblem,
    QuadraticObjective,
    assemble_quadratic,
    compile_to_ising,
    evaluate_objective,
    export_qubo,
    import_qubo,
)
from .solvers import (
    AnnealSchedule,
    EpochRecord,
    SolveResult,
    SolverId,
    run_epochs,
    solve_exact,
    solve_sa,
)

__version__ = "0.1.0"

__all__ = [
    "AngleSet",
    "AnnealSchedule",
    "AvoCoefficients",
    "ElasticModel",
    "EpochRecord",
    "FileFormatError",
    "ForwardOperator",
    "InversionConfig",
    "InversionReport",
    "IsingProblem",
    "Mode",
    "QuadraticObjective",
    "SeismicGather",
    "SolveResult",
    "SolverError",
    "SolverId",
    "SpinAssignment",
    "SpinEncoding",
    "SweepRow",
    "TimeAxis",
    "ValidationError",
    "Wavelet",
    "acoustic_equivalent",
    "assemble_operator",
    "assemble_quadratic",
    "avo_attributes",
    "avo_coefficients",
    "compile_to_ising",
    "evaluate_objective",
    "export_qubo",
    "forward_model",
    "import_qubo",
    "invert",
    "low_frequency_model",
    "make_blocky_model",
    "make_ricker",
    "reflection_coefficient",
    "rms_error",
    "run_epochs",
    "solve_exact",
    "solve_sa",
    "spin_sweep",
    "to_impedances",
]
