"""polaropt: polar-decomposition algorithms, nuclear-norm-scaled matrix
optimizers, and a benchmark harness for dense matrix objectives."""

from .elliptic import complete_elliptic_k, jacobi_sn_cn
from .harness import (
    RunConfig,
    RunResult,
    TraceRecord,
    compare_runs,
    export_config,
    list_presets,
    parse_config,
    preset,
    run_experiment,
)
from .linalg import (
    SigmaBounds,
    SvdResult,
    cholesky,
    cond2,
    frobenius_norm,
    matrix_with_spectrum,
    nuclear_norm,
    qr_householder,
    sigma_bounds,
    spectral_norm,
    svd,
)
from .optim import (
    Adam,
    AltGD,
    MatrixSignSGD,
    Muon,
    NewtonQuad,
    PolarBackend,
    PolarGrad,
    PolarStepError,
    Schedule,
    schedule_value,
)
from .polar import (
    ITERATION_BUDGET,
    NS_CLASSIC,
    NS_TUNED,
    NsCoefficients,
    PolarFactors,
    StabilityReport,
    hermitian_factor,
    newton_schulz,
    polar_reference,
    qdwh,
    scaled_newton,
    stability_check,
    zolo_pd,
)
from .problems import (
    CompletionProblem,
    LogisticProblem,
    QuadRegProblem,
    completion_make,
    logistic_make,
    problem_from_recipe,
    quad_make,
)

__version__ = "0.1.0"

__all__ = [
    "Adam",
    "AltGD",
    "CompletionProblem",
    "ITERATION_BUDGET",
    "LogisticProblem",
    "MatrixSignSGD",
    "Muon",
    "NS_CLASSIC",
    "NS_TUNED",
    "NewtonQuad",
    "NsCoefficients",
    "PolarBackend",
    "PolarFactors",
    "PolarGrad",
    "PolarStepError",
    "QuadRegProblem",
    "RunConfig",
    "RunResult",
    "Schedule",
    "SigmaBounds",
    "StabilityReport",
    "SvdResult",
    "TraceRecord",
    "cholesky",
    "compare_runs",
    "complete_elliptic_k",
    "completion_make",
    "cond2",
    "export_config",
    "frobenius_norm",
    "hermitian_factor",
    "jacobi_sn_cn",
    "list_presets",
    "logistic_make",
    "matrix_with_spectrum",
    "newton_schulz",
    "nuclear_norm",
    "parse_config",
    "polar_reference",
    "preset",
    "problem_from_recipe",
    "qdwh",
    "qr_householder",
    "quad_make",
    "run_experiment",
    "scaled_newton",
    "schedule_value",
    "sigma_bounds",
    "spectral_norm",
    "stability_check",
    "svd",
    "zolo_pd",
]
