"""Super-resolution of point sources from low-frequency Fourier samples.

Recovers atomic measures by total-variation minimization solved through its
semidefinite dual, together with the supporting machinery: dual-certificate
construction and verification, interpolation-kernel bounds, discrete-grid
l1 solvers and stability constants, time-band-limiting spectra, and the
adversarial experiment harness.
"""

from .certificate import (
    CertReport,
    Certificate,
    InterpolationSystem,
    SeparationError,
    build_certificate,
    build_certificate_2d,
    build_interpolation_system,
    certificate_fourier_coeffs,
    eval_certificate,
    verify_certificate,
    verify_certificate_2d,
)
from .discrete import (
    BPOptions,
    ConvergenceError,
    DiscreteProblem,
    basis_pursuit,
    noisy_l1,
    nullspace_ratio,
    stability_bound,
)
from .estimators import GridBasisPursuit, TVSuperResolver
from .harness import (
    ExperimentConfig,
    PhasePoint,
    adversarial_signal,
    adversarial_support,
    benchmark_exact_recovery,
    critical_distance,
    piecewise_recover,
    random_y_study,
)
from .kernel import KernelSpec, kernel2d_eval, kernel_bound, kernel_eval, kernel_tail_sum
from .model import (
    AtomicMeasure,
    Geometry,
    SampleVector,
    lowpass_project,
    min_separation,
    sample_discrete,
    sample_spikes,
    tv_norm,
    wrap_distance,
)
from .sdp import (
    DegenerateError,
    DualSolution,
    RecoveryResult,
    SolverError,
    SolverOptions,
    fit_amplitudes,
    locate_support,
    match_supports,
    solve_dual,
    tv_superresolve,
    vanishing_polynomial,
)
from .slepian import TimeBandOperator, asymptotic_lambda, cluster_count, timeband_spectrum

__version__ = "0.1.0"
