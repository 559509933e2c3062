"""Learning dynamics on time-varying bilinear zero-sum games.

Simulates extra-gradient, optimistic gradient descent-ascent, and
negative momentum play on periodic and convergent perturbed games, and
analyzes their stability through period products, Floquet exponents,
characteristic-polynomial families, and quartic unit-disk tests.
"""
from .dynamics import (
    COMPLETED,
    DIRECT,
    DIVERGED,
    EG,
    MATRIX,
    NM,
    OGDA,
    UNDERFLOW,
    DynamicsConfig,
    JointState,
    Trajectory,
    iterative_matrix,
    simulate,
    step_direct,
)
from .linalg import Spectrum, eigenvalues, quartic_roots, svd, two_norm
from .metrics import (
    EnvelopeCheck,
    RateFit,
    delta_periodic,
    delta_stable,
    envelope,
    envelope_check,
    fit_rate,
)
from .schedules import (
    ExplicitSchedule,
    PayoffSchedule,
    PeriodicSchedule,
    PerturbedSchedule,
    bap_partial_sums,
    payoff_at,
    stable_matrix,
)
from .spectral import (
    FamilyRoots,
    KernelReport,
    QuarticVerdict,
    SpectralReport,
    analyze_product,
    divergent_init,
    kernel_intersection_check,
    nm_period2_charpoly,
    ogda_period2_rate,
    period_product,
    schur_quartic_test,
    static_eigen_family,
    step_size_threshold,
)

__version__ = "0.1.0"
