"""heatsync: leader synchronization of coupled 1-D heat equations.

Certificate construction and checking, closed-form gain windows with a
coupling-gain search, and a finite-difference closed-loop simulator with
CSV-oriented diagnostics.
"""

__version__ = "0.1.0"

from .certify import (
    Certificate,
    NetworkConfig,
    build_certificate,
    build_certificate_fully_controlled,
    build_certificate_normalized,
    certificate_matrix,
    coupling_gain_feasible,
    evaluate_certificate,
    schur_reduction,
    wirtinger_check,
)
from .gains import (
    ComponentPlan,
    GainDesign,
    Interval,
    design,
    k_window_full,
    k_window_partial,
    search_g,
)
from .graph import (
    FollowerGraph,
    build_graph,
    connected_components,
    incidence,
    is_leader_connected,
    laplacian,
    leader_mask,
)
from .matrixkit import (
    Spectrum,
    SymMatrix,
    is_negative_definite,
    kron,
    power_dominant,
    solve_linear,
    sym_eigenvalues,
)
from .pdesim import (
    DiscreteOperator,
    ErrorSeries,
    SimConfig,
    Trajectory,
    analytic_open_loop_spectrum,
    assemble_operator,
    fit_decay_rate,
    l2_norm,
    simulate,
    spectral_abscissa,
    sync_errors,
    trapezoid_weights,
)
from .scenarios import (
    PRESET_NAMES,
    demo_graph,
    demo_initial_profiles,
    forcing_profile,
    preset_gains,
)

__all__ = [
    "__version__",
    "Certificate",
    "ComponentPlan",
    "DiscreteOperator",
    "ErrorSeries",
    "FollowerGraph",
    "GainDesign",
    "Interval",
    "NetworkConfig",
    "PRESET_NAMES",
    "SimConfig",
    "Spectrum",
    "SymMatrix",
    "Trajectory",
    "analytic_open_loop_spectrum",
    "assemble_operator",
    "build_certificate",
    "build_certificate_fully_controlled",
    "build_certificate_normalized",
    "build_graph",
    "certificate_matrix",
    "connected_components",
    "coupling_gain_feasible",
    "demo_graph",
    "demo_initial_profiles",
    "design",
    "evaluate_certificate",
    "fit_decay_rate",
    "forcing_profile",
    "incidence",
    "is_leader_connected",
    "is_negative_definite",
    "k_window_full",
    "k_window_partial",
    "kron",
    "l2_norm",
    "laplacian",
    "leader_mask",
    "power_dominant",
    "preset_gains",
    "schur_reduction",
    "search_g",
    "simulate",
    "solve_linear",
    "spectral_abscissa",
    "sym_eigenvalues",
    "sync_errors",
    "trapezoid_weights",
    "wirtinger_check",
]
