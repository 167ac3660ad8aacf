"""aclsim: exact simulator of a truncated oscillator coupled to a random-matrix
bath, with information-backflow non-Markovianity quantifiers."""

__version__ = "0.1.0"

from .linalg import (
    BipartiteShape,
    EigensolverError,
    SpectralDecomposition,
    Subsystem,
    eig_hermitian,
    eigvals_hermitian,
    evolve_density,
    kron,
    matrix_function,
    partial_trace,
    propagator,
)
from .model import (
    ModelOperators,
    ModelParams,
    build_operators,
    gibbs_state,
    position_operator,
    position_wavefunction,
    sample_gue,
    system_hamiltonian,
    total_hamiltonian,
    truncated_annihilation,
    truncated_coherent_state,
)
from .dynamics import (
    InitialPair,
    NumericalAbort,
    StepSnapshot,
    TimeGrid,
    convergence_check,
    damped_wavepacket,
    evolve_pair,
    free_wavepacket,
    initial_pair,
)
from .quantifiers import (
    QuantifierKind,
    QuantifierSeries,
    SummaryRecord,
    blp_measure,
    bound_rhs,
    compute_series,
    distinguishability,
    distinguishability_series,
    env_distinguishability,
    information_ledger,
    jensen_shannon,
    quantifier_difference,
    relative_entropy,
    revival_targets,
    sqrt_jsd,
    summarize,
    total_correlations,
    trace_distance,
)
from .runner import (
    ConfigError,
    RunConfig,
    SweepSpec,
    WavepacketSpec,
    load_config,
    run_convergence,
    run_single,
    run_sweep,
    run_wavepacket,
)
