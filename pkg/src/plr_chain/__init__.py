"""Free-fermion simulation of the isotropic XY chain in a decaying random field."""

from .disorder import (
    DisorderConfig,
    OneBodyOperator,
    UniformSymmetric,
    build_one_body,
    free_chain,
    realization_seed,
    sample_potential,
)
from .ensemble import (
    DecayFit,
    EnsembleStats,
    beta_vs_lambda,
    correlator_decay,
    fit_decay,
    kappa_consistency,
    run_ensemble,
)
from .errors import (
    ArgumentError,
    BoundaryError,
    ConfigurationError,
    ConvergenceError,
    EnsembleError,
    PLRChainError,
    ResourceError,
)
from .quasifree import (
    ProductState,
    TimeSeries,
    commutator_lower_witness,
    commutator_upper,
    estimate_beta,
    number_expectation,
    plr_witness,
    position_moment,
    time_averaged_moment,
)
from .spectral import (
    SpectralDecomposition,
    diagonalize,
    eigenfunction_correlator,
    propagator,
    propagator_row,
)

__version__ = "0.1.0"
