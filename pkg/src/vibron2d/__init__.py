"""Exact spectra, mean-field separatrices and ESQPT probes for the anharmonic 2D vibron model."""

from .algebra import (
    XI_CRITICAL,
    BasisBlock,
    ModelParams,
    So3Labels,
    TridiagonalBlock,
    assemble_hamiltonian,
    assemble_interaction,
    assemble_lambda_hamiltonian,
    block_basis,
    number_block,
    pairing_block,
    so3_labels,
    u2_label,
)
from .diagnostics import (
    CriticalStateReport,
    DegeneracyPair,
    DiagnosticSeries,
    critical_state,
    degeneracy_map,
    density_of_states,
    dos_peaks,
    effective_frequency,
    expectation_n,
    participation_ratio,
    qfs,
    quasilinearity,
)
from .errors import (
    ConvergenceError,
    DegeneracyError,
    DomainError,
    NumericalCheckError,
    VibronError,
)
from .meanfield import (
    MeanFieldReport,
    RegimeWarning,
    alpha_threshold,
    energy_functional,
    mean_field_report,
    r_min,
    separatrix_crossing,
    separatrix_f1,
    separatrix_f2,
)
from .spectral import (
    GroundReferenceWarning,
    SpectrumBlock,
    eigensystem,
    eigenvalues,
    full_spectrum,
    ground_state,
    normalized_excitation,
    solve_block,
    tql_implicit,
)

__version__ = "0.1.0"
