"""Spectral laboratory for quantum annealing of weighted independent-set
problems on complete multipartite graphs, with XX-catalyst studies.

The package builds problem instances, diagonalizes the annealing Hamiltonian
exactly (full register or permutation-symmetric sector), tracks gap minima
and ground-vector sign changes along the schedule, searches catalyst
strengths for gap-maximizing and gap-closing couplings, and integrates the
time-dependent dynamics of fast anneals.
"""

__version__ = "0.1.0"

from .dynamics import DynamicsError, DynamicsTrace, evolve
from .mwis import (
    BasisState,
    E_SCALE_DEFAULT,
    ENUMERATION_CAP,
    InstanceError,
    IsingEncoding,
    MwisInstance,
    build_instance,
    encode,
    energy_of_mask,
    enumerate_problem_states,
    is_independent,
    neighbourhood,
    problem_energies,
)
from .operators import (
    FULL_SPACE_CAP,
    CatalystSpec,
    FullSystem,
    OperatorError,
    catalyst_matrix,
    catalyst_pair,
    driver_matrix,
    problem_matrix,
    total_hamiltonian,
)
from .perturbation import (
    ExtSetDecomposition,
    PerturbationError,
    PerturbedEnergies,
    driver_pt_energies,
    ext_set_overlaps,
    first_order_catalyst_shift,
)
from .sector import SectorBasis, SectorError, SectorSystem, collective_z, sector_basis
from .spectrum import (
    GapFeature,
    ScanError,
    SpectrumScan,
    eigensolve,
    find_gap_minima,
    gap01,
    locate_sign_change,
    min_gap_over,
    reference_crossing_location,
    scan_spectrum,
    write_spectrum_csv,
)
from .sweeps import (
    ClosingSearch,
    IntermediateRecord,
    JxxOptimum,
    ScalingRecord,
    SweepError,
    SweepRecord,
    calibrate_jzz,
    catalyst_sweep,
    find_closing_jxx,
    intermediate_regime_study,
    make_system,
    optimize_jxx,
    scaling_study,
)
from .config import ConfigError, RunConfig, list_presets, preset_config, validate_config

__all__ = [
    "__version__",
    "E_SCALE_DEFAULT",
    "ENUMERATION_CAP",
    "FULL_SPACE_CAP",
    "BasisState",
    "CatalystSpec",
    "ClosingSearch",
    "ConfigError",
    "DynamicsError",
    "DynamicsTrace",
    "ExtSetDecomposition",
    "FullSystem",
    "GapFeature",
    "InstanceError",
    "IntermediateRecord",
    "IsingEncoding",
    "JxxOptimum",
    "MwisInstance",
    "OperatorError",
    "PerturbationError",
    "PerturbedEnergies",
    "RunConfig",
    "ScalingRecord",
    "ScanError",
    "SectorBasis",
    "SectorError",
    "SectorSystem",
    "SpectrumScan",
    "SweepError",
    "SweepRecord",
    "build_instance",
    "calibrate_jzz",
    "catalyst_matrix",
    "catalyst_pair",
    "catalyst_sweep",
    "collective_z",
    "driver_matrix",
    "driver_pt_energies",
    "eigensolve",
    "encode",
    "energy_of_mask",
    "enumerate_problem_states",
    "evolve",
    "ext_set_overlaps",
    "find_closing_jxx",
    "find_gap_minima",
    "first_order_catalyst_shift",
    "gap01",
    "intermediate_regime_study",
    "is_independent",
    "list_presets",
    "locate_sign_change",
    "make_system",
    "min_gap_over",
    "neighbourhood",
    "optimize_jxx",
    "preset_config",
    "problem_energies",
    "problem_matrix",
    "reference_crossing_location",
    "scaling_study",
    "scan_spectrum",
    "sector_basis",
    "total_hamiltonian",
    "validate_config",
    "write_spectrum_csv",
]
