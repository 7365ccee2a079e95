"""Qubit-erasure simulator against a quantized thermal reservoir.

Subpackages: linear algebra primitives (linalg), the trapped-ion physical
model (ion), information-thermodynamic functionals and the erasure-equality
ledger (info), the sideband readout chain (readout), experiment
orchestration (protocol), and the command line (cli).
"""

from .linalg import DensityMatrix, Spectrum, kron, partial_trace, hermitian_eig, \
    expm_i_hermitian, entropy_log
from .ion import (
    ETA_DEFAULT,
    OMEGA_DEFAULT,
    OMEGA_Z_DEFAULT,
    T_OP_DEFAULT,
    FockTruncation,
    JointState,
    PulseParams,
    SystemPrep,
    blue_sideband_hamiltonian,
    carrier_rotation,
    dephase_qubit,
    evolve,
    jc_block_unitary,
    prepare_initial,
    red_sideband_hamiltonian,
    thermal_state,
)
from .info import (
    LandauerLedger,
    SupportViolationError,
    UnitSystem,
    ZeroTemperatureError,
    landauer_ledger,
    mutual_information,
    relative_entropy,
    reservoir_energy,
    temperature_from_nbar,
    von_neumann_entropy,
)
from .readout import (
    PhononFit,
    RabiTrace,
    default_n_fit,
    detection_flip,
    exact_trace,
    fit_phonon_populations,
    model_trace,
    read_trace,
    sample_shots,
    write_trace,
)
from .protocol import (
    ExperimentConfig,
    Imperfections,
    REALISTIC_IMPERFECTIONS,
    SweepRow,
    find_entropy_zero_crossings,
    run_erasure,
    simulated_readout_run,
    sweep_temperature,
    sweep_theta,
)

__version__ = "0.1.0"
