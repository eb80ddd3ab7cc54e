"""Measurement-powered Maxwell's demon engine on a driven qubit.

Energies are expressed in units of hbar * omega0 throughout.
"""

__version__ = "0.1.0"

from .qubit import (  # noqa: E402
    X_AXIS,
    Y_AXIS,
    Z_AXIS,
    BlochAxis,
    Outcome,
    QubitState,
    basis_states,
    dephase,
    internal_energy,
    measure,
    rabi_evolve,
    shannon_entropy_bits,
)
from .engine import (  # noqa: E402
    CycleLedger,
    EngineParams,
    SingularInputError,
    audit_effective_readout,
    classical_yield,
    feedback_work,
    instantaneous_power,
    mean_power,
    mpe_yield,
    run_cycle,
    thermal_cycle_reference,
    work_extracted,
)
from ._accel import backend  # noqa: E402
