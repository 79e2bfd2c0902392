"""Rotation sensing with an SU(2) interferometer in a spinning resonator.

Builds the effective and microscopic Hamiltonians, propagates probe states
exactly, computes the quantum Fisher information four independent ways and
reproduces the reference sweeps, distributions and dynamics traces at desk
scale.
"""

__version__ = "0.1.0"

from .spin import (
    build_spin_operators,
    coherent_spin_state,
    dicke_dim,
    initial_probe_state,
)
from .models import (
    EffectiveModelParams,
    MicroscopicParams,
    SagnacParams,
    effective_coupling,
    effective_hamiltonian,
    microscopic_hamiltonian,
    sagnac_shift,
    schwinger_equivalence_check,
)
from .evolution import DynamicsTrace, Eigensystem, dynamics_trace, evolve, mz_output_state
from .metrology import (
    GeneratorCoefficients,
    QfiResult,
    closed_form_qfi_linear,
    cubic_term_moment,
    decompose_generator,
    generator_from_coeffs,
    generator_numeric,
    linear_coeffs,
    mz_qfi,
    nonlinear_coeffs,
    phase_amplitude_qfi,
    qfi_from_generator,
    qfi_state_fd,
)
from .states import DickeDistribution, QGrid, dicke_distribution, husimi_q, spread_metrics
from .experiments import RunReport, SweepResult, run_scenario, scaling_fit
from .config import ExperimentConfig, load_scenario_config
