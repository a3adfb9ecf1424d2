"""Quantum Otto cycles on spin chains, with an optional free-evolution stroke.

Engines share one result type (``CycleResult``):

* ``run_cycle``: density matrices in the spin basis, block-diagonalised by
  lattice momentum (TIM and LTIM, L <= 12 by default);
* ``run_cycle_statevector``: pure-state variant for ``T_C = 0``;
* ``run_cycle_kspace``: free-fermion modes for large even L (TIM only);
* ``run_cycle_analytic_two_spin``: closed forms for the adiabatic L = 2 TIM.
"""

__version__ = "0.1.0"

from .analytics import (  # noqa: E402
    TauKOptimum, TwoSpinAdiabaticCoefficients, ground_state_probability_ltim, ground_state_probability_tim,
    run_cycle_analytic_two_spin, tau_k_optimizer, two_spin_coefficients, two_spin_energy_A,
    two_spin_energy_A_adiabatic, two_spin_energy_Aprime, two_spin_stationary_points, return_probability,
)
from .cycle import (  # noqa: E402
    CycleParams, CycleResult, adiabatic_transport, convergence_check, evolve_ramp, free_evolve, run_cycle,
    run_cycle_statevector,
)
from .engines import ENGINES, prepare, run  # noqa: E402
from .kspace import ModeEnsemble, build_mode_hamiltonian, mode_momenta, run_cycle_kspace  # noqa: E402
from .linalg import (  # noqa: E402
    DomainError, Spectrum, ValidationError, check_density, eigh, expectation, gibbs_state, propagator,
)
from .models import LinearRamp, Model, ModelSpec, SplitHamiltonian, build_split, field_at  # noqa: E402
