"""Deterministic simulator for a Kerr-nonlinear, two-mode, three-cavity ring.

Core layers:
  fock      -- occupation bases, ladder operators, partial trace/transpose
  model     -- Hamiltonians, the paired entangled target state, jump operators
  spectral  -- phase sweeps, adiabatic tracking, avoided-crossing detection
  dynamics  -- closed and Lindblad RK4 evolution, superoperator oracle, scans
  measures  -- negativities, tangles, fidelity, Schmidt number
  scenarios -- figure presets, CSV/JSON outputs
"""

from .fock import (DensityMatrix, OccupationBasis, PureState, SparseOperator,
                   annihilation_op, creation_op, enumerate_basis, hop_op,
                   number_op, partial_trace, partial_transpose)
from .model import (NetworkParams, NoiseSpec, build_h_hop, build_h_int,
                    build_hamiltonian, jump_operators, mes_state,
                    verify_mes_conditions)
from .dynamics import (RampSchedule, Trajectory, evolve_closed, evolve_exact,
                       evolve_lindblad, find_gamma_critical, ground_state,
                       scan_alpha, superoperator_oracle)
from .measures import (Partition, fidelity, geo_mean_tangle, global_negativity,
                       negativity, pairwise_negativity, pi_tangle,
                       schmidt_number)
from .spectral import SpectrumSweep, detect_alc, eigen_sweep, track_state

__version__ = "0.1.0"

__all__ = [
    "DensityMatrix", "OccupationBasis", "PureState", "SparseOperator",
    "annihilation_op", "creation_op", "enumerate_basis", "hop_op", "number_op",
    "partial_trace", "partial_transpose",
    "NetworkParams", "NoiseSpec", "build_h_hop", "build_h_int",
    "build_hamiltonian", "jump_operators", "mes_state", "verify_mes_conditions",
    "RampSchedule", "Trajectory", "evolve_closed", "evolve_exact",
    "evolve_lindblad", "find_gamma_critical", "ground_state", "scan_alpha",
    "superoperator_oracle",
    "Partition", "fidelity", "geo_mean_tangle", "global_negativity",
    "negativity", "pairwise_negativity", "pi_tangle", "schmidt_number",
    "SpectrumSweep", "detect_alc", "eigen_sweep", "track_state",
    "__version__",
]
