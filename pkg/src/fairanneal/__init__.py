"""Fair-sampling annealing experiments on small Ising problems.

Exact Schrodinger dynamics for three annealing protocols (conventional QA,
the quasistatic SBO method, and the SBO+QA interpolation), a brute-force
classical oracle for ground states and Boltzmann distributions, and fairness
analysis of the resulting samples.
"""

from .analysis import (BoltzmannReport, FailedRun, FairnessReport, RunResult,
                       boltzmann_distance, default_tau_grid, fairness, measure,
                       run_protocol, sweep, tau_grid, write_csv)
from .dynamics import (AccuracyError, EvolutionTrace, IntegratorConfig,
                       SpectrumSlice, eigensolve_lowest, evolve, gap_profile,
                       min_gap)
from .hilbert import (DenseOperator, DiagonalOperator, QuantumState, apply,
                      diag_from_classical, expectation, sigma_x, sigma_z,
                      transverse_field_sum, uniform_superposition)
from .ising import (GroundSet, IsingProblem, MalformedProblemError,
                    all_energies, boltzmann_distribution, config_label,
                    energy, enumerate_ground_states, five_spin_problem,
                    flip_config, gibbs_state, load_problem, local_energy,
                    save_problem, thermal_expectation)
from .sbo import (Protocol, SboParams, build_hs, build_qa, build_sboqa,
                  compute_p, hamiltonian_at, sbo_beta_schedule)

__version__ = "0.1.0"
