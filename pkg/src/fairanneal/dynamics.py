"""Time-dependent Schrodinger integration and dense spectral diagnostics.

The integrator is fixed-step classical RK4 on dpsi/dt = -i H(t) psi with
hbar = 1, starting from the uniform superposition.  RK4 is not unitary, so
the final norm drift doubles as an accuracy monitor: a run is accepted only
once halving the step changes no basis probability by more than refine_tol
and the drift stays within norm_tol.  The accepted state is returned without
renormalization.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import _kernels, ising, sbo
from .hilbert import MAX_DENSE_SPINS, DenseOperator, QuantumState
from .ising import IsingProblem
from .sbo import Protocol

__all__ = [
    "AccuracyError",
    "EvolutionTrace",
    "IntegratorConfig",
    "SpectrumSlice",
    "eigensolve_lowest",
    "evolve",
    "gap_profile",
    "integrate_fixed",
    "min_gap",
]

_MODE_OF_KIND = {sbo.QA: _kernels.MODE_QA, sbo.SBO: _kernels.MODE_SBO,
                 sbo.SBOQA: _kernels.MODE_SBOQA}

EIGEN_RESIDUAL_TOL = 1e-8


class AccuracyError(RuntimeError):
    """Step refinement exhausted without meeting the accuracy targets."""

    def __init__(self, message: str, norm_drift: float, prob_change: float):
        super().__init__(message)
        self.norm_drift = norm_drift
        self.prob_change = prob_change


@dataclass(frozen=True)
class IntegratorConfig:
    """Step control for evolve.

    The initial step count of a run is max(steps, ceil(tau * steps_per_time));
    each refinement halves the step, up to max_refinements times.
    snapshots > 0 records that many probability snapshots at evenly spaced
    times during the accepted run.
    """

    steps: int = 400
    steps_per_time: float = 25.0
    norm_tol: float = 1e-8
    refine_tol: float = 1e-6
    max_refinements: int = 6
    snapshots: int = 0

    def __post_init__(self):
        if self.steps < 100:
            raise ValueError(f"steps must be >= 100, got {self.steps}")
        if min(self.norm_tol, self.refine_tol, self.steps_per_time) <= 0:
            raise ValueError("tolerances and steps_per_time must be positive")
        if self.max_refinements < 1 or self.snapshots < 0:
            raise ValueError("max_refinements >= 1 and snapshots >= 0 required")

    def initial_steps(self, tau: float) -> int:
        return max(self.steps, int(math.ceil(tau * self.steps_per_time)))


@dataclass(frozen=True)
class EvolutionTrace:
    """Outcome of one accepted evolution."""

    protocol: Protocol
    final_state: QuantumState
    norm_drift: float
    norm_drifts: tuple[float, ...]  # one per refinement rung, in order
    refinements: int
    steps: int
    times: np.ndarray | None = None  # snapshot times, ordered
    snapshots: np.ndarray | None = None  # (len(times), 2^n) probabilities


@dataclass(frozen=True)
class SpectrumSlice:
    """Lowest eigenvalues (ascending) and the ground eigenvector at one time."""

    t: float
    eigenvalues: np.ndarray
    ground_state: np.ndarray


def _kernel_args(protocol: Protocol, problem: IsingProblem):
    """Precompute the static tables the kernel needs for this protocol."""
    e0 = ising.all_energies(problem)
    hi = ising.local_energy_table(problem)
    p = sbo.compute_p(problem)
    if protocol.kind == sbo.SBOQA:
        beta_t = protocol.beta_target
        diag_t = sbo.sbo_diagonal(problem, beta_t, p)
        chi_t = math.exp(-beta_t * p)
    else:
        beta_t, diag_t, chi_t = 0.0, np.zeros(problem.dim), 0.0
    mode = _MODE_OF_KIND[protocol.kind]
    return mode, e0, hi, p, protocol.c, protocol.eps, beta_t, diag_t, chi_t


def _run_once(mode, protocol, steps, e0, hi, p, c, eps, beta_t, diag_t, chi_t,
              sample_steps):
    samples = np.empty((sample_steps.shape[0], hi.shape[1]), dtype=np.float64)
    psi = _kernels.rk4_evolve(mode, protocol.tau, steps, e0, hi, p, c, eps,
                              beta_t, diag_t, chi_t, sample_steps, samples)
    drift = abs(float(np.linalg.norm(psi)) - 1.0)
    return psi, drift, samples


def evolve(protocol: Protocol, problem: IsingProblem,
           config: IntegratorConfig = IntegratorConfig()) -> EvolutionTrace:
    """Integrate the protocol from t = 0 to t = tau with step-halving control.

    Raises AccuracyError when max_refinements halvings do not reach both the
    norm-drift and probability-stability targets.
    """
    if problem.n > MAX_DENSE_SPINS:
        raise ValueError(f"evolution supports up to {MAX_DENSE_SPINS} spins")
    mode, e0, hi, p, c, eps, beta_t, diag_t, chi_t = _kernel_args(protocol, problem)
    no_samples = np.empty(0, dtype=np.int64)

    steps = config.initial_steps(protocol.tau)
    drifts: list[float] = []
    prev_probs = None
    psi = None
    prob_change = math.inf
    for rung in range(config.max_refinements + 1):
        psi, drift, _ = _run_once(mode, protocol, steps, e0, hi, p, c, eps,
                                  beta_t, diag_t, chi_t, no_samples)
        drifts.append(drift)
        probs = np.abs(psi) ** 2
        if prev_probs is not None:
            prob_change = float(np.abs(probs - prev_probs).max())
            if drift <= config.norm_tol and prob_change <= config.refine_tol:
                return _accepted(protocol, config, mode, steps, rung, drifts,
                                 psi, drift, e0, hi, p, c, eps, beta_t, diag_t,
                                 chi_t)
        prev_probs = probs
        steps *= 2
    raise AccuracyError(
        f"no convergence after {config.max_refinements} refinements "
        f"(norm drift {drifts[-1]:.3e}, probability change {prob_change:.3e})",
        norm_drift=drifts[-1], prob_change=prob_change)


def _accepted(protocol, config, mode, steps, rung, drifts, psi, drift,
              e0, hi, p, c, eps, beta_t, diag_t, chi_t) -> EvolutionTrace:
    times = snapshots = None
    if config.snapshots > 0:
        # rerun the accepted rung with snapshot capture
        sample_steps = np.unique(
            np.round(np.linspace(0, steps, config.snapshots)).astype(np.int64))
        psi, drift, snapshots = _run_once(mode, protocol, steps, e0, hi, p, c,
                                          eps, beta_t, diag_t, chi_t, sample_steps)
        times = sample_steps * (protocol.tau / steps)
    state = QuantumState(psi, n=hi.shape[0],
                         norm_tol=max(config.norm_tol, drift * (1 + 1e-12)))
    return EvolutionTrace(protocol=protocol, final_state=state, norm_drift=drift,
                          norm_drifts=tuple(drifts), refinements=rung,
                          steps=steps, times=times, snapshots=snapshots)


def integrate_fixed(protocol: Protocol, problem: IsingProblem,
                    steps: int) -> np.ndarray:
    """One raw fixed-step RK4 run (no refinement, no renormalization).

    Returns the final amplitude vector; convergence studies compare these
    across step counts.
    """
    if steps < 1:
        raise ValueError("steps must be positive")
    mode, e0, hi, p, c, eps, beta_t, diag_t, chi_t = _kernel_args(protocol, problem)
    psi, _, _ = _run_once(mode, protocol, steps, e0, hi, p, c, eps,
                          beta_t, diag_t, chi_t, np.empty(0, dtype=np.int64))
    return psi


def apply_protocol_hamiltonian(protocol: Protocol, problem: IsingProblem,
                               t: float, psi: np.ndarray) -> np.ndarray:
    """H(t) psi through the integrator's matrix-free path (for cross-checks)."""
    mode, e0, hi, p, c, eps, beta_t, diag_t, chi_t = _kernel_args(protocol, problem)
    return _kernels.apply_hamiltonian(mode, t, protocol.tau, e0, hi, p, c, eps,
                                      beta_t, diag_t, chi_t,
                                      np.asarray(psi, dtype=np.complex128))


def evolve_static_diagonal(diag: np.ndarray, n: int, tau: float,
                           steps: int) -> np.ndarray:
    """RK4 under a frozen diagonal Hamiltonian (diagnostic path, no refinement)."""
    diag = np.asarray(diag, dtype=np.float64)
    hi = np.zeros((n, 1 << n))
    no_samples = np.empty(0, dtype=np.int64)
    samples = np.empty((0, 1 << n), dtype=np.float64)
    return _kernels.rk4_evolve(_kernels.MODE_STATIC_DIAG, tau, steps, diag, hi,
                               1.0, 1.0, 1e-6, 0.0, np.zeros(1 << n), 0.0,
                               no_samples, samples)


def eigensolve_lowest(H: DenseOperator, k: int, t: float = 0.0) -> SpectrumSlice:
    """Lowest k eigenpairs of a real symmetric operator, residual-checked.

    The ground eigenvector's sign is fixed so its largest-magnitude entry is
    positive, keeping outputs deterministic.
    """
    m = H.real_symmetric_part()
    dev = np.abs(m - m.T).max()
    if dev > 1e-12:
        raise ValueError(f"matrix is not symmetric (max |M - M^T| = {dev:.3e})")
    if not 1 <= k <= m.shape[0]:
        raise ValueError(f"k={k} outside 1..{m.shape[0]}")
    eigvals, eigvecs = np.linalg.eigh(m)
    scale = max(1.0, float(np.abs(eigvals).max()))
    for idx in range(k):
        residual = np.abs(m @ eigvecs[:, idx] - eigvals[idx] * eigvecs[:, idx]).max()
        if residual > EIGEN_RESIDUAL_TOL * scale:
            raise ValueError(
                f"eigenpair {idx} residual {residual:.3e} exceeds tolerance")
    ground = eigvecs[:, 0].copy()
    pivot = int(np.abs(ground).argmax())
    if ground[pivot] < 0:
        ground = -ground
    return SpectrumSlice(t=float(t), eigenvalues=eigvals[:k].copy(), ground_state=ground)


def gap_profile(protocol: Protocol, problem: IsingProblem, samples: int,
                k: int = 2) -> list[SpectrumSlice]:
    """Eigensolve the protocol Hamiltonian at evenly spaced times in [0, tau]."""
    if samples < 2:
        raise ValueError(f"need at least 2 samples, got {samples}")
    if k < 2:
        raise ValueError("gap profiles need at least k=2 eigenvalues")
    slices = []
    for t in np.linspace(0.0, protocol.tau, samples):
        H = sbo.hamiltonian_at(protocol, problem, float(t))
        slices.append(eigensolve_lowest(H, k, t=float(t)))
    return slices


def min_gap(slices: list[SpectrumSlice]) -> float:
    """Smallest first spectral gap over a profile."""
    return min(float(s.eigenvalues[1] - s.eigenvalues[0]) for s in slices)
