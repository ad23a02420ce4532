"""Annealing protocol Hamiltonians: conventional QA, quasistatic SBO, and SBO+QA.

The SBO Hamiltonian is

    H_S(beta) = -chi sum_i sigma_x(i) + D,   chi = exp(-beta p),
    D[sigma]  = sum_i exp(beta (H_i(sigma) - p)),

with H_i the local part of the cost function at site i and p an upper bound
on |H_i|.  Every exponential is evaluated in the shifted form
exp(beta (H_i - p)), never as exp(beta H_i) scaled afterwards, so the
diagonal stays bounded by n for arbitrarily large beta.  H_S is positive
semidefinite and annihilates the Gibbs-encoding state of the same beta,
which is its unique ground state.

The SBO temperature schedule is beta(t) = -c ln(1 - t/tau) with c = 10 by
default; the divergence at t = tau is clamped at t = tau (1 - eps), where
chi has already driven the off-diagonal part to zero and the dynamics is
frozen, so the clamp does not affect observable probabilities.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from . import hilbert, ising
from .hilbert import DenseOperator
from .ising import IsingProblem

__all__ = [
    "DEFAULT_EPS",
    "DEFAULT_SCHEDULE_C",
    "Protocol",
    "ProtocolKind",
    "SboParams",
    "build_hs",
    "build_qa",
    "build_sboqa",
    "compute_p",
    "hamiltonian_at",
    "sbo_beta_schedule",
    "sbo_diagonal",
]

DEFAULT_SCHEDULE_C = 10.0
DEFAULT_EPS = 1e-6

QA = "qa"
SBO = "sbo"
SBOQA = "sboqa"
ProtocolKind = str
_KINDS = (QA, SBO, SBOQA)


@dataclass(frozen=True)
class Protocol:
    """Which annealing path to follow, and for how long.

    kind is one of "qa", "sbo", "sboqa".  beta_target is required for
    sboqa (the fixed inverse temperature of the final Hamiltonian); c and
    eps parameterize the sbo temperature schedule.
    """

    kind: ProtocolKind
    tau: float
    beta_target: float | None = None
    c: float = DEFAULT_SCHEDULE_C
    eps: float = DEFAULT_EPS

    def __post_init__(self):
        if self.kind not in _KINDS:
            raise ValueError(f"unknown protocol kind {self.kind!r}, expected {_KINDS}")
        if not (np.isfinite(self.tau) and self.tau > 0):
            raise ValueError(f"tau must be positive and finite, got {self.tau}")
        if self.kind == SBOQA:
            if self.beta_target is None or not self.beta_target > 0:
                raise ValueError("sboqa requires beta_target > 0")
        if self.c <= 0 or not 0 < self.eps < 1:
            raise ValueError(f"need c > 0 and 0 < eps < 1, got c={self.c} eps={self.eps}")

    def with_tau(self, tau: float) -> "Protocol":
        return replace(self, tau=tau)

    def label(self) -> str:
        if self.kind == SBOQA:
            return f"sboqa(beta={self.beta_target:g})"
        return self.kind


@dataclass(frozen=True)
class SboParams:
    """Regularization scale p and inverse temperature for H_S.

    p must dominate max_i max_sigma |H_i(sigma)| so that every shifted
    exponent beta (H_i - p) is nonpositive.
    """

    p: float
    beta: float

    def __post_init__(self):
        if not (np.isfinite(self.p) and self.p > 0):
            raise ValueError(f"p must be positive and finite, got {self.p}")
        if not (np.isfinite(self.beta) and self.beta >= 0):
            raise ValueError(f"beta must be finite and >= 0, got {self.beta}")

    @classmethod
    def for_problem(cls, problem: IsingProblem, beta: float) -> "SboParams":
        return cls(p=compute_p(problem), beta=beta)


def compute_p(problem: IsingProblem) -> float:
    """Exact bound max_i (sum_j |J_ij| + |h_i|) on |H_i| over sites and configs."""
    bound = np.abs(problem.field_vector())
    for i, j, J in problem.couplings:
        bound[i] += abs(J)
        bound[j] += abs(J)
    return float(bound.max())


def _check_p(problem: IsingProblem, p: float) -> float:
    exact = compute_p(problem)
    if p < exact - 1e-12:
        raise ValueError(
            f"p={p} is below max_i max_sigma |H_i| = {exact}; "
            "shifted exponents would be positive")
    return p


def sbo_diagonal(problem: IsingProblem, beta: float, p: float | None = None) -> np.ndarray:
    """D[sigma] = sum_i exp(beta (H_i(sigma) - p)); bounded by n by construction."""
    p = compute_p(problem) if p is None else _check_p(problem, p)
    hi = ising.local_energy_table(problem)
    return np.exp(beta * (hi - p)).sum(axis=0)


def build_hs(problem: IsingProblem, beta: float,
             params: SboParams | None = None) -> DenseOperator:
    """Assemble H_S(beta) = -chi sum_i sigma_x(i) + D as a dense matrix."""
    if params is None:
        params = SboParams.for_problem(problem, beta)
    elif params.beta != beta:
        raise ValueError(f"params.beta={params.beta} disagrees with beta={beta}")
    if not (np.isfinite(beta) and beta >= 0):
        raise ValueError(f"beta must be finite and >= 0, got {beta}")
    _check_p(problem, params.p)
    chi = math.exp(-beta * params.p)
    diag = sbo_diagonal(problem, beta, params.p)
    m = (-chi) * hilbert.transverse_field_sum(problem.n).matrix.copy()
    np.fill_diagonal(m, m.diagonal() + diag)
    return DenseOperator(m, hermitian=True)


def build_qa(problem: IsingProblem, s: float) -> DenseOperator:
    """Conventional QA interpolation s H_0 - (1 - s) sum_i sigma_x(i)."""
    if not 0.0 <= s <= 1.0:
        raise ValueError(f"normalized time s must lie in [0, 1], got {s}")
    m = (-(1.0 - s)) * hilbert.transverse_field_sum(problem.n).matrix.copy()
    np.fill_diagonal(m, m.diagonal() + s * ising.all_energies(problem))
    return DenseOperator(m, hermitian=True)


def build_sboqa(problem: IsingProblem, s: float, beta_target: float,
                params: SboParams | None = None) -> DenseOperator:
    """Interpolation s H_S(beta_target) - (1 - s) sum_i sigma_x(i).

    At s = 1 this equals build_hs(problem, beta_target) exactly.
    """
    if not 0.0 <= s <= 1.0:
        raise ValueError(f"normalized time s must lie in [0, 1], got {s}")
    hs = build_hs(problem, beta_target, params)
    m = s * hs.matrix - (1.0 - s) * hilbert.transverse_field_sum(problem.n).matrix
    return DenseOperator(m, hermitian=True)


def sbo_beta_schedule(t: float, tau: float, c: float = DEFAULT_SCHEDULE_C,
                      eps: float = DEFAULT_EPS) -> float:
    """beta(t) = -c ln(1 - t/tau), with the argument clamped at tau (1 - eps).

    Monotone nondecreasing and finite for all 0 <= t <= tau; the clamp value
    is -c ln(eps).
    """
    if not 0.0 <= t <= tau:
        raise ValueError(f"t={t} outside [0, {tau}]")
    frac = min(t, tau * (1.0 - eps)) / tau
    return -c * math.log1p(-frac)


def hamiltonian_at(protocol: Protocol, problem: IsingProblem, t: float) -> DenseOperator:
    """The instantaneous protocol Hamiltonian H(t) as a dense matrix."""
    if not 0.0 <= t <= protocol.tau:
        raise ValueError(f"t={t} outside [0, {protocol.tau}]")
    s = t / protocol.tau
    if protocol.kind == QA:
        return build_qa(problem, s)
    if protocol.kind == SBO:
        beta = sbo_beta_schedule(t, protocol.tau, protocol.c, protocol.eps)
        return build_hs(problem, beta)
    return build_sboqa(problem, s, protocol.beta_target)
