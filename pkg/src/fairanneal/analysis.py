"""Final-state observables: ground-state probabilities, fairness, and sweeps.

For zero-field problems the ground set splits into global-flip pairs
("sectors"), and the headline readout reports one probability per sector,
labeled by the member with sigma_0 = +1.  State-level metrics are always
computed as well.
"""

from __future__ import annotations

import csv
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Iterable, Sequence, TextIO

import numpy as np

from . import dynamics, ising, sbo
from .dynamics import AccuracyError, EvolutionTrace, IntegratorConfig
from .hilbert import QuantumState
from .ising import GroundSet, IsingProblem
from .sbo import Protocol

__all__ = [
    "CSV_COLUMNS",
    "BoltzmannReport",
    "FailedRun",
    "FairnessReport",
    "RunResult",
    "boltzmann_distance",
    "default_tau_grid",
    "fairness",
    "measure",
    "run_protocol",
    "sweep",
    "tau_grid",
    "write_csv",
]

CSV_COLUMNS = ("protocol", "tau", "beta", "config_label", "probability",
               "P_GS", "fairness_ratio", "tv_uniform", "tv_boltzmann",
               "kl_boltzmann", "norm_drift")

KL_FLOOR = 1e-300


def measure(state: QuantumState | np.ndarray) -> np.ndarray:
    """Born-rule readout |a_k|^2, renormalized so the entries sum to 1."""
    amps = state.amplitudes if isinstance(state, QuantumState) else np.asarray(state)
    p = np.abs(amps) ** 2
    total = p.sum()
    if total <= 0.0:
        raise ValueError("cannot measure a zero-norm state")
    return p / total


@dataclass(frozen=True)
class FairnessReport:
    """How evenly probability is spread over the ground entities.

    ratio = min/max is 1 for perfect fairness (and by convention when
    max = 0); tv_uniform is the total-variation distance between the
    ground-restricted, renormalized distribution and uniform.
    """

    level: str  # "state" or "sector"
    min_prob: float
    max_prob: float
    spread: float
    ratio: float
    tv_uniform: float


@dataclass(frozen=True)
class BoltzmannReport:
    """Distance between the measured distribution and a Boltzmann target."""

    beta: float
    tv: float
    kl: float


@dataclass(frozen=True)
class RunResult:
    """Measured outcome of one protocol run plus derived metrics."""

    protocol: Protocol
    probabilities: np.ndarray
    ground: GroundSet
    ground_probs: dict[int, float]
    sector_probs: dict[int, float] | None
    p_ground: float
    fairness_states: FairnessReport
    fairness_sectors: FairnessReport | None
    boltzmann: BoltzmannReport | None
    norm_drift: float
    refinements: int
    steps: int

    @property
    def tau(self) -> float:
        return self.protocol.tau

    def headline_fairness(self) -> FairnessReport:
        return self.fairness_sectors if self.fairness_sectors is not None \
            else self.fairness_states


@dataclass(frozen=True)
class FailedRun:
    """Sweep entry for a run that raised instead of converging."""

    protocol: Protocol
    error: str

    @property
    def tau(self) -> float:
        return self.protocol.tau


def _restricted_fairness(values: np.ndarray, level: str) -> FairnessReport:
    lo = float(values.min())
    hi = float(values.max())
    total = float(values.sum())
    ratio = 1.0 if hi == 0.0 else lo / hi
    if total > 0.0:
        tv = 0.5 * float(np.abs(values / total - 1.0 / values.size).sum())
    else:
        tv = 0.0
    return FairnessReport(level=level, min_prob=lo, max_prob=hi,
                          spread=hi - lo, ratio=ratio, tv_uniform=tv)


def fairness(result: RunResult | np.ndarray, ground: GroundSet,
             n: int | None = None, by_sector: bool = False) -> FairnessReport:
    """Fairness metrics over ground states, or over flip-pair sectors."""
    if len(ground) == 0:
        raise ValueError("ground set is empty")
    probs = result.probabilities if isinstance(result, RunResult) \
        else np.asarray(result, dtype=np.float64)
    if n is None:
        n = int(np.log2(probs.size))
    if by_sector:
        sectors = ground.sectors(n)
        values = np.array([sum(probs[c] for c in sec) for sec in sectors])
        return _restricted_fairness(values, "sector")
    values = np.array([probs[c] for c in ground.configs])
    return _restricted_fairness(values, "state")


def boltzmann_distance(result: RunResult | np.ndarray, problem: IsingProblem,
                       beta: float) -> BoltzmannReport:
    """TV and Kullback-Leibler divergence to boltzmann_distribution(beta)."""
    probs = result.probabilities if isinstance(result, RunResult) \
        else np.asarray(result, dtype=np.float64)
    target = ising.boltzmann_distribution(problem, beta)
    tv = 0.5 * float(np.abs(probs - target).sum())
    mask = probs > 0.0
    kl = float(np.sum(probs[mask] *
                      (np.log(probs[mask]) - np.log(np.maximum(target[mask], KL_FLOOR)))))
    return BoltzmannReport(beta=beta, tv=tv, kl=max(kl, 0.0))


def run_protocol(protocol: Protocol, problem: IsingProblem,
                 config: IntegratorConfig = IntegratorConfig()) -> RunResult:
    """Evolve one protocol and derive the full metric set."""
    trace = dynamics.evolve(protocol, problem, config)
    return result_from_trace(trace, problem)


def result_from_trace(trace: EvolutionTrace, problem: IsingProblem) -> RunResult:
    probs = measure(trace.final_state)
    ground = ising.enumerate_ground_states(problem)
    ground_probs = {c: float(probs[c]) for c in ground.configs}
    sector_probs = None
    fairness_sectors = None
    if problem.zero_field:
        sectors = ground.sectors(problem.n)
        sector_probs = {sec[0]: float(sum(probs[c] for c in sec)) for sec in sectors}
        fairness_sectors = fairness(probs, ground, problem.n, by_sector=True)
    boltzmann = None
    if trace.protocol.kind == sbo.SBOQA:
        boltzmann = boltzmann_distance(probs, problem, trace.protocol.beta_target)
    return RunResult(
        protocol=trace.protocol,
        probabilities=probs,
        ground=ground,
        ground_probs=ground_probs,
        sector_probs=sector_probs,
        p_ground=float(sum(ground_probs.values())),
        fairness_states=fairness(probs, ground, problem.n, by_sector=False),
        fairness_sectors=fairness_sectors,
        boltzmann=boltzmann,
        norm_drift=trace.norm_drift,
        refinements=trace.refinements,
        steps=trace.steps,
    )


def tau_grid(start: float, stop: float, per_decade: int = 16) -> np.ndarray:
    """Logarithmic annealing-time grid with per_decade points per decade."""
    if not 0 < start < stop:
        raise ValueError(f"need 0 < start < stop, got {start}, {stop}")
    if per_decade < 1:
        raise ValueError("per_decade must be >= 1")
    npts = int(round(math.log10(stop / start) * per_decade)) + 1
    return np.geomspace(start, stop, max(npts, 2))


def default_tau_grid() -> np.ndarray:
    """16 points per decade over 10^0 .. 10^3."""
    return tau_grid(1.0, 1000.0, 16)


def sweep(protocol: Protocol, problem: IsingProblem, taus: Sequence[float],
          config: IntegratorConfig = IntegratorConfig(),
          jobs: int = 1) -> list[RunResult | FailedRun]:
    """One run per tau, ascending; failures are recorded and the sweep continues.

    Runs are independent, so jobs > 1 dispatches them to a thread pool; the
    returned list is always in grid order and identical to a serial sweep.
    """
    taus = [float(t) for t in taus]
    if not taus:
        raise ValueError("tau grid is empty")
    if any(b <= a for a, b in zip(taus, taus[1:])):
        raise ValueError("tau grid must be strictly ascending")

    def one(tau: float) -> RunResult | FailedRun:
        proto = protocol.with_tau(tau)
        try:
            return run_protocol(proto, problem, config)
        except AccuracyError as exc:
            return FailedRun(protocol=proto, error=str(exc))

    if jobs <= 1:
        return [one(t) for t in taus]
    with ThreadPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(one, taus))


def _fmt(value) -> str:
    if value is None:
        return ""
    if isinstance(value, float):
        return repr(value)
    return str(value)


def _row_labels(result: RunResult) -> list[tuple[str, float]]:
    if result.sector_probs is not None:
        n = int(np.log2(result.probabilities.size))
        return [(ising.config_label(rep, n), p)
                for rep, p in sorted(result.sector_probs.items())]
    n = int(np.log2(result.probabilities.size))
    return [(ising.config_label(c, n), p)
            for c, p in sorted(result.ground_probs.items())]


def write_csv(results: Iterable[RunResult | FailedRun], out: TextIO) -> None:
    """Emit the sweep table; identical inputs produce identical bytes."""
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(CSV_COLUMNS)
    for res in results:
        beta = res.protocol.beta_target if res.protocol.kind == sbo.SBOQA else None
        if isinstance(res, FailedRun):
            writer.writerow([res.protocol.kind, _fmt(res.tau), _fmt(beta),
                             "__error__:" + res.error, "", "", "", "", "", "", ""])
            continue
        total = float(res.probabilities.sum())
        if abs(total - 1.0) > max(2 * res.norm_drift, 1e-12):
            raise ValueError(
                f"probability sum check failed at tau={res.tau}: {total!r}")
        fair = res.headline_fairness()
        tv_b = res.boltzmann.tv if res.boltzmann else None
        kl_b = res.boltzmann.kl if res.boltzmann else None
        for label, prob in _row_labels(res):
            writer.writerow([
                res.protocol.kind, _fmt(res.tau), _fmt(beta), label,
                _fmt(prob), _fmt(res.p_ground), _fmt(fair.ratio),
                _fmt(fair.tv_uniform), _fmt(tv_b), _fmt(kl_b),
                _fmt(res.norm_drift),
            ])
