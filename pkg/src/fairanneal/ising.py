"""Classical Ising problems and the exhaustive-enumeration oracle.

A spin configuration is encoded as an integer bit pattern: bit k set means
sigma_k = +1, bit k clear means sigma_k = -1, and the computational-basis
index of a configuration is that integer with site 0 as the least
significant bit.  All modules share this convention.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from functools import lru_cache
from importlib import resources
from pathlib import Path
from typing import Callable

import numpy as np

__all__ = [
    "MAX_ENUM_SPINS",
    "GroundSet",
    "IsingProblem",
    "MalformedProblemError",
    "all_energies",
    "boltzmann_distribution",
    "config_label",
    "config_to_spins",
    "energy",
    "enumerate_ground_states",
    "five_spin_problem",
    "flip_config",
    "gibbs_state",
    "load_problem",
    "local_energy",
    "local_energy_table",
    "save_problem",
    "thermal_expectation",
]

# Exhaustive methods walk all 2^n configurations; above this they are refused.
MAX_ENUM_SPINS = 24


class MalformedProblemError(ValueError):
    """Raised for invalid couplings, fields, or site indices."""


@dataclass(frozen=True)
class IsingProblem:
    """Ising cost function -sum_{i<j} J_ij s_i s_j - sum_i h_i s_i.

    couplings holds (i, j, J_ij) triples with i < j and no duplicate pairs;
    fields holds h_i for every site.  Instances are immutable and safe to
    share across threads.
    """

    n: int
    couplings: tuple[tuple[int, int, float], ...]
    fields: tuple[float, ...]
    name: str = ""

    def __post_init__(self):
        if self.n <= 0:
            raise MalformedProblemError(f"spin count must be positive, got {self.n}")
        object.__setattr__(
            self, "couplings",
            tuple((int(i), int(j), float(J)) for i, j, J in self.couplings))
        object.__setattr__(self, "fields", tuple(float(h) for h in self.fields))
        if len(self.fields) != self.n:
            raise MalformedProblemError(
                f"expected {self.n} fields, got {len(self.fields)}")
        seen = set()
        for i, j, J in self.couplings:
            if not (0 <= i < j < self.n):
                raise MalformedProblemError(
                    f"coupling ({i}, {j}) needs 0 <= i < j < {self.n}")
            if (i, j) in seen:
                raise MalformedProblemError(f"duplicate coupling pair ({i}, {j})")
            if not np.isfinite(J):
                raise MalformedProblemError(f"non-finite coupling J_{i}{j} = {J}")
            seen.add((i, j))
        if not all(np.isfinite(h) for h in self.fields):
            raise MalformedProblemError("non-finite field value")

    @property
    def dim(self) -> int:
        return 1 << self.n

    @property
    def zero_field(self) -> bool:
        return all(h == 0.0 for h in self.fields)

    def field_vector(self) -> np.ndarray:
        return np.array(self.fields, dtype=np.float64)


@dataclass(frozen=True)
class GroundSet:
    """Exact minimum energy and every configuration attaining it."""

    energy: float
    configs: tuple[int, ...]  # sorted ascending

    def __post_init__(self):
        object.__setattr__(self, "configs", tuple(sorted(int(c) for c in self.configs)))

    def __contains__(self, config: int) -> bool:
        return config in set(self.configs)

    def __len__(self) -> int:
        return len(self.configs)

    def sectors(self, n: int) -> tuple[tuple[int, ...], ...]:
        """Group configs into global-flip pairs, keyed by the sigma_0 = +1 member.

        Meaningful for zero-field problems, where the ground set is closed
        under the global spin flip.  Singleton sectors appear when a config
        is not paired (possible only with fields).
        """
        remaining = set(self.configs)
        sectors = []
        for c in self.configs:
            if c not in remaining:
                continue
            partner = flip_config(c, n)
            if partner in remaining and partner != c:
                rep = c if c & 1 else partner
                sectors.append((rep, flip_config(rep, n)))
                remaining.discard(c)
                remaining.discard(partner)
            else:
                sectors.append((c,))
                remaining.discard(c)
        return tuple(sorted(sectors))


def config_to_spins(config: int, n: int) -> np.ndarray:
    """Decode a bit pattern into a +-1 spin vector of length n."""
    bits = (config >> np.arange(n)) & 1
    return np.where(bits == 1, 1.0, -1.0)


def config_label(config: int, n: int) -> str:
    """Readable spin string, site 0 leftmost: '+' is up, '-' is down."""
    return "".join("+" if (config >> k) & 1 else "-" for k in range(n))


def flip_config(config: int, n: int) -> int:
    """Global spin flip (complement all n bits)."""
    return config ^ ((1 << n) - 1)


def _spin_table(n: int, start: int = 0, stop: int | None = None) -> np.ndarray:
    """(n, block) array of sigma_k values for configurations start..stop."""
    cfgs = np.arange(start, (1 << n) if stop is None else stop, dtype=np.int64)
    return np.where((cfgs[None, :] >> np.arange(n)[:, None]) & 1, 1.0, -1.0)


# Block size for chunked exhaustive evaluation; keeps the (n, block) spin
# table small even at the n = 24 enumeration cap.
_ENERGY_BLOCK_BITS = 18


def all_energies(problem: IsingProblem) -> np.ndarray:
    """Vector of H_0(sigma) over all 2^n configurations (basis order)."""
    _check_enum_size(problem.n)
    fields = problem.field_vector()
    out = np.empty(problem.dim)
    block = 1 << min(problem.n, _ENERGY_BLOCK_BITS)
    for start in range(0, problem.dim, block):
        s = _spin_table(problem.n, start, start + block)
        e = -fields @ s
        for i, j, J in problem.couplings:
            e -= J * s[i] * s[j]
        out[start:start + block] = e
    return out


def local_energy_table(problem: IsingProblem) -> np.ndarray:
    """(n, 2^n) array of H_i(sigma): all H_0 terms containing spin i."""
    _check_enum_size(problem.n)
    s = _spin_table(problem.n)
    out = -problem.field_vector()[:, None] * s
    for i, j, J in problem.couplings:
        bond = J * s[i] * s[j]
        out[i] -= bond
        out[j] -= bond
    return out


def _check_site(problem: IsingProblem, i: int) -> None:
    if not 0 <= i < problem.n:
        raise MalformedProblemError(f"site {i} out of range for n={problem.n}")


def _check_config(problem: IsingProblem, config: int) -> None:
    if not 0 <= config < problem.dim:
        raise MalformedProblemError(
            f"configuration {config} out of range for n={problem.n}")


def energy(problem: IsingProblem, config: int) -> float:
    """H_0(sigma) for one configuration."""
    _check_config(problem, config)
    s = config_to_spins(config, problem.n)
    val = -float(np.dot(problem.field_vector(), s))
    for i, j, J in problem.couplings:
        val -= J * s[i] * s[j]
    return val


def local_energy(problem: IsingProblem, config: int, i: int) -> float:
    """H_i(sigma); flipping spin i changes H_0 by exactly -2 * H_i(sigma)."""
    _check_config(problem, config)
    _check_site(problem, i)
    s = config_to_spins(config, problem.n)
    val = -problem.fields[i] * s[i]
    for a, b, J in problem.couplings:
        if a == i or b == i:
            val -= J * s[a] * s[b]
    return float(val)


def _check_enum_size(n: int) -> None:
    if n > MAX_ENUM_SPINS:
        raise MalformedProblemError(
            f"exhaustive enumeration refused for n={n} > {MAX_ENUM_SPINS}")


def enumerate_ground_states(problem: IsingProblem) -> GroundSet:
    """Exact minimum and all minimizers over the full configuration space.

    Two energies tie when |E1 - E2| <= 1e-9 * max(1, |E_min|), which keeps
    integer-valued spectra exact while tolerating float drift.
    """
    energies = all_energies(problem)
    e_min = float(energies.min())
    tol = 1e-9 * max(1.0, abs(e_min))
    configs = np.nonzero(energies <= e_min + tol)[0]
    return GroundSet(energy=e_min, configs=tuple(int(c) for c in configs))


def _check_beta(beta: float) -> None:
    if not np.isfinite(beta) or beta < 0:
        raise ValueError(f"inverse temperature must be finite and >= 0, got {beta}")


def boltzmann_distribution(problem: IsingProblem, beta: float) -> np.ndarray:
    """exp(-beta H_0) / Z over the basis, evaluated with a max-shift.

    Subtracting the minimum energy before exponentiating keeps the weights
    in [0, 1], so any beta representable in double precision is safe.
    """
    _check_beta(beta)
    energies = all_energies(problem)
    w = np.exp(-beta * (energies - energies.min()))
    return w / w.sum()


def thermal_expectation(
    problem: IsingProblem, beta: float,
    observable: Callable[[int], float] | np.ndarray,
) -> float:
    """Thermal average sum_sigma P(sigma) A(sigma) at inverse temperature beta."""
    dist = boltzmann_distribution(problem, beta)
    if callable(observable):
        values = np.array([observable(k) for k in range(problem.dim)], dtype=np.float64)
    else:
        values = np.asarray(observable, dtype=np.float64)
        if values.shape != (problem.dim,):
            raise ValueError(f"observable vector must have length {problem.dim}")
    return float(np.dot(dist, values))


def gibbs_state(problem: IsingProblem, beta: float):
    """Normalized state with amplitude exp(-beta H_0(sigma) / 2) / sqrt(Z) on sigma.

    Amplitudes are real and nonnegative; their squares reproduce the
    Boltzmann distribution.  Max-shifted like boltzmann_distribution.
    """
    from . import hilbert  # deferred: hilbert does not import ising

    _check_beta(beta)
    energies = all_energies(problem)
    amps = np.exp(-0.5 * beta * (energies - energies.min()))
    amps /= np.linalg.norm(amps)
    return hilbert.QuantumState(amps.astype(np.complex128), n=problem.n)


# --- problem files ---------------------------------------------------------

def problem_to_dict(problem: IsingProblem) -> dict:
    return {
        "name": problem.name,
        "n": problem.n,
        "couplings": [[i, j, J] for i, j, J in problem.couplings],
        "fields": list(problem.fields),
    }


def problem_from_dict(data: dict, name: str = "") -> IsingProblem:
    try:
        return IsingProblem(
            n=int(data["n"]),
            couplings=tuple((c[0], c[1], c[2]) for c in data.get("couplings", [])),
            fields=tuple(data.get("fields", [0.0] * int(data["n"]))),
            name=str(data.get("name", name)),
        )
    except (KeyError, TypeError, IndexError) as exc:
        raise MalformedProblemError(f"bad problem data: {exc}") from exc


def save_problem(problem: IsingProblem, path: str | Path) -> None:
    Path(path).write_text(json.dumps(problem_to_dict(problem), indent=2) + "\n")


def load_problem(path: str | Path) -> IsingProblem:
    try:
        data = json.loads(Path(path).read_text())
    except json.JSONDecodeError as exc:
        raise MalformedProblemError(f"problem file {path} is not valid JSON: {exc}")
    return problem_from_dict(data, name=Path(path).stem)


# The bundled five-spin instance: a frustrated triangle (one antiferromagnetic
# edge) with two pendant spins attached ferromagnetically to the endpoints of
# that edge.  Its six ground states are +++++, +++--, ++--- and their global
# flips, at energy -3.
_FIVE_SPIN_LABELS = ("+++++", "+++--", "++---")


def _label_to_config(label: str) -> int:
    config = 0
    for k, ch in enumerate(label):
        if ch == "+":
            config |= 1 << k
    return config


def five_spin_ground_configs() -> tuple[int, ...]:
    """The six expected ground configurations of the bundled fixture."""
    configs = []
    for label in _FIVE_SPIN_LABELS:
        c = _label_to_config(label)
        configs.extend((c, flip_config(c, 5)))
    return tuple(sorted(configs))


@lru_cache(maxsize=1)
def five_spin_problem() -> IsingProblem:
    """Load the bundled five-spin instance, verifying its ground set on load."""
    data_path = resources.files("fairanneal").joinpath("problems/five_spin.json")
    with data_path.open() as fh:
        problem = problem_from_dict(json.load(fh), name="five_spin")
    ground = enumerate_ground_states(problem)
    if ground.configs != five_spin_ground_configs():
        raise MalformedProblemError(
            "bundled five_spin problem has ground set "
            f"{[config_label(c, 5) for c in ground.configs]}, expected "
            f"{[config_label(c, 5) for c in five_spin_ground_configs()]}")
    return problem


def resolve_problem(ref: str | Path) -> IsingProblem:
    """Map a name or path to a problem: 'five_spin' is bundled, else a file."""
    if str(ref) == "five_spin":
        return five_spin_problem()
    path = Path(ref)
    if not path.exists():
        raise MalformedProblemError(f"problem file not found: {ref}")
    return load_problem(path)
