"""Dense operators and states on the 2^n computational-basis Hilbert space.

Basis ordering follows the ising module: basis index = spin bit pattern with
site 0 as the least significant bit.  Every Hamiltonian assembled here is
real symmetric; the hermitian flag is checked, not trusted.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

__all__ = [
    "MAX_DENSE_SPINS",
    "DenseOperator",
    "DiagonalOperator",
    "DimensionMismatchError",
    "QuantumState",
    "apply",
    "diag_from_classical",
    "expectation",
    "sigma_x",
    "sigma_z",
    "transverse_field_sum",
]

# Dense matrices are 2^n x 2^n; beyond this the memory cost is on the caller.
MAX_DENSE_SPINS = 14

HERMITIAN_ATOL = 1e-12


class DimensionMismatchError(ValueError):
    """Operator and state dimensions disagree."""


def _check_dense_size(n: int) -> None:
    if not 0 < n <= MAX_DENSE_SPINS:
        raise ValueError(f"dense operators support 1..{MAX_DENSE_SPINS} spins, got {n}")


def _check_site(n: int, i: int) -> None:
    if not 0 <= i < n:
        raise ValueError(f"site {i} out of range for n={n}")


@dataclass(frozen=True)
class QuantumState:
    """Normalized complex amplitude vector over the computational basis."""

    amplitudes: np.ndarray
    n: int
    norm_tol: float = 1e-9

    def __post_init__(self):
        amps = np.asarray(self.amplitudes, dtype=np.complex128)
        if amps.shape != (1 << self.n,):
            raise DimensionMismatchError(
                f"state for n={self.n} needs {1 << self.n} amplitudes, got {amps.shape}")
        amps = amps.copy()
        amps.flags.writeable = False
        object.__setattr__(self, "amplitudes", amps)
        drift = abs(np.linalg.norm(amps) - 1.0)
        if drift > self.norm_tol:
            raise ValueError(f"state norm off by {drift:.3e} (> {self.norm_tol:.1e})")

    @property
    def dim(self) -> int:
        return 1 << self.n

    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))

    def probabilities(self) -> np.ndarray:
        """Born-rule probabilities, renormalized to sum exactly to 1."""
        p = np.abs(self.amplitudes) ** 2
        return p / p.sum()

    def overlap(self, other: "QuantumState") -> complex:
        return complex(np.vdot(self.amplitudes, other.amplitudes))


def uniform_superposition(n: int) -> QuantumState:
    amps = np.full(1 << n, 1.0 / np.sqrt(1 << n), dtype=np.complex128)
    return QuantumState(amps, n=n)


@dataclass(frozen=True)
class DenseOperator:
    """2^n x 2^n matrix with an asserted (not assumed) hermitian flag."""

    matrix: np.ndarray
    hermitian: bool = True

    def __post_init__(self):
        m = np.asarray(self.matrix)
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise DimensionMismatchError(f"operator matrix must be square, got {m.shape}")
        if m.shape[0] & (m.shape[0] - 1):
            raise DimensionMismatchError(f"dimension {m.shape[0]} is not a power of two")
        if self.hermitian:
            dev = np.abs(m - m.conj().T).max()
            if dev > HERMITIAN_ATOL:
                raise ValueError(f"hermitian flag set but max |M - M^H| = {dev:.3e}")
        m = m.copy()
        m.flags.writeable = False
        object.__setattr__(self, "matrix", m)

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    def real_symmetric_part(self) -> np.ndarray:
        """Real matrix after asserting imaginary parts vanish."""
        m = self.matrix
        if np.iscomplexobj(m):
            max_imag = np.abs(m.imag).max()
            if max_imag > 0.0:
                raise ValueError(f"operator has nonzero imaginary entries ({max_imag:.3e})")
            m = m.real
        return m

    def __add__(self, other):
        if isinstance(other, DiagonalOperator):
            other = other.to_dense()
        if not isinstance(other, DenseOperator):
            return NotImplemented
        return DenseOperator(self.matrix + other.matrix,
                             hermitian=self.hermitian and other.hermitian)

    def __sub__(self, other):
        return self + (-1.0) * other

    def __rmul__(self, scalar):
        scalar = complex(scalar)
        herm = self.hermitian and scalar.imag == 0.0
        return DenseOperator(scalar * self.matrix, hermitian=herm)


@dataclass(frozen=True)
class DiagonalOperator:
    """Operator diagonal in the computational basis (real entries)."""

    diag: np.ndarray

    def __post_init__(self):
        d = np.asarray(self.diag, dtype=np.float64).copy()
        d.flags.writeable = False
        object.__setattr__(self, "diag", d)

    @property
    def dim(self) -> int:
        return self.diag.shape[0]

    def to_dense(self) -> DenseOperator:
        return DenseOperator(np.diag(self.diag), hermitian=True)

    def __add__(self, other):
        if isinstance(other, DiagonalOperator):
            return DiagonalOperator(self.diag + other.diag)
        if isinstance(other, DenseOperator):
            return self.to_dense() + other
        return NotImplemented

    def __rmul__(self, scalar):
        return DiagonalOperator(float(scalar) * self.diag)


def sigma_x(n: int, i: int) -> DenseOperator:
    """Pauli x on site i: the permutation that flips bit i of the basis index."""
    _check_dense_size(n)
    _check_site(n, i)
    dim = 1 << n
    m = np.zeros((dim, dim))
    idx = np.arange(dim)
    m[idx, idx ^ (1 << i)] = 1.0
    return DenseOperator(m, hermitian=True)


def sigma_z(n: int, i: int) -> DiagonalOperator:
    """Pauli z on site i as a diagonal (+1 where bit i is set)."""
    _check_dense_size(n)
    _check_site(n, i)
    idx = np.arange(1 << n)
    return DiagonalOperator(np.where((idx >> i) & 1, 1.0, -1.0))


def transverse_field_sum(n: int) -> DenseOperator:
    """sum_i sigma_x(i) as one dense matrix."""
    _check_dense_size(n)
    dim = 1 << n
    m = np.zeros((dim, dim))
    idx = np.arange(dim)
    for i in range(n):
        m[idx, idx ^ (1 << i)] += 1.0
    return DenseOperator(m, hermitian=True)


def diag_from_classical(n: int, f: Callable[[int], float] | np.ndarray) -> DiagonalOperator:
    """Diagonal operator with entry f(configuration decoded from basis index)."""
    _check_dense_size(n)
    dim = 1 << n
    if callable(f):
        diag = np.array([f(k) for k in range(dim)], dtype=np.float64)
    else:
        diag = np.asarray(f, dtype=np.float64)
        if diag.shape != (dim,):
            raise DimensionMismatchError(f"diagonal must have length {dim}")
    return DiagonalOperator(diag)


def _as_vector(state) -> np.ndarray:
    if isinstance(state, QuantumState):
        return state.amplitudes
    return np.asarray(state, dtype=np.complex128)


def apply(op: DenseOperator | DiagonalOperator, state) -> np.ndarray:
    """Matrix-vector product; returns a raw (not renormalized) vector."""
    vec = _as_vector(state)
    if vec.shape != (op.dim,):
        raise DimensionMismatchError(f"state has dim {vec.shape}, operator {op.dim}")
    if isinstance(op, DiagonalOperator):
        return op.diag * vec
    return op.matrix @ vec


def expectation(op: DenseOperator | DiagonalOperator, state) -> float:
    """<psi|op|psi> for a hermitian operator; the imaginary residue must be tiny."""
    vec = _as_vector(state)
    val = complex(np.vdot(vec, apply(op, vec)))
    if abs(val.imag) > 1e-10:
        raise ValueError(f"expectation has imaginary residue {val.imag:.3e}")
    return val.real
