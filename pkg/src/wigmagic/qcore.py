"""Dense linear algebra and basic quantum objects for 1-3 qubits.

Operators are plain ``numpy`` complex arrays. :class:`DensityMatrix` and
:class:`PureState` are thin validated wrappers whose arrays are read-only,
so instances can be shared freely.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import reduce
from typing import Sequence, Union

import numpy as np

MAX_QUBITS = 3

HERMITIAN_TOL = 1e-12
TRACE_TOL = 1e-12
PSD_FLOOR = -1e-10
NORM_TOL = 1e-12
UNITARY_TOL = 1e-10

I2 = np.eye(2, dtype=complex)
X = np.array([[0, 1], [1, 0]], dtype=complex)
Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
Z = np.array([[1, 0], [0, -1]], dtype=complex)
H = np.array([[1, 1], [1, -1]], dtype=complex) / np.sqrt(2)
S = np.array([[1, 0], [0, 1j]], dtype=complex)

PAULI_LETTERS = {"I": I2, "X": X, "Y": Y, "Z": Z}
PHASES = {1: 1, -1: -1, 1j: 1j, -1j: -1j}

for _m in (I2, X, Y, Z, H, S):
    _m.setflags(write=False)


def _frozen(a: np.ndarray) -> np.ndarray:
    a = np.array(a, dtype=complex, copy=True)
    a.setflags(write=False)
    return a


def nqubits_of(dim: int) -> int:
    n = int(dim).bit_length() - 1
    if dim < 2 or 2**n != dim:
        raise ValueError(f"dimension {dim} is not a power of two")
    return n


def check_nqubits(n: int) -> int:
    if not isinstance(n, (int, np.integer)) or not 1 <= n <= MAX_QUBITS:
        raise ValueError(f"number of qubits must be in 1..{MAX_QUBITS}, got {n!r}")
    return int(n)


def is_hermitian(m: np.ndarray, tol: float = HERMITIAN_TOL) -> bool:
    return bool(np.max(np.abs(m - m.conj().T)) <= tol)


def is_unitary(u: np.ndarray, tol: float = UNITARY_TOL) -> bool:
    u = np.asarray(u)
    if u.ndim != 2 or u.shape[0] != u.shape[1]:
        return False
    return bool(np.max(np.abs(u @ u.conj().T - np.eye(u.shape[0]))) <= tol)


def kron(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Kronecker product of two square matrices."""
    a = np.asarray(a)
    b = np.asarray(b)
    if a.ndim != 2 or a.shape[0] != a.shape[1] or b.ndim != 2 or b.shape[0] != b.shape[1]:
        raise ValueError("kron expects square matrices")
    return np.kron(a, b)


def kron_all(mats: Sequence[np.ndarray]) -> np.ndarray:
    return reduce(kron, mats)


@dataclass(frozen=True)
class PureState:
    amplitudes: np.ndarray

    def __post_init__(self):
        amps = np.asarray(self.amplitudes, dtype=complex).ravel()
        nqubits_of(amps.size)
        if abs(np.linalg.norm(amps) - 1.0) > NORM_TOL:
            raise ValueError(f"state vector not normalized (norm {np.linalg.norm(amps)!r})")
        object.__setattr__(self, "amplitudes", _frozen(amps))

    @classmethod
    def normalized(cls, amplitudes) -> "PureState":
        amps = np.asarray(amplitudes, dtype=complex).ravel()
        norm = np.linalg.norm(amps)
        if norm == 0:
            raise ValueError("zero vector cannot be normalized")
        return cls(amps / norm)

    @property
    def nqubits(self) -> int:
        return nqubits_of(self.amplitudes.size)

    def density(self) -> "DensityMatrix":
        v = self.amplitudes
        return DensityMatrix(np.outer(v, v.conj()))


@dataclass(frozen=True)
class DensityMatrix:
    """Hermitian, positive semidefinite, unit-trace operator on ``2**n`` dimensions."""

    matrix: np.ndarray

    def __post_init__(self):
        m = np.asarray(self.matrix, dtype=complex)
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise ValueError("density matrix must be square")
        nqubits_of(m.shape[0])
        if not is_hermitian(m):
            raise ValueError("density matrix is not Hermitian")
        if abs(np.trace(m) - 1.0) > TRACE_TOL:
            raise ValueError(f"density matrix trace is {np.trace(m).real!r}, expected 1")
        if np.linalg.eigvalsh(m).min() < PSD_FLOOR:
            raise ValueError("density matrix is not positive semidefinite")
        object.__setattr__(self, "matrix", _frozen(m))

    @property
    def nqubits(self) -> int:
        return nqubits_of(self.matrix.shape[0])

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    @classmethod
    def maximally_mixed(cls, n: int) -> "DensityMatrix":
        d = 2 ** check_nqubits(n)
        return cls(np.eye(d) / d)

    @classmethod
    def from_bloch(cls, x: float, y: float, z: float) -> "DensityMatrix":
        return cls(0.5 * (I2 + x * X + y * Y + z * Z))

    def expectation(self, op: np.ndarray) -> float:
        return float(np.real(np.trace(self.matrix @ op)))

    def tensor(self, other: "DensityMatrix") -> "DensityMatrix":
        return DensityMatrix(kron(self.matrix, other.matrix))

    def mix(self, other: "DensityMatrix", p: float) -> "DensityMatrix":
        """Return ``p * self + (1 - p) * other``."""
        return DensityMatrix(p * self.matrix + (1 - p) * other.matrix)


StateLike = Union[DensityMatrix, PureState, np.ndarray, Sequence[complex]]


def as_density(state: StateLike) -> DensityMatrix:
    """Coerce a density matrix, pure state, state vector or matrix to :class:`DensityMatrix`."""
    if isinstance(state, DensityMatrix):
        return state
    if isinstance(state, PureState):
        return state.density()
    arr = np.asarray(state, dtype=complex)
    if arr.ndim == 1:
        return PureState.normalized(arr).density()
    return DensityMatrix(arr)


def bloch_state(theta: float, phi: float) -> DensityMatrix:
    """Pure single-qubit state at polar angle ``theta`` and azimuth ``phi``."""
    return DensityMatrix.from_bloch(
        np.sin(theta) * np.cos(phi), np.sin(theta) * np.sin(phi), np.cos(theta)
    )


@dataclass(frozen=True)
class PauliString:
    letters: str
    phase: complex = 1

    def __post_init__(self):
        letters = self.letters.upper()
        if not letters or any(c not in PAULI_LETTERS for c in letters):
            raise ValueError(f"invalid Pauli string {self.letters!r}")
        if self.phase not in PHASES:
            raise ValueError(f"Pauli phase must be one of +1, -1, +i, -i, got {self.phase!r}")
        object.__setattr__(self, "letters", letters)

    @classmethod
    def parse(cls, text: str) -> "PauliString":
        """Parse ``'XX'``, ``'-ZI'``, ``'+iYX'`` or ``'-iZ'``."""
        t = text.strip()
        phase: complex = 1
        if t[:1] in "+-":
            phase = -1 if t[0] == "-" else 1
            t = t[1:]
        if t[:1] == "i":
            phase *= 1j
            t = t[1:]
        return cls(t, phase)

    @property
    def nqubits(self) -> int:
        return len(self.letters)

    def matrix(self) -> np.ndarray:
        return self.phase * kron_all([PAULI_LETTERS[c] for c in self.letters])

    def __str__(self) -> str:
        sign = {1: "+", -1: "-", 1j: "+i", -1j: "-i"}[self.phase]
        return sign + self.letters


def pauli(spec: Union[PauliString, str]) -> np.ndarray:
    """Matrix of a Pauli string such as ``'XX'`` or ``PauliString('ZI', -1)``."""
    if isinstance(spec, str):
        spec = PauliString.parse(spec)
    return spec.matrix()


def _rng(seed) -> np.random.Generator:
    if isinstance(seed, np.random.Generator):
        return seed
    return np.random.default_rng(seed)


def haar_random_pure(n: int, seed) -> PureState:
    """Haar-random pure state on ``n`` qubits.

    ``seed`` is an integer (a fresh generator is made per call) or an
    existing ``numpy.random.Generator`` for drawing many states in sequence.
    """
    d = 2 ** check_nqubits(n)
    rng = _rng(seed)
    v = rng.standard_normal(d) + 1j * rng.standard_normal(d)
    return PureState(v / np.linalg.norm(v))


def random_density(n: int, seed, rank: int | None = None) -> DensityMatrix:
    """Random mixed state from the induced (Ginibre) measure."""
    d = 2 ** check_nqubits(n)
    rng = _rng(seed)
    k = d if rank is None else rank
    g = rng.standard_normal((d, k)) + 1j * rng.standard_normal((d, k))
    m = g @ g.conj().T
    m = (m + m.conj().T) / 2
    return DensityMatrix(m / np.trace(m).real)


def depolarize(rho: DensityMatrix, p: float) -> DensityMatrix:
    """Global depolarizing channel ``(1 - p) rho + p I / 2**n``."""
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"depolarizing probability must lie in [0, 1], got {p!r}")
    rho = as_density(rho)
    d = rho.dim
    return DensityMatrix((1 - p) * rho.matrix + p * np.eye(d) / d)


def apply_unitary(rho: DensityMatrix, u: np.ndarray) -> DensityMatrix:
    rho = as_density(rho)
    u = np.asarray(u, dtype=complex)
    if u.shape != rho.matrix.shape or not is_unitary(u):
        raise ValueError("apply_unitary needs a unitary of matching dimension")
    out = u @ rho.matrix @ u.conj().T
    return DensityMatrix((out + out.conj().T) / 2)


def single_qubit_cliffords() -> list[np.ndarray]:
    """The 24 single-qubit Clifford unitaries modulo global phase.

    Each representative is normalized so its first nonzero entry is real positive.
    """

    def canon(u):
        flat = u.ravel()
        k = np.flatnonzero(np.abs(flat) > 1e-9)[0]
        return u * (abs(flat[k]) / flat[k])

    def key(u):
        flat = u.ravel()
        return tuple(np.round(np.concatenate([flat.real, flat.imag]), 9) + 0.0)

    found = {key(canon(I2)): canon(I2)}
    frontier = [canon(I2)]
    while frontier:
        nxt = []
        for u in frontier:
            for g in (H, S):
                v = canon(g @ u)
                k = key(v)
                if k not in found:
                    found[k] = v
                    nxt.append(v)
        frontier = nxt
    return [found[k] for k in sorted(found)]
