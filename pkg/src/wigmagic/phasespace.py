"""Product-construction phase space for qubits.

Single-qubit phase-point operators are

    A(q, p) = (I + (-1)^p X + (-1)^(q+p) Y + (-1)^q Z) / 2

and the n-qubit operator at ``((q1, p1), ..., (qn, pn))`` is their tensor
product. Phase-space points are indexed lexicographically in
``(q1, p1, q2, p2, ...)``, i.e. ``index = sum_k (2 q_k + p_k) 4**(n-1-k)``.
For two qubits a Wigner vector therefore reshapes (row-major) into a 4x4
table with rows labelled by the qubit-1 point and columns by the qubit-2
point, both in the order (0,0), (0,1), (1,0), (1,1).

Note that A(q, p) is *not* an involution: its eigenvalues are
(1 +/- sqrt(3)) / 2, so single Wigner entries are not confined to
[-1/4, 1/4] for two qubits.
"""

from __future__ import annotations

import csv
import itertools
from dataclasses import dataclass
from functools import lru_cache
from typing import Sequence

import numpy as np

from .qcore import (
    I2,
    X,
    Y,
    Z,
    StateLike,
    as_density,
    check_nqubits,
    kron_all,
)

IMAG_TOL = 1e-12

SINGLE_QUBIT_POINTS = ((0, 0), (0, 1), (1, 0), (1, 1))

# (q, p) -> (p, q) on one qubit's coordinates; the phase-space image of a
# Hadamard gate in the symplectic picture.
HADAMARD_SWAP = (0, 2, 1, 3)


@dataclass(frozen=True)
class PhasePoint:
    coords: tuple[tuple[int, int], ...]

    def __post_init__(self):
        coords = tuple((int(q), int(p)) for q, p in self.coords)
        if not coords or any(q not in (0, 1) or p not in (0, 1) for q, p in coords):
            raise ValueError(f"invalid phase-space coordinates {self.coords!r}")
        object.__setattr__(self, "coords", coords)

    @property
    def nqubits(self) -> int:
        return len(self.coords)

    @property
    def index(self) -> int:
        idx = 0
        for q, p in self.coords:
            idx = 4 * idx + 2 * q + p
        return idx

    @classmethod
    def from_index(cls, n: int, index: int) -> "PhasePoint":
        if not 0 <= index < 4**n:
            raise ValueError(f"index {index} out of range for {n} qubits")
        digits = []
        for _ in range(n):
            index, r = divmod(index, 4)
            digits.append((r >> 1, r & 1))
        return cls(tuple(reversed(digits)))

    def __str__(self) -> str:
        return "".join(f"({q},{p})" for q, p in self.coords)


def all_points(n: int) -> list[PhasePoint]:
    return [PhasePoint.from_index(n, i) for i in range(4**n)]


def single_qubit_operator(q: int, p: int) -> np.ndarray:
    return 0.5 * (I2 + (-1) ** p * X + (-1) ** (q + p) * Y + (-1) ** q * Z)


def phase_point_operator(alpha: PhasePoint | Sequence[tuple[int, int]]) -> np.ndarray:
    if not isinstance(alpha, PhasePoint):
        alpha = PhasePoint(tuple(alpha))
    return kron_all([single_qubit_operator(q, p) for q, p in alpha.coords])


@lru_cache(maxsize=None)
def phase_point_operators(n: int) -> np.ndarray:
    """All ``4**n`` operators stacked in index order, shape ``(4**n, 2**n, 2**n)``."""
    check_nqubits(n)
    singles = [single_qubit_operator(q, p) for q, p in SINGLE_QUBIT_POINTS]
    ops = np.array([kron_all(combo) for combo in itertools.product(singles, repeat=n)])
    ops.setflags(write=False)
    return ops


@lru_cache(maxsize=None)
def _transform(n: int) -> np.ndarray:
    # Row a holds conj(A_a) flattened / 2^n, so W = Re(T @ vec(rho)) since A_a is Hermitian.
    ops = phase_point_operators(n)
    t = ops.conj().reshape(4**n, -1) / 2**n
    t.setflags(write=False)
    return t


@dataclass(frozen=True)
class WignerVector:
    nqubits: int
    values: np.ndarray

    def __post_init__(self):
        v = np.array(self.values, dtype=float, copy=True).ravel()
        if v.size != 4**self.nqubits:
            raise ValueError(f"Wigner vector for {self.nqubits} qubits needs {4**self.nqubits} entries")
        v.setflags(write=False)
        object.__setattr__(self, "values", v)

    def __len__(self) -> int:
        return self.values.size

    def __getitem__(self, key):
        if isinstance(key, PhasePoint):
            key = key.index
        return self.values[key]

    def l1(self) -> float:
        return float(np.abs(self.values).sum())

    def negative_count(self, tol: float = 1e-12) -> int:
        return int(np.count_nonzero(self.values < -tol))

    def negativity(self, tol: float = 1e-12) -> float:
        v = self.values
        return float(-v[v < -tol].sum())

    def table(self) -> np.ndarray:
        """Two-qubit vectors as a 4x4 table (rows: qubit-1 point, columns: qubit-2 point)."""
        if self.nqubits != 2:
            raise ValueError("table() is defined for two-qubit vectors")
        return self.values.reshape(4, 4)

    def rows(self):
        for i, value in enumerate(self.values):
            yield PhasePoint.from_index(self.nqubits, i), float(value)


def wigner(rho: StateLike) -> WignerVector:
    """Discrete Wigner function ``W(a) = Tr(rho A_a) / 2**n``."""
    rho = as_density(rho)
    n = check_nqubits(rho.nqubits)
    raw = _transform(n) @ rho.matrix.ravel()
    if np.max(np.abs(raw.imag)) > IMAG_TOL:
        raise ArithmeticError("Wigner transform produced a non-real value")
    return WignerVector(n, raw.real)


def wigner_of_operator(op: np.ndarray) -> np.ndarray:
    """Phase-space coefficients ``Tr(op A_a) / 2**n`` of any operator (complex in general)."""
    op = np.asarray(op, dtype=complex)
    n = check_nqubits(op.shape[0].bit_length() - 1)
    return _transform(n) @ op.ravel()


def inverse_wigner(w: WignerVector | np.ndarray) -> np.ndarray:
    """Reconstruct ``sum_a w(a) A_a``."""
    values = w.values if isinstance(w, WignerVector) else np.asarray(w, dtype=float).ravel()
    n = check_nqubits(int(round(np.log(values.size) / np.log(4))))
    if values.size != 4**n:
        raise ValueError(f"length {values.size} is not a power of four")
    ops = phase_point_operators(n)
    return np.tensordot(values, ops, axes=1)


def wigner_l1(w: WignerVector | np.ndarray) -> float:
    values = w.values if isinstance(w, WignerVector) else np.asarray(w, dtype=float)
    return float(np.abs(values).sum())


def mana(rho: StateLike) -> float:
    return float(np.log(wigner(rho).l1()))


def max_stab_l1(stabs) -> float:
    """Largest Wigner l1 norm over an enumerated stabilizer set."""
    return float(np.abs(stabs.wigner_matrix).sum(axis=1).max())


def permute_qubit_points(w: WignerVector, qubit: int, perm: Sequence[int]) -> WignerVector:
    """Relabel the phase-space points of one qubit.

    The returned vector satisfies ``out[.., a_qubit, ..] = w[.., perm[a_qubit], ..]``
    with single-qubit points numbered 0..3 as (0,0), (0,1), (1,0), (1,1).
    """
    n = w.nqubits
    if not 0 <= qubit < n:
        raise ValueError(f"qubit {qubit} out of range")
    if sorted(perm) != [0, 1, 2, 3]:
        raise ValueError(f"{perm!r} is not a permutation of the four points")
    t = w.values.reshape((4,) * n)
    t = np.take(t, list(perm), axis=qubit)
    return WignerVector(n, t.ravel())


def write_csv(w: WignerVector, path) -> None:
    with open(path, "w", newline="") as fh:
        out = csv.writer(fh, lineterminator="\n")
        out.writerow(["index", "point", "value"])
        for i, (pt, value) in enumerate(w.rows()):
            out.writerow([i, str(pt), f"{value:.12g}"])
