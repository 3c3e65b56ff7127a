"""Exhaustive enumeration of pure stabilizer states on 1-3 qubits.

Stabilizer groups are enumerated through their check matrices: every
maximal isotropic subspace of F_2^{2n} has a unique reduced row-echelon
basis, and each of the 2^n sign choices on that basis gives a distinct
state. Counts are therefore exact by construction (6, 60, 1080) and no
floating-point deduplication is needed.
"""

from __future__ import annotations

import itertools
import json
import logging
import os
from dataclasses import dataclass
from functools import lru_cache
from pathlib import Path

import numpy as np

from .phasespace import WignerVector, wigner
from .qcore import PauliString, PureState, check_nqubits

log = logging.getLogger(__name__)

CACHE_VERSION = "wigmagic-stabilizers-1"
CACHE_ENV = "WIGMAGIC_CACHE_DIR"
EIGEN_TOL = 1e-10
OVERLAP_TOL = 1e-9

_LETTER = {(0, 0): "I", (1, 0): "X", (0, 1): "Z", (1, 1): "Y"}


def expected_count(n: int) -> int:
    count = 2**n
    for k in range(n):
        count *= 2 ** (n - k) + 1
    return count


@dataclass(frozen=True)
class StabilizerState:
    nqubits: int
    tableau: tuple[tuple[int, ...], ...]
    signs: tuple[int, ...]
    generators: tuple[PauliString, ...]
    vector: PureState
    wigner: WignerVector

    def density(self):
        return self.vector.density()

    @property
    def label(self) -> str:
        return " ".join(str(g) for g in self.generators)


@dataclass(frozen=True)
class StabilizerSet:
    nqubits: int
    states: tuple[StabilizerState, ...]

    def __post_init__(self):
        w = np.array([s.wigner.values for s in self.states])
        w.setflags(write=False)
        object.__setattr__(self, "_wigner", w)

    def __len__(self) -> int:
        return len(self.states)

    def __iter__(self):
        return iter(self.states)

    def __getitem__(self, i) -> StabilizerState:
        return self.states[i]

    @property
    def wigner_matrix(self) -> np.ndarray:
        """Stacked Wigner vectors, shape ``(len(self), 4**n)``."""
        return self._wigner

    def vectors(self) -> np.ndarray:
        return np.array([s.vector.amplitudes for s in self.states])


def _symplectic(a, b, n: int) -> int:
    return sum(a[i] * b[n + i] + a[n + i] * b[i] for i in range(n)) % 2


def _rref_matrices(n: int):
    """Yield every n x 2n binary matrix of rank n in reduced row-echelon form."""
    width = 2 * n
    for pivots in itertools.combinations(range(width), n):
        free = [
            (r, c)
            for r, pc in enumerate(pivots)
            for c in range(pc + 1, width)
            if c not in pivots
        ]
        for bits in itertools.product((0, 1), repeat=len(free)):
            rows = [[0] * width for _ in range(n)]
            for r, pc in enumerate(pivots):
                rows[r][pc] = 1
            for (r, c), b in zip(free, bits):
                rows[r][c] = b
            yield tuple(tuple(row) for row in rows)


def isotropic_tableaux(n: int) -> list[tuple[tuple[int, ...], ...]]:
    """Canonical check matrices ``(x | z)`` of all maximal abelian Pauli subgroups, sorted."""
    check_nqubits(n)
    out = [
        m
        for m in _rref_matrices(n)
        if all(_symplectic(a, b, n) == 0 for a, b in itertools.combinations(m, 2))
    ]
    return sorted(out)


def row_to_pauli(row, sign: int, n: int) -> PauliString:
    letters = "".join(_LETTER[(row[i], row[n + i])] for i in range(n))
    return PauliString(letters, -1 if sign else 1)


def fix_global_phase(v: np.ndarray, tol: float = 1e-9) -> np.ndarray:
    """Rotate so the first entry with modulus above ``tol`` is real and positive."""
    k = np.flatnonzero(np.abs(v) > tol)[0]
    return v * (abs(v[k]) / v[k])


def joint_eigenvector(generators) -> np.ndarray:
    mats = [g.matrix() for g in generators]
    d = mats[0].shape[0]
    proj = np.eye(d, dtype=complex)
    for m in mats:
        proj = proj @ (np.eye(d) + m) / 2
    col = int(np.argmax(np.linalg.norm(proj, axis=0)))
    v = proj[:, col]
    v = fix_global_phase(v / np.linalg.norm(v))
    for m in mats:
        if np.max(np.abs(m @ v - v)) > EIGEN_TOL:
            raise ArithmeticError("projected vector is not a joint +1 eigenvector")
    return v


def _build_state(n: int, tableau, signs, vector=None) -> StabilizerState:
    gens = tuple(row_to_pauli(row, s, n) for row, s in zip(tableau, signs))
    v = joint_eigenvector(gens) if vector is None else np.asarray(vector, dtype=complex)
    psi = PureState(v / np.linalg.norm(v))
    return StabilizerState(n, tuple(tableau), tuple(signs), gens, psi, wigner(psi))


def build_stabilizers(n: int) -> StabilizerSet:
    """Enumerate from scratch (no cache)."""
    n = check_nqubits(n)
    states = [
        _build_state(n, tab, signs)
        for tab in isotropic_tableaux(n)
        for signs in itertools.product((0, 1), repeat=n)
    ]
    if len(states) != expected_count(n):
        raise AssertionError(f"enumerated {len(states)} states, expected {expected_count(n)}")
    return StabilizerSet(n, tuple(states))


def cache_dir() -> Path:
    env = os.environ.get(CACHE_ENV)
    if env:
        return Path(env)
    base = os.environ.get("XDG_CACHE_HOME") or Path.home() / ".cache"
    return Path(base) / "wigmagic"


def cache_path(n: int, directory: Path | None = None) -> Path:
    return Path(directory or cache_dir()) / f"stabilizers_n{n}.json"


def save_cache(stabs: StabilizerSet, path: Path) -> None:
    payload = {
        "version": CACHE_VERSION,
        "nqubits": stabs.nqubits,
        "states": [
            {
                "tableau": [list(r) for r in s.tableau],
                "signs": list(s.signs),
                "vector": [[float(a.real), float(a.imag)] for a in s.vector.amplitudes],
            }
            for s in stabs
        ],
    }
    path.parent.mkdir(parents=True, exist_ok=True)
    tmp = path.with_suffix(".tmp")
    tmp.write_text(json.dumps(payload))
    tmp.replace(path)


def load_cache(n: int, path: Path) -> StabilizerSet | None:
    """Read a cache file; ``None`` when missing, stale or malformed."""
    try:
        payload = json.loads(path.read_text())
    except (OSError, ValueError):
        return None
    if payload.get("version") != CACHE_VERSION or payload.get("nqubits") != n:
        log.info("ignoring stale stabilizer cache %s", path)
        return None
    try:
        states = tuple(
            _build_state(
                n,
                tuple(tuple(r) for r in item["tableau"]),
                tuple(item["signs"]),
                [complex(re, im) for re, im in item["vector"]],
            )
            for item in payload["states"]
        )
    except (KeyError, TypeError, ValueError) as exc:
        log.info("ignoring malformed stabilizer cache %s: %s", path, exc)
        return None
    if len(states) != expected_count(n):
        return None
    return StabilizerSet(n, states)


def enumerate_stabilizers(n: int, cache: bool | None = None, directory: Path | None = None) -> StabilizerSet:
    """All pure n-qubit stabilizer states, ordered by canonical tableau.

    With ``cache`` (default: only for n = 3) the set is read from / written to
    a versioned JSON file under :func:`cache_dir`.
    """
    n = check_nqubits(n)
    use_cache = (n == 3) if cache is None else cache
    if not use_cache:
        return build_stabilizers(n)
    path = cache_path(n, directory)
    stabs = load_cache(n, path)
    if stabs is None:
        stabs = build_stabilizers(n)
        try:
            save_cache(stabs, path)
        except OSError as exc:
            log.warning("could not write stabilizer cache %s: %s", path, exc)
    return stabs


@lru_cache(maxsize=None)
def stabilizer_set(n: int) -> StabilizerSet:
    """Process-wide shared instance of :func:`enumerate_stabilizers`."""
    return enumerate_stabilizers(n)


def is_stabilizer_vector(psi, stabs: StabilizerSet, tol: float = OVERLAP_TOL) -> bool:
    amps = psi.amplitudes if isinstance(psi, PureState) else np.asarray(psi, dtype=complex)
    amps = amps / np.linalg.norm(amps)
    if amps.size != 2**stabs.nqubits:
        raise ValueError("dimension mismatch")
    overlaps = np.abs(stabs.vectors().conj() @ amps)
    return bool(np.any(np.abs(overlaps - 1.0) <= tol))
