"""Two-qubit repetition-code families and their closed forms.

All three families live in the codespace span{|00>, |11>} stabilized by
``Z⊗Z``, with logical operators ``X_L = X⊗X``, ``Y_L = Y⊗X``, ``Z_L = Z⊗I``:

* ``Ry``:     cos(θ/2)|00> + sin(θ/2)|11>          logical Bloch (sinθ, 0, cosθ)
* ``Rx``:     cos(θ/2)|00> - i sin(θ/2)|11>        logical Bloch (0, -sinθ, cosθ)
* ``BellRz``: (|00> + e^{iθ}|11>) / sqrt(2)        logical Bloch (cosθ, sinθ, 0)

With ``s = |sinθ|`` and ``c = |cosθ|`` the distances are ``s + c - 1`` (Ry,
BellRz) and half of that (Rx); the extent is ``s + c`` for all three.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field

import numpy as np

from .measures import KAPPA_THRESHOLD
from .phasespace import WignerVector
from .qcore import (
    I2,
    X,
    Y,
    Z,
    DensityMatrix,
    PauliString,
    PureState,
    StateLike,
    as_density,
    depolarize,
    kron,
)

CODESPACE_TOL = 1e-9
SUBSPACE_TOL = 1e-12
BOUNDARY_TOL = 1e-12


class FamilyId(str, enum.Enum):
    RY = "Ry"
    RX = "Rx"
    BELL_RZ = "BellRz"

    @classmethod
    def parse(cls, text) -> "FamilyId":
        if isinstance(text, cls):
            return text
        key = str(text).lower().replace("_", "").replace("-", "")
        for f in cls:
            if f.value.lower() == key or (f is cls.BELL_RZ and key == "brz"):
                return f
        raise ValueError(f"unknown family {text!r}; expected one of Ry, Rx, BellRz")


KAPPA = {FamilyId.RY: 1.0, FamilyId.RX: 2.0, FamilyId.BELL_RZ: 1.0}


class BoundaryError(ValueError):
    """θ sits where sin or cos vanishes, so an adaptive witness is undefined."""


def _frozen(m):
    m = np.array(m, dtype=complex)
    m.setflags(write=False)
    return m


@dataclass(frozen=True)
class LogicalFrame:
    xl: np.ndarray = field(default_factory=lambda: _frozen(kron(X, X)))
    yl: np.ndarray = field(default_factory=lambda: _frozen(kron(Y, X)))
    zl: np.ndarray = field(default_factory=lambda: _frozen(kron(Z, I2)))
    stabilizer: np.ndarray = field(default_factory=lambda: _frozen(kron(Z, Z)))

    @property
    def projector(self) -> np.ndarray:
        """Projector onto the +1 eigenspace of the stabilizer."""
        return (np.eye(4) + self.stabilizer) / 2


DEFAULT_FRAME = LogicalFrame()


@dataclass(frozen=True)
class FamilyPoint:
    family: FamilyId
    theta: float
    state: PureState

    def __post_init__(self):
        amps = self.state.amplitudes
        if amps.size != 4 or max(abs(amps[1]), abs(amps[2])) > SUBSPACE_TOL:
            raise ValueError("family states must lie in span{|00>, |11>}")

    def density(self) -> DensityMatrix:
        return self.state.density()


def family_state(family, theta: float) -> FamilyPoint:
    family = FamilyId.parse(family)
    theta = float(theta)
    if not np.isfinite(theta):
        raise ValueError("theta must be finite")
    if family is FamilyId.RY:
        amps = [np.cos(theta / 2), 0, 0, np.sin(theta / 2)]
    elif family is FamilyId.RX:
        amps = [np.cos(theta / 2), 0, 0, -1j * np.sin(theta / 2)]
    else:
        amps = np.array([1, 0, 0, np.exp(1j * theta)]) / np.sqrt(2)
    return FamilyPoint(family, theta, PureState(np.asarray(amps, dtype=complex)))


def family_density(family, theta: float) -> DensityMatrix:
    return family_state(family, theta).density()


def closed_form(family, theta: float) -> tuple[float, float, float | None]:
    """``(C, Gamma, kappa)`` from the exact formulas; ``kappa`` is ``None`` when ``C`` vanishes."""
    family = FamilyId.parse(family)
    gamma = abs(np.sin(theta)) + abs(np.cos(theta))
    c = gamma - 1.0
    if family is FamilyId.RX:
        c /= 2
    c = max(c, 0.0)
    kappa = KAPPA[family] if c > KAPPA_THRESHOLD else None
    return float(c), float(gamma), kappa


def _signs(theta: float) -> tuple[float, float]:
    s, c = np.sin(theta), np.cos(theta)
    if abs(s) <= BOUNDARY_TOL or abs(c) <= BOUNDARY_TOL:
        raise BoundaryError(f"theta={theta!r} is a sign-flip boundary of the adaptive witness")
    return float(np.sign(s)), float(np.sign(c))


def closed_form_witness(family, theta: float, frame: LogicalFrame = DEFAULT_FRAME) -> np.ndarray:
    """Logical witness whose trace gap over the pure stabilizer states equals ``C``.

    Ry: sign(cosθ) Z_L + sign(sinθ) X_L (equal to ``ZI + XX`` for θ in (0, π/2));
    Rx: (sign(cosθ) Z_L - sign(sinθ) Y_L) / 2; BellRz: sign(cosθ) X_L + sign(sinθ) Y_L.
    """
    family = FamilyId.parse(family)
    ss, sc = _signs(theta)
    if family is FamilyId.RY:
        h = sc * frame.zl + ss * frame.xl
    elif family is FamilyId.RX:
        h = 0.5 * (sc * frame.zl - ss * frame.yl)
    else:
        h = sc * frame.xl + ss * frame.yl
    return np.array(h)


def brz_wigner_closed_form(theta: float) -> WignerVector:
    """Wigner vector of the BellRz point from its 4x4 closed form (rows: qubit-1 point)."""
    s, c = np.sin(theta), np.cos(theta)
    table = np.array(
        [
            [1 + s, 1 - s, c, -c],
            [1 - s, 1 + s, -c, c],
            [c, -c, 1 - s, 1 + s],
            [-c, c, 1 + s, 1 - s],
        ]
    )
    return WignerVector(2, table.ravel() / 8)


def in_codespace(rho: StateLike, frame: LogicalFrame = DEFAULT_FRAME, tol: float = CODESPACE_TOL) -> bool:
    rho = as_density(rho)
    if rho.dim != 4:
        return False
    return bool(np.real(np.trace(frame.projector @ rho.matrix)) >= 1.0 - tol)


def logical_bloch(rho: StateLike, frame: LogicalFrame = DEFAULT_FRAME) -> tuple[float, float, float]:
    rho = as_density(rho)
    if not in_codespace(rho, frame):
        raise ValueError("state has support outside the codespace")
    return tuple(rho.expectation(op) for op in (frame.xl, frame.yl, frame.zl))


def correctable_error_roundtrip(
    rho: StateLike, error, frame: LogicalFrame = DEFAULT_FRAME
) -> DensityMatrix:
    """Apply a physical Pauli error, read the syndrome, and undo it.

    The distance-2 code only detects single-qubit flips, so the syndrome
    cannot tell X⊗I from I⊗X; the decoder is handed the error class and its
    recovery is that same Pauli. Errors that commute with the stabilizer are
    accepted only when they act as the logical identity.
    """
    rho = as_density(rho)
    if not in_codespace(rho, frame):
        raise ValueError("round-trip needs a codespace state")
    if isinstance(error, str):
        error = PauliString.parse(error)
    e = error.matrix() if isinstance(error, PauliString) else np.asarray(error, dtype=complex)
    if e.shape != (4, 4):
        raise ValueError("error must act on two qubits")
    ez, ze = e @ frame.stabilizer, frame.stabilizer @ e
    if np.allclose(ez, ze):
        proj = frame.projector
        restricted = proj @ e @ proj
        phase = restricted[0, 0]
        if not np.allclose(restricted, phase * proj) or not np.isclose(abs(phase), 1.0):
            raise ValueError("error commutes with the stabilizer but is a logical operator; not correctable")
        return rho
    if not np.allclose(ez, -ze):
        raise ValueError("error must be a Pauli operator")
    corrupted = e @ rho.matrix @ e.conj().T
    p_flip = 1.0 - float(np.real(np.trace(frame.projector @ corrupted)))
    if abs(p_flip - 1.0) > CODESPACE_TOL:
        raise ArithmeticError("syndrome is not deterministic")
    recovered = e.conj().T @ corrupted @ e
    return DensityMatrix((recovered + recovered.conj().T) / 2)


def critical_noise(theta: float) -> float:
    """Depolarizing rate ``1 - 1/(|sinθ| + |cosθ|)`` at which the family distance reaches zero."""
    gamma = abs(np.sin(theta)) + abs(np.cos(theta))
    if gamma <= 1.0 + BOUNDARY_TOL:
        raise BoundaryError(f"theta={theta!r} is a stabilizer point; no critical noise level")
    return float(1.0 - 1.0 / gamma)


def codespace_depolarize(rho: StateLike, p: float, frame: LogicalFrame = DEFAULT_FRAME) -> DensityMatrix:
    """Logical depolarizing ``(1 - p) rho + p Π/2`` that keeps the state in the codespace."""
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"depolarizing probability must lie in [0, 1], got {p!r}")
    rho = as_density(rho)
    return DensityMatrix((1 - p) * rho.matrix + p * frame.projector / 2)


CHANNELS = {
    "global": depolarize,
    "codespace": codespace_depolarize,
}


def ry_decomposition(theta: float) -> list[tuple[float, np.ndarray]]:
    """Three signed stabilizer terms summing to the Ry point, for θ in (0, π/2).

    Weights cosθ on |00>, (1 - cosθ + sinθ)/2 on |+_L> and
    -(cosθ + sinθ - 1)/2 on |-_L>; l1 norm sinθ + cosθ.
    """
    if not 0.0 < theta < np.pi / 2:
        raise ValueError("the three-term decomposition needs theta in (0, pi/2)")
    s, c = np.sin(theta), np.cos(theta)
    zero = np.zeros((4, 4), dtype=complex)
    zero[0, 0] = 1
    plus = np.array([1, 0, 0, 1]) / np.sqrt(2)
    minus = np.array([1, 0, 0, -1]) / np.sqrt(2)
    return [
        (c, zero),
        ((1 - c + s) / 2, np.outer(plus, plus).astype(complex)),
        (-(c + s - 1) / 2, np.outer(minus, minus).astype(complex)),
    ]
