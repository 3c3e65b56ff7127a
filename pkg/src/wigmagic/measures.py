"""Wigner distance, stabilizer extent and their tightness ratio.

Both quantities are linear programs over the stacked stabilizer Wigner
vectors ``V`` (one row per pure stabilizer state):

* distance ``C``: minimize ``sum t`` with ``|w - V.T lam| <= t``,
  ``sum lam = 1``, ``lam >= 0``;
* extent ``Gamma``: minimize ``sum (a+ + a-)`` with ``V.T (a+ - a-) = w``.

The multipliers ``u, v >= 0`` of the two absolute-value rows of the distance
LP give the phase-space witness ``S = u - v`` with ``|S| <= 1``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .lpsolve import LPProblem, LPSolution, solve, solve_certified
from .phasespace import WignerVector, inverse_wigner, wigner
from .qcore import StateLike, as_density
from .stabgen import StabilizerSet, stabilizer_set

KAPPA_THRESHOLD = 1e-6
MEMBERSHIP_TOL = 1e-9
WITNESS_TOL = 1e-9


@dataclass(frozen=True)
class DualWitness:
    """Phase-space witness ``svec`` and its operator ``sum_a svec[a] A_a``.

    ``gap = <svec, W_rho> - free_max`` where ``free_max`` is the largest value
    of ``<svec, W_sigma>`` over the pure stabilizer states.
    """

    svec: np.ndarray
    operator: np.ndarray
    free_max: float
    gap: float

    def value_on(self, w) -> float:
        values = w.values if isinstance(w, WignerVector) else np.asarray(w, dtype=float)
        return float(self.svec @ values)


@dataclass(frozen=True)
class StabDecomposition:
    coefficients: np.ndarray
    l1: float

    def reconstruct(self, stabs: StabilizerSet) -> np.ndarray:
        """The Wigner vector ``sum_i coefficients[i] W_i``."""
        return self.coefficients @ stabs.wigner_matrix

    def sparse(self, tol: float = 1e-12) -> dict[int, float]:
        return {int(i): float(self.coefficients[i]) for i in np.flatnonzero(np.abs(self.coefficients) > tol)}


class Distance(NamedTuple):
    value: float
    weights: np.ndarray
    witness: DualWitness


class Extent(NamedTuple):
    value: float
    decomposition: StabDecomposition


def _values(w, n_expected: int | None = None) -> np.ndarray:
    values = w.values if isinstance(w, WignerVector) else np.asarray(w, dtype=float).ravel()
    if n_expected is not None and values.size != 4**n_expected:
        raise ValueError(f"expected a Wigner vector of length {4**n_expected}, got {values.size}")
    return values


def _resolve(rho: StateLike, stabs: StabilizerSet | None):
    rho = as_density(rho)
    if stabs is None:
        stabs = stabilizer_set(rho.nqubits)
    if stabs.nqubits != rho.nqubits:
        raise ValueError(f"state has {rho.nqubits} qubits but the stabilizer set has {stabs.nqubits}")
    return rho, stabs


def distance_problem(w: np.ndarray, vertices: np.ndarray) -> LPProblem:
    nv, d = vertices.shape
    eye = np.eye(d)
    a_ub = np.block([[-vertices.T, -eye], [vertices.T, -eye]])
    b_ub = np.concatenate([-w, w])
    a_eq = np.concatenate([np.ones(nv), np.zeros(d)])[None, :]
    c = np.concatenate([np.zeros(nv), np.ones(d)])
    return LPProblem(c, a_eq, [1.0], a_ub, b_ub)


def extent_problem(w: np.ndarray, vertices: np.ndarray) -> LPProblem:
    nv = vertices.shape[0]
    return LPProblem(np.ones(2 * nv), np.hstack([vertices.T, -vertices.T]), w)


def _witness(sol: LPSolution, w: np.ndarray, vertices: np.ndarray) -> DualWitness:
    d = w.size
    u, v = sol.y_ub[:d], sol.y_ub[d:]
    svec = u - v
    free_max = float((vertices @ svec).max())
    gap = float(svec @ w) - free_max
    return DualWitness(svec, inverse_wigner(svec), free_max, gap)


def distance_of_vector(w, stabs: StabilizerSet) -> Distance:
    """l1 distance from an arbitrary phase-space vector to the stabilizer polytope."""
    values = _values(w, stabs.nqubits)
    vertices = stabs.wigner_matrix
    sol = solve_certified(distance_problem(values, vertices))
    weights = np.clip(sol.x[: len(stabs)], 0.0, None)
    weights /= weights.sum()
    return Distance(max(sol.objective, 0.0), weights, _witness(sol, values, vertices))


class WarmDistance:
    """Repeated ``C`` evaluations that restart each LP from the previous optimal basis.

    Only the right-hand side of the distance LP depends on the state, so an
    earlier optimal basis stays dual feasible and a few dual simplex pivots
    usually suffice. Cold solves are used whenever the warm path fails.
    """

    def __init__(self, stabs: StabilizerSet):
        self.stabs = stabs
        self.basis = None
        self.evaluations = 0

    def __call__(self, w) -> float:
        values = _values(w, self.stabs.nqubits)
        sol = solve(distance_problem(values, self.stabs.wigner_matrix), warm_start=self.basis)
        if not sol.certified():
            sol = solve_certified(distance_problem(values, self.stabs.wigner_matrix))
        self.basis = sol.basis or None
        self.evaluations += 1
        return max(sol.objective, 0.0)


def wigner_distance(rho: StateLike, stabs: StabilizerSet | None = None) -> Distance:
    """``C(rho)`` with nearest free point (convex weights) and dual witness."""
    rho, stabs = _resolve(rho, stabs)
    return distance_of_vector(wigner(rho), stabs)


def stabilizer_extent(rho: StateLike, stabs: StabilizerSet | None = None) -> Extent:
    """Mixed-state extent: least l1 weight of a signed stabilizer decomposition."""
    rho, stabs = _resolve(rho, stabs)
    values = wigner(rho).values
    nv = len(stabs)
    sol = solve_certified(extent_problem(values, stabs.wigner_matrix))
    coeffs = sol.x[:nv] - sol.x[nv:]
    return Extent(sol.objective, StabDecomposition(coeffs, float(np.abs(coeffs).sum())))


def tightness_ratio(c: float, gamma: float, threshold: float = KAPPA_THRESHOLD) -> float | None:
    """``(gamma - 1) / c``, or ``None`` when ``c`` is too small for the ratio to mean anything."""
    if c <= threshold:
        return None
    return (gamma - 1.0) / c


def check_simulation_bound(rho: StateLike, stabs: StabilizerSet | None = None, m_n: float | None = None) -> float:
    """Slack ``Gamma - 1 - C / M_n`` of the extent lower bound; non-negative up to LP tolerance."""
    rho, stabs = _resolve(rho, stabs)
    if m_n is None:
        m_n = float(np.abs(stabs.wigner_matrix).sum(axis=1).max())
    c = wigner_distance(rho, stabs).value
    gamma = stabilizer_extent(rho, stabs).value
    return gamma - 1.0 - c / m_n


def polytope_membership(w, stabs: StabilizerSet, tol: float = MEMBERSHIP_TOL) -> bool:
    return distance_of_vector(w, stabs).value <= tol


def operator_witness_gap(op: np.ndarray, rho: StateLike, stabs: StabilizerSet | None = None) -> tuple[float, float]:
    """``(Tr(op rho) - max_sigma Tr(op sigma), max_sigma Tr(op sigma))`` over pure stabilizer states."""
    rho, stabs = _resolve(rho, stabs)
    vecs = stabs.vectors()
    free = np.real(np.einsum("ki,ij,kj->k", vecs.conj(), op, vecs))
    free_max = float(free.max())
    return float(np.real(np.trace(op @ rho.matrix))) - free_max, free_max


def extent_lower_bound(op: np.ndarray, rho: StateLike, stabs: StabilizerSet | None = None) -> tuple[float, float]:
    """Dual bound ``Gamma >= Tr(H rho) / max_sigma |Tr(H sigma)|``; returns ``(bound, scale)``."""
    rho, stabs = _resolve(rho, stabs)
    vecs = stabs.vectors()
    free = np.real(np.einsum("ki,ij,kj->k", vecs.conj(), op, vecs))
    scale = 1.0 / float(np.abs(free).max())
    return scale * float(np.real(np.trace(op @ rho.matrix))), scale


@dataclass(frozen=True)
class MagicReport:
    c: float
    gamma: float
    kappa: float | None
    witness: DualWitness
    nearest_free: np.ndarray
    decomposition: StabDecomposition

    def to_json(self) -> dict:
        return {
            "c": self.c,
            "gamma": self.gamma,
            "kappa": self.kappa,
            "witness": {
                "svec": [float(s) for s in self.witness.svec],
                "free_max": self.witness.free_max,
                "gap": self.witness.gap,
            },
            "decomposition": {str(k): v for k, v in self.decomposition.sparse().items()},
        }


def magic_report(rho: StateLike, stabs: StabilizerSet | None = None) -> MagicReport:
    rho, stabs = _resolve(rho, stabs)
    dist = wigner_distance(rho, stabs)
    ext = stabilizer_extent(rho, stabs)
    return MagicReport(
        dist.value,
        ext.value,
        tightness_ratio(dist.value, ext.value),
        dist.witness,
        dist.weights,
        ext.decomposition,
    )
