"""Numerical studies: dichotomy scans, family sweeps, sampling and searches.

Every sweep is a list of independent tasks evaluated with :func:`pmap`,
which returns results in task order, so serial and parallel runs give
identical output. Random inputs are drawn up front from one seeded
generator for the same reason.
"""

from __future__ import annotations

import csv
import json
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from datetime import datetime, timezone
from typing import Callable, Iterable, Sequence

import numpy as np

from . import families
from .families import FamilyId, closed_form, family_density
from .measures import (
    WarmDistance,
    distance_of_vector,
    stabilizer_extent,
    tightness_ratio,
    wigner_distance,
)
from .phasespace import HADAMARD_SWAP, _transform, permute_qubit_points, wigner
from .qcore import (
    I2,
    H,
    X,
    Y,
    Z,
    DensityMatrix,
    PureState,
    apply_unitary,
    as_density,
    bloch_state,
    haar_random_pure,
    kron,
)
from .stabgen import stabilizer_set

SUPERADDITIVE_TOL = 1e-8
INCREASE_TOL = 1e-8
KAPPA_TOL = 1e-6
NOISE_KAPPA_TOL = 1e-5
NOISE_ZERO_TOL = 1e-6
NOISE_MARGIN = 0.01

T_STATE = bloch_state(np.pi / 2, np.pi / 4)

REFERENCE_PHI = 1.05
REFERENCE_THETAS = (np.pi / 2, 1.2, 0.35, 1.94, 2.8)
SCAN_THETAS = tuple(sorted({float(t) for t in np.round(np.linspace(0.1, 3.04, 16), 12)} | set(REFERENCE_THETAS)))
SCAN_PHIS = (0.0, 0.7, REFERENCE_PHI, 2.1)
EQUATORIAL_RHO_PHIS = tuple(float(p) for p in np.linspace(0.0, np.pi / 2, 24))
REGRESSION_THETA_RANGE = (0.35, 1.2)


def pmap(fn: Callable, items: Sequence, threads: int | None = 1) -> list:
    """Ordered map over a process pool (serial when ``threads`` <= 1)."""
    items = list(items)
    if threads is None:
        threads = os.cpu_count() or 1
    if threads <= 1 or len(items) < 2:
        return [fn(x) for x in items]
    chunk = max(1, len(items) // (4 * threads))
    with ProcessPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(fn, items, chunksize=chunk))


def default_theta_grid(points: int = 25, lo: float = 0.05, hi: float = np.pi - 0.05) -> np.ndarray:
    """Evenly spaced θ values nudged by 1e-3 away from multiples of π/2."""
    grid = np.linspace(lo, hi, points)
    k = np.round(grid / (np.pi / 2))
    close = np.abs(grid - k * np.pi / 2) < 1e-3
    grid[close] = k[close] * np.pi / 2 + 1e-3
    return grid


def scan_grid(thetas: Iterable[float] = SCAN_THETAS, phis: Iterable[float] = SCAN_PHIS) -> list[tuple[float, float]]:
    return [(float(t), float(p)) for p in phis for t in thetas]


# ---------------------------------------------------------------- dichotomy


@dataclass(frozen=True)
class DichotomyRecord:
    theta_b: float
    phi_b: float
    bloch_sigma: tuple[float, float, float]
    z_expect: float
    c_rho: float
    c_sigma: float
    c_joint: float
    deficit: float
    superadditive: bool

    def row(self) -> dict:
        x, y, z = self.bloch_sigma
        return {
            "theta_b": self.theta_b,
            "phi_b": self.phi_b,
            "sigma_x": x,
            "sigma_y": y,
            "sigma_z": z,
            "c_rho": self.c_rho,
            "c_sigma": self.c_sigma,
            "c_joint": self.c_joint,
            "deficit": self.deficit,
            "superadditive": self.superadditive,
        }


def _bloch(rho: DensityMatrix) -> tuple[float, float, float]:
    return tuple(rho.expectation(p) for p in (X, Y, Z))


def _dichotomy_task(args) -> DichotomyRecord:
    rho_matrix, c_rho, theta_b, phi_b = args
    rho = DensityMatrix(rho_matrix)
    sigma = bloch_state(theta_b, phi_b)
    c_sigma = wigner_distance(sigma, stabilizer_set(1)).value
    c_joint = wigner_distance(rho.tensor(sigma), stabilizer_set(2)).value
    deficit = c_rho + c_sigma - c_joint
    bloch = _bloch(sigma)
    return DichotomyRecord(
        theta_b, phi_b, bloch, bloch[2], c_rho, c_sigma, c_joint, deficit, deficit <= SUPERADDITIVE_TOL
    )


def dichotomy_scan(rho, sigma_grid: Sequence[tuple[float, float]], threads: int | None = 1) -> list[DichotomyRecord]:
    """Compare ``C(rho) + C(sigma)`` with ``C(rho ⊗ sigma)`` for pure σ at Bloch angles ``(θ_B, φ_B)``."""
    rho = as_density(rho)
    if rho.nqubits != 1:
        raise ValueError("dichotomy_scan needs a single-qubit rho")
    c_rho = wigner_distance(rho, stabilizer_set(1)).value
    tasks = [(np.array(rho.matrix), c_rho, float(t), float(p)) for t, p in sigma_grid]
    return pmap(_dichotomy_task, tasks, threads)


def sign_condition_violations(records: Iterable[DichotomyRecord], tol: float = SUPERADDITIVE_TOL) -> list[DichotomyRecord]:
    """Records with a positive deficit whose σ is not in the northern hemisphere."""
    return [r for r in records if r.deficit > tol and r.z_expect <= 0]


def equatorial_state(phi: float) -> DensityMatrix:
    return bloch_state(np.pi / 2, phi)


def _equatorial_task(args) -> float:
    phi_r, phi_s = args
    rho, sigma = equatorial_state(phi_r), equatorial_state(phi_s)
    s1, s2 = stabilizer_set(1), stabilizer_set(2)
    cr = wigner_distance(rho, s1).value
    cs = wigner_distance(sigma, s1).value
    cj = wigner_distance(rho.tensor(sigma), s2).value
    return abs(cj - (cr + cs + cr * cs))


def equatorial_equality_check(phi_grid_rho, phi_grid_sigma, threads: int | None = 1) -> float:
    """Largest deviation of ``C(rho⊗sigma)`` from ``C(rho) + C(sigma) + C(rho)C(sigma)``."""
    tasks = [(float(a), float(b)) for a in phi_grid_rho for b in phi_grid_sigma]
    return float(max(pmap(_equatorial_task, tasks, threads)))


# ---------------------------------------------------------------- regression


@dataclass(frozen=True)
class RegressionResult:
    slope: float
    r_squared: float
    n_points: int
    per_sigma: tuple[tuple[float, float, float], ...] = ()  # (z_expect, slope, r_squared)
    comparable: bool = True
    regressor: str = "c_rho"


def _fit_through_origin(x: np.ndarray, y: np.ndarray) -> tuple[float, float]:
    slope = float(x @ y / (x @ x)) if x @ x > 0 else 0.0
    ss_res = float(np.sum((y - slope * x) ** 2))
    ss_tot = float(np.sum((y - y.mean()) ** 2))
    r2 = 1.0 - ss_res / ss_tot if ss_tot > 0 else (1.0 if ss_res == 0 else 0.0)
    return slope, r2


def deficit_regression(records: Sequence[DichotomyRecord], min_points: int = 8) -> RegressionResult:
    """Least-squares slope of the deficit against ``C(rho)`` through the origin.

    Only northern σ records enter. Slopes are fitted per σ and for the pooled
    pairs; the pooled fit is the headline result. When all records share one
    ``C(rho)`` the deficit is regressed on ``z`` instead and the result is
    flagged as not comparable with the ``C(rho)`` coefficient.
    """
    north = [r for r in records if r.z_expect > 0]
    if not north:
        raise ValueError("no northern records (z_expect > 0) to regress")
    if len(north) < min_points:
        raise ValueError(f"need at least {min_points} northern records, got {len(north)}")
    c = np.array([r.c_rho for r in north])
    d = np.array([r.deficit for r in north])
    if np.ptp(c) < 1e-9:
        z = np.array([r.z_expect for r in north])
        slope, r2 = _fit_through_origin(z, d)
        return RegressionResult(slope, r2, len(north), (), False, "z_expect")
    groups: dict[tuple[float, float], list[DichotomyRecord]] = {}
    for r in north:
        groups.setdefault((round(r.theta_b, 12), round(r.phi_b, 12)), []).append(r)
    per_sigma = []
    for key in sorted(groups):
        rs = groups[key]
        s, r2 = _fit_through_origin(np.array([r.c_rho for r in rs]), np.array([r.deficit for r in rs]))
        per_sigma.append((rs[0].z_expect, s, r2))
    slope, r2 = _fit_through_origin(c, d)
    return RegressionResult(slope, r2, len(north), tuple(per_sigma))


def regression_sigmas(phi_b: float = REFERENCE_PHI, theta_range=REGRESSION_THETA_RANGE) -> list[tuple[float, float]]:
    lo, hi = theta_range
    return [(t, phi_b) for t in SCAN_THETAS if lo - 1e-12 <= t <= hi + 1e-12]


def regression_records(
    rho_phis: Sequence[float] = EQUATORIAL_RHO_PHIS,
    sigmas: Sequence[tuple[float, float]] | None = None,
    threads: int | None = 1,
) -> list[DichotomyRecord]:
    """Dichotomy records for equatorial rho at each φ against a fixed set of northern σ."""
    if sigmas is None:
        sigmas = regression_sigmas()
    out: list[DichotomyRecord] = []
    for phi in rho_phis:
        out.extend(dichotomy_scan(equatorial_state(phi), sigmas, threads))
    return out


# ---------------------------------------------------------------- family sweeps


@dataclass(frozen=True)
class FamilyRecord:
    family: str
    theta: float
    c_lp: float
    c_closed: float
    gamma_lp: float
    gamma_closed: float
    kappa: float | None
    neg_entries: int
    witness_gap: float


def _family_task(args) -> FamilyRecord:
    family, theta = args
    rho = family_density(family, theta)
    stabs = stabilizer_set(2)
    dist = wigner_distance(rho, stabs)
    gamma = stabilizer_extent(rho, stabs).value
    c_closed, g_closed, _ = closed_form(family, theta)
    return FamilyRecord(
        FamilyId.parse(family).value,
        float(theta),
        dist.value,
        c_closed,
        gamma,
        g_closed,
        tightness_ratio(dist.value, gamma),
        wigner(rho).negative_count(),
        dist.witness.gap,
    )


def kappa_sweep(family, theta_grid=None, threads: int | None = 1) -> list[FamilyRecord]:
    family = FamilyId.parse(family)
    if theta_grid is None:
        theta_grid = default_theta_grid()
    return pmap(_family_task, [(family, float(t)) for t in theta_grid], threads)


def kappa_is_constant(records: Sequence[FamilyRecord], tol: float = KAPPA_TOL) -> bool:
    if not records:
        return False
    target = families.KAPPA[FamilyId.parse(records[0].family)]
    return all(r.kappa is not None and abs(r.kappa - target) <= tol for r in records)


@dataclass(frozen=True)
class NoiseRecord:
    p: float
    c: float
    gamma: float
    kappa: float | None


def _noise_task(args) -> NoiseRecord:
    family, theta, p, channel = args
    rho = families.CHANNELS[channel](family_density(family, theta), p)
    stabs = stabilizer_set(2)
    c = wigner_distance(rho, stabs).value
    gamma = stabilizer_extent(rho, stabs).value
    return NoiseRecord(float(p), c, gamma, tightness_ratio(c, gamma))


def noise_sweep(family, theta: float, p_grid, channel: str = "global", threads: int | None = 1) -> list[NoiseRecord]:
    """C, Γ and κ of a family state under depolarizing noise.

    ``channel`` is ``"global"`` for ``(1-p) rho + p I/4`` or ``"codespace"``
    for ``(1-p) rho + p Π/2`` with Π the codespace projector.
    """
    family = FamilyId.parse(family)
    if family not in (FamilyId.RY, FamilyId.RX):
        raise ValueError("noise sweeps are defined for the Ry and Rx families")
    if channel not in families.CHANNELS:
        raise ValueError(f"unknown channel {channel!r}; expected one of {sorted(families.CHANNELS)}")
    ps = [float(p) for p in p_grid]
    if any(not 0.0 <= p < 1.0 for p in ps):
        raise ValueError("noise levels must lie in [0, 1)")
    return pmap(_noise_task, [(family, float(theta), p, channel) for p in ps], threads)


@dataclass(frozen=True)
class RigidityCheck:
    p_star: float
    kappa_ok: bool
    vanishing_ok: bool
    worst_kappa_error: float
    largest_c_above: float


def check_rigidity(family, theta: float, records: Sequence[NoiseRecord]) -> RigidityCheck:
    """κ at the family constant below ``p* - 0.01`` and ``C`` ~ 0 above ``p* + 0.01``."""
    target = families.KAPPA[FamilyId.parse(family)]
    p_star = families.critical_noise(theta)
    below = [r for r in records if r.p <= p_star - NOISE_MARGIN]
    above = [r for r in records if r.p >= p_star + NOISE_MARGIN]
    errs = [abs(r.kappa - target) if r.kappa is not None else np.inf for r in below]
    worst = float(max(errs, default=0.0))
    largest = float(max((r.c for r in above), default=0.0))
    return RigidityCheck(p_star, worst <= NOISE_KAPPA_TOL, largest <= NOISE_ZERO_TOL, worst, largest)


# ---------------------------------------------------------------- Clifford (non-)monotonicity


H_I = kron(H, I2)


@dataclass(frozen=True)
class MonotonicityStats:
    n_samples: int
    fraction_increased: float
    max_increase: float
    seed: int | None
    n_changed: int = 0
    fraction_increased_among_changed: float = 0.0
    pairs: tuple[tuple[float, float], ...] = field(default=(), repr=False)  # (before, after)


def _monotonicity_task(amps) -> tuple[float, float]:
    stabs = stabilizer_set(2)
    rho = PureState(np.asarray(amps)).density()
    before = wigner_distance(rho, stabs).value
    after = wigner_distance(apply_unitary(rho, H_I), stabs).value
    return before, after


def monotonicity_from_states(states, seed: int | None = None, threads: int | None = 1) -> MonotonicityStats:
    """Effect of ``H ⊗ I`` on C; pairs with both values <= 1e-8 count as unchanged."""
    amps = [np.array(s.amplitudes if isinstance(s, PureState) else s, dtype=complex) for s in states]
    pairs = pmap(_monotonicity_task, amps, threads)
    delta = np.array([a - b for b, a in pairs])
    both_free = np.array([max(b, a) <= INCREASE_TOL for b, a in pairs])
    delta[both_free] = 0.0
    increased = delta > INCREASE_TOL
    changed = np.abs(delta) > INCREASE_TOL
    n = len(pairs)
    return MonotonicityStats(
        n,
        float(increased.sum() / n) if n else 0.0,
        float(max(delta.max(initial=0.0), 0.0)),
        seed,
        int(changed.sum()),
        float(increased.sum() / changed.sum()) if changed.any() else 0.0,
        tuple(pairs),
    )


def monotonicity_sample(n_samples: int, seed: int, threads: int | None = 1) -> MonotonicityStats:
    if n_samples < 100:
        raise ValueError("monotonicity_sample needs at least 100 samples")
    rng = np.random.default_rng(seed)
    states = [haar_random_pure(2, rng) for _ in range(n_samples)]
    return monotonicity_from_states(states, seed, threads)


def permuted_stabilizers_outside(perm: Sequence[int] = HADAMARD_SWAP, qubit: int = 0) -> int:
    """How many stabilizer Wigner vectors leave the polytope after relabelling one qubit's points."""
    stabs = stabilizer_set(2)
    count = 0
    for s in stabs:
        moved = permute_qubit_points(s.wigner, qubit, perm)
        if distance_of_vector(moved, stabs).value > 1e-9:
            count += 1
    return count


# ---------------------------------------------------------------- tensor products


def _self_tensor_task(matrix) -> float:
    rho = DensityMatrix(matrix)
    c1 = wigner_distance(rho, stabilizer_set(1)).value
    c2 = wigner_distance(rho.tensor(rho), stabilizer_set(2)).value
    return c2 - 2 * c1


def self_tensor_check(rhos, threads: int | None = 1) -> tuple[float, list[float]]:
    """Margins ``C(rho⊗rho) - 2C(rho)`` and their minimum."""
    mats = [np.array(as_density(r).matrix) for r in rhos]
    margins = pmap(_self_tensor_task, mats, threads)
    return float(min(margins)), margins


def _submult_task(args) -> float:
    a, b = (DensityMatrix(m) for m in args)
    s1, s2 = stabilizer_set(1), stabilizer_set(2)
    ga = stabilizer_extent(a, s1).value
    gb = stabilizer_extent(b, s1).value
    return ga * gb - stabilizer_extent(a.tensor(b), s2).value


def submultiplicativity_check(pairs, threads: int | None = 1, min_pairs: int = 50) -> tuple[float, list[float]]:
    """Slacks ``Γ(rho)Γ(sigma) - Γ(rho⊗sigma)`` and their minimum."""
    pairs = [(np.array(as_density(a).matrix), np.array(as_density(b).matrix)) for a, b in pairs]
    if len(pairs) < min_pairs:
        raise ValueError(f"need at least {min_pairs} pairs, got {len(pairs)}")
    slacks = pmap(_submult_task, pairs, threads)
    return float(min(slacks)), slacks


def haar_pairs(n_pairs: int, seed: int) -> list[tuple[PureState, PureState]]:
    rng = np.random.default_rng(seed)
    return [(haar_random_pure(1, rng), haar_random_pure(1, rng)) for _ in range(n_pairs)]


# ---------------------------------------------------------------- max-C search

_GOLDEN = (np.sqrt(5) - 1) / 2


def chart_state(x: Sequence[float]) -> np.ndarray:
    """Pure two-qubit amplitudes from three angles and three relative phases."""
    a, b, c, p1, p2, p3 = x
    return np.array(
        [
            np.cos(a),
            np.sin(a) * np.cos(b) * np.exp(1j * p1),
            np.sin(a) * np.sin(b) * np.cos(c) * np.exp(1j * p2),
            np.sin(a) * np.sin(b) * np.sin(c) * np.exp(1j * p3),
        ]
    )


def _golden_max(f, lo: float, hi: float, tol: float) -> tuple[float, float]:
    a, b = lo, hi
    c, d = b - _GOLDEN * (b - a), a + _GOLDEN * (b - a)
    fc, fd = f(c), f(d)
    while b - a > tol:
        if fc > fd:
            b, d, fd = d, c, fc
            c = b - _GOLDEN * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + _GOLDEN * (b - a)
            fd = f(d)
    return (c, fc) if fc > fd else (d, fd)


def coordinate_search(
    f, x0, sweeps: int = 30, step: float = 0.5, min_step: float = 1e-3, tol: float = 1e-4
) -> tuple[float, np.ndarray]:
    """Maximize ``f`` by golden-section line searches along each coordinate in turn.

    The bracket half-width starts at ``step`` and halves whenever a full sweep
    gains less than 1e-6; the search stops once a sweep at ``min_step`` makes
    no progress.
    """
    x = np.array(x0, dtype=float)
    best = f(x)
    h = step
    for _ in range(sweeps):
        start = best
        for k in range(x.size):

            def line(t, k=k):
                y = x.copy()
                y[k] = t
                return f(y)

            t, v = _golden_max(line, x[k] - h, x[k] + h, tol)
            if v > best:
                x[k], best = t, v
        if best - start < 1e-6:
            if h <= min_step:
                break
            h = max(h / 2, min_step)
    return best, x


@dataclass(frozen=True)
class MaxCResult:
    value: float
    state: np.ndarray
    neg_entries: int
    restart_values: tuple[float, ...] = field(default=(), repr=False)
    restart_neg_entries: tuple[int, ...] = field(default=(), repr=False)
    seed: int | None = None


def _max_c_task(x0) -> tuple[float, np.ndarray]:
    evaluate = WarmDistance(stabilizer_set(2))
    transform = _transform(2)

    def f(x):
        v = chart_state(x)
        return evaluate((transform @ np.outer(v, v.conj()).ravel()).real)

    return coordinate_search(f, x0)


def max_c_search(restarts: int, seed: int, threads: int | None = 1, starts=None) -> MaxCResult:
    """Multi-start maximization of ``C`` over pure two-qubit states."""
    if starts is None:
        if restarts < 20:
            raise ValueError("max_c_search needs at least 20 restarts")
        rng = np.random.default_rng(seed)
        starts = [
            np.concatenate([rng.uniform(0, np.pi / 2, 3), rng.uniform(0, 2 * np.pi, 3)]) for _ in range(restarts)
        ]
    results = pmap(_max_c_task, [np.asarray(s, dtype=float) for s in starts], threads)
    values = [v for v, _ in results]
    negs = [wigner(chart_state(x)).negative_count() for _, x in results]
    k = int(np.argmax(values))
    state = chart_state(results[k][1])
    return MaxCResult(values[k], state, negs[k], tuple(values), tuple(negs), seed)


# ---------------------------------------------------------------- negative-entry scan


@dataclass(frozen=True)
class NegativeScan:
    max_count: int
    histogram: dict[int, int]
    violations: tuple[np.ndarray, ...] = field(default=(), repr=False)


def six_negative_scan(n_samples: int, seed: int, bound: int = 6) -> NegativeScan:
    """Largest number of negative Wigner entries over Haar-random pure two-qubit states.

    States exceeding ``bound`` are kept in ``violations`` for inspection.
    """
    rng = np.random.default_rng(seed)
    hist: dict[int, int] = {}
    bad = []
    for _ in range(n_samples):
        psi = haar_random_pure(2, rng)
        k = wigner(psi).negative_count()
        hist[k] = hist.get(k, 0) + 1
        if k > bound:
            bad.append(np.array(psi.amplitudes))
    return NegativeScan(max(hist, default=0), dict(sorted(hist.items())), tuple(bad))


# ---------------------------------------------------------------- output


def format_value(v) -> str:
    if v is None:
        return "NA"
    if isinstance(v, (bool, np.bool_)):
        return "true" if v else "false"
    if isinstance(v, (float, np.floating)):
        return f"{float(v):.12g}"
    return str(v)


def write_csv(path, rows: Sequence[dict], columns: Sequence[str] | None = None) -> None:
    rows = list(rows)
    if columns is None:
        columns = list(rows[0]) if rows else []
    with open(path, "w", newline="") as fh:
        out = csv.writer(fh, lineterminator="\n")
        out.writerow(columns)
        for row in rows:
            out.writerow([format_value(row.get(c)) for c in columns])


def record_rows(records) -> list[dict]:
    return [r.row() if hasattr(r, "row") else asdict(r) for r in records]


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _jsonable(obj.tolist())
    if isinstance(obj, complex):
        return [obj.real, obj.imag]
    if isinstance(obj, (np.floating, np.integer, np.bool_)):
        return obj.item()
    return obj


def write_summary(path, summary: dict, timestamp: bool = True) -> None:
    data = dict(_jsonable(summary))
    if timestamp:
        data["timestamp"] = datetime.now(timezone.utc).isoformat(timespec="seconds")
    with open(path, "w") as fh:
        json.dump(data, fh, indent=2, sort_keys=True)
        fh.write("\n")
