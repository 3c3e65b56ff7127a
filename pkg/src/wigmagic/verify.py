"""Invariant suites behind ``wigmagic verify``.

Each check returns a :class:`Check`; nothing raises on a failed invariant.
Sample sizes are small so the whole suite runs in well under a minute; the
test suite repeats the same properties at full size.
"""

from __future__ import annotations

from typing import Callable, NamedTuple

import numpy as np

from . import experiments as ex
from . import families
from .families import FamilyId
from .lpsolve import FEAS_TOL
from .measures import (
    check_simulation_bound,
    operator_witness_gap,
    stabilizer_extent,
    wigner_distance,
)
from .phasespace import inverse_wigner, max_stab_l1, phase_point_operators, wigner
from .qcore import (
    DensityMatrix,
    apply_unitary,
    bloch_state,
    haar_random_pure,
    random_density,
    single_qubit_cliffords,
)
from .stabgen import enumerate_stabilizers, expected_count, stabilizer_set


class Check(NamedTuple):
    name: str
    passed: bool
    detail: str


def _check(name: str, fn: Callable[[], tuple[bool, str]]) -> Check:
    try:
        ok, detail = fn()
    except Exception as exc:  # a crashing invariant is a failed invariant
        return Check(name, False, f"{type(exc).__name__}: {exc}")
    return Check(name, bool(ok), detail)


def _random_states(n: int, count: int, rng) -> list[DensityMatrix]:
    out = []
    for k in range(count):
        if k % 2:
            out.append(random_density(n, rng))
        else:
            out.append(haar_random_pure(n, rng).density())
    return out


def run_checks(n: int, seed: int, tolerances: dict, include_experiments: bool = False) -> list[Check]:
    rng = np.random.default_rng(seed)
    lp_tol = tolerances.get("lp_gap", 1e-7)
    cf_tol = tolerances.get("closed_form", 1e-7)
    a_tol = tolerances.get("assert", 1e-8)
    checks: list[Check] = []
    add = lambda name, fn: checks.append(_check(name, fn))  # noqa: E731
    ns = list(range(1, n + 1))

    def counts():
        got = {k: len(enumerate_stabilizers(k)) for k in ns}
        return all(got[k] == expected_count(k) for k in ns), f"counts {got}"

    add("stabilizer-counts", counts)

    def wigner_invariants():
        worst = 0.0
        for k in ns:
            for rho in _random_states(k, 20, rng):
                w = wigner(rho)
                worst = max(worst, abs(w.values.sum() - 1), np.abs(inverse_wigner(w) - rho.matrix).max())
            for _ in range(10):
                psi = haar_random_pure(k, rng)
                worst = max(worst, abs((wigner(psi).values ** 2).sum() - 2.0**-k))
        return worst <= 1e-10, f"max deviation {worst:.2e}"

    add("wigner-normalization-roundtrip-purity", wigner_invariants)

    def factorization():
        worst = 0.0
        for _ in range(20):
            a, b = random_density(1, rng), random_density(1, rng)
            worst = max(worst, np.abs(wigner(a.tensor(b)).values - np.kron(wigner(a).values, wigner(b).values)).max())
        return worst <= 1e-12, f"max deviation {worst:.2e}"

    add("wigner-factorization", factorization)

    def phase_point_trace():
        worst = 0.0
        for k in ns:
            ops = phase_point_operators(k)
            worst = max(worst, np.abs(np.einsum("aii->a", ops) - 1).max())
            gram = np.einsum("aij,bji->ab", ops, ops).real
            worst = max(worst, np.abs(gram - 2**k * np.eye(4**k)).max())
        return worst <= 1e-12, f"max deviation {worst:.2e}"

    add("phase-point-orthogonality", phase_point_trace)

    def max_l1():
        vals = {k: max_stab_l1(stabilizer_set(k)) for k in ns if k <= 2}
        expected = {1: 1.0, 2: 2.0}
        return all(abs(vals[k] - expected[k]) <= 1e-9 for k in vals), f"M_n {vals}"

    add("max-stabilizer-l1", max_l1)

    def faithfulness():
        worst = 0.0
        for k in ns:
            if k > 2:
                continue
            stabs = stabilizer_set(k)
            for s in stabs:
                worst = max(worst, wigner_distance(s.density(), stabs).value)
        return worst <= 1e-9, f"max C on stabilizer states {worst:.2e}"

    add("faithfulness", faithfulness)

    def witnesses():
        worst_gap, worst_norm, worst_free = 0.0, 0.0, 0.0
        for k in [k for k in ns if k <= 2]:
            stabs = stabilizer_set(k)
            for rho in _random_states(k, 10, rng):
                d = wigner_distance(rho, stabs)
                w = d.witness
                worst_gap = max(worst_gap, abs(w.gap - d.value))
                worst_norm = max(worst_norm, np.abs(w.svec).max() - 1)
                worst_free = max(worst_free, (stabs.wigner_matrix @ w.svec).max() - w.free_max)
        ok = worst_gap <= lp_tol and worst_norm <= FEAS_TOL and worst_free <= 1e-9
        return ok, f"gap error {worst_gap:.2e}, |S|-1 {worst_norm:.2e}"

    add("dual-witness", witnesses)

    def extent():
        worst = 0.0
        low = np.inf
        for k in [k for k in ns if k <= 2]:
            stabs = stabilizer_set(k)
            for rho in _random_states(k, 6, rng):
                e = stabilizer_extent(rho, stabs)
                worst = max(worst, np.abs(e.decomposition.reconstruct(stabs) - wigner(rho).values).max())
                low = min(low, e.value)
        return worst <= 1e-9 and low >= 1 - 1e-9, f"reconstruction {worst:.2e}, min Gamma {low:.6f}"

    add("extent-decomposition", extent)

    def convexity():
        worst = -np.inf
        k = min(n, 2)
        stabs = stabilizer_set(k)
        for _ in range(4):
            r1, r2 = haar_random_pure(k, rng).density(), haar_random_pure(k, rng).density()
            c1, c2 = wigner_distance(r1, stabs).value, wigner_distance(r2, stabs).value
            for p in np.linspace(0.1, 0.9, 9):
                mix = r1.mix(r2, p)
                worst = max(worst, wigner_distance(mix, stabs).value - (p * c1 + (1 - p) * c2))
        return worst <= a_tol, f"max excess {worst:.2e}"

    add("convexity", convexity)

    def clifford_invariance():
        # single-qubit states only: on two qubits H ⊗ I already changes C
        worst = 0.0
        stabs = stabilizer_set(1)
        for rho in _random_states(1, 4, rng):
            c0 = wigner_distance(rho, stabs).value
            for u in single_qubit_cliffords():
                worst = max(worst, abs(wigner_distance(apply_unitary(rho, u), stabs).value - c0))
        return worst <= a_tol, f"max change {worst:.2e} over 24 Cliffords"

    add("clifford-invariance", clifford_invariance)

    def lipschitz():
        worst = -np.inf
        k = min(n, 2)
        stabs = stabilizer_set(k)
        for _ in range(10):
            a, b = random_density(k, rng), random_density(k, rng)
            lhs = abs(wigner_distance(a, stabs).value - wigner_distance(b, stabs).value)
            worst = max(worst, lhs - np.abs(wigner(a).values - wigner(b).values).sum())
        return worst <= a_tol, f"max excess {worst:.2e}"

    add("lipschitz", lipschitz)

    if n >= 2:
        stabs2 = stabilizer_set(2)
        grid = ex.default_theta_grid(9)

        def family_closed_forms():
            worst = 0.0
            bad_kappa = 0
            for fam in FamilyId:
                for r in ex.kappa_sweep(fam, grid):
                    worst = max(worst, abs(r.c_lp - r.c_closed), abs(r.gamma_lp - r.gamma_closed))
                    if r.kappa is None or abs(r.kappa - families.KAPPA[fam]) > 1e-6:
                        bad_kappa += 1
            return worst <= cf_tol and bad_kappa == 0, f"max error {worst:.2e}, kappa off at {bad_kappa} points"

        add("family-closed-forms", family_closed_forms)

        def family_witnesses():
            worst = 0.0
            commute = 0.0
            zz = families.DEFAULT_FRAME.stabilizer
            for fam in FamilyId:
                for t in grid:
                    h = families.closed_form_witness(fam, t)
                    gap, _ = operator_witness_gap(h, families.family_density(fam, t), stabs2)
                    worst = max(worst, abs(gap - families.closed_form(fam, t)[0]))
                    commute = max(commute, np.abs(h @ zz - zz @ h).max())
            return worst <= cf_tol and commute == 0.0, f"gap error {worst:.2e}, commutator {commute:.1e}"

        add("family-witnesses", family_witnesses)

        def negative_counts():
            expected = {FamilyId.RY: 4, FamilyId.RX: 2, FamilyId.BELL_RZ: 4}
            bad = [
                (fam.value, round(t, 4))
                for fam in FamilyId
                for t in grid
                if wigner(families.family_density(fam, t)).negative_count() != expected[fam]
            ]
            return not bad, f"mismatches {bad}" if bad else "4 / 2 / 4 on the grid"

        add("family-negative-counts", negative_counts)

        def bell_closed_form():
            worst = 0.0
            for t in np.linspace(0, 2 * np.pi, 17):
                direct = wigner(families.family_density(FamilyId.BELL_RZ, t)).values
                worst = max(worst, np.abs(direct - families.brz_wigner_closed_form(t).values).max())
            return worst <= 1e-10, f"max deviation {worst:.2e}"

        add("bell-orbit-closed-form", bell_closed_form)

        def ry_decomposition():
            worst, wt = 0.0, 0.0
            for t in np.linspace(0.1, 1.4, 7):
                terms = families.ry_decomposition(t)
                rec = sum(c * m for c, m in terms)
                worst = max(worst, np.abs(rec - families.family_density(FamilyId.RY, t).matrix).max())
                wt = max(wt, abs(sum(abs(c) for c, _ in terms) - (np.sin(t) + np.cos(t))))
            return worst <= 1e-12 and wt <= 1e-12, f"reconstruction {worst:.2e}, weight error {wt:.2e}"

        add("ry-three-term-decomposition", ry_decomposition)

        def fault_tolerance():
            worst = 0.0
            for fam in FamilyId:
                for t in grid:
                    rho = families.family_density(fam, t)
                    c0 = wigner_distance(rho, stabs2).value
                    for err in ("XI", "IX"):
                        back = families.correctable_error_roundtrip(rho, err)
                        worst = max(worst, abs(wigner_distance(back, stabs2).value - c0))
            return worst <= 1e-9, f"max change {worst:.2e}"

        add("correctable-error-roundtrip", fault_tolerance)

        def simulation_bound():
            m2 = max_stab_l1(stabs2)
            worst = min(check_simulation_bound(r, stabs2, m2) for r in _random_states(2, 10, rng))
            return worst >= -a_tol, f"min slack {worst:.3e}"

        add("simulation-bound", simulation_bound)

    if include_experiments:

        def sign_condition():
            recs = ex.dichotomy_scan(ex.T_STATE, ex.scan_grid())
            bad = ex.sign_condition_violations(recs)
            return not bad, f"{len(bad)} violations on {len(recs)} scan points"

        add("sign-condition", sign_condition)

        def universality():
            grid_pts = ex.scan_grid(phis=(ex.REFERENCE_PHI,))
            patterns = []
            for theta_r in (0.6, np.pi / 2, 2.5):
                recs = ex.dichotomy_scan(bloch_state(theta_r, np.pi / 4), grid_pts)
                patterns.append(tuple(r.superadditive for r in recs))
            same = all(p == patterns[0] for p in patterns)
            return same, "flag patterns agree" if same else "flag patterns differ between rho"

        add("dichotomy-universality", universality)

        def determinism():
            a = ex.monotonicity_sample(100, seed)
            b = ex.monotonicity_sample(100, seed)
            same = a == b
            return same, "identical statistics for a repeated seed" if same else "statistics differ"

        add("determinism", determinism)

    return checks
