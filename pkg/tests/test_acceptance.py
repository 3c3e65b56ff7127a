"""Acceptance gate: one PASS/FAIL line per criterion, printed in the terminal summary.

Run with ``pytest tests/test_acceptance.py`` or ``python tests/test_acceptance.py``.
"""

import sys

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import conftest
from wigmagic import experiments as ex
from wigmagic.families import (
    DEFAULT_FRAME,
    KAPPA,
    FamilyId,
    brz_wigner_closed_form,
    closed_form_witness,
    correctable_error_roundtrip,
    critical_noise,
    family_density,
)
from wigmagic.measures import (
    check_simulation_bound,
    polytope_membership,
    wigner_distance,
)
from wigmagic.phasespace import inverse_wigner, max_stab_l1, wigner
from wigmagic.qcore import apply_unitary, haar_random_pure, random_density, single_qubit_cliffords
from wigmagic.stabgen import enumerate_stabilizers, stabilizer_set

SEED = 2024
REFERENCE_EXPECTED = ((0.427, True), (0.454, False), (0.332, False), (0.590, True), (0.450, True))


def record(n: int, passed: bool, detail: str) -> None:
    line = f"criterion {n}: {'PASS' if passed else 'FAIL'} {detail}"
    conftest.ACCEPTANCE_LINES.append(line)
    print(line)
    assert passed, line


def family_grid():
    return [(fam, float(t)) for fam in FamilyId for t in ex.default_theta_grid()]


def test_criterion_01_stabilizer_counts(tmp_path):
    counts = [len(enumerate_stabilizers(n, cache=True, directory=tmp_path)) for n in (1, 2, 3)]
    record(1, counts == [6, 60, 1080], f"counts {counts}")


def test_criterion_02_wigner_invariants():
    rng = np.random.default_rng(SEED)
    norm = roundtrip = purity = 0.0
    for n in (1, 2):
        for _ in range(200):
            rho = random_density(n, rng)
            w = wigner(rho)
            norm = max(norm, abs(w.values.sum() - 1))
            roundtrip = max(roundtrip, np.abs(inverse_wigner(w) - rho.matrix).max())
            psi = haar_random_pure(n, rng)
            purity = max(purity, abs((wigner(psi).values ** 2).sum() - 2.0**-n))
    fact = 0.0
    for _ in range(100):
        a, b = random_density(1, rng), random_density(1, rng)
        fact = max(fact, np.abs(wigner(a.tensor(b)).values - np.kron(wigner(a).values, wigner(b).values)).max())
    ok = norm <= 1e-10 and roundtrip <= 1e-10 and purity <= 1e-10 and fact <= 1e-12
    record(2, ok, f"norm {norm:.1e}, roundtrip {roundtrip:.1e}, purity {purity:.1e}, factorization {fact:.1e}")


def test_criterion_03_max_stabilizer_l1():
    m1, m2 = max_stab_l1(stabilizer_set(1)), max_stab_l1(stabilizer_set(2))
    record(3, abs(m1 - 1) <= 1e-9 and abs(m2 - 2) <= 1e-9, f"M_1={m1:.12g}, M_2={m2:.12g}")


def test_criterion_04_family_closed_forms():
    recs = [r for fam in FamilyId for r in ex.kappa_sweep(fam)]
    c_err = max(abs(r.c_lp - r.c_closed) for r in recs)
    g_err = max(abs(r.gamma_lp - r.gamma_closed) for r in recs)
    k_err = max(abs(r.kappa - KAPPA[FamilyId.parse(r.family)]) if r.kappa is not None else np.inf for r in recs)
    ok = len(recs) == 75 and c_err <= 1e-7 and g_err <= 1e-7 and k_err <= 1e-6
    record(4, ok, f"{len(recs)} points, |dC| {c_err:.1e}, |dGamma| {g_err:.1e}, |dkappa| {k_err:.1e}")


def test_criterion_05_witness_gaps():
    stabs = stabilizer_set(2)
    worst = 0.0
    for fam, t in family_grid():
        d = wigner_distance(family_density(fam, t), stabs)
        worst = max(worst, abs(d.witness.gap - d.value))
    rng = np.random.default_rng(SEED)
    worst_random = 0.0
    for _ in range(100):
        d = wigner_distance(haar_random_pure(2, rng), stabs)
        worst_random = max(worst_random, abs(d.witness.gap - d.value))
    ok = worst <= 1e-7 and worst_random <= 1e-7
    record(5, ok, f"family {worst:.1e}, random {worst_random:.1e}")


def test_criterion_06_bell_orbit_closed_form():
    grid = np.concatenate([ex.default_theta_grid(), -ex.default_theta_grid()])
    err = max(np.abs(wigner(family_density("BellRz", t)).values - brz_wigner_closed_form(t).values).max() for t in grid)
    counts = {wigner(family_density("BellRz", t)).negative_count() for t in grid}
    record(6, err <= 1e-10 and counts == {4}, f"max error {err:.1e}, negative counts {sorted(counts)}")


def test_criterion_07_reference_rows():
    recs = ex.dichotomy_scan(ex.T_STATE, [(t, ex.REFERENCE_PHI) for t in ex.REFERENCE_THETAS])
    rows = []
    ok = True
    for rec, (c_exp, flag) in zip(recs, REFERENCE_EXPECTED):
        ok &= abs(rec.c_joint - c_exp) <= 0.002 and rec.superadditive == flag
        rows.append(f"{rec.c_joint:.4f}{'+' if rec.superadditive else '-'}")
    record(7, ok, "C_joint " + " ".join(rows))


@pytest.mark.slow
def test_criterion_08_deficit_regression_and_sign_condition():
    res = ex.deficit_regression(ex.regression_records())
    scan = ex.dichotomy_scan(ex.T_STATE, ex.scan_grid())
    viol = ex.sign_condition_violations(scan)
    ok = 0.30 <= res.slope <= 0.37 and res.r_squared >= 0.95 and not viol
    where = sorted({round(r.phi_b, 3) for r in viol})
    record(
        8,
        ok,
        f"slope {res.slope:.4f}, R^2 {res.r_squared:.4f} over {res.n_points} points; "
        f"{len(viol)} sign violations of {len(scan)} (phi_B {where})",
    )


def test_criterion_09_equatorial_multiplicativity():
    phis = np.linspace(0, 2 * np.pi, 12, endpoint=False)
    resid = ex.equatorial_equality_check(phis, phis)
    record(9, resid <= 1e-8, f"max residual {resid:.1e} over 12x12")


def test_criterion_10_noise_rigidity():
    parts = []
    ok = True
    for theta in (np.pi / 6, np.pi / 4, np.pi / 3):
        p_star = critical_noise(theta)
        grid = np.round(np.arange(0.0, 0.5 + 1e-12, 0.01), 12)
        recs = ex.noise_sweep("Rx", theta, grid)
        chk = ex.check_rigidity("Rx", theta, recs)
        ok &= chk.kappa_ok and chk.vanishing_ok
        parts.append(
            f"theta={theta:.4f}: p*={p_star:.4f}, |dkappa| {chk.worst_kappa_error:.1e}, "
            f"max C above {chk.largest_c_above:.3g}"
        )
    record(10, ok, "; ".join(parts))


@pytest.mark.slow
def test_criterion_11_non_monotonicity():
    stats = ex.monotonicity_sample(2000, SEED)
    outside = ex.permuted_stabilizers_outside()
    ok = 0.44 <= stats.fraction_increased <= 0.54 and stats.max_increase >= 0.10 and outside == 24
    record(
        11,
        ok,
        f"increase fraction {stats.fraction_increased:.4f} ({stats.fraction_increased_among_changed:.4f} "
        f"of {stats.n_changed} changed), max increase {stats.max_increase:.4f}, {outside}/60 permuted outside",
    )


def test_criterion_12_bounds():
    stabs = stabilizer_set(2)
    m2 = max_stab_l1(stabs)
    rng = np.random.default_rng(SEED)
    sim = min(check_simulation_bound(haar_random_pure(2, rng), stabs, m2) for _ in range(500))
    sub, _ = ex.submultiplicativity_check(ex.haar_pairs(200, SEED))
    record(12, sim >= -1e-8 and sub >= -1e-7, f"simulation slack min {sim:.3g}, submultiplicativity slack min {sub:.3g}")


@pytest.mark.slow
def test_criterion_13_max_c():
    res = ex.max_c_search(50, SEED)
    ok = res.value >= 0.86 and res.neg_entries == 6
    record(13, ok, f"max C {res.value:.7f} with {res.neg_entries} negative entries")


def test_criterion_14_fault_tolerance():
    stabs = stabilizer_set(2)
    worst = 0.0
    commute = True
    for fam, t in family_grid():
        rho = family_density(fam, t)
        c0 = wigner_distance(rho, stabs).value
        for err in ("XI", "IX"):
            worst = max(worst, abs(wigner_distance(correctable_error_roundtrip(rho, err), stabs).value - c0))
        h = closed_form_witness(fam, t)
        zz = DEFAULT_FRAME.stabilizer
        commute &= np.array_equal(h @ zz, zz @ h)
    record(14, worst <= 1e-9 and commute, f"max |dC| {worst:.1e}, witnesses commute with ZZ: {commute}")


seeds = st.integers(0, 2**32 - 1)


def test_criterion_15_structural_properties():
    s1, s2 = stabilizer_set(1), stabilizer_set(2)

    def faithfulness():
        zero = max(wigner_distance(s.density(), st_).value for st_ in (s1, s2) for s in st_)
        assert zero == 0.0
        for fam, t in family_grid():
            assert wigner_distance(family_density(fam, t), s2).value > 1e-6

        @given(seeds)
        def membership_agrees(seed):
            rho = random_density(2, seed)
            inside = wigner_distance(rho, s2).value <= 1e-9
            assert inside == polytope_membership(wigner(rho), s2)

        membership_agrees()

    @settings(max_examples=60)
    @given(seeds, seeds)
    def convexity(a, b):
        ra, rb = haar_random_pure(2, a).density(), haar_random_pure(2, b).density()
        ca, cb = wigner_distance(ra, s2).value, wigner_distance(rb, s2).value
        for p in np.round(np.arange(0.1, 0.91, 0.1), 12):
            assert wigner_distance(ra.mix(rb, p), s2).value <= p * ca + (1 - p) * cb + 1e-8

    @settings(max_examples=60)
    @given(seeds)
    def clifford_invariance(seed):
        rho = random_density(1, seed)
        c0 = wigner_distance(rho, s1).value
        for u in single_qubit_cliffords():
            assert abs(wigner_distance(apply_unitary(rho, u), s1).value - c0) <= 1e-8

    @settings(max_examples=100)
    @given(seeds, seeds, st.sampled_from([1, 2]))
    def lipschitz(a, b, n):
        stabs = s1 if n == 1 else s2
        ra, rb = random_density(n, a), random_density(n, b)
        lhs = abs(wigner_distance(ra, stabs).value - wigner_distance(rb, stabs).value)
        assert lhs <= np.abs(wigner(ra).values - wigner(rb).values).sum() + 1e-8

    failed = []
    for name, fn in (
        ("faithfulness", faithfulness),
        ("convexity", convexity),
        ("clifford", clifford_invariance),
        ("lipschitz", lipschitz),
    ):
        try:
            fn()
        except AssertionError:
            failed.append(name)
    record(15, not failed, "all four suites hold" if not failed else f"failed: {', '.join(failed)}")


if __name__ == "__main__":
    sys.exit(pytest.main([__file__, "-q", "-p", "no:cacheprovider"]))
