import json

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from scipy.optimize import linprog

from wigmagic.families import DEFAULT_FRAME, FamilyId, closed_form_witness, family_density
from wigmagic.measures import (
    WarmDistance,
    check_simulation_bound,
    distance_of_vector,
    extent_lower_bound,
    magic_report,
    operator_witness_gap,
    polytope_membership,
    stabilizer_extent,
    tightness_ratio,
    wigner_distance,
)
from wigmagic.phasespace import wigner
from wigmagic.qcore import (
    X,
    Y,
    Z,
    DensityMatrix,
    apply_unitary,
    bloch_state,
    haar_random_pure,
    random_density,
    single_qubit_cliffords,
)
from wigmagic.stabgen import stabilizer_set

seeds = st.integers(0, 2**32 - 1)
T_STATE = bloch_state(np.pi / 2, np.pi / 4)


def highs_distance(w, v):
    nv, d = v.shape
    c = np.concatenate([np.zeros(nv), np.ones(d)])
    a_ub = np.block([[-v.T, -np.eye(d)], [v.T, -np.eye(d)]])
    res = linprog(
        c,
        A_ub=a_ub,
        b_ub=np.concatenate([-w, w]),
        A_eq=np.concatenate([np.ones(nv), np.zeros(d)])[None],
        b_eq=[1],
        method="highs",
    )
    return res.fun


def highs_extent(w, v):
    nv = v.shape[0]
    res = linprog(np.ones(2 * nv), A_eq=np.hstack([v.T, -v.T]), b_eq=w, method="highs")
    return res.fun


def bloch_l1_oracle(rho: DensityMatrix) -> float:
    r = [rho.expectation(p) for p in (X, Y, Z)]
    return max(0.0, (np.abs(r).sum() - 1) / 2)


def test_examples(stabs2):
    assert wigner_distance(np.array([1, 0, 0, 0]), stabs2).value == pytest.approx(0, abs=1e-12)
    assert wigner_distance(T_STATE).value == pytest.approx((np.sqrt(2) - 1) / 2, abs=1e-9)
    assert wigner_distance(family_density("Ry", np.pi / 4)).value == pytest.approx(np.sqrt(2) - 1, abs=1e-9)
    assert stabilizer_extent(np.array([1, 0, 0, 0])).value == pytest.approx(1, abs=1e-9)
    assert stabilizer_extent(family_density("BellRz", np.pi / 4)).value == pytest.approx(np.sqrt(2), abs=1e-9)
    gamma = stabilizer_extent(family_density("Rx", np.pi / 3)).value
    assert gamma == pytest.approx((np.sqrt(3) + 1) / 2, abs=1e-9)


@given(seeds, st.booleans())
def test_distance_and_extent_match_highs(seed, pure):
    stabs = stabilizer_set(2)
    rho = haar_random_pure(2, seed).density() if pure else random_density(2, seed)
    w = wigner(rho).values
    assert wigner_distance(rho, stabs).value == pytest.approx(highs_distance(w, stabs.wigner_matrix), abs=1e-8)
    assert stabilizer_extent(rho, stabs).value == pytest.approx(highs_extent(w, stabs.wigner_matrix), abs=1e-8)


@given(seeds)
def test_single_qubit_bloch_oracle(seed):
    rho = random_density(1, seed) if seed % 2 else haar_random_pure(1, seed).density()
    assert wigner_distance(rho).value == pytest.approx(bloch_l1_oracle(rho), abs=1e-9)


@given(seeds)
def test_witness_invariants(seed):
    stabs = stabilizer_set(2)
    rho = haar_random_pure(2, seed)
    d = wigner_distance(rho, stabs)
    w = d.witness
    assert np.abs(w.svec).max() <= 1 + 1e-9
    assert (stabs.wigner_matrix @ w.svec).max() <= w.free_max + 1e-9
    assert w.gap == pytest.approx(d.value, abs=1e-7)
    assert w.value_on(wigner(rho)) - w.free_max == pytest.approx(w.gap, abs=1e-12)
    assert np.allclose(d.weights.sum(), 1) and np.all(d.weights >= 0)
    # trace form of the same witness
    gap, free_max = operator_witness_gap(w.operator, rho, stabs)
    assert gap == pytest.approx(4 * w.gap, abs=1e-7)


@given(seeds)
def test_nearest_point_attains_distance(seed):
    stabs = stabilizer_set(2)
    rho = haar_random_pure(2, seed)
    d = wigner_distance(rho, stabs)
    nearest = d.weights @ stabs.wigner_matrix
    assert np.abs(wigner(rho).values - nearest).sum() == pytest.approx(d.value, abs=1e-8)


@given(seeds)
def test_decomposition_reconstructs(seed):
    stabs = stabilizer_set(2)
    rho = random_density(2, seed)
    e = stabilizer_extent(rho, stabs)
    assert np.abs(e.decomposition.reconstruct(stabs) - wigner(rho).values).max() <= 1e-9
    assert e.decomposition.l1 == pytest.approx(e.value, abs=1e-9)
    assert e.value >= 1 - 1e-9


def test_faithfulness(stabs1, stabs2):
    for stabs in (stabs1, stabs2):
        for s in stabs:
            assert wigner_distance(s.density(), stabs).value <= 1e-9
            assert polytope_membership(s.wigner, stabs)
    for fam in FamilyId:
        for t in (0.3, 1.0, 2.0, 2.9):
            assert wigner_distance(family_density(fam, t), stabs2).value > 1e-6
    assert not polytope_membership(wigner(T_STATE), stabs1)


@given(seeds, seeds)
def test_convexity(s1, s2):
    stabs = stabilizer_set(2)
    a, b = haar_random_pure(2, s1).density(), haar_random_pure(2, s2).density()
    ca, cb = wigner_distance(a, stabs).value, wigner_distance(b, stabs).value
    for p in np.linspace(0.1, 0.9, 9):
        assert wigner_distance(a.mix(b, p), stabs).value <= p * ca + (1 - p) * cb + 1e-8


@given(seeds)
def test_single_qubit_clifford_invariance(seed):
    stabs = stabilizer_set(1)
    rho = random_density(1, seed)
    c0 = wigner_distance(rho, stabs).value
    for u in single_qubit_cliffords():
        assert abs(wigner_distance(apply_unitary(rho, u), stabs).value - c0) <= 1e-8


@given(seeds, seeds, st.sampled_from([1, 2]))
def test_lipschitz(s1, s2, n):
    stabs = stabilizer_set(n)
    a, b = random_density(n, s1), random_density(n, s2)
    lhs = abs(wigner_distance(a, stabs).value - wigner_distance(b, stabs).value)
    assert lhs <= np.abs(wigner(a).values - wigner(b).values).sum() + 1e-8


def test_tightness_ratio():
    assert tightness_ratio(0.0, 1.0) is None
    assert tightness_ratio(5e-7, 1.0) is None
    assert tightness_ratio(0.5, 2.0) == pytest.approx(2.0)


def test_simulation_bound_examples(stabs2):
    slack = check_simulation_bound(family_density("Ry", np.pi / 4), stabs2, 2.0)
    assert slack == pytest.approx((np.sqrt(2) - 1) / 2, abs=1e-8)
    assert check_simulation_bound(stabs2[7].density(), stabs2) == pytest.approx(0, abs=1e-9)


def test_family_witness_extent_bound(stabs2):
    for fam in (FamilyId.RY, FamilyId.BELL_RZ):
        for t in (0.4, 1.1, 2.2):
            h = closed_form_witness(fam, t, DEFAULT_FRAME)
            rho = family_density(fam, t)
            bound, scale = extent_lower_bound(h, rho, stabs2)
            assert scale == pytest.approx(1.0)
            assert stabilizer_extent(rho, stabs2).value >= bound - 1e-7
            assert stabilizer_extent(rho, stabs2).value == pytest.approx(bound, abs=1e-7)


def test_distance_of_vector_checks_length(stabs2):
    with pytest.raises(ValueError):
        distance_of_vector(np.ones(4), stabs2)
    with pytest.raises(ValueError):
        wigner_distance(T_STATE, stabs2)


def test_magic_report_json():
    rep = magic_report(family_density("Rx", np.pi / 3))
    data = json.loads(json.dumps(rep.to_json()))
    assert set(data) == {"c", "gamma", "kappa", "witness", "decomposition"}
    assert set(data["witness"]) == {"svec", "free_max", "gap"}
    assert data["kappa"] == pytest.approx(2.0, abs=1e-6)
    assert magic_report(np.array([1, 0])).kappa is None


def test_warm_distance_matches(stabs2):
    warm = WarmDistance(stabs2)
    rng = np.random.default_rng(4)
    for _ in range(20):
        rho = haar_random_pure(2, rng)
        assert warm(wigner(rho)) == pytest.approx(wigner_distance(rho, stabs2).value, abs=1e-10)
    assert warm.evaluations == 20


def test_three_qubit_product_with_stabilizers():
    rho = T_STATE.tensor(bloch_state(0, 0)).tensor(bloch_state(np.pi / 2, 0))
    assert wigner_distance(rho).value == pytest.approx((np.sqrt(2) - 1) / 2, abs=1e-8)
