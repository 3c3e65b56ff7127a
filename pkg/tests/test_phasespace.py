import itertools

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from wigmagic.phasespace import (
    HADAMARD_SWAP,
    PhasePoint,
    WignerVector,
    all_points,
    inverse_wigner,
    mana,
    max_stab_l1,
    permute_qubit_points,
    phase_point_operator,
    phase_point_operators,
    single_qubit_operator,
    wigner,
    wigner_l1,
    wigner_of_operator,
    write_csv,
)
from wigmagic.qcore import DensityMatrix, bloch_state, haar_random_pure, random_density

seeds = st.integers(0, 2**32 - 1)
SX = np.array([[0, 1], [1, 0]])
SY = np.array([[0, -1j], [1j, 0]])
SZ = np.array([[1, 0], [0, -1]])


def oracle_operator(coords):
    # written out independently from the Pauli expansion
    out = np.array([[1.0 + 0j]])
    for q, p in coords:
        a = (np.eye(2) + (-1) ** p * SX + (-1) ** (q + p) * SY + (-1) ** q * SZ) / 2
        out = np.kron(out, a)
    return out


def test_point_indexing_roundtrip():
    for n in (1, 2, 3):
        pts = all_points(n)
        assert [p.index for p in pts] == list(range(4**n))
    assert PhasePoint(((1, 0), (0, 1))).index == 2 * 4 + 1
    assert str(PhasePoint.from_index(2, 6)) == "(0,1)(1,0)"
    with pytest.raises(ValueError):
        PhasePoint(((2, 0),))
    with pytest.raises(ValueError):
        PhasePoint.from_index(1, 4)


def test_operators_match_oracle():
    for n in (1, 2):
        ops = phase_point_operators(n)
        for a in all_points(n):
            assert np.allclose(ops[a.index], oracle_operator(a.coords))
            assert np.allclose(phase_point_operator(a), ops[a.index])


def test_operator_algebra():
    for n in (1, 2, 3):
        ops = phase_point_operators(n)
        assert np.allclose(np.einsum("aii->a", ops), 1)
        assert np.allclose(ops, ops.conj().transpose(0, 2, 1))
        gram = np.einsum("aij,bji->ab", ops, ops)
        assert np.allclose(gram, 2**n * np.eye(4**n))
        assert np.allclose(ops.sum(axis=0), 2**n * np.eye(2**n))


def test_single_qubit_operator_is_not_an_involution():
    a = single_qubit_operator(0, 0)
    assert not np.allclose(a @ a, np.eye(2))
    assert np.allclose(np.sort(np.linalg.eigvalsh(a)), [(1 - np.sqrt(3)) / 2, (1 + np.sqrt(3)) / 2])


def test_known_vectors():
    zero = bloch_state(0, 0)
    assert np.allclose(wigner(zero).values, [0.5, 0.5, 0, 0])
    t = wigner(bloch_state(np.pi / 2, np.pi / 4))
    s = 1 / np.sqrt(2)
    # W(q,p) = (1 + (-1)^p x + (-1)^(q+p) y + (-1)^q z) / 4
    expected = [(1 + (-1) ** p * s + (-1) ** (q + p) * s) / 4 for q, p in itertools.product((0, 1), repeat=2)]
    assert np.allclose(t.values, expected)
    assert t.negative_count() == 1
    bell = wigner(np.array([1, 0, 0, 1]) / np.sqrt(2))
    literal = np.array([[1, 1, 1, -1], [1, 1, -1, 1], [1, -1, 1, 1], [-1, 1, 1, 1]]) / 8
    assert np.allclose(bell.table(), literal, atol=1e-14)
    assert bell.negative_count() == 4
    assert np.isclose(bell.l1(), 2)


@given(seeds, st.sampled_from([1, 2]))
def test_normalization_and_roundtrip(seed, n):
    rho = random_density(n, seed)
    w = wigner(rho)
    assert abs(w.values.sum() - 1) < 1e-10
    assert np.abs(inverse_wigner(w) - rho.matrix).max() < 1e-10


@given(seeds, st.sampled_from([1, 2, 3]))
def test_pure_state_purity(seed, n):
    w = wigner(haar_random_pure(n, seed))
    assert abs((w.values**2).sum() - 2.0**-n) < 1e-10


@given(seeds, seeds)
def test_factorization_over_products(s1, s2):
    a, b = random_density(1, s1), random_density(1, s2)
    joint = wigner(a.tensor(b))
    assert np.abs(joint.values - np.kron(wigner(a).values, wigner(b).values)).max() < 1e-12


@given(seeds)
def test_expectation_identity(seed):
    # Tr(rho sigma) = 2^n <W_rho, W_sigma>
    a, b = random_density(2, seed), random_density(2, seed + 1)
    lhs = np.real(np.trace(a.matrix @ b.matrix))
    assert np.isclose(lhs, 4 * wigner(a).values @ wigner(b).values)


def test_operator_coefficients():
    coeffs = wigner_of_operator(np.eye(2))
    assert np.allclose(coeffs, 0.5)
    assert np.allclose(wigner_of_operator(SZ), [0.5, 0.5, -0.5, -0.5])
    with pytest.raises(ValueError):
        wigner(np.array([[0.5, 0.5j], [0.5j, 0.5]]))  # not Hermitian


def test_wigner_vector_validation():
    with pytest.raises(ValueError):
        WignerVector(2, np.zeros(5))
    w = WignerVector(1, [0.5, 0.5, 0, 0])
    with pytest.raises(ValueError):
        w.values[0] = 1
    with pytest.raises(ValueError):
        w.table()
    assert w[PhasePoint(((0, 1),))] == 0.5
    assert wigner_l1(w) == 1.0
    assert mana(bloch_state(0, 0)) == 0.0


def test_permute_qubit_points():
    w = wigner(haar_random_pure(2, 3))
    moved = permute_qubit_points(w, 0, HADAMARD_SWAP)
    t, m = w.table(), moved.table()
    assert np.allclose(m[1], t[2]) and np.allclose(m[2], t[1]) and np.allclose(m[0], t[0])
    back = permute_qubit_points(moved, 0, HADAMARD_SWAP)
    assert np.array_equal(back.values, w.values)
    with pytest.raises(ValueError):
        permute_qubit_points(w, 0, (0, 0, 1, 2))
    with pytest.raises(ValueError):
        permute_qubit_points(w, 2, HADAMARD_SWAP)


def test_max_l1(stabs1, stabs2):
    assert np.isclose(max_stab_l1(stabs1), 1.0)
    assert np.isclose(max_stab_l1(stabs2), 2.0)


def test_csv_output(tmp_path):
    path = tmp_path / "w.csv"
    write_csv(wigner(bloch_state(0, 0)), path)
    lines = path.read_text().splitlines()
    assert lines[0] == "index,point,value"
    assert lines[1] == '0,"(0,0)",0.5'
    assert "\r" not in path.read_text()
    assert len(lines) == 5


def test_maximally_mixed_is_uniform():
    assert np.allclose(wigner(DensityMatrix.maximally_mixed(2)).values, 1 / 16)
