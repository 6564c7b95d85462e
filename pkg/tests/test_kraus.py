import numpy as np
import pytest

from loqcopt.fock import DUAL_RAIL_STATES, enumerate_fock_basis
from loqcopt.kraus import (
    InterferometerMatrix,
    PhotonCountError,
    kraus_operator,
    permanent,
    transfer_amplitude,
)
from loqcopt.fock import ModeLayout

from oracles import (
    haar_unitary,
    kraus_operator_oracle,
    permanent_brute_force,
    transfer_amplitude_oracle,
)

rng = np.random.default_rng(20240811)


# ---------------------------------------------------------------------------
# permanent
# ---------------------------------------------------------------------------

def test_permanent_identity():
    assert permanent(np.eye(4)) == pytest.approx(1.0)


def test_permanent_all_ones():
    assert permanent(np.ones((3, 3))) == pytest.approx(6.0)


def test_permanent_empty_and_scalar():
    assert permanent(np.zeros((0, 0))) == pytest.approx(1.0)
    assert permanent(np.array([[3.5 + 1j]])) == pytest.approx(3.5 + 1j)


def test_permanent_against_brute_force():
    for n in range(1, 7):
        for _ in range(20):
            m = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
            expected = permanent_brute_force(m)
            got = permanent(m)
            assert abs(got - expected) <= 1e-12 * max(abs(expected), 1.0)


def test_permanent_row_multilinearity():
    for _ in range(10):
        m = rng.standard_normal((5, 5)) + 1j * rng.standard_normal((5, 5))
        row = rng.standard_normal(5) + 1j * rng.standard_normal(5)
        alpha, beta = rng.standard_normal(2)
        m2 = m.copy()
        m2[2] = alpha * m[2] + beta * row
        m3 = m.copy()
        m3[2] = row
        lhs = permanent(m2)
        rhs = alpha * permanent(m) + beta * permanent(m3)
        assert abs(lhs - rhs) <= 1e-12 * max(abs(rhs), 1.0)


def test_permanent_rejects_oversize_and_nonsquare():
    with pytest.raises(ValueError, match="unsupported size"):
        permanent(np.eye(31))
    with pytest.raises(ValueError):
        permanent(np.ones((2, 3)))


# ---------------------------------------------------------------------------
# transfer_amplitude
# ---------------------------------------------------------------------------

def test_identity_transfer():
    occ = (1, 0, 2, 1)
    assert transfer_amplitude(np.eye(4), occ, occ) == pytest.approx(1.0)


def test_identity_off_diagonal_transfer():
    assert transfer_amplitude(np.eye(4), (1, 0, 2, 1), (1, 1, 1, 1)) == pytest.approx(0.0)


def test_hong_ou_mandel():
    bs = np.array([[1, 1], [1, -1]]) / np.sqrt(2.0)
    assert abs(transfer_amplitude(bs, (1, 1), (1, 1))) <= 1e-15
    # The photons bunch: |2,0> and |0,2> each with amplitude 1/sqrt(2).
    assert abs(transfer_amplitude(bs, (1, 1), (2, 0))) == pytest.approx(1 / np.sqrt(2))
    assert abs(transfer_amplitude(bs, (1, 1), (0, 2))) == pytest.approx(1 / np.sqrt(2))


def test_photon_number_mismatch_raises():
    with pytest.raises(PhotonCountError, match="non-conserving"):
        transfer_amplitude(np.eye(3), (1, 0, 0), (1, 1, 0))


def test_transfer_amplitude_against_expansion_oracle():
    for n_modes, n_photons in ((3, 2), (4, 3), (5, 2)):
        u = haar_unitary(n_modes, rng)
        basis = enumerate_fock_basis(n_photons, n_modes)
        in_occ = basis[rng.integers(len(basis))]
        amplitudes = {
            occ: transfer_amplitude(u, in_occ, occ) for occ in basis
        }
        for occ in basis:
            expected = transfer_amplitude_oracle(u, in_occ, occ)
            assert abs(amplitudes[occ] - expected) <= 1e-12


def test_transfer_unitarity_sum():
    u = haar_unitary(4, rng)
    in_occ = (2, 1, 0, 0)
    total = sum(
        abs(transfer_amplitude(u, in_occ, occ)) ** 2
        for occ in enumerate_fock_basis(3, 4)
    )
    assert total == pytest.approx(1.0, abs=1e-12)


# ---------------------------------------------------------------------------
# kraus_operator
# ---------------------------------------------------------------------------

def test_identity_device_gives_identity_gate():
    a = kraus_operator(np.eye(6), (1, 1), (1, 1))
    assert np.allclose(a, np.eye(4), atol=1e-14)


def test_rail_swap_is_pauli_x():
    u = np.eye(6, dtype=complex)
    u[[0, 1]] = u[[1, 0]]
    a = kraus_operator(u, (1, 1), (1, 1))
    x_on_qubit1 = np.kron(np.array([[0, 1], [1, 0]]), np.eye(2))
    assert np.allclose(a, x_on_qubit1, atol=1e-14)


def test_kraus_against_expansion_oracle():
    for _ in range(5):
        u = haar_unitary(6, rng)
        a = kraus_operator(u, (1, 1), (1, 1))
        expected = kraus_operator_oracle(u, (1, 1), (1, 1))
        assert np.abs(a - expected).max() <= 1e-12


def test_kraus_three_ancilla_against_oracle():
    u = haar_unitary(7, rng)
    a = kraus_operator(u, (1, 1, 1), (1, 1, 1))
    expected = kraus_operator_oracle(u, (1, 1, 1), (1, 1, 1))
    assert np.abs(a - expected).max() <= 1e-12


def test_kraus_uneven_patterns_against_oracle():
    u = haar_unitary(6, rng)
    a = kraus_operator(u, (2, 0), (1, 1))
    expected = kraus_operator_oracle(u, (2, 0), (1, 1))
    assert np.abs(a - expected).max() <= 1e-12


def test_conjugation_symmetry():
    for _ in range(5):
        u = haar_unitary(6, rng)
        a = kraus_operator(u, (1, 1), (1, 1))
        a_conj = kraus_operator(u.conj(), (1, 1), (1, 1))
        assert np.abs(a_conj - a.conj()).max() <= 1e-12


def test_outcome_stripping_photons_raises():
    u = haar_unitary(6, rng)
    with pytest.raises(PhotonCountError, match="strips computational photons"):
        kraus_operator(u, (1, 0), (1, 1))


def test_underfull_outcome_gives_zero_block():
    u = haar_unitary(6, rng)
    a = kraus_operator(u, (1, 1), (1, 0))
    assert np.abs(a).max() == 0.0


def test_total_probability_bound():
    # Summed over all heralds, the dual-rail block weights cannot exceed the
    # four input states' total probability.
    u = haar_unitary(6, rng)
    total = 0.0
    for outcome in enumerate_fock_basis(2, 2):
        a = kraus_operator(u, (1, 1), outcome)
        total += float(np.sum(np.abs(a) ** 2))
    assert total <= 4.0 + 1e-9


def test_full_output_resolution_sums_to_input_norm():
    # Including leakage outputs restores completeness exactly: for each
    # computational input the outgoing amplitudes over every 4-photon output
    # pattern square-sum to 1.
    u = haar_unitary(6, rng)
    for comp_in in DUAL_RAIL_STATES:
        in_occ = comp_in + (1, 1)
        total = sum(
            abs(transfer_amplitude(u, in_occ, occ)) ** 2
            for occ in enumerate_fock_basis(4, 6)
        )
        assert total == pytest.approx(1.0, abs=1e-11)


def test_interferometer_matrix_validation():
    layout = ModeLayout(n_ancilla=2)
    InterferometerMatrix(matrix=haar_unitary(6, rng), mode_layout=layout)
    with pytest.raises(ValueError, match="not unitary"):
        InterferometerMatrix(matrix=1.5 * np.eye(6), mode_layout=layout)
    InterferometerMatrix(
        matrix=0.5 * np.eye(6), mode_layout=layout, flavor="extended-search"
    )
    with pytest.raises(ValueError, match="not subunitary"):
        InterferometerMatrix(
            matrix=1.5 * np.eye(6), mode_layout=layout, flavor="extended-search"
        )
