import numpy as np
import pytest

from loqcopt.kraus import kraus_operator
from loqcopt.metrics import (
    NullBranchError,
    ScoreGradient,
    TargetGate,
    device_score,
    hs_inner,
    score,
    score_gradient,
)

from oracles import haar_unitary

rng = np.random.default_rng(7041)

X = np.array([[0, 1], [1, 0]], dtype=complex)
CNOT = np.array(
    [[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0]], dtype=complex
)


def _random_kraus(scale=1.0):
    return scale * (rng.standard_normal((4, 4)) + 1j * rng.standard_normal((4, 4)))


# ---------------------------------------------------------------------------
# hs_inner
# ---------------------------------------------------------------------------

def test_hs_inner_identity():
    assert hs_inner(np.eye(4), np.eye(4)) == pytest.approx(1.0)


def test_hs_inner_traceless_product():
    assert hs_inner(np.eye(4), np.kron(X, np.eye(2))) == pytest.approx(0.0)


def test_hs_inner_self_is_entry_sum():
    a = _random_kraus()
    expected = np.sum(np.abs(a) ** 2) / 4.0
    got = hs_inner(a, a)
    assert got.imag == pytest.approx(0.0, abs=1e-14)
    assert got.real == pytest.approx(expected, rel=1e-12)


# ---------------------------------------------------------------------------
# score
# ---------------------------------------------------------------------------

def test_perfect_deterministic_gate():
    target = TargetGate(matrix=CNOT)
    gs = score(CNOT, target)
    assert gs.fidelity == pytest.approx(1.0, abs=1e-13)
    assert gs.success == pytest.approx(1.0, abs=1e-13)


def test_scale_invariance_of_fidelity():
    target = TargetGate(matrix=CNOT)
    gs = score(CNOT / np.sqrt(2.0), target)
    assert gs.fidelity == pytest.approx(1.0, abs=1e-13)
    assert gs.success == pytest.approx(0.5, abs=1e-13)


def test_fidelity_invariances_random():
    target = TargetGate(matrix=haar_unitary(4, rng))
    a = _random_kraus()
    base = score(a, target)
    for _ in range(10):
        lam = (rng.standard_normal() + 1j * rng.standard_normal()) or 1.0
        scaled = score(lam * a, target)
        assert scaled.fidelity == pytest.approx(base.fidelity, abs=1e-12)
        assert scaled.success == pytest.approx(abs(lam) ** 2 * base.success, rel=1e-12)


def test_target_phase_invariance():
    a = _random_kraus()
    t = haar_unitary(4, rng)
    base = score(a, TargetGate(matrix=t))
    for phi in rng.uniform(0, 2 * np.pi, size=5):
        rotated = score(a, TargetGate(matrix=np.exp(1j * phi) * t))
        assert rotated.fidelity == pytest.approx(base.fidelity, abs=1e-12)
        assert rotated.success == pytest.approx(base.success, abs=1e-12)


def test_zero_kraus_raises():
    with pytest.raises(NullBranchError, match="null branch"):
        score(np.zeros((4, 4)), TargetGate(matrix=CNOT))


def test_conjugation_symmetry_at_metric_level():
    for _ in range(5):
        u = haar_unitary(6, rng)
        t = haar_unitary(4, rng)
        a = kraus_operator(u, (1, 1), (1, 1))
        a_conj = kraus_operator(u.conj(), (1, 1), (1, 1))
        gs = score(a, TargetGate(matrix=t))
        gs_conj = score(a_conj, TargetGate(matrix=t.conj()))
        assert gs_conj.fidelity == pytest.approx(gs.fidelity, abs=1e-12)
        assert gs_conj.success == pytest.approx(gs.success, abs=1e-12)


def test_target_must_be_unitary():
    with pytest.raises(ValueError, match="unitary"):
        TargetGate(matrix=np.ones((4, 4)))


# ---------------------------------------------------------------------------
# score_gradient vs. central finite differences
# ---------------------------------------------------------------------------

def _fd_gradient(u, ancilla_in, outcome, target, step=1e-6):
    n = u.shape[0]
    out = ScoreGradient(*(np.zeros((n, n)) for _ in range(4)))

    def fs(mat):
        gs = device_score(mat, ancilla_in, outcome, target)
        return gs.fidelity, gs.success

    for i in range(n):
        for j in range(n):
            for arr_f, arr_s, delta in (
                (out.f_re, out.s_re, step),
                (out.f_im, out.s_im, 1j * step),
            ):
                up = u.copy()
                up[i, j] += delta
                dn = u.copy()
                dn[i, j] -= delta
                f_up, s_up = fs(up)
                f_dn, s_dn = fs(dn)
                arr_f[i, j] = (f_up - f_dn) / (2 * step)
                arr_s[i, j] = (s_up - s_dn) / (2 * step)
    return out


@pytest.mark.parametrize("trial", range(4))
def test_gradient_matches_finite_differences(trial):
    u = haar_unitary(6, rng)
    target = TargetGate(matrix=haar_unitary(4, rng))
    analytic = score_gradient(u, (1, 1), (1, 1), target)
    fd = _fd_gradient(u, (1, 1), (1, 1), target)
    for a, b in zip(analytic, fd):
        scale = max(np.abs(b).max(), 1e-3)
        assert np.abs(a - b).max() <= 1e-5 * scale


def test_gradient_three_ancilla_spot_check():
    u = haar_unitary(7, rng)
    target = TargetGate(matrix=haar_unitary(4, rng))
    analytic = score_gradient(u, (1, 1, 1), (1, 1, 1), target)
    fd = _fd_gradient(u, (1, 1, 1), (1, 1, 1), target)
    for a, b in zip(analytic, fd):
        scale = max(np.abs(b).max(), 1e-3)
        assert np.abs(a - b).max() <= 1e-5 * scale


def test_fidelity_gradient_vanishes_at_exact_gate():
    # The identity interferometer realizes the identity gate exactly; F sits
    # at its global maximum, so the full F-gradient vanishes, and in
    # particular the rescaling direction is flat.
    u = np.eye(6, dtype=complex)
    target = TargetGate(matrix=np.eye(4))
    g = score_gradient(u, (1, 1), (1, 1), target)
    assert np.abs(g.f_re).max() <= 1e-10
    assert np.abs(g.f_im).max() <= 1e-10
    # Directional derivative of F along the rescaling direction is exactly 0
    # by scale invariance (Euler's relation), independently of optimality.
    u2 = haar_unitary(6, rng)
    g2 = score_gradient(u2, (1, 1), (1, 1), target)
    directional = np.sum(g2.f_re * u2.real) + np.sum(g2.f_im * u2.imag)
    assert abs(directional) <= 1e-12
