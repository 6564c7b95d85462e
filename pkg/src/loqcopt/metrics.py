"""Fidelity and success probability of a heralded gate, with gradients.

Under the normalized Hilbert-Schmidt product <A|B> = Tr(A B^dag)/4,

    F(U) = |<A|A_tar>|^2 / (<A|A> <A_tar|A_tar>),      S(U) = <A|A>.

At the device level A is the full conditional map produced by the herald: it
takes the four dual-rail inputs to every two-photon pattern of the
computational modes, leakage states included.  The target has no leakage
rows, so F = 1 forces the leakage amplitudes to vanish exactly; a heralded
branch that dumps photons outside the dual-rail subspace is a gate error, not
merely lost success.  S is the norm-squared weight of the whole heralded
branch.  (score() on a bare 4x4 Kraus block implements the same formulas with
no leakage rows, which coincides with the device-level numbers whenever
F = 1.)

F is invariant under rescaling of A and under a global phase of the target.
Both scores are smooth in the real and imaginary parts of the interferometer
entries, but not holomorphic: gradients are taken with respect to the 2 N^2
real coordinates (Re U_ij, Im U_ij).  The transfer amplitudes themselves are
holomorphic polynomials (permanents), so for a real-valued f(A, conj(A)) the
chain rule reduces to

    df/dRe(U_ij) = 2 Re( sum_pq (df/dA_pq) dA_pq/dU_ij ),
    df/dIm(U_ij) = -2 Im( sum_pq (df/dA_pq) dA_pq/dU_ij ).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .fock import OccupationVector
from .kraus import (
    UNITARY_TOL,
    DevicePlan,
    compile_device,
    conditional_map,
    conditional_map_grad,
    _as_matrix,
)

D_C = 4  # two-qubit computational dimension


class NullBranchError(ValueError):
    """The heralded branch has zero amplitude; fidelity is undefined."""


@dataclass(frozen=True)
class TargetGate:
    """A desired 4x4 unitary, optionally remembering the Weyl-chamber triple
    it was synthesized from."""

    matrix: np.ndarray
    weyl: tuple[float, float, float] | None = None

    def __post_init__(self):
        m = np.asarray(self.matrix, dtype=np.complex128)
        object.__setattr__(self, "matrix", m)
        if m.shape != (D_C, D_C):
            raise ValueError("target must be a 4x4 matrix")
        if np.linalg.norm(m.conj().T @ m - np.eye(D_C)) > UNITARY_TOL:
            raise ValueError("target must be unitary")
        if self.weyl is not None:
            object.__setattr__(self, "weyl", tuple(float(c) for c in self.weyl))


class GateScore(NamedTuple):
    fidelity: float
    success: float


class ScoreGradient(NamedTuple):
    """Real gradients of (F, S) with respect to Re/Im of every matrix entry."""

    f_re: np.ndarray
    f_im: np.ndarray
    s_re: np.ndarray
    s_im: np.ndarray


def hs_inner(a: np.ndarray, b: np.ndarray) -> complex:
    """Normalized Hilbert-Schmidt product Tr(a b^dag) / 4."""
    return complex(np.trace(a @ b.conj().T) / D_C)


def _score_arrays(a_block: np.ndarray, weight: float, target: np.ndarray) -> GateScore:
    """Common fidelity/success arithmetic.  ``weight`` is sum |A_pq|^2 over
    the whole conditional map (block plus any leakage rows)."""
    s = weight / D_C
    if s <= 0.0:
        raise NullBranchError("null branch: outcome has zero amplitude")
    t = float(np.sum(target.real**2 + target.imag**2)) / D_C
    h = np.sum(a_block * target.conj()) / D_C
    fidelity = (h * h.conjugate()).real / (s * t)
    return GateScore(fidelity=float(fidelity), success=float(s))


def score(a: np.ndarray, target: TargetGate) -> GateScore:
    """Fidelity and success of a 4x4 Kraus operator against ``target``."""
    a = np.asarray(a, dtype=np.complex128)
    return _score_arrays(a[:4], float(np.sum(a.real**2 + a.imag**2)), target.matrix)


def device_score(
    u,
    ancilla_in: OccupationVector,
    outcome: OccupationVector,
    target: TargetGate,
) -> GateScore:
    """Leakage-aware fidelity and success of an interferometer device."""
    m = _as_matrix(u)
    plan = compile_device(m.shape[0], tuple(ancilla_in), tuple(outcome))
    return score_from_plan(m, plan, target)


def score_from_plan(u: np.ndarray, plan: DevicePlan, target: TargetGate) -> GateScore:
    a = conditional_map(u, plan)
    return _score_arrays(a[:4], float(np.sum(a.real**2 + a.imag**2)), target.matrix)


class _Evaluation(NamedTuple):
    """One full evaluation at a matrix: conditional map, scores, and the
    complex accumulators T[i,j] = sum_pq (df/dA_pq) dA_pq/dU_ij for f = F, S."""

    amap: np.ndarray
    fidelity: float
    success: float
    t_f: np.ndarray
    t_s: np.ndarray


def _evaluate_with_grad(u: np.ndarray, plan: DevicePlan, target: TargetGate) -> _Evaluation:
    a, jac = conditional_map_grad(u, plan)
    s = float(np.sum(a.real**2 + a.imag**2)) / D_C
    if s <= 0.0:
        raise NullBranchError("null branch: outcome has zero amplitude")
    tm = target.matrix
    t = float(np.sum(tm.real**2 + tm.imag**2)) / D_C
    h = np.sum(a[:4] * tm.conj()) / D_C
    habs2 = (h * h.conjugate()).real
    fidelity = habs2 / (s * t)

    # Wirtinger derivatives with respect to the holomorphic map entries; the
    # |<A|T>|^2 numerator only sees the block rows, the norm sees them all.
    w_s = a.conj() / D_C
    w_f = (-habs2 / (D_C * s * s * t)) * a.conj()
    w_f[:4] += (h.conjugate() / (D_C * s * t)) * tm.conj()
    t_f = np.einsum("pq,pqij->ij", w_f, jac)
    t_s = np.einsum("pq,pqij->ij", w_s, jac)
    return _Evaluation(amap=a, fidelity=fidelity, success=s, t_f=t_f, t_s=t_s)


def _real_grad(t: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    return 2.0 * t.real, -2.0 * t.imag


def score_gradient(
    u,
    ancilla_in: OccupationVector,
    outcome: OccupationVector,
    target: TargetGate,
) -> ScoreGradient:
    """Analytic gradients of the device-level fidelity and success at ``u``.

    Derivatives of the transfer amplitudes are permanents of row/column
    deleted submatrices; see kraus.conditional_map_grad.
    """
    m = _as_matrix(u)
    plan = compile_device(m.shape[0], tuple(ancilla_in), tuple(outcome))
    ev = _evaluate_with_grad(m, plan, target)
    f_re, f_im = _real_grad(ev.t_f)
    s_re, s_im = _real_grad(ev.t_s)
    return ScoreGradient(f_re=f_re, f_im=f_im, s_re=s_re, s_im=s_im)
