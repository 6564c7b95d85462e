"""Linear-optical transfer amplitudes and heralded Kraus operators.

A linear interferometer acts on mode creation operators as
a_i^dag -> sum_j U_ij b_j^dag.  The amplitude between Fock states then equals
a matrix permanent: rows of U are repeated according to the input occupation,
columns according to the output occupation, and the result is divided by
sqrt(prod n_i! prod k_j!).  Projecting the ancilla modes of the output onto a
photocount pattern leaves a 4x4 operator on the dual-rail computational
subspace: the Kraus operator of the heralded gate.  Amplitudes into leakage
states (two photons in one rail, etc.) are intentionally not part of that 4x4
block; they only lower the success probability.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from . import _kernels
from .fock import (
    DUAL_RAIL_STATES,
    N_COMP_MODES,
    ModeLayout,
    OccupationVector,
    dual_rail_state,
    occupation_factorial,
    occupation_to_modes,
)

MAX_PERMANENT_DIM = 30

PHYSICAL_UNITARY = "physical-unitary"
EXTENDED_SEARCH = "extended-search"

UNITARY_TOL = 1e-10
SUBUNITARY_TOL = 1e-9


class PhotonCountError(ValueError):
    """Photon bookkeeping between input, output and herald is inconsistent."""


@dataclass(frozen=True)
class InterferometerMatrix:
    """An N x N mode transformation together with its mode bookkeeping.

    flavor 'physical-unitary' requires M^dag M = I to 1e-10 (Frobenius);
    flavor 'extended-search' only requires spectral norm <= 1 + 1e-9, which is
    the sub-unitarity needed for a unitary dilation to exist.
    """

    matrix: np.ndarray
    mode_layout: ModeLayout
    flavor: str = PHYSICAL_UNITARY

    def __post_init__(self):
        m = np.asarray(self.matrix, dtype=np.complex128)
        object.__setattr__(self, "matrix", m)
        n = self.mode_layout.n_modes
        if m.shape != (n, n):
            raise ValueError(f"matrix shape {m.shape} does not match layout ({n} modes)")
        if self.flavor == PHYSICAL_UNITARY:
            defect = np.linalg.norm(m.conj().T @ m - np.eye(n))
            if defect > UNITARY_TOL:
                raise ValueError(
                    f"matrix is not unitary (Frobenius defect {defect:.2e})"
                )
        elif self.flavor == EXTENDED_SEARCH:
            top = np.linalg.norm(m, ord=2)
            if top > 1.0 + SUBUNITARY_TOL:
                raise ValueError(f"matrix is not subunitary (spectral norm {top:.12f})")
        else:
            raise ValueError(f"unknown flavor {self.flavor!r}")

    @property
    def n_modes(self) -> int:
        return self.mode_layout.n_modes


def permanent(m: np.ndarray) -> complex:
    """Matrix permanent by Gray-code Ryser inclusion-exclusion, O(2^n * n).

    The empty 0x0 matrix has permanent 1.  Sizes above 30 are rejected: the
    subset loop would overflow any reasonable time budget long before then.
    """
    a = np.ascontiguousarray(np.asarray(m, dtype=np.complex128))
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError("permanent requires a square matrix")
    if a.shape[0] > MAX_PERMANENT_DIM:
        raise ValueError(f"unsupported size: {a.shape[0]} > {MAX_PERMANENT_DIM}")
    return _kernels.permanent_kernel(a)


def _as_matrix(u) -> np.ndarray:
    if isinstance(u, InterferometerMatrix):
        return u.matrix
    return np.ascontiguousarray(np.asarray(u, dtype=np.complex128))


def transfer_amplitude(u, in_occ: OccupationVector, out_occ: OccupationVector) -> complex:
    """<out| Omega(U) |in> for Fock states over all N modes.

    Equals perm(U_sub) / sqrt(prod n_i! prod k_j!), with row i of U repeated
    n_i times and column j repeated k_j times.  The map conserves photon
    number, so mismatched totals are a caller error rather than a zero.
    """
    m = _as_matrix(u)
    n = m.shape[0]
    if len(in_occ) != n or len(out_occ) != n:
        raise ValueError("occupation vectors must cover all modes")
    if sum(in_occ) != sum(out_occ):
        raise PhotonCountError("non-conserving amplitude requested")
    rows = occupation_to_modes(in_occ)
    cols = occupation_to_modes(out_occ)
    sub = m[np.ix_(rows, cols)]
    norm = np.sqrt(occupation_factorial(in_occ) * occupation_factorial(out_occ))
    return permanent(sub) / norm


@dataclass(frozen=True)
class DevicePlan:
    """Precomputed photon routing for one (ancilla pattern, outcome) pair.

    rows[q] holds the sorted per-photon input mode indices for computational
    basis state q; cols[p] likewise for the p-th two-photon computational
    output pattern combined with the heralded outcome.  The output list covers
    the full two-photon sector of the computational modes: its first four
    entries (block_index) are the dual-rail states, the rest are leakage
    patterns.  inv_in / inv_out are the occupation-factorial normalizations.
    These arrays feed the permanent kernels directly.
    """

    n_modes: int
    n_photons: int
    ancilla_in: OccupationVector
    outcome: OccupationVector
    out_states: tuple[OccupationVector, ...]
    rows: np.ndarray = field(repr=False)
    cols: np.ndarray = field(repr=False)
    inv_in: np.ndarray = field(repr=False)
    inv_out: np.ndarray = field(repr=False)
    block_index: np.ndarray = field(repr=False)


@lru_cache(maxsize=256)
def compile_device(
    n_modes: int, ancilla_in: OccupationVector, outcome: OccupationVector
) -> DevicePlan:
    """Build the index arrays for kraus_operator / its gradient.

    ancilla_in and outcome run over the n_modes - 4 non-computational modes
    (ancilla first, then any vacuum modes, which must carry zeros).
    """
    from .fock import enumerate_fock_basis

    ancilla_in = tuple(int(x) for x in ancilla_in)
    outcome = tuple(int(x) for x in outcome)
    n_extra = n_modes - N_COMP_MODES
    if len(ancilla_in) != n_extra or len(outcome) != n_extra:
        raise ValueError(
            f"ancilla/outcome patterns must cover the {n_extra} non-computational modes"
        )
    if any(x < 0 for x in ancilla_in) or any(x < 0 for x in outcome):
        raise ValueError("photocounts must be non-negative")
    if sum(outcome) > sum(ancilla_in):
        raise PhotonCountError("outcome strips computational photons")
    n_photons = 2 + sum(ancilla_in)

    # Dual-rail states first, the six leakage patterns after them.
    out_states = list(DUAL_RAIL_STATES)
    out_states += [
        occ for occ in enumerate_fock_basis(2, N_COMP_MODES) if occ not in out_states
    ]

    anc_modes = tuple(N_COMP_MODES + m for m in occupation_to_modes(ancilla_in))
    out_modes = tuple(N_COMP_MODES + m for m in occupation_to_modes(outcome))
    rows = np.empty((4, n_photons), dtype=np.int64)
    for q in range(4):
        rows[q] = sorted(occupation_to_modes(dual_rail_state(q)) + anc_modes)
    cols = np.empty((len(out_states), 2 + sum(outcome)), dtype=np.int64)
    inv_out = np.empty(len(out_states))
    for p, occ in enumerate(out_states):
        cols[p] = sorted(occupation_to_modes(occ) + out_modes)
        inv_out[p] = 1.0 / np.sqrt(
            occupation_factorial(occ) * occupation_factorial(outcome)
        )
    inv_in = np.full(4, 1.0 / np.sqrt(occupation_factorial(ancilla_in)))
    return DevicePlan(
        n_modes=n_modes,
        n_photons=n_photons,
        ancilla_in=ancilla_in,
        outcome=outcome,
        out_states=tuple(out_states),
        rows=rows,
        cols=cols,
        inv_in=inv_in,
        inv_out=inv_out,
        block_index=np.arange(4, dtype=np.int64),
    )


def conditional_map(u: np.ndarray, plan: DevicePlan) -> np.ndarray:
    """Full conditional transfer map (10 x 4): dual-rail inputs to every
    two-photon computational output, conditioned on the heralded outcome.
    Rows 0..3 are the dual-rail block, rows 4..9 the leakage amplitudes."""
    if sum(plan.outcome) != sum(plan.ancilla_in):
        # Photon number is conserved: a herald that misses photons leaves
        # more than two in the computational modes, outside this sector.
        return np.zeros((len(plan.out_states), 4), dtype=np.complex128)
    return _kernels.transfer_kernel(u, plan.rows, plan.cols, plan.inv_in, plan.inv_out)


def conditional_map_grad(u: np.ndarray, plan: DevicePlan) -> tuple[np.ndarray, np.ndarray]:
    """Conditional map plus the holomorphic Jacobian dA[p,q]/dU[i,j]."""
    n = u.shape[0]
    n_out = len(plan.out_states)
    if sum(plan.outcome) != sum(plan.ancilla_in):
        return (
            np.zeros((n_out, 4), dtype=np.complex128),
            np.zeros((n_out, 4, n, n), dtype=np.complex128),
        )
    return _kernels.transfer_grad_kernel(
        u, plan.rows, plan.cols, plan.inv_in, plan.inv_out
    )


def kraus_matrix(u: np.ndarray, plan: DevicePlan) -> np.ndarray:
    """4x4 Kraus block A with A[p, q] = <dual(p), outcome| Omega(U) |dual(q), ancilla>."""
    return conditional_map(u, plan)[:4]


def kraus_operator(u, ancilla_in: OccupationVector, outcome: OccupationVector) -> np.ndarray:
    """Conditional Kraus operator on the dual-rail subspace.

    ``u`` may be an InterferometerMatrix or a plain N x N array; ``ancilla_in``
    and ``outcome`` cover the N - 4 non-computational modes.  Raises
    PhotonCountError when the herald would strip computational photons.
    """
    m = _as_matrix(u)
    plan = compile_device(m.shape[0], tuple(ancilla_in), tuple(outcome))
    return kraus_matrix(m, plan)
