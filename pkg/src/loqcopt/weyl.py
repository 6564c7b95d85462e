"""Weyl-chamber coordinates, KAK decomposition, and gate synthesis.

Any two-qubit unitary factors as local pre/post rotations around an entangling
core exp((i/2)(c1 XX + c2 YY + c3 ZZ)).  In the magic (Bell) basis the three
generators are simultaneously diagonal, so the core is synthesized exactly and
the decomposition reduces to diagonalizing the complex symmetric unitary
V^T V there.

Two canonical reductions of the coordinate triple appear:

* the Weyl-group reduction (permutations, pairwise sign flips, pi shifts,
  which are generated by local rotations) used inside kak_decompose - every
  move carries an explicit local compensation so reconstruction stays exact;
* the success-probability orbit, which additionally contains the complex
  conjugation map {c1,c2,c3} <-> {pi-c1,c2,c3} and the SWAP composition
  {c1,c2,c3} <-> {pi/2-c3, pi/2-c2, pi/2-c1}.  Those two are not local
  equivalences, so they cannot appear in a KAK factorization, but they do
  preserve the optimal success of a heralded linear-optical implementation.
  canonicalize() reduces modulo the full orbit into the quarter chamber with
  vertices O, CNOT, A2 and sqrt(SWAP).
"""

from __future__ import annotations

import cmath
import itertools
import math
from dataclasses import dataclass

import numpy as np

from .metrics import TargetGate

WeylCoordinates = tuple[float, float, float]

_SIGMA = (
    np.array([[0, 1], [1, 0]], dtype=np.complex128),
    np.array([[0, -1j], [1j, 0]], dtype=np.complex128),
    np.array([[1, 0], [0, -1]], dtype=np.complex128),
)

MAGIC = np.array(
    [
        [1, 0, 0, 1j],
        [0, 1j, 1, 0],
        [0, 1j, -1, 0],
        [1, 0, 0, -1j],
    ],
    dtype=np.complex128,
) / np.sqrt(2.0)
_MAGIC_DAG = MAGIC.conj().T

# Eigenvalues of XX, YY, ZZ on the magic-basis columns; the core gate is
# diag(exp(i theta)) there with theta = _PHASE_PATTERN @ c / 2.
_PHASE_PATTERN = np.array(
    [
        [1, -1, 1],
        [1, 1, -1],
        [-1, -1, -1],
        [-1, 1, 1],
    ],
    dtype=float,
)

WEYL_IDENTITY: WeylCoordinates = (0.0, 0.0, 0.0)
WEYL_CNOT: WeylCoordinates = (math.pi / 2, 0.0, 0.0)
WEYL_B: WeylCoordinates = (math.pi / 2, math.pi / 4, 0.0)
WEYL_SQRT_SWAP: WeylCoordinates = (math.pi / 4, math.pi / 4, math.pi / 4)
WEYL_SWAP: WeylCoordinates = (math.pi / 2, math.pi / 2, math.pi / 2)

_TWO_PI = 2.0 * math.pi
_EPS = 1e-9


def core_matrix(c: WeylCoordinates) -> np.ndarray:
    """exp((i/2)(c1 XX + c2 YY + c3 ZZ)), evaluated exactly in the magic basis."""
    theta = 0.5 * (_PHASE_PATTERN @ np.asarray(c, dtype=float))
    return MAGIC @ (np.exp(1j * theta)[:, None] * _MAGIC_DAG)


def gate_from_coordinates(c: WeylCoordinates) -> TargetGate:
    """Canonical entangling gate for a Weyl-coordinate triple."""
    c = tuple(float(x) for x in c)
    return TargetGate(matrix=core_matrix(c), weyl=c)


# ---------------------------------------------------------------------------
# Success-probability symmetry orbit and quarter-chamber canonical form.
# ---------------------------------------------------------------------------

def _signed_permutations() -> list[np.ndarray]:
    mats = []
    for perm in itertools.permutations(range(3)):
        for signs in itertools.product((1.0, -1.0), repeat=3):
            m = np.zeros((3, 3))
            for i, (p, s) in enumerate(zip(perm, signs)):
                m[i, p] = s
            mats.append(m)
    return mats


_ORBIT_LINEAR = _signed_permutations()
_ORBIT_SHIFTS = [
    np.array(v, dtype=float)
    for v in itertools.product((0.0, math.pi), repeat=3)
] + [
    np.array(v, dtype=float)
    for v in itertools.product((math.pi / 2, 3 * math.pi / 2), repeat=3)
]


def _mod_2pi(x: float) -> float:
    y = x % _TWO_PI
    if y > _TWO_PI - _EPS:
        y = 0.0
    return y


def _orbit_candidates(c: WeylCoordinates):
    v = np.asarray(c, dtype=float)
    for lin in _ORBIT_LINEAR:
        base = lin @ v
        for shift in _ORBIT_SHIFTS:
            w = base + shift
            yield (_mod_2pi(w[0]), _mod_2pi(w[1]), _mod_2pi(w[2]))


def symmetry_orbit(c: WeylCoordinates) -> list[WeylCoordinates]:
    """All coordinate triples sharing the optimal heralded success of ``c``.

    The orbit is generated by the Weyl group with pi shifts, the conjugation
    reflection and the SWAP shift; it closes after 48 signed permutations
    combined with 16 translations, reduced mod 2*pi.
    """
    seen: dict[tuple[int, int, int], WeylCoordinates] = {}
    for cand in _orbit_candidates(c):
        key = tuple(int(round(x / _EPS)) for x in cand)
        if key not in seen:
            seen[key] = cand
    return sorted(seen.values())


def _lex_less(a: WeylCoordinates, b: WeylCoordinates, tol: float = _EPS) -> bool:
    for x, y in zip(a, b):
        if x < y - tol:
            return True
        if x > y + tol:
            return False
    return False


def _in_half_chamber(c: WeylCoordinates, tol: float = _EPS) -> bool:
    c1, c2, c3 = c
    return (
        c1 <= math.pi / 2 + tol
        and c2 <= c1 + tol
        and c3 <= c2 + tol
        and c3 >= -tol
    )


def canonicalize(c: WeylCoordinates) -> WeylCoordinates:
    """Quarter-chamber representative of the success-probability orbit.

    Among all orbit images inside the half chamber 0 <= c3 <= c2 <= c1 <= pi/2
    the lexicographically smallest triple is returned; the resulting region is
    the tetrahedron with vertices O, CNOT, A2 and sqrt(SWAP) (boundary points
    tie-broken lexicographically).
    """
    best: WeylCoordinates | None = None
    for cand in _orbit_candidates(c):
        if not _in_half_chamber(cand):
            continue
        if best is None or _lex_less(cand, best):
            best = cand
    assert best is not None  # the Weyl group always reaches the half chamber
    return best


def canonical_key(c: WeylCoordinates, decimals: int = 9) -> str:
    """Stable string key for a gate class (used to deduplicate sweep points)."""
    cc = canonicalize(c)
    return ",".join(f"{x:.{decimals}f}" for x in cc)


# ---------------------------------------------------------------------------
# KAK decomposition.
# ---------------------------------------------------------------------------

class KAKError(ValueError):
    pass


@dataclass(frozen=True)
class KAKFactors:
    """V = global_phase * (post1 (x) post2) * core(c) * (pre1 (x) pre2)."""

    pre1: np.ndarray
    pre2: np.ndarray
    post1: np.ndarray
    post2: np.ndarray
    core: WeylCoordinates
    global_phase: complex

    def reconstruct(self) -> np.ndarray:
        return (
            self.global_phase
            * np.kron(self.post1, self.post2)
            @ core_matrix(self.core)
            @ np.kron(self.pre1, self.pre2)
        )


# Fixed mixing angles for jointly diagonalizing Re(X) and Im(X); retried in
# order until the commuting pair is resolved (needed on degenerate spectra).
_DIAG_MIX = (0.7548776662466927, 0.31830988618379067, 1.2360679774997896, 2.718281828459045)


def _diagonalize_unitary_symmetric(x: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Orthogonal diagonalization x = Q diag(exp(i lam)) Q^T, det Q = +1.

    x is unitary symmetric, so Re(x) and Im(x) are commuting real symmetric
    matrices; a generic real combination of the two separates every joint
    eigenspace.
    """
    xs = 0.5 * (x + x.T)
    scale = max(np.abs(xs).max(), 1.0)
    for mu in _DIAG_MIX:
        _, q = np.linalg.eigh(xs.real + mu * xs.imag)
        d = q.T @ xs @ q
        off = d - np.diag(np.diag(d))
        if np.abs(off).max() < 1e-10 * scale:
            if np.linalg.det(q) < 0:
                q = q.copy()
                q[:, 0] = -q[:, 0]
            return q, np.angle(np.diag(d))
    raise KAKError("failed to diagonalize V^T V; input too far from unitary")


def _kron_factor(g: np.ndarray) -> tuple[complex, np.ndarray, np.ndarray]:
    """Split g = phase * (a (x) b) with a, b in SU(2)."""
    i0, j0 = np.unravel_index(np.argmax(np.abs(g)), g.shape)
    p0, r0 = divmod(int(i0), 2)
    q0, s0 = divmod(int(j0), 2)
    pivot = g[i0, j0]
    a = np.array(
        [[g[2 * p + r0, 2 * q + s0] for q in range(2)] for p in range(2)],
        dtype=np.complex128,
    )
    b = np.array(
        [[g[2 * p0 + r, 2 * q0 + s] for s in range(2)] for r in range(2)],
        dtype=np.complex128,
    ) / pivot
    a_det = np.linalg.det(a)
    b_det = np.linalg.det(b)
    if abs(a_det) < 1e-12 or abs(b_det) < 1e-12:
        raise KAKError("local factor is singular; matrix is not a tensor product")
    a /= cmath.sqrt(a_det)
    b /= cmath.sqrt(b_det)
    phase = pivot / (a[p0, q0] * b[r0, s0])
    if np.abs(phase * np.kron(a, b) - g).max() > 1e-8:
        raise KAKError("matrix is not a tensor product of single-qubit gates")
    return phase, a, b


class _LocalTracker:
    """Weyl-group moves on the core coordinates with exact local compensation.

    Maintains V = phase * L * core(c) * R while c is reshuffled; every move
    multiplies L and R by explicit single-qubit (tensor) unitaries.
    """

    def __init__(self, c, left, right, phase):
        self.c = list(c)
        self.left = left
        self.right = right
        self.phase = phase

    def shift(self, k: int, steps: int):
        """c[k] += steps*pi, compensated by powers of i * sigma_k (x) sigma_k."""
        if steps == 0:
            return
        self.c[k] += steps * math.pi
        pauli = np.kron(_SIGMA[k], _SIGMA[k])
        factor = np.eye(4, dtype=np.complex128)
        for _ in range((-steps) % 4):
            factor = factor @ (1j * pauli)
        self.left = self.left @ factor

    def negate_pair(self, j: int, k: int):
        """(c_j, c_k) -> (-c_j, -c_k) by conjugating with sigma_m (x) 1."""
        m = 3 - j - k
        self.c[j] = -self.c[j]
        self.c[k] = -self.c[k]
        p = np.kron(_SIGMA[m], np.eye(2, dtype=np.complex128))
        self.left = self.left @ p
        self.right = p @ self.right

    def swap_pair(self, j: int, k: int):
        """c_j <-> c_k by conjugating with ((sigma_j+sigma_k)/sqrt2)^(x2)."""
        s = (_SIGMA[j] + _SIGMA[k]) / np.sqrt(2.0)
        p = np.kron(s, s)
        self.c[j], self.c[k] = self.c[k], self.c[j]
        self.left = self.left @ p
        self.right = p @ self.right

    def _sort_descending(self):
        for j, k in ((0, 1), (1, 2), (0, 1)):
            if self.c[j] < self.c[k]:
                self.swap_pair(j, k)

    def reduce(self):
        """Bring c into the Weyl chamber 0 <= c3 <= c2 <= c1 <= pi - c2 (with
        the base identification c1 <= pi/2 when c3 = 0)."""
        for k in range(3):
            self.shift(k, -math.floor(self.c[k] / math.pi))
        self._sort_descending()
        if self.c[0] + self.c[1] > math.pi + 1e-12:
            self.negate_pair(0, 1)
            self.shift(0, 1)
            self.shift(1, 1)
            self._sort_descending()
        if self.c[2] < 1e-10 and self.c[0] > math.pi / 2 + 1e-10:
            self.negate_pair(0, 2)
            self.shift(0, 1)
            self._sort_descending()


def kak_decompose(v: np.ndarray, atol: float = 1e-9) -> KAKFactors:
    """Cartan KAK decomposition of a 4x4 unitary.

    The determinant phase is split off, V^T V is diagonalized orthogonally in
    the magic basis, and the resulting coordinates are reduced into the Weyl
    chamber with the compensating local rotations tracked move by move.
    """
    v = np.asarray(v, dtype=np.complex128)
    if v.shape != (4, 4) or np.linalg.norm(v.conj().T @ v - np.eye(4)) > 1e-10:
        raise KAKError("KAK requires unitary input")

    det = np.linalg.det(v)
    root = cmath.exp(cmath.log(det) / 4.0)
    v_su = v / root

    ut = _MAGIC_DAG @ v_su @ MAGIC
    q, lam = _diagonalize_unitary_symmetric(ut.T @ ut)
    theta = 0.5 * lam

    # Force det(diag(exp(i theta))) = +1 so the left factor lands in SO(4).
    if round(theta.sum() / math.pi) % 2:
        theta[int(np.argmax(theta))] -= math.pi
    o = (ut @ q) * np.exp(-1j * theta)[None, :]
    if np.abs(o.imag).max() > 1e-7:
        raise KAKError("orthogonal factor has a residual imaginary part")
    o = o.real

    # Re-express the diagonal as a pure core gate by splitting off the phase
    # that makes the four angles sum to zero.
    total = float(theta.sum())
    theta0 = theta - total / 4.0
    coords = (
        float(theta0[0] + theta0[1]),
        float(theta0[1] + theta0[3]),
        float(theta0[0] + theta0[3]),
    )

    tracker = _LocalTracker(
        coords,
        MAGIC @ o @ _MAGIC_DAG,
        MAGIC @ q.T @ _MAGIC_DAG,
        root * cmath.exp(1j * total / 4.0),
    )
    tracker.reduce()

    phase_l, post1, post2 = _kron_factor(tracker.left)
    phase_r, pre1, pre2 = _kron_factor(tracker.right)
    factors = KAKFactors(
        pre1=pre1,
        pre2=pre2,
        post1=post1,
        post2=post2,
        core=tuple(tracker.c),
        global_phase=tracker.phase * phase_l * phase_r,
    )
    if np.linalg.norm(factors.reconstruct() - v) > atol:
        raise KAKError("KAK reconstruction failed to reach tolerance")
    return factors


def weyl_coordinates(v: np.ndarray) -> WeylCoordinates:
    """Weyl-chamber coordinates of a 4x4 unitary (shorthand for the KAK core)."""
    return kak_decompose(v).core
