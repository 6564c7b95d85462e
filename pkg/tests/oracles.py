"""Independent brute-force oracles used to freeze expected values.

Nothing here shares code with the permanent-based production path: the
permanent oracle is the naive n!-term permutation sum, and the transfer
oracle expands prod_i (sum_j U_ij b_j^dag)^{n_i} |0> monomial by monomial.
"""

from __future__ import annotations

import math
from itertools import permutations

import numpy as np


def permanent_brute_force(m: np.ndarray) -> complex:
    """Sum over all permutations: O(n! n)."""
    m = np.asarray(m)
    n = m.shape[0]
    total = 0.0 + 0.0j
    for sigma in permutations(range(n)):
        prod = 1.0 + 0.0j
        for i, j in enumerate(sigma):
            prod *= m[i, j]
        total += prod
    return total


def expand_output_amplitudes(u: np.ndarray, in_occ) -> dict[tuple[int, ...], complex]:
    """All output amplitudes <k| Omega(U) |in_occ> by polynomial expansion.

    Multiplies out the creation-operator polynomial one photon at a time,
    tracking monomial coefficients, then converts monomials to normalized Fock
    amplitudes via sqrt(prod k_j!) / sqrt(prod n_i!).
    """
    u = np.asarray(u, dtype=np.complex128)
    n_modes = u.shape[0]
    poly: dict[tuple[int, ...], complex] = {tuple([0] * n_modes): 1.0 + 0.0j}
    for i, n_i in enumerate(in_occ):
        for _ in range(n_i):
            new: dict[tuple[int, ...], complex] = {}
            for occ, coeff in poly.items():
                for j in range(n_modes):
                    if u[i, j] == 0:
                        continue
                    bumped = list(occ)
                    bumped[j] += 1
                    key = tuple(bumped)
                    new[key] = new.get(key, 0.0 + 0.0j) + coeff * u[i, j]
            poly = new
    in_norm = math.sqrt(math.prod(math.factorial(n) for n in in_occ))
    out = {}
    for occ, coeff in poly.items():
        out_norm = math.sqrt(math.prod(math.factorial(k) for k in occ))
        out[occ] = coeff * out_norm / in_norm
    return out


def transfer_amplitude_oracle(u: np.ndarray, in_occ, out_occ) -> complex:
    return expand_output_amplitudes(u, in_occ).get(tuple(out_occ), 0.0 + 0.0j)


def kraus_operator_oracle(u: np.ndarray, ancilla_in, outcome) -> np.ndarray:
    """Kraus block via the expansion oracle (no permanents anywhere)."""
    from loqcopt.fock import DUAL_RAIL_STATES

    a = np.zeros((4, 4), dtype=np.complex128)
    for q_in, comp_in in enumerate(DUAL_RAIL_STATES):
        amplitudes = expand_output_amplitudes(u, comp_in + tuple(ancilla_in))
        for q_out, comp_out in enumerate(DUAL_RAIL_STATES):
            a[q_out, q_in] = amplitudes.get(comp_out + tuple(outcome), 0.0 + 0.0j)
    return a


def haar_unitary(n: int, rng: np.random.Generator) -> np.ndarray:
    z = (rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))) / np.sqrt(2.0)
    q, r = np.linalg.qr(z)
    d = np.diag(r)
    return q * (d / np.abs(d))[None, :]
