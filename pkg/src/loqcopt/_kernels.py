"""Low-level permanent kernels.

Everything here operates on raw complex128 arrays so that the hot loops can be
JIT-compiled with numba.  The pure-Python definitions below are the reference
implementations; when numba is importable they are replaced by compiled
versions with identical semantics.  All callers go through this module, so the
compiled and interpreted paths cannot drift apart.
"""

from __future__ import annotations

import numpy as np

try:
    import numba

    _HAVE_NUMBA = True
except ImportError:  # pragma: no cover - numba is a declared dependency
    numba = None
    _HAVE_NUMBA = False


def _perm_ryser(a):
    """Permanent of a square complex matrix, Ryser formula with Gray-code
    subset updates: O(2^n * n) work, exact in double precision for n <= ~30.

    perm(A) = (-1)^n sum_{S != empty} (-1)^{|S|} prod_i sum_{j in S} A[i, j]
    """
    n = a.shape[0]
    if n == 0:
        return 1.0 + 0.0j
    row_sums = np.zeros(n, np.complex128)
    total = 0.0 + 0.0j
    gray = 0
    for k in range(1, 1 << n):
        g = k ^ (k >> 1)
        bit = g ^ gray
        j = 0
        while (bit >> j) & 1 == 0:
            j += 1
        if g & bit:
            for i in range(n):
                row_sums[i] += a[i, j]
        else:
            for i in range(n):
                row_sums[i] -= a[i, j]
        gray = g
        prod = 1.0 + 0.0j
        for i in range(n):
            prod *= row_sums[i]
        # Gray codes flip one bit per step, so parity(|S|) == parity(k).
        if k & 1:
            total -= prod
        else:
            total += prod
    if n & 1:
        return -total
    return total


def _transfer_entries(u, rows, cols, inv_in, inv_out, out):
    """Fill the transfer matrix ``out`` of shape (n_out, n_in).

    rows[q] lists the input mode of every photon for input state q, sorted
    ascending; cols[p] likewise for output state p.  inv_in/inv_out carry the
    1/sqrt(prod n_i!) occupation normalizations.
    """
    n_out, n_in = out.shape
    n_ph = rows.shape[1]
    sub = np.empty((n_ph, n_ph), np.complex128)
    for p in range(n_out):
        for q in range(n_in):
            for r in range(n_ph):
                for c in range(n_ph):
                    sub[r, c] = u[rows[q, r], cols[p, c]]
            out[p, q] = _perm_ryser(sub) * (inv_in[q] * inv_out[p])


def _transfer_entries_grad(u, rows, cols, inv_in, inv_out, out, grad):
    """Transfer matrix plus holomorphic derivatives d out[p,q] / d u[i,j].

    d perm / d u[i,j] = (multiplicity of row i) * (multiplicity of col j)
    * perm(minor with one instance of each removed); repeated rows/columns
    share identical minors, so runs of equal indices are processed once.
    ``grad`` has shape (n_out, n_in, N, N) and must be zero-initialized.
    """
    n_out, n_in = out.shape
    n_ph = rows.shape[1]
    sub = np.empty((n_ph, n_ph), np.complex128)
    minor = np.empty((n_ph - 1, n_ph - 1), np.complex128)
    for p in range(n_out):
        for q in range(n_in):
            for r in range(n_ph):
                for c in range(n_ph):
                    sub[r, c] = u[rows[q, r], cols[p, c]]
            scale = inv_in[q] * inv_out[p]
            out[p, q] = _perm_ryser(sub) * scale
            r0 = 0
            while r0 < n_ph:
                rmult = 1
                while r0 + rmult < n_ph and rows[q, r0 + rmult] == rows[q, r0]:
                    rmult += 1
                c0 = 0
                while c0 < n_ph:
                    cmult = 1
                    while c0 + cmult < n_ph and cols[p, c0 + cmult] == cols[p, c0]:
                        cmult += 1
                    for r in range(n_ph):
                        if r == r0:
                            continue
                        rr = r if r < r0 else r - 1
                        for c in range(n_ph):
                            if c == c0:
                                continue
                            cc = c if c < c0 else c - 1
                            minor[rr, cc] = sub[r, c]
                    pm = _perm_ryser(minor)
                    grad[p, q, rows[q, r0], cols[p, c0]] += (
                        rmult * cmult * scale
                    ) * pm
                    c0 += cmult
                r0 += rmult


if _HAVE_NUMBA:
    _perm_ryser = numba.njit(cache=True)(_perm_ryser)
    _transfer_entries = numba.njit(cache=True)(_transfer_entries)
    _transfer_entries_grad = numba.njit(cache=True)(_transfer_entries_grad)


def permanent_kernel(a: np.ndarray) -> complex:
    """Permanent of ``a`` (complex128, C-contiguous)."""
    return complex(_perm_ryser(a))


def transfer_kernel(u, rows, cols, inv_in, inv_out) -> np.ndarray:
    out = np.empty((cols.shape[0], rows.shape[0]), np.complex128)
    _transfer_entries(u, rows, cols, inv_in, inv_out, out)
    return out


def transfer_grad_kernel(u, rows, cols, inv_in, inv_out):
    n = u.shape[0]
    out = np.empty((cols.shape[0], rows.shape[0]), np.complex128)
    grad = np.zeros((cols.shape[0], rows.shape[0], n, n), np.complex128)
    _transfer_entries_grad(u, rows, cols, inv_in, inv_out, out, grad)
    return out, grad
