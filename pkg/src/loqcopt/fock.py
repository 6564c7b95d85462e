"""Multimode Fock bookkeeping and the dual-rail two-qubit encoding.

Modes are 0-indexed.  The four computational modes are 0..3: qubit 1 lives on
modes (0, 1) and qubit 2 on modes (2, 3), with logical value 0 mapped to a
photon in the first rail and value 1 to the second.  Ancilla modes follow the
computational block, vacuum modes (if any) come last.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterator

OccupationVector = tuple[int, ...]

N_COMP_MODES = 4

# |00>, |01>, |10>, |11> in the dual-rail encoding; index = 2*q1 + q2.
DUAL_RAIL_STATES: tuple[OccupationVector, ...] = (
    (1, 0, 1, 0),
    (1, 0, 0, 1),
    (0, 1, 1, 0),
    (0, 1, 0, 1),
)

_DUAL_RAIL_INDEX = {occ: i for i, occ in enumerate(DUAL_RAIL_STATES)}


@dataclass(frozen=True)
class ModeLayout:
    """Partition of the interferometer modes.

    n_comp is fixed at 4 for two dual-rail qubits; vacuum modes are carried
    unoccupied at both input and output (they appear when a sub-unitary search
    result is dilated back to a physical unitary).
    """

    n_ancilla: int
    n_vacuum: int = 0
    n_comp: int = N_COMP_MODES

    def __post_init__(self):
        if self.n_comp != N_COMP_MODES:
            raise ValueError("two-qubit layouts use exactly 4 computational modes")
        if self.n_ancilla < 0 or self.n_vacuum < 0:
            raise ValueError("mode counts must be non-negative")

    @property
    def n_modes(self) -> int:
        return self.n_comp + self.n_ancilla + self.n_vacuum


def total_photons(occ: OccupationVector) -> int:
    return sum(occ)


def enumerate_fock_basis(n_photons: int, n_modes: int) -> list[OccupationVector]:
    """All occupation vectors of ``n_photons`` photons in ``n_modes`` modes,
    in ascending lexicographic order.

    The count is C(n_photons + n_modes - 1, n_modes - 1).
    """
    if n_photons < 0:
        raise ValueError("n_photons must be >= 0")
    if n_modes < 1:
        raise ValueError("n_modes must be >= 1")
    return list(_iter_occupations(n_photons, n_modes))


def _iter_occupations(n_photons: int, n_modes: int) -> Iterator[OccupationVector]:
    if n_modes == 1:
        yield (n_photons,)
        return
    for first in range(n_photons + 1):
        for rest in _iter_occupations(n_photons - first, n_modes - 1):
            yield (first,) + rest


def fock_basis_size(n_photons: int, n_modes: int) -> int:
    return math.comb(n_photons + n_modes - 1, n_modes - 1)


def dual_rail_state(index: int) -> OccupationVector:
    """Occupation vector on the computational modes for basis index 0..3."""
    return DUAL_RAIL_STATES[index]


def dual_rail_index(occ: OccupationVector) -> int | None:
    """Two-qubit basis index of a computational-mode occupation, or None for
    leakage states (e.g. both photons in one rail)."""
    if len(occ) != N_COMP_MODES:
        raise ValueError("expected an occupation over the 4 computational modes")
    return _DUAL_RAIL_INDEX.get(tuple(occ))


def occupation_to_modes(occ: OccupationVector) -> tuple[int, ...]:
    """Flatten an occupation vector into one mode index per photon."""
    modes: list[int] = []
    for m, count in enumerate(occ):
        if count < 0:
            raise ValueError("occupation numbers must be non-negative")
        modes.extend([m] * count)
    return tuple(modes)


def occupation_factorial(occ: OccupationVector) -> int:
    """prod_i n_i! for an occupation vector."""
    out = 1
    for n in occ:
        out *= math.factorial(n)
    return out
