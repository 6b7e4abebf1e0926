"""Entanglement measures built from tanglemeter coefficients and canonic
amplitudes: the coefficient norm S2, the orbit distance, the canonic
normalization S1 with its non-unitarity, and the fourpartite measure K4.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .config import FlowConfig
from .invariants import canonic_amplitudes, invariants4
from .su_reduction import reduce_su

__all__ = [
    "MeasureReport",
    "s2",
    "orbit_distance",
    "s1_and_nonunitarity",
    "kappa4",
    "k4",
]


@dataclass(frozen=True)
class MeasureReport:
    """Bundle of the scalar measures for one four-qubit state."""

    s2: float | None
    s1: float | None
    nonunitarity: float | None
    kappa4: complex
    k4: float
    class_label: str


def s2(tm):
    """Sum of squared moduli of the general-family coefficients."""
    if tm.family != "general":
        raise ValueError(
            "S2 is defined on the general family only; use orbit_distance "
            "or the family-specific parameters for special/degenerate forms"
        )
    return float(sum(abs(b) ** 2 for b in tm.betas))


def orbit_distance(a, b):
    """Squared coefficient distance between two general-family forms."""
    if a.family != "general" or b.family != "general":
        raise ValueError("orbit distance requires two general-family forms")
    return float(sum(abs(x - y) ** 2 for x, y in zip(a.betas, b.betas)))


def s1_and_nonunitarity(state, tol_radicand=None):
    """Canonic normalization S1 and the non-unitarity |ln S1|.

    The input is normalized before the invariants are evaluated; S1 sums
    the squared moduli over the eight canonic slots (each degenerate
    middle amplitude counted on both of its slots).
    """
    if state.n != 4:
        raise ValueError("S1 is defined for four-qubit states")
    kwargs = {} if tol_radicand is None else {"tol_radicand": tol_radicand}
    inv = invariants4(state.normalized(), **kwargs)
    amps = canonic_amplitudes(inv, **kwargs)
    s1 = float(np.sum(np.abs(amps) ** 2))
    return s1, abs(math.log(s1))


def kappa4(su_canonic):
    """Quartic determinant measure on su-canonic amplitudes.

    Builds the 4x4 array with diagonal
    ``-psi15 psi0 + psi6 psi9 + psi3 psi12 + psi5 psi10`` and
    off-diagonal entries ``2 psi_i psi_j``, and returns det / psi0^8.
    The value is homogeneous of degree zero, so the normalization of the
    input does not matter; psi0 = 0 is rejected (it cannot occur for a
    reduced state).
    """
    if su_canonic.n != 4:
        raise ValueError("kappa4 is defined for four-qubit states")
    psi = su_canonic.amps
    if abs(psi[0]) < 1e-300:
        raise ValueError("reference amplitude vanishes; reduce the state first")
    big = -psi[15] * psi[0] + psi[6] * psi[9] + psi[3] * psi[12] + psi[5] * psi[10]
    m = np.array(
        [
            [big, 2 * psi[6] * psi[10], 2 * psi[6] * psi[12], 2 * psi[10] * psi[12]],
            [2 * psi[5] * psi[9], big, 2 * psi[5] * psi[12], 2 * psi[9] * psi[12]],
            [2 * psi[3] * psi[9], 2 * psi[3] * psi[10], big, 2 * psi[9] * psi[10]],
            [2 * psi[3] * psi[5], 2 * psi[3] * psi[6], 2 * psi[5] * psi[6], big],
        ],
        dtype=np.complex128,
    )
    return complex(np.linalg.det(m) / psi[0] ** 8)


def k4(state, cfg=None):
    """Fourpartite entanglement measure 4 sqrt(|kappa4| / A^4).

    Runs the su reduction and evaluates kappa4 and the amplitude sum
    ``A = sum_i |psi_i / psi_0|^2`` on the canonic amplitudes; invariant
    under local unitaries on the input up to the flow tolerance.
    """
    if state.n != 4:
        raise ValueError("K4 is defined for four-qubit states")
    cfg = cfg or FlowConfig()
    tm, _ = reduce_su(state, cfg)
    return k4_from_canonic(tm.state)


def k4_from_canonic(su_canonic):
    """K4 evaluated directly on an already su-canonic state."""
    psi = su_canonic.amps
    kap = kappa4(su_canonic)
    a = float(np.sum(np.abs(psi / psi[0]) ** 2))
    return float(4.0 * math.sqrt(abs(kap) / a ** 4))
