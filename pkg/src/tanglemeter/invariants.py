"""Polynomial invariants under local operations for three and four qubits.

All contractions are evaluated by direct summation over binary indices
(einsum with explicit index strings mirroring the defining index
patterns).  Tensors are indexed ``T[k_n, ..., k_1]`` so that axis 0 is
the highest qubit; index raising contracts every axis with the rank-2
antisymmetric tensor (eps^{01} = +1).
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np

from .config import DEFAULT_TOL_RADICAND
from .errors import ReconstructionError
from .states import PureState

__all__ = [
    "EPSILON",
    "CANONIC_MASKS",
    "InvariantSet3",
    "InvariantSet4",
    "raise_indices",
    "invariants3",
    "invariants4",
    "canonic_amplitudes",
    "betas_from_invariants",
]

EPSILON = np.array([[0.0, 1.0], [-1.0, 0.0]], dtype=np.complex128)

# Bitmask slots of the nonzero canonic amplitudes: the reference state,
# the three degenerate middle pairs, and the fully excited state.
CANONIC_MASKS = (0, 3, 12, 6, 9, 5, 10, 15)


@dataclass(frozen=True)
class InvariantSet4:
    """Invariants of a four-qubit state under per-qubit SL maps.

    i2 is the quadratic invariant; i4 the three fourth-order invariants
    (qubit pairings 12|34, 13|24, 14|23); i6 the three sixth-order
    combinations (order: I6_12, I6_23, I6_13); q_roots the roots of the
    cubic closure equation; chosen_q the root whose reconstructed
    canonic state has normalization closest to the input's, or None when
    no root admits a branch-consistent reconstruction.
    """

    i2: complex
    i4: tuple
    i6: tuple
    q_roots: tuple
    chosen_q: complex | None


@dataclass(frozen=True)
class InvariantSet3:
    """Local-unitary invariants of a three-qubit state.

    i1..i3 are the single-qubit purities (real); i45 is the complex
    epsilon-contracted invariant whose modulus gives the residual
    tripartite entanglement tau = 2 |i45| (the 3-tangle).
    """

    i1: float
    i2: float
    i3: float
    i45: complex
    tau: float


def _tensor(state):
    return state.amps.reshape((2,) * state.n)


def raise_indices(state):
    """Contract every index with the antisymmetric tensor."""
    if state.n not in (3, 4):
        raise ValueError("index raising is implemented for n in {3, 4}")
    t = _tensor(state)
    if state.n == 3:
        return np.einsum("ia,jb,kc,abc->ijk", EPSILON, EPSILON, EPSILON, t)
    return np.einsum(
        "ia,jb,kc,ld,abcd->ijkl", EPSILON, EPSILON, EPSILON, EPSILON, t
    )


def invariants3(state):
    """Five local-unitary invariants of a normalized three-qubit state."""
    if state.n != 3:
        raise ValueError("invariants3 requires a three-qubit state")
    lo = _tensor(state)
    hi = raise_indices(state)
    lc = lo.conj()
    i1 = np.einsum("kij,pij,pmn,kmn->", lo, lc, lo, lc)
    i2 = np.einsum("ikj,ipj,mpn,mkn->", lo, lc, lo, lc)
    i3 = np.einsum("ijk,ijp,mnp,mnk->", lo, lc, lo, lc)
    i45 = complex(np.einsum("ijk,ijp,mnp,mnk->", lo, hi, lo, hi))
    return InvariantSet3(
        i1=float(i1.real),
        i2=float(i2.real),
        i3=float(i3.real),
        i45=i45,
        tau=2.0 * abs(i45),
    )


def _contractions4(amps):
    state_tensor = amps.reshape((2,) * 4)
    lo = state_tensor
    hi = np.einsum(
        "ia,jb,kc,ld,abcd->ijkl", EPSILON, EPSILON, EPSILON, EPSILON, lo
    )
    i2 = complex(np.einsum("ijkl,ijkl->", lo, hi))
    i4_12 = complex(np.einsum("ijkl,ijmn,opmn,opkl->", lo, hi, lo, hi))
    i4_13 = complex(np.einsum("ikjl,imjn,ompn,okpl->", lo, hi, lo, hi))
    i4_14 = complex(np.einsum("iklj,imnj,omnp,oklp->", lo, hi, lo, hi))

    def six(a_strs, b_strs):
        a = np.einsum(
            f"{a_strs[0]},{a_strs[1]},{a_strs[2]},mrgd,inph,sjko->",
            lo, lo, lo, hi, hi, hi,
        )
        b = np.einsum(
            f"{b_strs[0]},{b_strs[1]},{b_strs[2]},mrgd,inph,sjko->",
            lo, lo, lo, hi, hi, hi,
        )
        return complex(a - b) / 6.0

    i6_12 = six(("ingd", "mrko", "sjph"), ("ingo", "mrkh", "sjpd"))
    i6_23 = six(("ijpo", "mngh", "srkd"), ("ijpd", "mngo", "srkh"))
    i6_13 = six(("ijkh", "mnpd", "srgo"), ("ijgh", "mnkd", "srpo"))
    return i2, (i4_12, i4_13, i4_14), (i6_12, i6_23, i6_13)


def _cubic_roots(i2, i6):
    """Roots of (I6_13 + Q)(I6_23 + Q)(I6_12 + Q) = (I2)^3 Q^2."""
    a, b, c = i6[2], i6[1], i6[0]  # I6_13, I6_23, I6_12
    coeffs = [
        1.0,
        a + b + c - i2 ** 3,
        a * b + b * c + c * a,
        a * b * c,
    ]
    return tuple(np.roots(np.array(coeffs, dtype=np.complex128)))


def invariants4(state, tol_radicand=DEFAULT_TOL_RADICAND):
    """All seven four-qubit invariants, with the cubic roots.

    The preferred root (chosen_q) minimizes the difference between the
    reconstructed canonic normalization and the input normalization.
    """
    if state.n != 4:
        raise ValueError("invariants4 requires a four-qubit state")
    i2, i4, i6 = _contractions4(state.amps)
    q_roots = _cubic_roots(i2, i6)
    input_norm = float(np.sum(np.abs(state.amps) ** 2))
    chosen, best = None, np.inf
    for q in q_roots:
        try:
            amps = _reconstruct(i2, i4, i6, q, tol_radicand)
        except ReconstructionError:
            continue
        norm = float(np.sum(np.abs(amps) ** 2))
        if abs(norm - input_norm) < best:
            best = abs(norm - input_norm)
            chosen = q
    return InvariantSet4(i2=i2, i4=i4, i6=i6, q_roots=q_roots, chosen_q=chosen)


def _reconstruct(i2, i4, i6, q, tol_radicand, tol_check=1e-7):
    """Canonic amplitude vector (16 slots) for one cubic root.

    Searches the 2^3 sign choices of the three inner square roots in a
    fixed order and returns the first branch whose reconstructed
    invariants reproduce the inputs to tol_check (relative).
    """
    i6_12, i6_23, i6_13 = i6
    L = complex(i2) ** 1.5
    quarter = complex(i2) ** 0.25
    if abs(quarter) < 1e-30:
        raise ReconstructionError(
            "quadratic invariant vanishes; canonic form undefined",
            diagnostics={"i2": i2},
        )
    base = (
        np.sqrt(complex(i6_13 + q)),
        np.sqrt(complex(i6_23 + q)),
        np.sqrt(complex(i6_12 + q)),
    )
    scale = max(abs(L), abs(i6_12), abs(i6_23), abs(i6_13), 1e-30)
    residuals = {}
    for signs in itertools.product((1.0, -1.0), repeat=3):
        r13, r23, r12 = (s * r for s, r in zip(signs, base))
        amps = _amps_from_roots(r13, r23, r12, L, quarter, scale, tol_radicand)
        if amps is None:
            continue
        err = _invariant_distance(_contractions4(amps), (i2, i4, i6))
        if err < tol_check:
            return amps
        residuals[signs] = err
    raise ReconstructionError(
        "no branch assignment reproduces the invariants",
        diagnostics={"q": q, "branch_residuals": residuals},
    )


def _amps_from_roots(r13, r23, r12, L, quarter, scale, tol_radicand):
    amps = np.zeros(16, dtype=np.complex128)
    S = r13 + r23 + r12
    lead = S - L
    if abs(lead) <= tol_radicand * scale:
        # GHZ-limit branch: the middle amplitudes vanish while the product
        # of the end amplitudes stays finite; split it symmetrically.
        end = np.sqrt((S + L) / (4.0 * quarter ** 2))
        amps[0] = end
        amps[15] = end
        return amps
    psi0 = np.sqrt(lead) / (np.sqrt(2.0) * quarter)
    pair3 = np.sqrt(r13 - r23 - r12 + L) / (2.0 * quarter)  # masks 3, 12
    pair6 = np.sqrt(r23 - r13 - r12 + L) / (2.0 * quarter)  # masks 6, 9
    pair5 = np.sqrt(r12 - r23 - r13 + L) / (2.0 * quarter)  # masks 5, 10
    psi15 = (S + L) / (2.0 * np.sqrt(2.0) * quarter * np.sqrt(lead))
    amps[0] = psi0
    amps[3] = amps[12] = pair3
    amps[6] = amps[9] = pair6
    amps[5] = amps[10] = pair5
    amps[15] = psi15
    return amps


def _invariant_distance(a, b):
    i2a, i4a, i6a = a
    i2b, i4b, i6b = b
    vals_a = np.array([i2a, *i4a, *i6a])
    vals_b = np.array([i2b, *i4b, *i6b])
    scale = max(float(np.max(np.abs(vals_b))), 1e-30)
    return float(np.max(np.abs(vals_a - vals_b))) / scale


def canonic_amplitudes(inv, tol_radicand=DEFAULT_TOL_RADICAND):
    """Canonic amplitude vector (16 slots, CANONIC_MASKS populated).

    The degenerate middle pairs carry equal values, so the vector holds
    eight nonzero entries built from five distinct amplitude values.
    Raises ReconstructionError when chosen_q is unset or no sign branch
    closes (special or degenerate orbits).
    """
    if inv.chosen_q is None:
        raise ReconstructionError(
            "no cubic root admits a consistent reconstruction "
            "(special or degenerate orbit)",
            diagnostics={"q_roots": inv.q_roots},
        )
    return _reconstruct(inv.i2, inv.i4, inv.i6, inv.chosen_q, tol_radicand)


def betas_from_invariants(inv, tol_radicand=DEFAULT_TOL_RADICAND):
    """Scale-invariant coefficient triple (beta3, beta5, beta6).

    Ratios of the canonic middle amplitudes to the reference amplitude,
    keyed by the coefficient slots they feed: beta3 from masks {3, 12},
    beta5 from {5, 10}, beta6 from {6, 9}.  Invariant under rescaling of
    the input state by any nonzero complex constant.
    """
    amps = canonic_amplitudes(inv, tol_radicand=tol_radicand)
    psi0 = amps[0]
    if abs(psi0) < 1e-30:
        raise ReconstructionError(
            "reference canonic amplitude vanishes",
            diagnostics={"amplitudes": amps.tolist()},
        )
    return (
        complex(amps[3] / psi0),
        complex(amps[5] / psi0),
        complex(amps[6] / psi0),
    )


def reconstruction_state(inv, tol_radicand=DEFAULT_TOL_RADICAND):
    """Canonic amplitudes wrapped as a PureState (not normalized)."""
    return PureState(4, canonic_amplitudes(inv, tol_radicand=tol_radicand))
