"""Reduction of a state to its su-canonic form (the su-tanglemeter).

The reduction runs a feedback-controlled flow of local unitaries whose
pump amplitudes are the linear nilpotential coefficients: each step is
``exp(-i H dt)`` with ``P_i- = -i beta_i``, ``P_i+ = (P_i-)*``,
``P_i^z = 0``, which monotonically raises the reference population until
all linear coefficients vanish.  Per-qubit phase rotations then make the
order-(n-1) coefficients real and non-negative, and a final discrete
canonicalization removes the residual lattice of diagonal phase
operations that the reality convention alone leaves free.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .config import FlowConfig
from .errors import ConvergenceError
from .nilpotent import NilpotentPoly
from .states import LocalOperation, PureState, apply_local, nilpotential

__all__ = [
    "SuTanglemeter",
    "prerotate",
    "reduce_su",
    "coset_dimension",
]

# Slots with coefficients smaller than this (relative to the largest
# coefficient) do not contribute phase-fixing constraints: their argument
# is numerically meaningless noise.
_PHASE_SUPPORT_REL = 1e-9

# Step-size adaptation: grow after every accepted step (up to the cap),
# halve whenever the reference population would decrease.  The rotation
# angle of a single step is additionally capped at one radian to keep
# large pump amplitudes from overshooting the critical point.
_DT_GROWTH = 1.2
_DT_MAX = 1.0
_MAX_STEP_ANGLE = 1.0


@dataclass(frozen=True)
class SuTanglemeter:
    """su-canonic nilpotential with reduction diagnostics.

    ``state`` is the canonic representative itself (normalized), i.e. the
    input state transported by the returned local unitary.
    """

    poly: NilpotentPoly
    achieved_population: float
    iterations: int
    residual: float
    state: PureState

    @property
    def n(self):
        return self.poly.n


def coset_dimension(n, group):
    """Real dimension of the orbit coset: the parameter count of the
    canonic form under local unitary ("su") or invertible ("sl") maps."""
    if group == "su":
        if n < 3:
            raise ValueError("su coset dimension is defined for n >= 3")
        return 2 ** (n + 1) - 3 * n - 2
    if group == "sl":
        if n < 4:
            raise ValueError("sl coset dimension is defined for n >= 4")
        return 2 ** (n + 1) - 6 * n - 2
    raise ValueError(f"unknown group {group!r}")


# ---------------------------------------------------------------------------
# prerotation


def _align_matrix(rho):
    """Unitary sending the dominant eigenvector of a 1-qubit density
    matrix to |0>, with a deterministic phase convention."""
    vals, vecs = np.linalg.eigh(rho)
    v = vecs[:, int(np.argmax(vals))]
    k = int(np.argmax(np.abs(v)))
    phase = v[k] / abs(v[k]) if abs(v[k]) > 0 else 1.0
    v = v / phase
    return np.array([[v[0].conjugate(), v[1].conjugate()], [-v[1], v[0]]])


def _reduced_density(amps, n, qubit):
    arr = amps.reshape((2,) * n)
    axis = n - qubit  # qubit i occupies axis n - i
    arr = np.moveaxis(arr, axis, 0).reshape(2, -1)
    return arr @ arr.conj().T


def _prerotate_with_op(state):
    """Alignment prerotation returning the accumulated operation.

    Aligning each single-qubit reduced state collapses arbitrary local
    unitaries between two states on one orbit down to diagonal phases,
    which the later phase fixing removes; a bit-flip fallback guarantees
    the reference-population bound for states orthogonal to the vacuum.
    """
    amps = state.normalized().amps
    n = state.n
    mats = []
    for qubit in range(1, n + 1):
        rho = _reduced_density(amps, n, qubit)
        mats.append(_align_matrix(rho))
    amps = _apply_product(amps, n, mats)
    bound = 2.0 ** (-n / 2.0) * np.max(np.abs(amps))
    if abs(amps[0]) < bound:
        flip_mask = int(np.argmax(np.abs(amps)))
        x = np.array([[0.0, 1.0], [1.0, 0.0]], dtype=np.complex128)
        eye = np.eye(2, dtype=np.complex128)
        flips = [x if (flip_mask >> i) & 1 else eye for i in range(n)]
        amps = _apply_product(amps, n, flips)
        mats = [flips[i] @ mats[i] for i in range(n)]
    op = LocalOperation(mats, kind="unitary")
    return PureState(n, amps), op


def prerotate(state):
    """Per-qubit unitaries raising the reference amplitude to at least
    ``2**(-n/2)`` times the largest amplitude."""
    rotated, _ = _prerotate_with_op(state)
    return rotated


def _apply_product(amps, n, mats):
    arr = amps.reshape((2,) * n)
    for i, mat in enumerate(mats):
        axis = n - 1 - i
        arr = np.moveaxis(np.tensordot(mat, arr, axes=([1], [axis])), 0, axis)
    return arr.reshape(-1)


def _apply_step(amps, n, mats):
    """Single-einsum application of a product operation (hot path)."""
    if n == 4:
        return np.einsum(
            "ab,cd,ef,gh,bdfh->aceg",
            mats[3], mats[2], mats[1], mats[0],
            amps.reshape(2, 2, 2, 2),
            optimize=False,
        ).reshape(-1)
    if n == 3:
        return np.einsum(
            "ab,cd,ef,bdf->ace",
            mats[2], mats[1], mats[0],
            amps.reshape(2, 2, 2),
            optimize=False,
        ).reshape(-1)
    return _apply_product(amps, n, mats)


# ---------------------------------------------------------------------------
# the unitary flow


def _pump_step_matrices(betas, dt):
    """Per-qubit ``exp(-i H dt)`` for H = P- s+ + P+ s- with P- = -i beta."""
    mats = []
    for beta in betas:
        mag = abs(beta)
        if mag < 1e-300:
            mats.append(np.eye(2, dtype=np.complex128))
            continue
        phi = dt * mag
        c, s = math.cos(phi), math.sin(phi)
        u = beta / mag
        mats.append(np.array([[c, s * u.conjugate()], [-s * u, c]]))
    return mats


def reduce_su(state, cfg=None):
    """Flow a state to its su-tanglemeter.

    Returns (SuTanglemeter, LocalOperation); the operation maps the input
    state onto the canonic representative.  Raises ConvergenceError when
    the linear coefficients fail to reach ``cfg.tol_linear`` within
    ``cfg.max_iters`` accepted steps.
    """
    cfg = cfg or FlowConfig()
    n = state.n
    current, op = _prerotate_with_op(state)
    amps = current.amps.copy()
    linear_masks = [1 << i for i in range(n)]
    step_mats_total = [np.eye(2, dtype=np.complex128) for _ in range(n)]

    dt = cfg.dt0
    population = abs(amps[0]) ** 2
    iterations = 0
    residual = float("inf")
    while True:
        betas = amps[linear_masks] / amps[0]
        residual = float(np.max(np.abs(betas)))
        if residual < cfg.tol_linear:
            break
        if iterations >= cfg.max_iters:
            raise ConvergenceError(
                f"su reduction stalled at residual {residual:.3e} after "
                f"{iterations} steps",
                residual=residual,
                iterations=iterations,
            )
        while True:
            step_dt = min(dt, _MAX_STEP_ANGLE / residual)
            mats = _pump_step_matrices(betas, step_dt)
            candidate = _apply_step(amps, n, mats)
            candidate /= np.linalg.norm(candidate)
            new_population = abs(candidate[0]) ** 2
            if new_population + 1e-15 >= population:
                break
            dt *= 0.5
            if dt < 1e-12:
                raise ConvergenceError(
                    "population stopped increasing at any usable step size",
                    residual=residual,
                    iterations=iterations,
                )
        amps = candidate
        population = new_population
        step_mats_total = [mats[i] @ step_mats_total[i] for i in range(n)]
        iterations += 1
        dt = min(dt * _DT_GROWTH, _DT_MAX)

    flow_op = LocalOperation(step_mats_total, kind="unitary")
    flowed = PureState(n, amps)
    fixed, phase_op = _phase_canonicalize(flowed, tol_phase=cfg.tol_phase)
    total = op.then(flow_op).then(phase_op)
    poly = nilpotential(fixed)
    tm = SuTanglemeter(
        poly=poly,
        achieved_population=float(abs(fixed.amps[0]) ** 2),
        iterations=iterations,
        residual=residual,
        state=fixed,
    )
    return tm, total


# ---------------------------------------------------------------------------
# phase fixing


def _incidence(mask, n):
    return np.array([(mask >> i) & 1 for i in range(n)], dtype=float)


def _phase_priority(n):
    """Constraint order: order-(n-1) slots, the top slot, then the rest
    by ascending order and mask (linear slots are already zero)."""
    full = (1 << n) - 1
    tier1 = sorted(m for m in range(1 << n) if bin(m).count("1") == n - 1)
    rest = sorted(
        (m for m in range(2, 1 << n)
         if bin(m).count("1") >= 2 and bin(m).count("1") not in (n - 1, n)),
        key=lambda m: (bin(m).count("1"), m),
    )
    return tier1 + [full] + rest


def _phase_canonicalize(state, tol_phase):
    """Diagonal unitaries making the highest-priority coefficients real
    and non-negative, plus removal of the residual discrete freedom.

    The reality constraints pin the diagonal phases only up to a finite
    lattice (for four qubits a three-element group that rotates the top
    coefficient by 2*pi/3); a deterministic representative is chosen by
    minimizing the wrapped argument of the first distinguishing slot.
    """
    n = state.n
    f = nilpotential(state)
    coeffs = f.coeffs
    scale = float(np.max(np.abs(coeffs))) or 1.0
    support_tol = max(tol_phase, _PHASE_SUPPORT_REL) * scale

    rows, rhs = [], []
    for mask in _phase_priority(n):
        c = coeffs[mask]
        if abs(c) <= support_tol:
            continue
        row = _incidence(mask, n)
        stacked = rows + [row]
        if np.linalg.matrix_rank(np.array(stacked)) == len(rows):
            continue
        rows.append(row)
        rhs.append(-np.angle(c))

    if not rows:
        return state, LocalOperation.identity(n)

    R = np.array(rows)
    theta = np.linalg.lstsq(R, np.array(rhs), rcond=None)[0]
    rotated = _apply_diag_phases(state, theta)
    extra = _residual_group_fix(rotated, R, support_tol)
    total_theta = theta + extra
    fixed = _apply_diag_phases(state, total_theta)
    op = LocalOperation(
        [np.diag([1.0, np.exp(1j * t)]) for t in total_theta], kind="unitary"
    )
    return fixed, op


def _apply_diag_phases(state, theta):
    masks = np.arange(1 << state.n)
    shifts = np.zeros(1 << state.n)
    for i, t in enumerate(theta):
        shifts += ((masks >> i) & 1) * t
    return PureState(state.n, state.amps * np.exp(1j * shifts))


def _residual_group_fix(state, R, support_tol):
    """Pick the canonical member of the finite family of diagonal phase
    operations compatible with the reality constraints already imposed."""
    n = state.n
    coeffs = nilpotential(state).coeffs
    masks = np.arange(1 << n)
    support = [int(m) for m in masks if abs(coeffs[m]) > support_tol]
    if not support:
        return np.zeros(n)
    inc = np.array([_incidence(m, n) for m in support])

    generators = []
    for k in range(R.shape[0]):
        target = np.zeros(R.shape[0])
        target[k] = 2.0 * np.pi
        theta, *_ = np.linalg.lstsq(R, target, rcond=None)
        generators.append(theta)

    def action_key(theta):
        shifts = np.mod(inc @ theta + 1e-9, 2.0 * np.pi)
        return tuple(np.round(shifts, 6))

    group = {action_key(np.zeros(n)): np.zeros(n)}
    frontier = [np.zeros(n)]
    while frontier and len(group) < 64:
        base = frontier.pop()
        for gen in generators:
            cand = base + gen
            key = action_key(cand)
            if key not in group:
                group[key] = cand
                frontier.append(cand)
    elements = list(group.values())
    if len(elements) == 1:
        return np.zeros(n)

    # Refine by slots until a single representative remains.
    candidates = elements
    order = [(1 << n) - 1] + sorted(m for m in support if m != (1 << n) - 1)
    for mask in order:
        if len(candidates) == 1:
            break
        if abs(coeffs[mask]) <= 1e3 * support_tol:
            continue
        row = _incidence(mask, n)
        args = [
            abs(_wrap(np.angle(coeffs[mask]) + float(row @ theta)))
            for theta in candidates
        ]
        best = min(args)
        candidates = [
            t for t, a in zip(candidates, args) if a <= best + 1e-9
        ]
    return candidates[0]


def _wrap(angle):
    return (angle + np.pi) % (2.0 * np.pi) - np.pi
