"""Reduction of an su-tanglemeter to sl-canonic form.

The invertible flow drives the four third-order coefficients to zero by
solving, at every step, a 4x4 linear system whose matrix is built from
the current quadratic and quartic coefficients; the same matrix decides
between the generic branch (solvable system) and the special families
(vanishing determinant).  After the flow, per-qubit scaling operations
equalize the paired quadratic coefficients and normalize the quartic
term, or fall through to the degenerate patterns when coefficients
vanish.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import least_squares

from .config import FlowConfig
from .errors import ConvergenceError
from .nilpotent import NilpotentPoly
from .states import (
    LocalOperation,
    apply_local,
    nilpotential,
    state_from_nilpotential,
)
from .su_reduction import SuTanglemeter

__all__ = [
    "SlTanglemeter",
    "SingularSpectrum",
    "QUAD_PAIRS",
    "ROW_ORDER",
    "d4_matrix",
    "feedback_p_minus",
    "gammas",
    "gamma_formula_candidates",
    "apply_scaling",
    "reduce_sl",
]

# Quadratic slots paired by the canonic form: each pair shares one
# coefficient after scaling (beta3, beta5, beta6 respectively).
QUAD_PAIRS = ((3, 12), (5, 10), (6, 9))

# Third-order slots in the row order of the feedback system.
ROW_ORDER = (14, 13, 11, 7)

_TOP = 15


@dataclass(frozen=True)
class SingularSpectrum:
    """Determinant and eigenvalue spectrum of the feedback matrix.

    zero_count is the number of eigenvalues with modulus below the gamma
    tolerance (relative to the largest eigenvalue magnitude).
    """

    d4: complex
    gammas: tuple
    zero_count: int


@dataclass(frozen=True)
class SlTanglemeter:
    """sl-canonic nilpotential with family tag and diagnostics.

    family is "general" when the full paired pattern with quartic
    closure was reached, "special_s1".."special_s4" for the
    singular-at-start families (one to four vanishing eigenvalues), and
    "degenerate" for everything else: mid-flow determinant collapse, or
    scaled patterns with vanishing coefficients such as the W-type point
    forms.  beta3/beta5/beta6 are set only for the general family;
    fit_params and fit_residual only for the special families.
    """

    poly: NilpotentPoly
    family: str
    beta3: complex | None
    beta5: complex | None
    beta6: complex | None
    gammas: tuple
    iterations: int = 0
    residual: float = 0.0
    fit_params: tuple = ()
    fit_residual: float = 0.0
    diagnostics: dict = field(default_factory=dict)

    @property
    def betas(self):
        return (self.beta3, self.beta5, self.beta6)


def _coeff(poly, mask):
    return complex(poly.coeffs[mask])


def d4_matrix(fc):
    """The 4x4 matrix of the third-order feedback system.

    Rows follow ROW_ORDER (targets 14, 13, 11, 7); columns multiply the
    pump amplitudes P1+..P4+.  Accepts an SuTanglemeter or a bare
    four-qubit NilpotentPoly.
    """
    poly = fc.poly if isinstance(fc, SuTanglemeter) else fc
    if poly.n != 4:
        raise ValueError("the feedback matrix is defined for n = 4")
    b = {m: _coeff(poly, m) for m in (3, 5, 6, 9, 10, 12, _TOP)}
    return np.array(
        [
            [-b[_TOP], 2 * b[6] * b[10], 2 * b[6] * b[12], 2 * b[10] * b[12]],
            [2 * b[5] * b[9], -b[_TOP], 2 * b[5] * b[12], 2 * b[9] * b[12]],
            [2 * b[3] * b[9], 2 * b[3] * b[10], -b[_TOP], 2 * b[9] * b[10]],
            [2 * b[3] * b[5], 2 * b[3] * b[6], 2 * b[5] * b[6], -b[_TOP]],
        ],
        dtype=np.complex128,
    )


def gammas(fc, tol_gamma=None):
    """Eigenvalue spectrum of the feedback matrix, sorted by modulus.

    The eigenvalues are computed numerically; the closed-form expression
    in terms of square roots of coefficient products is branch-ambiguous
    and is only used as a cross-check (gamma_formula_candidates).
    """
    cfg_tol = tol_gamma if tol_gamma is not None else FlowConfig().tol_gamma
    m = d4_matrix(fc)
    vals = np.linalg.eigvals(m)
    det = complex(np.linalg.det(m))
    scale = max(float(np.max(np.abs(vals))), 1.0)
    zero_count = int(np.sum(np.abs(vals) < cfg_tol * scale))
    vals = vals[np.argsort(np.abs(vals))]
    return SingularSpectrum(d4=det, gammas=tuple(vals), zero_count=zero_count)


def gamma_formula_candidates(fc):
    """Closed-form eigenvalue multisets over all branch assignments.

    For each sign choice of the three square roots of coefficient
    products, yields the candidate eigenvalue quadruple of the feedback
    matrix (negatives of the diagonal-form values, matching the matrix
    sign convention).  The tests check that some branch reproduces the
    numeric spectrum.
    """
    poly = fc.poly if isinstance(fc, SuTanglemeter) else fc
    b = {m: _coeff(poly, m) for m in (3, 5, 6, 9, 10, 12, _TOP)}
    ra = np.sqrt(complex(b[5] * b[6] * b[9] * b[10]))
    rb = np.sqrt(complex(b[3] * b[6] * b[9] * b[12]))
    rc = np.sqrt(complex(b[3] * b[5] * b[10] * b[12]))
    out = []
    for sa, sb, sc in itertools.product((1, -1), repeat=3):
        a, bb, c = sa * ra, sb * rb, sc * rc
        plain = (
            b[_TOP] - 2 * a + 2 * bb - 2 * c,
            b[_TOP] + 2 * a - 2 * bb - 2 * c,
            b[_TOP] - 2 * a - 2 * bb + 2 * c,
            b[_TOP] + 2 * a + 2 * bb + 2 * c,
        )
        out.append(tuple(-x for x in plain))
    return out


def feedback_p_minus(f, p_plus):
    """Lowering pump amplitudes that keep the linear coefficients zero:
    ``P_j- = -sum_i P_i+ beta_ij`` with beta_ij the quadratic
    coefficients of f."""
    n = f.n
    p_plus = np.asarray(p_plus, dtype=np.complex128)
    if p_plus.shape != (n,):
        raise ValueError(f"expected {n} pump amplitudes")
    out = np.zeros(n, dtype=np.complex128)
    for j in range(1, n + 1):
        total = 0.0 + 0.0j
        for i in range(1, n + 1):
            if i == j:
                continue
            total += p_plus[i - 1] * f.coeffs[(1 << (i - 1)) | (1 << (j - 1))]
        out[j - 1] = -total
    return out


def _step_matrices(p_plus, p_minus, dt):
    """Per-qubit exp(-i H dt) for H = P- s+ + P+ s- (not unitary)."""
    mats = []
    for pp, pm in zip(p_plus, p_minus):
        a = -1j * dt * pp
        b = -1j * dt * pm
        s = np.sqrt(complex(a * b))
        if abs(s) < 1e-30:
            ch, shs = 1.0, 1.0
        else:
            ch = np.cosh(s)
            shs = np.sinh(s) / s
        mats.append(np.array([[ch, shs * a], [shs * b, ch]], dtype=np.complex128))
    return mats


def _linear_cleanup(state):
    """Remove linear terms exactly with the shears [[1, 0], [-beta, 1]].

    In the commuting algebra this subtracts the linear part of f and
    touches nothing else, so the nilpotential stays a tanglemeter to
    machine precision throughout the flow.
    """
    f = nilpotential(state)
    mats = [
        np.array([[1.0, 0.0], [-f.coeffs[1 << i], 1.0]], dtype=np.complex128)
        for i in range(state.n)
    ]
    op = LocalOperation(mats, kind="invertible")
    return apply_local(state, op), op


def _cubic_residual(f):
    return float(np.max(np.abs(f.coeffs[list(ROW_ORDER)])))


def _is_singular(f, tol_det):
    m = d4_matrix(f)
    scale = max(float(np.max(np.abs(m))), 1e-30)
    return abs(np.linalg.det(m)) <= tol_det * scale ** 4


def reduce_sl(fc, cfg=None):
    """Reduce an su-tanglemeter to sl-canonic form.

    Returns (SlTanglemeter, LocalOperation); the operation maps the
    su-canonic state onto the reduced representative.  A singular
    feedback system at the start routes to the special-family fit; a
    determinant collapse during the flow aborts with family
    "degenerate" and diagnostics instead of guessing.
    """
    cfg = cfg or FlowConfig()
    if fc.poly.n != 4:
        raise ValueError("sl reduction is implemented for n = 4")
    state = fc.state.normalized() if isinstance(fc, SuTanglemeter) else None
    if state is None:
        state = state_from_nilpotential(fc.poly)
    op = LocalOperation.identity(4)
    spectrum = gammas(fc, tol_gamma=cfg.tol_gamma)

    f = nilpotential(state)
    iterations = 0
    residual = _cubic_residual(f)
    if residual >= cfg.tol_cubic and _is_singular(f, cfg.tol_det):
        return _fit_special_family(f, spectrum, residual)

    dt = cfg.dt0
    while residual >= cfg.tol_cubic:
        if iterations >= cfg.max_iters:
            raise ConvergenceError(
                f"sl reduction stalled at residual {residual:.3e} after "
                f"{iterations} steps",
                residual=residual,
                iterations=iterations,
            )
        if iterations > 0 and _is_singular(f, cfg.tol_det):
            tm = SlTanglemeter(
                poly=f,
                family="degenerate",
                beta3=None, beta5=None, beta6=None,
                gammas=spectrum.gammas,
                iterations=iterations,
                residual=residual,
                diagnostics={"reason": "determinant collapsed during the flow"},
            )
            return tm, op
        m = d4_matrix(f)
        targets = np.array([f.coeffs[mask] for mask in ROW_ORDER])
        p_plus = np.linalg.solve(m, -1j * targets)
        p_minus = feedback_p_minus(f, p_plus)
        pump = max(float(np.max(np.abs(p_plus))), float(np.max(np.abs(p_minus))))
        step_dt = min(dt, 0.5 / pump) if pump > 0 else dt
        step = LocalOperation(
            _step_matrices(p_plus, p_minus, step_dt), kind="invertible"
        )
        state = apply_local(state, step)
        state, cleanup = _linear_cleanup(state)
        state = state.normalized()
        op = op.then(step).then(cleanup)
        f = nilpotential(state)
        residual = _cubic_residual(f)
        iterations += 1

    poly, scale_op, family, betas, diag = apply_scaling(f)
    op = op.then(scale_op)
    tm = SlTanglemeter(
        poly=poly,
        family=family,
        beta3=betas[0],
        beta5=betas[1],
        beta6=betas[2],
        gammas=spectrum.gammas,
        iterations=iterations,
        residual=residual,
        diagnostics=diag,
    )
    return tm, op


# ---------------------------------------------------------------------------
# scaling normalization


def apply_scaling(f, zero_tol=1e-7):
    """Scale a quadratics-plus-quartic nilpotential to canonic shape.

    Chooses per-qubit scalings z_i = exp(2 B_i) so that paired quadratic
    slots carry equal coefficients (shared values beta3, beta5, beta6)
    and the product of all four scalings satisfies the quartic closure,
    which makes the top coefficient equal 1 - beta3^2 - beta5^2 -
    beta6^2.  A pair with exactly one vanishing member cannot be
    equalized; its surviving slot is scaled to one instead, producing
    the degenerate patterns (including the W-type point forms when the
    quartic term is absent).  Returns
    (poly, op, family, (beta3, beta5, beta6), diagnostics).
    """
    if f.n != 4:
        raise ValueError("scaling normalization is implemented for n = 4")
    coeffs = f.coeffs
    scale = max(float(np.max(np.abs(coeffs))), 1e-30)
    tol = zero_tol * scale

    rows, rhs = [], []
    both_product = 0.0 + 0.0j
    pair_kinds = []
    for a, b in QUAD_PAIRS:
        ca, cb = coeffs[a], coeffs[b]
        a_zero, b_zero = abs(ca) <= tol, abs(cb) <= tol
        if not a_zero and not b_zero:
            pair_kinds.append("both")
            both_product += ca * cb
            rows.append(_mask_row(a) - _mask_row(b))
            rhs.append(np.log(cb / ca))
        elif a_zero and b_zero:
            pair_kinds.append("none")
        else:
            pair_kinds.append("half")
            keep = b if a_zero else a
            rows.append(_mask_row(keep))
            rhs.append(-np.log(coeffs[keep]))

    top = coeffs[_TOP]
    has_top = abs(top) > tol
    diag = {"pair_kinds": tuple(pair_kinds)}
    family = "general" if "half" not in pair_kinds else "degenerate"

    if not has_top and all(k == "none" for k in pair_kinds):
        family = "degenerate"
        diag["reason"] = "vanishing tanglemeter"
    elif has_top or "both" in pair_kinds:
        denom = (top if has_top else 0.0) + both_product
        if abs(denom) > 1e-12 * scale:
            rows.append(_mask_row(_TOP))
            rhs.append(-np.log(denom))
        else:
            # The quartic coefficient cancels the paired products exactly,
            # so the closure value is unreachable; normalize the quartic
            # slot itself to one instead.
            if has_top:
                rows.append(_mask_row(_TOP))
                rhs.append(-np.log(top))
            family = "degenerate"
            diag["closure"] = "unreachable"

    if rows:
        w, *_ = np.linalg.lstsq(
            np.array(rows, dtype=float), np.array(rhs, dtype=np.complex128),
            rcond=None,
        )
    else:
        w = np.zeros(4, dtype=np.complex128)

    masks = np.arange(16)
    shifts = np.zeros(16, dtype=np.complex128)
    for i in range(4):
        shifts += ((masks >> i) & 1) * w[i]
    scaled = NilpotentPoly(4, coeffs * np.exp(shifts))
    op = LocalOperation(
        [np.diag([np.exp(-wi / 2.0), np.exp(wi / 2.0)]) for wi in w],
        kind="scaling",
    )
    betas = (None, None, None)
    if family == "general":
        betas = tuple(complex(scaled.coeffs[a]) for a, _ in QUAD_PAIRS)
    return scaled, op, family, betas, diag


def _mask_row(mask):
    return np.array([(mask >> i) & 1 for i in range(4)], dtype=float)


# ---------------------------------------------------------------------------
# special families (singular feedback system at the start)


def _s1_slots(p):
    b3, b5, b6 = p
    return {
        3: b3, 12: b3, 5: b5, 10: b5, 9: b6, 6: b6,
        7: 1.0, 11: -1.0, 13: 1.0, 14: -1.0,
        _TOP: 2.0 * (b5 * b6 - b3 * b6 + b3 * b5),
    }


def _s2_slots(p):
    b6, b7, b11 = p
    return {
        3: 1.0, 5: 1.0, 10: 1.0, 12: 1.0, 9: b6, 6: b6,
        7: b7, 14: -b7, 11: b11, 13: -b11, _TOP: 2.0,
    }


def _s3_slots(p):
    b14, b13, b11 = p
    return {
        3: 1.0, 5: 1.0, 6: 1.0, 9: 1.0, 10: 1.0, 12: 1.0,
        7: b14 + b13 + b11,
        11: -b14 + b13 - b11,
        13: b14 - b13 - b11,
        14: -b14 - b13 + b11,
        _TOP: 2.0,
    }


def _s4_slots(p):
    b3, b5, b6 = p
    return {7: 1.0, 11: 1.0, 13: 1.0, 14: 1.0, 3: b3, 5: b5, 6: b6}


_SPECIAL_TEMPLATES = {1: _s1_slots, 2: _s2_slots, 3: _s3_slots, 4: _s4_slots}


def _fit_special_family(f, spectrum, residual):
    """Constrained least-squares fit of a special-family template.

    Unknowns are the four complex log-scalings plus the template's free
    parameters; residuals run over every coefficient slot of order >= 2.
    The fitted template (not the raw flow output) is reported, together
    with the fit residual.
    """
    zero_count = max(1, min(4, spectrum.zero_count or 1))
    template = _SPECIAL_TEMPLATES[zero_count]
    slots = sorted(m for m in range(16) if bin(m).count("1") >= 2)
    coeffs = f.coeffs

    def unpack(x):
        w = x[0:8:2] + 1j * x[1:8:2]
        p = x[8::2] + 1j * x[9::2]
        return w, p

    def resid(x):
        w, p = unpack(x)
        target = template(tuple(p))
        out = []
        for m in slots:
            zfac = np.exp(sum(w[i] for i in range(4) if (m >> i) & 1))
            value = coeffs[m] * zfac - target.get(m, 0.0)
            out.extend([value.real, value.imag])
        return np.array(out)

    init = {
        1: (coeffs[3], coeffs[5], coeffs[6]),
        2: (coeffs[9], coeffs[7], coeffs[11]),
        3: (coeffs[7], coeffs[13], coeffs[11]),
        4: (coeffs[3], coeffs[5], coeffs[6]),
    }[zero_count]
    x0 = np.concatenate(
        [np.zeros(8), np.array([[v.real, v.imag] for v in init]).ravel()]
    )
    sol = least_squares(resid, x0, method="lm", max_nfev=2000)
    w, p = unpack(sol.x)
    poly = NilpotentPoly.from_terms(4, template(tuple(p)))
    op = LocalOperation(
        [np.diag([np.exp(-wi / 2.0), np.exp(wi / 2.0)]) for wi in w],
        kind="scaling",
    )
    tm = SlTanglemeter(
        poly=poly,
        family=f"special_s{zero_count}",
        beta3=None, beta5=None, beta6=None,
        gammas=spectrum.gammas,
        iterations=0,
        residual=residual,
        fit_params=tuple(complex(v) for v in p),
        fit_residual=float(np.sqrt(np.sum(sol.fun ** 2))),
        diagnostics={"zero_count": zero_count},
    )
    return tm, op
