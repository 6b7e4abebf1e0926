"""Class assignment for reduced sl-tanglemeters.

Each class is a coefficient-slot template: fixed entries, shared
parameter slots, and derived entries (quartic closures or signed
parameter combinations).  A form matches when its zero pattern and all
template constraints hold within the class tolerance; among matches the
template with the fewest free parameters wins.  Unmatched
zero-parameter forms are reported as "other_point" together with their
surviving mask pattern (the catalogue of point classes is explicitly
non-exhaustive).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .config import DEFAULT_TOL_CLASS

__all__ = ["ClassLabel", "classify", "CLASS_TAGS"]

_TOP = 15


@dataclass(frozen=True)
class ClassLabel:
    """Classification result: tag, surviving parameters, fit residual."""

    tag: str
    params: tuple
    residual: float
    masks: tuple = ()


def _closure3(p):
    return 1.0 - p[0] ** 2 - p[1] ** 2 - p[2] ** 2


def _closure2(p):
    return 1.0 - p[0] ** 2 - p[1] ** 2


def _closure1(p):
    return 1.0 - p[0] ** 2


def _gb_quartic(p):
    b3, b5, b6 = p
    return 2.0 * (b5 * b6 - b3 * b6 + b3 * b5)


# Template entries: numbers are fixed values; ("p", k, c) contributes
# c * params[k]; ("lin", {...}) a signed combination; ("fn", f) a derived
# value f(params).
_TEMPLATES = [
    ("G_a", 3, {
        3: ("p", 0, 1), 12: ("p", 0, 1),
        5: ("p", 1, 1), 10: ("p", 1, 1),
        9: ("p", 2, 1), 6: ("p", 2, 1),
        _TOP: ("fn", _closure3),
    }),
    ("G_b", 3, {
        3: ("p", 0, 1), 12: ("p", 0, 1),
        5: ("p", 1, 1), 10: ("p", 1, 1),
        9: ("p", 2, 1), 6: ("p", 2, 1),
        7: 1.0, 11: -1.0, 13: 1.0, 14: -1.0,
        _TOP: ("fn", _gb_quartic),
    }),
    ("G_c", 3, {
        3: 1.0, 5: 1.0, 10: 1.0, 12: 1.0,
        9: ("p", 0, 1), 6: ("p", 0, 1),
        7: ("p", 1, 1), 14: ("p", 1, -1),
        11: ("p", 2, 1), 13: ("p", 2, -1),
        _TOP: 2.0,
    }),
    ("G_d", 3, {
        3: 1.0, 5: 1.0, 6: 1.0, 9: 1.0, 10: 1.0, 12: 1.0,
        7: ("lin", ((0, 1), (1, 1), (2, 1))),
        11: ("lin", ((0, -1), (1, 1), (2, -1))),
        13: ("lin", ((0, 1), (1, -1), (2, -1))),
        14: ("lin", ((0, -1), (1, -1), (2, 1))),
        _TOP: 2.0,
    }),
    ("G_e", 3, {
        7: 1.0, 11: 1.0, 13: 1.0, 14: 1.0,
        3: ("p", 0, 1), 5: ("p", 1, 1), 6: ("p", 2, 1),
    }),
    ("LG2_a", 2, {
        12: 1.0,
        5: ("p", 0, 1), 10: ("p", 0, 1),
        9: ("p", 1, 1), 6: ("p", 1, 1),
        _TOP: ("fn", _closure2),
    }),
    ("LG2_b", 2, {
        3: 1.0, 12: 1.0,
        5: ("p", 0, 1), 10: ("p", 0, 1),
        9: ("p", 1, 1), 6: ("p", 1, 1),
    }),
    ("LG2_c", 2, {
        13: 1.0, 11: 1.0, 14: 1.0, 3: 1.0,
        5: ("p", 0, 1), 6: ("p", 1, 1),
    }),
    ("LG1_a", 1, {
        3: 1.0, 5: 1.0,
        9: ("p", 0, 1), 6: ("p", 0, 1),
        _TOP: ("fn", _closure1),
    }),
    ("LG1_b", 1, {
        11: 1.0, 14: 1.0, 3: 1.0, 5: 1.0,
        6: ("p", 0, 1),
    }),
    ("S_a", 0, {7: 1.0, 13: 1.0, 10: 1.0}),
    ("S_b", 0, {7: 1.0, 13: 1.0, 11: 1.0}),
    ("S_c", 0, {7: 1.0, 13: 1.0}),
    ("S_d", 0, {7: 1.0}),
    ("S_e", 0, {12: 1.0, 5: 1.0, 6: 1.0, _TOP: 1.0}),
    ("S_f", 0, {3: 1.0, 6: 1.0, 5: 1.0, _TOP: 1.0}),
]

CLASS_TAGS = tuple(t[0] for t in _TEMPLATES) + ("other_point",)


def _solve_params(arity, template, coeffs):
    """Least-squares parameter estimate from the parameterized slots."""
    if arity == 0:
        return ()
    rows, rhs = [], []
    for mask, entry in template.items():
        if isinstance(entry, tuple) and entry[0] == "p":
            row = np.zeros(arity, dtype=np.complex128)
            row[entry[1]] = entry[2]
            rows.append(row)
            rhs.append(coeffs[mask])
        elif isinstance(entry, tuple) and entry[0] == "lin":
            row = np.zeros(arity, dtype=np.complex128)
            for k, c in entry[1]:
                row[k] = c
            rows.append(row)
            rhs.append(coeffs[mask])
    sol, *_ = np.linalg.lstsq(np.array(rows), np.array(rhs), rcond=None)
    return tuple(complex(v) for v in sol)


def _template_residual(template, params, coeffs):
    """Largest constraint violation over all nonconstant slots.

    Slots absent from the template (including all linear slots) must
    vanish.
    """
    worst = 0.0
    for mask in range(1, 16):
        entry = template.get(mask, 0.0)
        if isinstance(entry, tuple):
            kind = entry[0]
            if kind == "p":
                expected = entry[2] * params[entry[1]]
            elif kind == "lin":
                expected = sum(c * params[k] for k, c in entry[1])
            else:
                expected = entry[1](params)
        else:
            expected = entry
        worst = max(worst, abs(coeffs[mask] - expected))
    return worst


def classify(tm, spectrum=None, tol_class=DEFAULT_TOL_CLASS):
    """Assign a class label to a reduced sl-tanglemeter.

    Matches the coefficient vector against every template; among the
    matches, the fewest-parameter template wins (ties broken by the
    catalogue order).  Forms matching nothing are labelled
    "other_point" with their surviving mask set.  The spectrum argument
    is accepted for diagnostic symmetry with the reduction but does not
    influence the template matching.
    """
    coeffs = tm.poly.coeffs
    matches = []
    for tag, arity, template in _TEMPLATES:
        params = _solve_params(arity, template, coeffs)
        residual = _template_residual(template, params, coeffs)
        if residual <= tol_class:
            matches.append((arity, tag, params, residual))
    if matches:
        matches.sort(key=lambda m: (m[0], [t[0] for t in _TEMPLATES].index(m[1])))
        arity, tag, params, residual = matches[0]
        masks = tuple(sorted(int(m) for m in np.nonzero(
            np.abs(coeffs) > tol_class)[0] if m != 0))
        return ClassLabel(tag=tag, params=params, residual=residual, masks=masks)
    masks = tuple(sorted(
        int(m) for m in np.nonzero(np.abs(coeffs) > tol_class)[0] if m != 0
    ))
    return ClassLabel(tag="other_point", params=(), residual=0.0, masks=masks)
