"""Exact arithmetic for polynomials in commuting nilpotent generators.

An n-qubit polynomial in the raising operators is stored densely:
``coeffs[m]`` multiplies the monomial ``prod_{i in m} s_i+``, where bit
``i - 1`` of the mask ``m`` is set when the generator of qubit ``i`` is
present (qubit 1 is the least-significant bit, so e.g. the mask 3 is the
two-qubit monomial ``s2+ s1+``).  Generators square to zero, so products
only combine disjoint masks and every power series in these variables
terminates exactly at order n.

All operations are pure functions; coefficient arrays are frozen at
construction, so values may be shared freely between threads.
"""

from __future__ import annotations

from functools import lru_cache

import numpy as np

from .errors import ZeroReferenceError

MAX_QUBITS = 8

__all__ = [
    "MAX_QUBITS",
    "NilpotentPoly",
    "multiply",
    "log",
    "exp",
    "partial",
    "apply_generator",
]


class NilpotentPoly:
    """Dense polynomial over n commuting nilpotent generators."""

    __slots__ = ("n", "coeffs")

    def __init__(self, n, coeffs):
        if not 1 <= int(n) <= MAX_QUBITS:
            raise ValueError(f"qubit count must be in 1..{MAX_QUBITS}, got {n}")
        arr = np.array(coeffs, dtype=np.complex128).reshape(-1)
        if arr.size != 1 << n:
            raise ValueError(f"expected {1 << n} coefficients for n={n}, got {arr.size}")
        arr.setflags(write=False)
        object.__setattr__(self, "n", int(n))
        object.__setattr__(self, "coeffs", arr)

    def __setattr__(self, name, value):
        raise AttributeError("NilpotentPoly is immutable")

    @classmethod
    def zero(cls, n):
        return cls(n, np.zeros(1 << n))

    @classmethod
    def unit(cls, n):
        c = np.zeros(1 << n, dtype=np.complex128)
        c[0] = 1.0
        return cls(n, c)

    @classmethod
    def from_terms(cls, n, terms):
        """Build from a ``{mask: coefficient}`` mapping."""
        c = np.zeros(1 << n, dtype=np.complex128)
        for mask, value in terms.items():
            c[mask] = value
        return cls(n, c)

    def __getitem__(self, mask):
        return complex(self.coeffs[mask])

    def terms(self, tol=0.0):
        """Nonzero terms as a ``{mask: coefficient}`` dict."""
        return {
            int(m): complex(c)
            for m, c in enumerate(self.coeffs)
            if abs(c) > tol
        }

    def allclose(self, other, tol=1e-12):
        return self.n == other.n and np.max(np.abs(self.coeffs - other.coeffs)) <= tol

    def __add__(self, other):
        _check_same_n(self, other)
        return NilpotentPoly(self.n, self.coeffs + other.coeffs)

    def __sub__(self, other):
        _check_same_n(self, other)
        return NilpotentPoly(self.n, self.coeffs - other.coeffs)

    def __mul__(self, other):
        if isinstance(other, NilpotentPoly):
            return multiply(self, other)
        return NilpotentPoly(self.n, self.coeffs * other)

    def __rmul__(self, scalar):
        return NilpotentPoly(self.n, self.coeffs * scalar)

    def __neg__(self):
        return NilpotentPoly(self.n, -self.coeffs)

    def __repr__(self):
        body = ", ".join(
            f"{m}: {c:.6g}" for m, c in self.terms(tol=1e-14).items()
        )
        return f"NilpotentPoly(n={self.n}, {{{body}}})"


def _check_same_n(a, b):
    if a.n != b.n:
        raise ValueError(f"qubit-count mismatch: {a.n} vs {b.n}")


@lru_cache(maxsize=None)
def _disjoint_pairs(n):
    """Index tables for the disjoint-subset convolution at size n.

    Returns arrays (targets, left, right) such that for every mask m and
    every submask p of m the triple (m, p, m ^ p) appears exactly once.
    """
    targets, left, right = [], [], []
    for m in range(1 << n):
        sub = m
        while True:
            targets.append(m)
            left.append(sub)
            right.append(m ^ sub)
            if sub == 0:
                break
            sub = (sub - 1) & m
    return (
        np.array(targets, dtype=np.intp),
        np.array(left, dtype=np.intp),
        np.array(right, dtype=np.intp),
    )


def multiply(a, b):
    """Product of two polynomials; overlapping monomials vanish.

    ``result[m] = sum_{p | q = m, p & q = 0} a[p] * b[q]``
    """
    _check_same_n(a, b)
    targets, left, right = _disjoint_pairs(a.n)
    out = np.zeros(1 << a.n, dtype=np.complex128)
    np.add.at(out, targets, a.coeffs[left] * b.coeffs[right])
    return NilpotentPoly(a.n, out)


def log(F):
    """Logarithm of a polynomial with unit constant term.

    Uses ln(1 + x) = sum_{k=1..n} (-1)^(k+1) x^k / k, which is exact here
    because x has no constant term and therefore x^(n+1) = 0.
    """
    c0 = F.coeffs[0]
    if c0 == 0:
        raise ZeroReferenceError("constant term is zero; no reference population")
    if abs(c0 - 1.0) > 1e-12:
        raise ValueError("log requires a unit constant term; divide by F[0] first")
    x = F.coeffs.copy()
    x[0] = 0.0
    xpoly = NilpotentPoly(F.n, x)
    out = x.copy()
    power = xpoly
    for k in range(2, F.n + 1):
        power = multiply(power, xpoly)
        out += ((-1.0) ** (k + 1) / k) * power.coeffs
    return NilpotentPoly(F.n, out)


def exp(f):
    """Exponential of a polynomial with no constant term (exact series)."""
    if f.coeffs[0] != 0:
        raise ValueError("exp requires a vanishing constant term")
    out = f.coeffs.copy()
    out[0] = 1.0
    power = f
    for k in range(2, f.n + 1):
        power = multiply(power, f)
        out += power.coeffs / _factorial(k)
    return NilpotentPoly(f.n, out)


@lru_cache(maxsize=None)
def _factorial(k):
    out = 1
    for j in range(2, k + 1):
        out *= j
    return out


def partial(f, i):
    """Formal derivative with respect to generator i (1-based)."""
    _check_index(f, i)
    bit = 1 << (i - 1)
    out = np.zeros_like(f.coeffs)
    masks = np.arange(1 << f.n)
    lower = masks[(masks & bit) == 0]
    out[lower] = f.coeffs[lower | bit]
    return NilpotentPoly(f.n, out)


def apply_generator(f, i, which):
    """Apply a pseudospin generator of qubit i to a polynomial.

    The substitution rules are: "plus" multiplies by the generator,
    "minus" is the formal derivative, and "z" maps f to
    ``-f + 2 s_i+ (df/ds_i+)`` (sign flip on monomials not containing i).
    """
    _check_index(f, i)
    bit = 1 << (i - 1)
    masks = np.arange(1 << f.n)
    has_bit = (masks & bit) != 0
    if which == "plus":
        out = np.zeros_like(f.coeffs)
        out[masks[has_bit]] = f.coeffs[masks[has_bit] ^ bit]
        return NilpotentPoly(f.n, out)
    if which == "minus":
        return partial(f, i)
    if which == "z":
        out = np.where(has_bit, f.coeffs, -f.coeffs)
        return NilpotentPoly(f.n, out)
    raise ValueError(f"unknown generator kind {which!r}")


def _check_index(f, i):
    if not 1 <= i <= f.n:
        raise ValueError(f"generator index {i} out of range 1..{f.n}")
