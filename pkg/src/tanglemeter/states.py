"""Pure states, local operations, nilpotential extraction, and the
bipartition entanglement criterion.

Amplitudes are bitmask-indexed: ``amps[m]`` is the amplitude of the
computational basis state whose qubit-i occupation is bit ``i - 1`` of
``m`` (qubit 1 least significant).  Local operations never renormalize;
invertible (SLOCC) operations deliberately change the norm.
"""

from __future__ import annotations

import csv
import json

import numpy as np

from . import nilpotent
from .config import DEFAULT_EPS_REF, DEFAULT_TOL_CRITERION
from .errors import ZeroReferenceError
from .nilpotent import MAX_QUBITS, NilpotentPoly

__all__ = [
    "PureState",
    "LocalOperation",
    "apply_local",
    "nilpotential",
    "state_from_nilpotential",
    "is_bipartition_entangled",
    "named_state",
    "read_state_file",
    "write_state_file",
]

_NORM_TOL = 1e-12


class PureState:
    """An n-qubit pure state as a frozen complex amplitude vector."""

    __slots__ = ("n", "amps")

    def __init__(self, n, amps):
        if not 1 <= int(n) <= MAX_QUBITS:
            raise ValueError(f"qubit count must be in 1..{MAX_QUBITS}, got {n}")
        arr = np.array(amps, dtype=np.complex128).reshape(-1)
        if arr.size != 1 << n:
            raise ValueError(f"expected {1 << n} amplitudes for n={n}, got {arr.size}")
        if not np.any(arr):
            raise ValueError("state vector is identically zero")
        arr.setflags(write=False)
        object.__setattr__(self, "n", int(n))
        object.__setattr__(self, "amps", arr)

    def __setattr__(self, name, value):
        raise AttributeError("PureState is immutable")

    def norm(self):
        return float(np.linalg.norm(self.amps))

    def is_normalized(self, tol=_NORM_TOL):
        return abs(self.norm() - 1.0) <= tol

    def normalized(self):
        return PureState(self.n, self.amps / self.norm())

    def tensor(self, other):
        """Tensor product; ``other`` occupies the higher qubit indices."""
        return PureState(self.n + other.n, np.kron(other.amps, self.amps))

    def __repr__(self):
        return f"PureState(n={self.n}, norm={self.norm():.6g})"


class LocalOperation:
    """One 2x2 complex matrix per qubit, applied as a tensor product.

    kind is one of "unitary", "invertible", or "scaling" (diagonal of the
    form diag(e^-B, e^B)); the constructor validates the declared kind.
    """

    __slots__ = ("n", "matrices", "kind")

    def __init__(self, matrices, kind="unitary"):
        mats = tuple(np.array(m, dtype=np.complex128) for m in matrices)
        if not mats:
            raise ValueError("need at least one matrix")
        for m in mats:
            if m.shape != (2, 2):
                raise ValueError("local operations are built from 2x2 matrices")
        if kind == "unitary":
            for m in mats:
                if np.max(np.abs(m.conj().T @ m - np.eye(2))) > 1e-10:
                    raise ValueError("matrix is not unitary within 1e-10")
        elif kind == "invertible":
            for m in mats:
                if abs(np.linalg.det(m)) <= 1e-12:
                    raise ValueError("matrix is numerically singular")
        elif kind == "scaling":
            for m in mats:
                if abs(m[0, 1]) > 1e-14 or abs(m[1, 0]) > 1e-14:
                    raise ValueError("scaling operations are diagonal")
                if abs(m[0, 0] * m[1, 1] - 1.0) > 1e-10:
                    raise ValueError("scaling diagonal must have unit determinant")
        else:
            raise ValueError(f"unknown operation kind {kind!r}")
        for m in mats:
            m.setflags(write=False)
        object.__setattr__(self, "n", len(mats))
        object.__setattr__(self, "matrices", mats)
        object.__setattr__(self, "kind", kind)

    def __setattr__(self, name, value):
        raise AttributeError("LocalOperation is immutable")

    @classmethod
    def identity(cls, n):
        return cls([np.eye(2)] * n, kind="unitary")

    def then(self, later):
        """Composition: ``later`` applied after ``self`` (per qubit)."""
        if later.n != self.n:
            raise ValueError("qubit-count mismatch in composition")
        mats = [later.matrices[i] @ self.matrices[i] for i in range(self.n)]
        if self.kind == later.kind and self.kind in ("unitary", "scaling"):
            kind = self.kind
        else:
            kind = "invertible"
        return LocalOperation(mats, kind=kind)

    def __repr__(self):
        return f"LocalOperation(n={self.n}, kind={self.kind!r})"


def apply_local(state, op):
    """Apply a local operation; the norm is left untouched."""
    if op.n != state.n:
        raise ValueError(f"operation acts on {op.n} qubits, state has {state.n}")
    return PureState(state.n, _apply_matrices(state.amps, state.n, op.matrices))


def _apply_matrices(amps, n, matrices):
    """amps' = (M_n x ... x M_1) amps via per-qubit tensor contraction."""
    arr = amps.reshape((2,) * n)
    for i, mat in enumerate(matrices):  # matrices[i] acts on qubit i + 1
        axis = n - 1 - i
        arr = np.moveaxis(np.tensordot(mat, arr, axes=([1], [axis])), 0, axis)
    return arr.reshape(-1)


def nilpotential(state, eps_ref=DEFAULT_EPS_REF):
    """Logarithm of the state's raising-operator polynomial.

    Coefficients are ratios to the reference amplitude, so the result is
    insensitive to both the norm and the global phase.  Raises
    ZeroReferenceError when ``|amps[0]|`` is below ``eps_ref`` relative to
    the state norm; apply a local rotation first (su_reduction.prerotate).
    """
    a0 = state.amps[0]
    if abs(a0) <= eps_ref * state.norm():
        raise ZeroReferenceError(
            "reference amplitude is (numerically) zero; prerotate the state "
            "to raise the reference population before extracting f"
        )
    F = NilpotentPoly(state.n, state.amps / a0)
    return nilpotent.log(F)


def state_from_nilpotential(f, normalize=True):
    """State whose polynomial is exp(f) acting on the reference state."""
    state = PureState(f.n, nilpotent.exp(f).coeffs)
    return state.normalized() if normalize else state


def _check_partition(n, part_a, part_b):
    a, b = set(part_a), set(part_b)
    if not a or not b:
        raise ValueError("both parts of the partition must be nonempty")
    if a & b:
        raise ValueError("partition parts must be disjoint")
    if a | b != set(range(1, n + 1)):
        raise ValueError("partition must cover all qubits exactly once")
    return a, b


def is_bipartition_entangled(state, part_a, part_b, tol=DEFAULT_TOL_CRITERION,
                             eps_ref=DEFAULT_EPS_REF):
    """Entanglement criterion across a bipartition.

    The two parts are unentangled iff the nilpotential has no monomial
    containing generators from both sides, so the test reduces to scanning
    the coefficient masks of f (exact, no derivative evaluation needed).
    """
    a, b = _check_partition(state.n, part_a, part_b)
    mask_a = sum(1 << (i - 1) for i in a)
    mask_b = sum(1 << (i - 1) for i in b)
    f = nilpotential(state, eps_ref=eps_ref)
    masks = np.arange(1 << state.n)
    crossing = ((masks & mask_a) != 0) & ((masks & mask_b) != 0)
    return bool(np.any(np.abs(f.coeffs[crossing]) > tol))


def _ghz(n):
    amps = np.zeros(1 << n, dtype=np.complex128)
    amps[0] = amps[-1] = 1.0 / np.sqrt(2.0)
    return PureState(n, amps)


def _w(n):
    amps = np.zeros(1 << n, dtype=np.complex128)
    for i in range(n):
        amps[1 << i] = 1.0 / np.sqrt(n)
    return PureState(n, amps)


def _cluster4():
    # Chain-cluster phase convention, fixed here once: local-unitary images
    # of this state (ring-graph and raw controlled-Z forms included) share
    # its orbit, and this representative is already su-canonic.
    amps = np.zeros(16, dtype=np.complex128)
    amps[[0, 3, 12]] = 0.5
    amps[15] = -0.5
    return PureState(4, amps)


def _bellx2():
    amps = np.zeros(16, dtype=np.complex128)
    amps[[0, 3, 12, 15]] = 0.5
    return PureState(4, amps)


def _zero(n):
    amps = np.zeros(1 << n, dtype=np.complex128)
    amps[0] = 1.0
    return PureState(n, amps)


def named_state(name):
    """Reference states by name.

    Known names: ghz3, ghz4, w3, w4, cluster4, bellx2, and zero<n> for
    the n-qubit reference state (e.g. zero4).
    """
    key = name.strip().lower()
    if key == "ghz4":
        return _ghz(4)
    if key == "ghz3":
        return _ghz(3)
    if key == "w4":
        return _w(4)
    if key == "w3":
        return _w(3)
    if key == "cluster4":
        return _cluster4()
    if key == "bellx2":
        return _bellx2()
    if key.startswith("zero"):
        suffix = key[4:].lstrip("_")
        if suffix == "n":
            suffix = "4"
        if suffix.isdigit() and 1 <= int(suffix) <= MAX_QUBITS:
            return _zero(int(suffix))
    raise ValueError(f"unknown state name {name!r}")


def read_state_file(path):
    """Load a state from JSON ({"n": int, "amps": [[re, im], ...]}) or CSV
    rows "mask,re,im"."""
    text = open(path, "r", encoding="utf-8").read()
    if str(path).endswith(".json") or text.lstrip().startswith("{"):
        return _read_json_state(text, path)
    return _read_csv_state(text, path)


def _read_json_state(text, path):
    try:
        data = json.loads(text)
    except json.JSONDecodeError as err:
        raise ValueError(f"{path}: invalid JSON at line {err.lineno}: {err.msg}") from err
    if not isinstance(data, dict) or "n" not in data or "amps" not in data:
        raise ValueError(f'{path}: expected an object with "n" and "amps"')
    n = data["n"]
    pairs = data["amps"]
    if not isinstance(n, int) or not isinstance(pairs, list):
        raise ValueError(f'{path}: "n" must be an int and "amps" a list')
    if len(pairs) != 1 << n:
        raise ValueError(f"{path}: expected {1 << n} amplitudes, got {len(pairs)}")
    amps = np.zeros(1 << n, dtype=np.complex128)
    for m, pair in enumerate(pairs):
        if not (isinstance(pair, (list, tuple)) and len(pair) == 2):
            raise ValueError(f"{path}: amplitude {m} is not a [re, im] pair")
        amps[m] = complex(pair[0], pair[1])
    return PureState(n, amps)


def _read_csv_state(text, path):
    rows = {}
    for lineno, row in enumerate(csv.reader(text.splitlines()), start=1):
        if not row or (row[0].strip().startswith("#")):
            continue
        if [c.strip().lower() for c in row[:1]] == ["mask"]:
            continue
        if len(row) != 3:
            raise ValueError(f"{path}: line {lineno}: expected 3 fields, got {len(row)}")
        try:
            mask = int(row[0])
            re, im = float(row[1]), float(row[2])
        except ValueError as err:
            raise ValueError(f"{path}: line {lineno}: {err}") from err
        if mask < 0:
            raise ValueError(f"{path}: line {lineno}: negative mask")
        rows[mask] = complex(re, im)
    if not rows:
        raise ValueError(f"{path}: no amplitude rows found")
    size = max(rows) + 1
    n = max(1, (size - 1).bit_length())
    amps = np.zeros(1 << n, dtype=np.complex128)
    for mask, value in rows.items():
        amps[mask] = value
    return PureState(n, amps)


def write_state_file(state, path):
    """Write a state as the JSON format accepted by read_state_file."""
    data = {
        "n": state.n,
        "amps": [[float(a.real), float(a.imag)] for a in state.amps],
    }
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(data, fh)
