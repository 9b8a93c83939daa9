"""State vectors for small registers of polarization qubits.

Amplitudes are indexed with the first mode label as the most significant
bit, H = 0 and V = 1.  All values are immutable; every operation returns a
new :class:`StateVector`.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

ALGEBRA_TOL = 1e-12
EMPTY_TOL = 1e-14
MAX_QUBITS = 6

_S2 = 1.0 / np.sqrt(2.0)

#: single-qubit kets in H/V coordinates
KETS = {
    "H": np.array([1.0, 0.0], dtype=complex),
    "V": np.array([0.0, 1.0], dtype=complex),
    "+": np.array([_S2, _S2], dtype=complex),
    "-": np.array([_S2, -_S2], dtype=complex),
    "R": np.array([_S2, 1j * _S2], dtype=complex),
    "L": np.array([_S2, -1j * _S2], dtype=complex),
}
_ALIASES = {"−": "-", "h": "H", "v": "V", "r": "R", "l": "L"}

#: basis-change matrices; column j is the j-th basis ket written in H/V
BASES = {
    "hv": np.column_stack([KETS["H"], KETS["V"]]),
    "pm": np.column_stack([KETS["+"], KETS["-"]]),
    "rl": np.column_stack([KETS["R"], KETS["L"]]),
}


class StateError(ValueError):
    """Raised for malformed registers, labels or operators."""


class BellKind(enum.Enum):
    PHI_PLUS = "phi+"
    PHI_MINUS = "phi-"
    PSI_PLUS = "psi+"
    PSI_MINUS = "psi-"


_BELL_AMPS = {
    BellKind.PHI_PLUS: (1, 0, 0, 1),
    BellKind.PHI_MINUS: (1, 0, 0, -1),
    BellKind.PSI_PLUS: (0, 1, 1, 0),
    BellKind.PSI_MINUS: (0, 1, -1, 0),
}


def _ket(letter: str) -> np.ndarray:
    letter = _ALIASES.get(letter, letter)
    try:
        return KETS[letter]
    except KeyError:
        raise StateError(f"unknown basis letter {letter!r}") from None


@dataclass(frozen=True)
class StateVector:
    labels: tuple
    amplitudes: np.ndarray
    norm_weight: float = 1.0
    empty: bool = False

    def __post_init__(self):
        labels = tuple(self.labels)
        if len(set(labels)) != len(labels):
            raise StateError(f"duplicate mode labels in {labels}")
        if len(labels) > MAX_QUBITS:
            raise StateError(f"at most {MAX_QUBITS} qubits are supported")
        amps = np.array(self.amplitudes, dtype=complex).reshape(-1)
        if amps.size != 2 ** len(labels):
            raise StateError(
                f"{amps.size} amplitudes do not match {len(labels)} modes")
        amps.setflags(write=False)
        object.__setattr__(self, "labels", labels)
        object.__setattr__(self, "amplitudes", amps)

    @property
    def n_qubits(self) -> int:
        return len(self.labels)

    @property
    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))

    def axis(self, mode) -> int:
        try:
            return self.labels.index(mode)
        except ValueError:
            raise StateError(f"mode {mode!r} not in {self.labels}") from None

    def tensor_view(self) -> np.ndarray:
        return self.amplitudes.reshape((2,) * self.n_qubits)

    def amplitude(self, bits: str) -> complex:
        """Amplitude of an H/V basis string such as ``"HVHH"``."""
        if len(bits) != self.n_qubits:
            raise StateError("basis string length does not match register")
        index = tuple({"H": 0, "V": 1}[b] for b in bits)
        return complex(self.tensor_view()[index])

    def __repr__(self):
        terms = []
        for idx in np.flatnonzero(np.abs(self.amplitudes) > 1e-12):
            bits = format(idx, f"0{self.n_qubits}b").replace("0", "H").replace("1", "V")
            terms.append(f"({self.amplitudes[idx]:.4g})|{bits}>")
        body = " + ".join(terms) if terms else "0"
        return f"StateVector[{','.join(map(str, self.labels))}]: {body}"


def normalize(s: StateVector) -> StateVector:
    n = s.norm
    if n < np.sqrt(EMPTY_TOL):
        raise StateError("cannot normalize a zero vector")
    return StateVector(s.labels, s.amplitudes / n, s.norm_weight, s.empty)


def make_ket(labels: Sequence, assignment: Sequence[str]) -> StateVector:
    """Product state with one basis letter (H, V, +, -, R, L) per mode."""
    labels = tuple(labels)
    letters = list(assignment)
    if len(letters) != len(labels):
        raise StateError("need exactly one basis letter per mode")
    amps = np.array([1.0 + 0j])
    for letter in letters:
        amps = np.kron(amps, _ket(letter))
    return StateVector(labels, amps)


def bell_state(kind, labels: Sequence) -> StateVector:
    labels = tuple(labels)
    if len(labels) != 2:
        raise StateError("a Bell state needs exactly two modes")
    kind = BellKind(kind)
    return StateVector(labels, np.array(_BELL_AMPS[kind], dtype=complex) * _S2)


def tensor(s1: StateVector, s2: StateVector) -> StateVector:
    overlap = set(s1.labels) & set(s2.labels)
    if overlap:
        raise StateError(f"overlapping modes {sorted(map(str, overlap))}")
    return StateVector(s1.labels + s2.labels,
                       np.kron(s1.amplitudes, s2.amplitudes),
                       s1.norm_weight * s2.norm_weight)


def tensor_all(*states: StateVector) -> StateVector:
    out = states[0]
    for s in states[1:]:
        out = tensor(out, s)
    return out


@dataclass(frozen=True)
class SingleQubitOp:
    """A 2x2 complex operator acting on one polarization mode."""

    matrix: np.ndarray = field(repr=False)
    name: str = ""

    def __post_init__(self):
        m = np.array(self.matrix, dtype=complex)
        if m.shape != (2, 2):
            raise StateError("single-qubit operators are 2x2")
        m.setflags(write=False)
        object.__setattr__(self, "matrix", m)

    def __matmul__(self, other):
        return SingleQubitOp(self.matrix @ _as_matrix(other))

    def is_unitary(self, tol=ALGEBRA_TOL):
        return is_unitary(self.matrix, tol)

    def is_projector(self, tol=ALGEBRA_TOL):
        return is_projector(self.matrix, tol)


def _as_matrix(op) -> np.ndarray:
    return np.asarray(getattr(op, "matrix", op), dtype=complex)


def apply(matrix, modes: Sequence, s: StateVector) -> StateVector:
    """Apply a ``2**k x 2**k`` operator acting on ``modes`` (in that order)."""
    modes = tuple(modes)
    mat = _as_matrix(matrix)
    k = len(modes)
    if mat.shape != (2 ** k, 2 ** k):
        raise StateError(f"operator shape {mat.shape} does not act on {k} modes")
    axes = [s.axis(m) for m in modes]
    if len(set(axes)) != k:
        raise StateError("repeated mode in operator support")
    psi = s.tensor_view()
    op = mat.reshape((2,) * (2 * k))
    out = np.tensordot(op, psi, axes=(list(range(k, 2 * k)), axes))
    out = np.moveaxis(out, list(range(k)), axes)
    return StateVector(s.labels, out.reshape(-1), s.norm_weight, s.empty)


def apply_single(op, mode, s: StateVector) -> StateVector:
    return apply(op, (mode,), s)


def is_projector(matrix, tol: float = ALGEBRA_TOL) -> bool:
    m = _as_matrix(matrix)
    return bool(np.max(np.abs(m - m.conj().T)) < tol
                and np.max(np.abs(m @ m - m)) < tol)


def is_unitary(matrix, tol: float = ALGEBRA_TOL) -> bool:
    m = _as_matrix(matrix)
    return bool(np.max(np.abs(m.conj().T @ m - np.eye(m.shape[0]))) < tol)


def projection_probability(s: StateVector, projector, modes: Sequence) -> float:
    """``<s|P|s>`` without renormalizing."""
    projected = apply(projector, modes, s).amplitudes
    return float(np.real(np.vdot(s.amplitudes, projected)))


def project(s: StateVector, projector, modes: Sequence):
    """Project ``s`` with a Hermitian idempotent operator on ``modes``.

    Returns ``(state, p)`` where ``p = <s|P|s>`` and ``state`` is renormalized.
    When ``p`` falls below 1e-14 the returned state is the zero vector with
    ``empty=True``.
    """
    if not is_projector(projector):
        raise StateError("projector must be Hermitian and idempotent")
    out = apply(projector, modes, s)
    p = float(np.vdot(out.amplitudes, out.amplitudes).real)
    if p < EMPTY_TOL:
        zero = np.zeros_like(s.amplitudes)
        return StateVector(s.labels, zero, 0.0, empty=True), 0.0
    return (StateVector(s.labels, out.amplitudes / np.sqrt(p),
                        s.norm_weight * p), p)


def reorder(s: StateVector, labels: Sequence) -> StateVector:
    labels = tuple(labels)
    if set(labels) != set(s.labels) or len(labels) != len(s.labels):
        raise StateError(f"cannot reorder {s.labels} to {labels}")
    perm = [s.labels.index(m) for m in labels]
    amps = np.transpose(s.tensor_view(), perm).reshape(-1)
    return StateVector(labels, amps, s.norm_weight, s.empty)


def relabel(s: StateVector, mapping: dict) -> StateVector:
    labels = tuple(mapping.get(m, m) for m in s.labels)
    return StateVector(labels, s.amplitudes, s.norm_weight, s.empty)


def inner(s1: StateVector, s2: StateVector) -> complex:
    """``<s1|s2>``; ``s2`` is reordered onto ``s1``'s mode order if needed."""
    if s1.labels != s2.labels:
        if set(s1.labels) != set(s2.labels):
            raise StateError(f"mode sets differ: {s1.labels} vs {s2.labels}")
        s2 = reorder(s2, s1.labels)
    return complex(np.vdot(s1.amplitudes, s2.amplitudes))


def fidelity(s1: StateVector, s2: StateVector) -> float:
    """``|<s1|s2>|**2`` for normalized inputs; insensitive to global phase."""
    return float(abs(inner(s1, s2)) ** 2)


def coefficients(s: StateVector, basis: str = "hv") -> np.ndarray:
    """Amplitudes of ``s`` in the product basis ``basis**n`` ("hv", "pm", "rl").

    Ordering follows the register with the first listed ket of the basis as
    bit 0, so ``coefficients(phi_minus, "pm")`` is indexed ``++, +-, -+, --``.
    """
    b = BASES[basis].conj().T
    out = s
    for m in s.labels:
        out = apply(b, (m,), out)
    return np.array(out.amplitudes)


def marginal(s: StateVector, mode) -> np.ndarray:
    """H/V outcome probabilities of a single mode."""
    psi = np.moveaxis(s.tensor_view(), s.axis(mode), 0).reshape(2, -1)
    return np.sum(np.abs(psi) ** 2, axis=1)
