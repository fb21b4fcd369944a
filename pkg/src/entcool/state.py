"""Dense state vectors for n-qubit systems and in-place gate kernels.

Basis convention (shared by every module): the amplitude at flat index k
belongs to the basis state |x_{n-1} ... x_0>, with qubit j stored in bit j
of k (little-endian).  Gate kernels update amplitude pairs that differ only
in the acted-on bit, so a one-qubit gate costs O(2^n); no 2^n x 2^n matrix
is ever formed.

The norm is never silently renormalised: `StateVector.apply` checks it
after every gate and raises if a kernel drifted it, so kernel bugs surface
instead of being washed out.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from functools import reduce

import numpy as np

SQRT1_2 = 1.0 / math.sqrt(2.0)

GATE_1Q_KINDS = ("H", "T", "S", "NOT", "P")
GATE_2Q_KINDS = ("CNOT",)
GATE_KINDS = GATE_1Q_KINDS + GATE_2Q_KINDS

#: phase angle implied by the fixed-angle phase gates
FIXED_PHASE_ANGLE = {"T": math.pi / 4, "S": math.pi / 2}

#: |sum |phi_k|^2 - 1| must stay below this after construction and every gate
NORM_TOL = 1e-10

MAX_QUBITS = 24


@dataclass(frozen=True)
class Gate:
    """A gate kind bound to the qubit(s) it acts on.

    `delta` is the phase angle in radians; it is required for kind "P" and
    must be omitted for every other kind ("T" and "S" carry their fixed
    angles implicitly).
    """

    kind: str
    qubits: tuple[int, ...]
    delta: float | None = None

    def __post_init__(self):
        if self.kind not in GATE_KINDS:
            raise ValueError(f"unknown gate kind {self.kind!r}")
        qs = tuple(int(q) for q in self.qubits)
        object.__setattr__(self, "qubits", qs)
        if any(q < 0 for q in qs):
            raise ValueError(f"negative qubit index in {qs}")
        if self.kind == "CNOT":
            if len(qs) != 2:
                raise ValueError("CNOT takes exactly two qubits")
            if qs[0] == qs[1]:
                raise ValueError("CNOT control and target must differ")
        elif len(qs) != 1:
            raise ValueError(f"{self.kind} takes exactly one qubit")
        if self.kind == "P":
            if self.delta is None:
                raise ValueError("P requires a phase angle")
            object.__setattr__(self, "delta", float(self.delta))
        elif self.delta is not None:
            raise ValueError(f"{self.kind} does not take a phase angle")

    @property
    def is_two_qubit(self) -> bool:
        return self.kind == "CNOT"

    @property
    def control(self) -> int:
        if self.kind != "CNOT":
            raise AttributeError(f"{self.kind} has no control qubit")
        return self.qubits[0]

    @property
    def target(self) -> int:
        if self.kind != "CNOT":
            raise AttributeError(f"{self.kind} has no target qubit")
        return self.qubits[1]

    @property
    def phase_angle(self) -> float | None:
        """Phase angle for T/S/P gates, None for the rest."""
        if self.kind == "P":
            return self.delta
        return FIXED_PHASE_ANGLE.get(self.kind)


def h(qubit: int) -> Gate:
    return Gate("H", (qubit,))


def t(qubit: int) -> Gate:
    return Gate("T", (qubit,))


def s(qubit: int) -> Gate:
    return Gate("S", (qubit,))


def not_gate(qubit: int) -> Gate:
    return Gate("NOT", (qubit,))


def phase(delta: float, qubit: int) -> Gate:
    return Gate("P", (qubit,), delta)


def cnot(control: int, target: int) -> Gate:
    return Gate("CNOT", (control, target))


def inverse_gate(gate: Gate) -> Gate:
    """Inverse of a gate: H/NOT/CNOT are involutions, phase gates negate."""
    if gate.kind in ("H", "NOT", "CNOT"):
        return gate
    return Gate("P", gate.qubits, -gate.phase_angle)


def gate_matrix(kind: str, delta: float | None = None) -> np.ndarray:
    """2x2 unitary for a one-qubit gate kind."""
    if kind == "H":
        return np.array([[SQRT1_2, SQRT1_2], [SQRT1_2, -SQRT1_2]], dtype=complex)
    if kind == "NOT":
        return np.array([[0, 1], [1, 0]], dtype=complex)
    if kind in ("T", "S", "P"):
        angle = FIXED_PHASE_ANGLE.get(kind, delta)
        if angle is None:
            raise ValueError("P requires a phase angle")
        return np.array([[1, 0], [0, np.exp(1j * angle)]], dtype=complex)
    raise ValueError(f"no 2x2 matrix for kind {kind!r}")


def _n_qubits_of(amps: np.ndarray) -> int:
    size = amps.shape[0]
    if size == 0 or size & (size - 1):
        raise ValueError(f"amplitude length {size} is not a power of two")
    return size.bit_length() - 1


def _pair_view(amps: np.ndarray, qubit: int) -> np.ndarray:
    """View of shape (-1, 2, 2^qubit) whose middle axis is bit `qubit`."""
    n = _n_qubits_of(amps)
    if not 0 <= qubit < n:
        raise ValueError(f"qubit {qubit} out of range for {n} qubits")
    return amps.reshape(-1, 2, 1 << qubit)


def apply_matrix_1q(amps: np.ndarray, matrix: np.ndarray, qubit: int) -> None:
    """In-place m @ (pair) over all amplitude pairs split on `qubit`."""
    v = _pair_view(amps, qubit)
    lo = v[:, 0, :].copy()
    hi = v[:, 1, :].copy()
    v[:, 0, :] = matrix[0, 0] * lo + matrix[0, 1] * hi
    v[:, 1, :] = matrix[1, 0] * lo + matrix[1, 1] * hi


def apply_h_1q(amps: np.ndarray, qubit: int) -> None:
    v = _pair_view(amps, qubit)
    lo = v[:, 0, :].copy()
    hi = v[:, 1, :]
    v[:, 0, :] = (lo + hi) * SQRT1_2
    v[:, 1, :] = (lo - hi) * SQRT1_2


def apply_not_1q(amps: np.ndarray, qubit: int) -> None:
    v = _pair_view(amps, qubit)
    lo = v[:, 0, :].copy()
    v[:, 0, :] = v[:, 1, :]
    v[:, 1, :] = lo


def apply_phase_1q(amps: np.ndarray, delta: float, qubit: int) -> None:
    v = _pair_view(amps, qubit)
    v[:, 1, :] *= complex(math.cos(delta), math.sin(delta))


def apply_cnot_2q(amps: np.ndarray, control: int, target: int) -> None:
    """Swap the target-bit pair on every index whose control bit is 1."""
    n = _n_qubits_of(amps)
    if control == target:
        raise ValueError("CNOT control and target must differ")
    for q in (control, target):
        if not 0 <= q < n:
            raise ValueError(f"qubit {q} out of range for {n} qubits")
    v = amps.reshape((2,) * n)
    ixc, ixt = n - 1 - control, n - 1 - target  # axis a holds bit n-1-a
    sel10 = [slice(None)] * n
    sel11 = [slice(None)] * n
    sel10[ixc], sel10[ixt] = 1, 0
    sel11[ixc], sel11[ixt] = 1, 1
    sel10, sel11 = tuple(sel10), tuple(sel11)
    tmp = v[sel10].copy()
    v[sel10] = v[sel11]
    v[sel11] = tmp


def apply_gate(amps: np.ndarray, gate: Gate) -> None:
    """Dispatch a Gate onto a raw complex amplitude array, in place."""
    kind = gate.kind
    if kind == "CNOT":
        apply_cnot_2q(amps, gate.qubits[0], gate.qubits[1])
    elif kind == "H":
        apply_h_1q(amps, gate.qubits[0])
    elif kind == "NOT":
        apply_not_1q(amps, gate.qubits[0])
    else:  # T, S, P
        apply_phase_1q(amps, gate.phase_angle, gate.qubits[0])


class StateVector:
    """Pure state of `n_qubits` qubits as 2^n complex128 amplitudes."""

    __slots__ = ("n_qubits", "amplitudes")

    def __init__(self, amplitudes, *, copy: bool = True):
        amps = np.array(amplitudes, dtype=np.complex128, copy=copy)
        if amps.ndim != 1:
            raise ValueError("amplitudes must be one-dimensional")
        n = _n_qubits_of(amps)
        if not 1 <= n <= MAX_QUBITS:
            raise ValueError(f"n_qubits={n} outside supported range 1..{MAX_QUBITS}")
        self.n_qubits = n
        self.amplitudes = amps
        self._check_norm()

    @classmethod
    def product_state(cls, thetas) -> "StateVector":
        """Tensor product of cos(theta_j)|0> + sin(theta_j)|1> per qubit."""
        th = np.asarray(thetas, dtype=float)
        if th.ndim != 1 or th.size == 0:
            raise ValueError("thetas must be a non-empty 1-D sequence of angles")
        factors = [np.array([math.cos(x), math.sin(x)], dtype=np.complex128) for x in th]
        # qubit j occupies bit j, so the highest qubit is the outermost factor
        amps = reduce(np.kron, factors[::-1])
        return cls(amps, copy=False)

    def _check_norm(self) -> None:
        norm_sq = float(np.real(np.vdot(self.amplitudes, self.amplitudes)))
        if abs(norm_sq - 1.0) > NORM_TOL:
            raise RuntimeError(
                f"state norm^2 drifted to {norm_sq!r} (|norm^2 - 1| > {NORM_TOL})"
            )

    def apply(self, gate: Gate) -> "StateVector":
        """Apply a gate in place; returns self for chaining."""
        n = self.n_qubits
        if any(q >= n for q in gate.qubits):
            raise ValueError(f"gate {gate.kind} on {gate.qubits} exceeds {n} qubits")
        apply_gate(self.amplitudes, gate)
        self._check_norm()
        return self

    def norm_squared(self) -> float:
        return float(np.real(np.vdot(self.amplitudes, self.amplitudes)))

    def marginal_probability(self, qubit: int) -> float:
        """P(qubit reads 1) irrespective of the other qubits."""
        v = _pair_view(self.amplitudes, qubit)
        return float(np.sum(np.abs(v[:, 1, :]) ** 2))

    def copy(self) -> "StateVector":
        return StateVector(self.amplitudes, copy=True)

    def __eq__(self, other) -> bool:
        if not isinstance(other, StateVector):
            return NotImplemented
        return self.n_qubits == other.n_qubits and np.array_equal(
            self.amplitudes, other.amplitudes
        )

    def __repr__(self) -> str:
        return f"StateVector(n_qubits={self.n_qubits})"
