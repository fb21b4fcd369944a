"""Gate sets, stochastic gate sampling, circuit records and serialization.

Sampling order per drawn gate is fixed and documented so that a seed fully
determines a circuit: (1) draw the acted-on qubit uniformly from [0, n);
(2) draw the gate kind uniformly from the set members; (3) if the kind is
two-qubit, draw the second operand uniformly from the remaining n-1 qubits.
The first drawn qubit is the CNOT control.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .state import GATE_2Q_KINDS, GATE_KINDS, Gate, StateVector, inverse_gate

MASK64 = (1 << 64) - 1


class RngStream:
    """Seedable deterministic random stream.

    Backed by numpy's PCG64 bit generator, whose output sequence for a given
    seed is stable across platforms and numpy releases; `algorithm` names it
    so run manifests can record the provenance of every draw.
    """

    algorithm = "pcg64"

    def __init__(self, seed: int):
        self.seed = int(seed) & MASK64
        self._gen = np.random.Generator(np.random.PCG64(self.seed))

    def integers(self, high: int) -> int:
        """Uniform integer in [0, high)."""
        return int(self._gen.integers(high))

    def random(self) -> float:
        """Uniform float in [0, 1)."""
        return float(self._gen.random())

    def uniform(self, low: float, high: float, size=None):
        return self._gen.uniform(low, high, size)

    def choice_without_replacement(self, n: int, k: int) -> np.ndarray:
        """k distinct integers from [0, n), returned sorted ascending."""
        return np.sort(self._gen.choice(n, size=k, replace=False))

    def __repr__(self) -> str:
        return f"RngStream(seed={self.seed}, algorithm={self.algorithm!r})"


def realization_stream(master_seed: int, index: int) -> RngStream:
    """Per-realization stream: seed XOR realization index (64-bit)."""
    return RngStream((int(master_seed) ^ int(index)) & MASK64)


@dataclass(frozen=True)
class GateSet:
    """Named collection of gate kinds a stochastic circuit draws from."""

    name: str
    members: tuple[str, ...]

    def __post_init__(self):
        members = tuple(self.members)
        object.__setattr__(self, "members", members)
        if not members:
            raise ValueError("gate set must have at least one member")
        for kind in members:
            if kind not in GATE_KINDS:
                raise ValueError(f"unknown gate kind {kind!r} in set {self.name!r}")
            if kind == "P":
                raise ValueError(
                    "parameterized phase gates cannot be sampled; use T or S"
                )
        if len(set(members)) != len(members):
            raise ValueError(f"duplicate members in gate set {self.name!r}")

    @property
    def has_two_qubit(self) -> bool:
        return any(kind in GATE_2Q_KINDS for kind in self.members)


CNOT_H_T = GateSet("cnot-h-t", ("CNOT", "H", "T"))
CNOT_H_S = GateSet("cnot-h-s", ("CNOT", "H", "S"))
CNOT_H_NOT = GateSet("cnot-h-not", ("CNOT", "H", "NOT"))

GATE_SETS = {gs.name: gs for gs in (CNOT_H_T, CNOT_H_S, CNOT_H_NOT)}


def gate_set(name: str) -> GateSet:
    try:
        return GATE_SETS[name]
    except KeyError:
        raise ValueError(
            f"unknown gate set {name!r}; known: {sorted(GATE_SETS)}"
        ) from None


def sample_gate(gates: GateSet, n_qubits: int, rng: RngStream) -> Gate:
    """Draw one gate instance; see the module docstring for the draw order."""
    if gates.has_two_qubit and n_qubits < 2:
        raise ValueError(
            f"gate set {gates.name!r} contains a two-qubit gate but n_qubits={n_qubits}"
        )
    q0 = rng.integers(n_qubits)
    kind = gates.members[rng.integers(len(gates.members))]
    if kind in GATE_2Q_KINDS:
        r = rng.integers(n_qubits - 1)
        q1 = r if r < q0 else r + 1  # uniform over the other n-1 qubits
        return Gate(kind, (q0, q1))
    return Gate(kind, (q0,))


@dataclass(frozen=True)
class Circuit:
    """Ordered gate sequence on a fixed number of qubits."""

    n_qubits: int
    gates: tuple[Gate, ...] = field(default_factory=tuple)

    def __post_init__(self):
        object.__setattr__(self, "gates", tuple(self.gates))
        for g in self.gates:
            if any(q >= self.n_qubits for q in g.qubits):
                raise ValueError(
                    f"gate {g.kind} on {g.qubits} exceeds n_qubits={self.n_qubits}"
                )

    def __len__(self) -> int:
        return len(self.gates)


def heat(
    state: StateVector,
    gates: GateSet,
    n_gates: int,
    rng: RngStream,
    observer: Callable[[int, Gate, StateVector], None] | None = None,
) -> Circuit:
    """Apply `n_gates` sampled gates to `state` in place; returns the record.

    `observer(i, gate, state)` is invoked after gate i (1-based) has been
    applied, e.g. to log entropy-versus-gate-number curves.
    """
    if n_gates < 0:
        raise ValueError("n_gates must be >= 0")
    applied = []
    for i in range(n_gates):
        g = sample_gate(gates, state.n_qubits, rng)
        state.apply(g)
        applied.append(g)
        if observer is not None:
            observer(i + 1, g, state)
    return Circuit(state.n_qubits, tuple(applied))


def apply_circuit(state: StateVector, circuit: Circuit) -> StateVector:
    if state.n_qubits != circuit.n_qubits:
        raise ValueError(
            f"circuit is for {circuit.n_qubits} qubits, state has {state.n_qubits}"
        )
    for g in circuit.gates:
        state.apply(g)
    return state


def inverse_circuit(circuit: Circuit) -> Circuit:
    """The sequence reversed with each gate inverted."""
    return Circuit(
        circuit.n_qubits, tuple(inverse_gate(g) for g in reversed(circuit.gates))
    )


def _format_gate(g: Gate) -> str:
    kind = g.kind if g.kind != "P" else f"P({g.delta:.17g})"
    return " ".join([kind, *map(str, g.qubits)])


def _parse_gate(line: str) -> Gate:
    parts = line.split()
    kind, qubits = parts[0], tuple(int(tok) for tok in parts[1:])
    if kind.startswith("P(") and kind.endswith(")"):
        return Gate("P", qubits, float(kind[2:-1]))
    return Gate(kind, qubits)


def format_circuit(circuit: Circuit) -> str:
    """Text form: `n_qubits=<n>` header then one `KIND q0 [q1]` line per gate."""
    lines = [f"n_qubits={circuit.n_qubits}"]
    lines.extend(_format_gate(g) for g in circuit.gates)
    return "\n".join(lines) + "\n"


def parse_circuit(text: str) -> Circuit:
    lines = [ln.strip() for ln in text.splitlines() if ln.strip()]
    if not lines or not lines[0].startswith("n_qubits="):
        raise ValueError("circuit text must start with an 'n_qubits=<n>' header")
    n = int(lines[0].split("=", 1)[1])
    return Circuit(n, tuple(_parse_gate(ln) for ln in lines[1:]))


def write_circuit(path, circuit: Circuit) -> None:
    with open(path, "w", encoding="ascii") as fh:
        fh.write(format_circuit(circuit))


def read_circuit(path) -> Circuit:
    with open(path, "r", encoding="ascii") as fh:
        return parse_circuit(fh.read())
