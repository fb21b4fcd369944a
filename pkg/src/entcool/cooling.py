"""Metropolis entanglement cooling: anneal a state back toward product form.

Each step proposes one gate sampled exactly like heating does.  The
objective is the order-q Renyi entropy (q = 1 by default) averaged over
all n-1 line cuts.  Downhill and entropy-neutral proposals are always
kept; an uphill proposal is kept with probability exp(-beta * dS).  A
rejected gate is undone by applying its inverse, which restores the state
to roundoff.

Per-cut entropies are cached between steps.  A one-qubit gate cannot
change any cut spectrum (it conjugates the reduced state unitarily on
one side), so those proposals carry dS = 0 exactly and skip the spectrum
recomputation; a CNOT on qubits (a, b) only crosses cuts x with
min(a,b) < x <= max(a,b), so only those cuts are recomputed.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np

from .circuit import GateSet, RngStream, sample_gate
from .spectrum import DEFAULT_RANK_TOL, renyi_entropy, spectrum_from_amplitudes
from .state import Gate, StateVector, inverse_gate

#: |dS| at or below this counts as entropy-neutral at finite beta
ZERO_DELTA_TOL = 1e-12

_KIND_CODES = {"H": 0, "T": 1, "S": 2, "NOT": 3, "CNOT": 4}
_CODE_KINDS = {code: kind for kind, code in _KIND_CODES.items()}


@dataclass(frozen=True)
class CoolingConfig:
    """Annealing knobs.  beta may be math.inf for strict downhill search."""

    beta: float = 5.0
    max_steps: int = 200000
    target_entropy: float = 1e-8
    objective_q: float = 1.0

    def __post_init__(self):
        if self.beta < 0:
            raise ValueError(f"beta must be >= 0, got {self.beta}")
        if self.max_steps < 1:
            raise ValueError(f"max_steps must be >= 1, got {self.max_steps}")
        if self.target_entropy < 0:
            raise ValueError(f"target_entropy must be >= 0, got {self.target_entropy}")
        if self.objective_q < 0:
            raise ValueError(f"objective_q must be >= 0, got {self.objective_q}")


class Outcome(Enum):
    DISENTANGLED = "Disentangled"
    STEP_BUDGET_EXHAUSTED = "StepBudgetExhausted"


def accept_probability(delta_s: float, beta: float) -> float:
    """Metropolis acceptance: 1 for delta_s <= 0, else exp(-beta*delta_s)."""
    if delta_s <= 0.0:
        return 1.0
    if math.isinf(beta):
        return 0.0
    return math.exp(-beta * delta_s)


TRACE_HEADER = "step,gate,qubits,delta_s,accepted,mean_s0,mean_s1"


@dataclass
class CoolingTrace:
    """Per-proposal record of one cooling run.

    Arrays have one entry per proposal (length steps_used).  Gates are
    stored as compact codes; `gate_at` reconstructs the Gate.  mean_s0 and
    mean_s1 are the cut-averaged entropies after the accept/reject
    decision of that step; final values are a fresh full recomputation.
    """

    outcome: Outcome
    steps_used: int
    kind_code: np.ndarray
    qubit0: np.ndarray
    qubit1: np.ndarray  # -1 for one-qubit gates
    delta_s: np.ndarray
    accepted: np.ndarray
    mean_s0: np.ndarray
    mean_s1: np.ndarray
    initial_mean_s0: float
    initial_mean_s1: float
    final_mean_s0: float
    final_mean_s1: float

    def gate_at(self, step: int) -> Gate:
        kind = _CODE_KINDS[int(self.kind_code[step])]
        if kind == "CNOT":
            return Gate(kind, (int(self.qubit0[step]), int(self.qubit1[step])))
        return Gate(kind, (int(self.qubit0[step]),))

    @property
    def n_accepted(self) -> int:
        return int(np.count_nonzero(self.accepted))

    def to_csv(self, path, entropy_stride: int = 1) -> None:
        """Dump one row per proposal; entropy cells only every stride steps."""
        if entropy_stride < 1:
            raise ValueError("entropy_stride must be >= 1")
        with open(path, "w", encoding="ascii") as fh:
            fh.write(TRACE_HEADER + "\n")
            for i in range(self.steps_used):
                kind = _CODE_KINDS[int(self.kind_code[i])]
                qubits = str(int(self.qubit0[i]))
                if kind == "CNOT":
                    qubits += f" {int(self.qubit1[i])}"
                if i % entropy_stride == 0 or i == self.steps_used - 1:
                    s0 = f"{self.mean_s0[i]:.17g}"
                    s1 = f"{self.mean_s1[i]:.17g}"
                else:
                    s0 = s1 = ""
                accepted = 1 if self.accepted[i] else 0
                fh.write(
                    f"{i},{kind},{qubits},{self.delta_s[i]:.17g},{accepted},{s0},{s1}\n"
                )


@dataclass
class _CutCache:
    """Per-cut spectra and entropies, updated only where a gate crosses."""

    s0: np.ndarray
    s1: np.ndarray
    obj: np.ndarray
    obj_q: float
    tol: float

    @classmethod
    def from_state(cls, state: StateVector, obj_q: float, tol: float) -> "_CutCache":
        n = state.n_qubits
        s0 = np.empty(n - 1)
        s1 = np.empty(n - 1)
        obj = np.empty(n - 1)
        for c in range(1, n):
            spec = spectrum_from_amplitudes(state.amplitudes, c)
            s0[c - 1] = renyi_entropy(spec, 0.0, tol)
            s1[c - 1] = renyi_entropy(spec, 1.0, tol)
            obj[c - 1] = cls._objective(spec, obj_q, tol, s0[c - 1], s1[c - 1])
        return cls(s0, s1, obj, obj_q, tol)

    @staticmethod
    def _objective(spec, obj_q, tol, s0_val, s1_val) -> float:
        if obj_q == 0.0:
            return s0_val
        if obj_q == 1.0:
            return s1_val
        return renyi_entropy(spec, obj_q, tol)

    def entries_for(self, amps: np.ndarray, cuts: range):
        """Fresh (s0, s1, obj) values for the given cuts of `amps`."""
        rows = []
        for c in cuts:
            spec = spectrum_from_amplitudes(amps, c)
            v0 = renyi_entropy(spec, 0.0, self.tol)
            v1 = renyi_entropy(spec, 1.0, self.tol)
            rows.append((v0, v1, self._objective(spec, self.obj_q, self.tol, v0, v1)))
        return rows

    def proposed_mean_obj(self, cuts: range, rows) -> float:
        obj = self.obj.copy()
        for c, (_, _, vo) in zip(cuts, rows):
            obj[c - 1] = vo
        return float(np.mean(obj))

    def commit(self, cuts: range, rows) -> None:
        for c, (v0, v1, vo) in zip(cuts, rows):
            self.s0[c - 1] = v0
            self.s1[c - 1] = v1
            self.obj[c - 1] = vo

    def mean_s0(self) -> float:
        return float(np.mean(self.s0))

    def mean_s1(self) -> float:
        return float(np.mean(self.s1))

    def mean_obj(self) -> float:
        return float(np.mean(self.obj))


def _crossed_cuts(gate: Gate) -> range:
    lo, hi = sorted(gate.qubits)
    return range(lo + 1, hi + 1)


def cool(
    state: StateVector,
    gates: GateSet,
    cfg: CoolingConfig,
    rng: RngStream,
    tol: float = DEFAULT_RANK_TOL,
) -> CoolingTrace:
    """Anneal `state` in place until the objective entropy hits the target.

    Proposals count against cfg.max_steps whether accepted or not.  The
    acceptance draw is consumed only for uphill proposals at finite beta,
    so a run is replayable from its seed.  With beta = inf only dS <= 0 is
    kept and the accepted objective sequence is non-increasing exactly.
    """
    if state.n_qubits < 2:
        raise ValueError("cooling needs at least 2 qubits")
    cache = _CutCache.from_state(state, cfg.objective_q, tol)
    initial_s0 = cache.mean_s0()
    initial_s1 = cache.mean_s1()
    mean_obj = cache.mean_obj()
    strict_downhill = math.isinf(cfg.beta)
    zero_tol = 0.0 if strict_downhill else ZERO_DELTA_TOL

    cap = cfg.max_steps
    kind_code = np.empty(cap, dtype=np.int8)
    qubit0 = np.empty(cap, dtype=np.int16)
    qubit1 = np.empty(cap, dtype=np.int16)
    delta_s = np.empty(cap, dtype=np.float64)
    accepted_arr = np.empty(cap, dtype=np.bool_)
    s0_log = np.empty(cap, dtype=np.float64)
    s1_log = np.empty(cap, dtype=np.float64)

    steps = 0
    outcome = Outcome.STEP_BUDGET_EXHAUSTED
    if mean_obj <= cfg.target_entropy:
        outcome = Outcome.DISENTANGLED
    else:
        for step in range(cap):
            gate = sample_gate(gates, state.n_qubits, rng)
            if gate.is_two_qubit:
                cuts = _crossed_cuts(gate)
                state.apply(gate)
                rows = cache.entries_for(state.amplitudes, cuts)
                proposed = cache.proposed_mean_obj(cuts, rows)
                delta = proposed - mean_obj
                if delta <= zero_tol:
                    keep = True
                elif strict_downhill:
                    keep = False
                else:
                    keep = rng.random() < math.exp(-cfg.beta * delta)
                if keep:
                    cache.commit(cuts, rows)
                    mean_obj = proposed
                else:
                    state.apply(inverse_gate(gate))
            else:
                # one-qubit unitaries leave every cut spectrum unchanged
                delta = 0.0
                keep = True
                state.apply(gate)

            kind_code[step] = _KIND_CODES[gate.kind]
            qubit0[step] = gate.qubits[0]
            qubit1[step] = gate.qubits[1] if gate.is_two_qubit else -1
            delta_s[step] = delta
            accepted_arr[step] = keep
            s0_log[step] = cache.mean_s0()
            s1_log[step] = cache.mean_s1()
            steps = step + 1
            if keep and mean_obj <= cfg.target_entropy:
                outcome = Outcome.DISENTANGLED
                break

    final_cache = _CutCache.from_state(state, cfg.objective_q, tol)
    return CoolingTrace(
        outcome=outcome,
        steps_used=steps,
        kind_code=kind_code[:steps].copy(),
        qubit0=qubit0[:steps].copy(),
        qubit1=qubit1[:steps].copy(),
        delta_s=delta_s[:steps].copy(),
        accepted=accepted_arr[:steps].copy(),
        mean_s0=s0_log[:steps].copy(),
        mean_s1=s1_log[:steps].copy(),
        initial_mean_s0=initial_s0,
        initial_mean_s1=initial_s1,
        final_mean_s0=final_cache.mean_s0(),
        final_mean_s1=final_cache.mean_s1(),
    )
