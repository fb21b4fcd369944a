"""Random streams, gate sets, stochastic sampling and circuit records."""

import math

import numpy as np
import pytest

from entcool.circuit import (
    CNOT_H_NOT,
    CNOT_H_S,
    CNOT_H_T,
    Circuit,
    GateSet,
    RngStream,
    apply_circuit,
    format_circuit,
    gate_set,
    heat,
    inverse_circuit,
    parse_circuit,
    read_circuit,
    realization_stream,
    sample_gate,
    write_circuit,
)
from entcool.spectrum import mean_cut_entropy
from entcool.state import StateVector, cnot, h, phase, t


class TestRngStream:
    def test_same_seed_same_sequence(self):
        a, b = RngStream(99), RngStream(99)
        assert [a.integers(1000) for _ in range(20)] == [b.integers(1000) for _ in range(20)]
        assert a.random() == b.random()
        np.testing.assert_array_equal(a.uniform(0, 1, 8), b.uniform(0, 1, 8))

    def test_different_seeds_diverge(self):
        a, b = RngStream(1), RngStream(2)
        assert [a.integers(10**9) for _ in range(8)] != [b.integers(10**9) for _ in range(8)]

    def test_seed_is_masked_to_64_bits(self):
        assert RngStream(2**64 + 5).seed == 5
        assert RngStream(-1).seed == 2**64 - 1

    def test_choice_without_replacement(self):
        picks = RngStream(7).choice_without_replacement(50, 12)
        assert picks.size == 12
        assert len(set(picks.tolist())) == 12
        assert np.all(np.diff(picks) > 0)
        assert picks.min() >= 0 and picks.max() < 50

    def test_realization_stream_is_seed_xor_index(self):
        assert realization_stream(12345, 7).seed == (12345 ^ 7)
        assert realization_stream(12345, 0).seed == 12345

    def test_algorithm_label(self):
        assert RngStream(0).algorithm == "pcg64"
        assert "pcg64" in repr(RngStream(0))


class TestGateSets:
    def test_named_sets(self):
        assert CNOT_H_T.members == ("CNOT", "H", "T")
        assert CNOT_H_S.members == ("CNOT", "H", "S")
        assert CNOT_H_NOT.members == ("CNOT", "H", "NOT")

    def test_lookup_by_name(self):
        assert gate_set("cnot-h-t") is CNOT_H_T
        assert gate_set("cnot-h-s") is CNOT_H_S
        assert gate_set("cnot-h-not") is CNOT_H_NOT
        with pytest.raises(ValueError):
            gate_set("cnot-h-x")

    def test_validation(self):
        with pytest.raises(ValueError):
            GateSet("empty", ())
        with pytest.raises(ValueError):
            GateSet("bad", ("H", "Q"))
        with pytest.raises(ValueError):
            GateSet("dup", ("H", "H"))
        with pytest.raises(ValueError):
            GateSet("param", ("P",))  # parameterized gates are not samplable

    def test_has_two_qubit(self):
        assert CNOT_H_T.has_two_qubit
        assert not GateSet("solo", ("H", "T")).has_two_qubit


class TestSampleGate:
    def test_kinds_roughly_uniform_and_qubits_in_range(self):
        rng = RngStream(21)
        n, draws = 5, 3000
        counts = {"CNOT": 0, "H": 0, "T": 0}
        seen_qubits = set()
        for _ in range(draws):
            g = sample_gate(CNOT_H_T, n, rng)
            counts[g.kind] += 1
            seen_qubits.update(g.qubits)
            assert all(0 <= q < n for q in g.qubits)
            if g.kind == "CNOT":
                assert g.qubits[0] != g.qubits[1]
        assert seen_qubits == set(range(n))
        for kind in counts:
            assert abs(counts[kind] / draws - 1 / 3) < 0.04

    def test_deterministic_for_fixed_seed(self):
        a = [sample_gate(CNOT_H_S, 6, RngStream(5)) for _ in range(1)]
        b = [sample_gate(CNOT_H_S, 6, RngStream(5)) for _ in range(1)]
        assert a == b
        rng1, rng2 = RngStream(17), RngStream(17)
        seq1 = [sample_gate(CNOT_H_NOT, 4, rng1) for _ in range(50)]
        seq2 = [sample_gate(CNOT_H_NOT, 4, rng2) for _ in range(50)]
        assert seq1 == seq2

    def test_two_qubit_set_needs_two_qubits(self):
        with pytest.raises(ValueError):
            sample_gate(CNOT_H_T, 1, RngStream(0))
        g = sample_gate(GateSet("solo", ("H",)), 1, RngStream(0))
        assert g.kind == "H" and g.qubits == (0,)


class TestHeat:
    def test_length_and_record(self):
        state = StateVector.product_state([0.3] * 4)
        circuit = heat(state, CNOT_H_T, 25, RngStream(3))
        assert len(circuit) == 25
        assert circuit.n_qubits == 4

    def test_observer_sees_one_based_gate_numbers(self):
        state = StateVector.product_state([0.3] * 3)
        seen = []
        heat(state, CNOT_H_S, 7, RngStream(4), observer=lambda i, g, st: seen.append((i, g.kind)))
        assert [i for i, _ in seen] == list(range(1, 8))

    def test_zero_gates_leaves_state_unchanged(self):
        state = StateVector.product_state([0.3, 0.9])
        before = state.amplitudes.copy()
        circuit = heat(state, CNOT_H_T, 0, RngStream(5))
        assert len(circuit) == 0
        np.testing.assert_array_equal(state.amplitudes, before)

    def test_negative_count_rejected(self):
        state = StateVector.product_state([0.3, 0.9])
        with pytest.raises(ValueError):
            heat(state, CNOT_H_T, -1, RngStream(5))

    def test_same_seed_reproduces_circuit_and_state(self):
        s1 = StateVector.product_state([0.2, 0.8, 1.4])
        s2 = StateVector.product_state([0.2, 0.8, 1.4])
        c1 = heat(s1, CNOT_H_NOT, 40, RngStream(77))
        c2 = heat(s2, CNOT_H_NOT, 40, RngStream(77))
        assert c1 == c2
        np.testing.assert_array_equal(s1.amplitudes, s2.amplitudes)


class TestCircuitRecord:
    def test_qubit_bounds_validated(self):
        with pytest.raises(ValueError):
            Circuit(2, (h(2),))

    def test_apply_requires_matching_width(self):
        state = StateVector.product_state([0.1, 0.2])
        with pytest.raises(ValueError):
            apply_circuit(state, Circuit(3, (h(0),)))

    def test_inverse_reverses_and_inverts(self):
        circuit = Circuit(3, (h(0), t(1), cnot(0, 2)))
        inv = inverse_circuit(circuit)
        assert [g.kind for g in inv.gates] == ["CNOT", "P", "H"]
        assert inv.gates[1].phase_angle == pytest.approx(-math.pi / 4)

    def test_heat_then_inverse_restores_product_state(self):
        for seed, gates in [(31, CNOT_H_T), (32, CNOT_H_S), (33, CNOT_H_NOT)]:
            rng = RngStream(seed)
            thetas = rng.uniform(0, math.pi, 6)
            state = StateVector.product_state(thetas)
            initial = state.amplitudes.copy()
            circuit = heat(state, gates, 120, rng)
            apply_circuit(state, inverse_circuit(circuit))
            assert mean_cut_entropy(state, q=1.0) < 1e-9
            np.testing.assert_allclose(state.amplitudes, initial, atol=1e-10)


class TestCircuitText:
    def test_format_shape(self):
        text = format_circuit(Circuit(3, (h(0), cnot(2, 1))))
        assert text.splitlines() == ["n_qubits=3", "H 0", "CNOT 2 1"]

    def test_round_trip_all_kinds(self):
        # every kind, including a full-precision phase angle
        circuit = Circuit(4, (h(0), t(1), cnot(3, 0), phase(-0.12345678901234567, 2)))
        again = parse_circuit(format_circuit(circuit))
        assert again == circuit
        assert again.gates[3].delta == circuit.gates[3].delta  # bit-exact angle

    def test_file_round_trip(self, tmp_path):
        circuit = Circuit(5, tuple(heat(
            StateVector.product_state([0.3] * 5), CNOT_H_T, 30, RngStream(8)).gates))
        path = tmp_path / "circ.txt"
        write_circuit(path, circuit)
        assert read_circuit(path) == circuit

    def test_header_required(self):
        with pytest.raises(ValueError):
            parse_circuit("H 0\n")
        with pytest.raises(ValueError):
            parse_circuit("")

    def test_bad_lines_rejected(self):
        with pytest.raises(ValueError):
            parse_circuit("n_qubits=2\nQ 0\n")  # unknown kind
        with pytest.raises(ValueError):
            parse_circuit("n_qubits=2\nCNOT 0\n")  # wrong arity
        with pytest.raises(ValueError):
            parse_circuit("n_qubits=2\nH 5\n")  # out of range
