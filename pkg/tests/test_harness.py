"""Experiment harness: config plumbing, checkpointed stages, CLI, replay.

Pipeline tests run a deliberately tiny ensemble (5-6 qubits, tens of
realizations) so the whole file stays in the seconds range while still
exercising checkpoint resume, worker independence and the file formats.
"""

import json
import math
import os

import numpy as np
import pytest

from entcool.circuit import read_circuit
from entcool.cli import build_parser, main
from entcool.cooling import Outcome
from entcool.ensemble import (
    CURVE_HEADER,
    SUMMARY_HEADER,
    ExperimentConfig,
    cooling_stream,
    parse_cut,
    read_cool_checkpoint,
    read_heat_checkpoint,
    realization_seed,
    reheat_realization,
    replay_realization,
    run_all,
    run_cooling_ensemble,
    run_heating_ensemble,
    run_stats,
    select_cool_samples,
    selection_stream,
)
from entcool.spectrum import entanglement_spectrum, read_spectra


def tiny_config(out_dir, **overrides):
    base = dict(
        n_qubits=5,
        gate_set="cnot-h-t",
        n_heat_gates=40,
        n_realizations=12,
        n_cool_samples=4,
        beta=5.0,
        max_cool_steps=300,
        master_seed=424242,
        stats_cut="all",
        curve_stride=10,
        output_dir=str(out_dir),
    )
    base.update(overrides)
    return ExperimentConfig(**base)


class TestExperimentConfig:
    def test_defaults_describe_full_scale_run(self):
        cfg = ExperimentConfig()
        assert cfg.n_qubits == 16
        assert cfg.n_heat_gates == 512
        assert cfg.n_realizations == 5000
        assert cfg.n_cool_samples == 100
        assert cfg.beta == 5.0
        assert cfg.max_cool_steps == 200000
        assert cfg.stats_cut == "half"

    def test_validation_errors(self):
        cases = [
            dict(gate_set="cnot-x"),
            dict(n_qubits=1),
            dict(n_qubits=25),
            dict(n_heat_gates=-1),
            dict(n_realizations=0),
            dict(n_realizations=5, n_cool_samples=6),
            dict(n_cool_samples=0),
            dict(max_cool_steps=0),
            dict(beta=-1.0),
            dict(beta=math.inf),
            dict(stats_cut="quarter"),
            dict(stats_cut=0),
            dict(stats_cut=16),
            dict(curve_stride=-1),
            dict(target_entropy=-1e-9),
            dict(objective_q=-1.0),
            dict(trace_stride=0),
            dict(hist_bin_width=0.0),
            dict(hist_r_max=0.0),
            dict(theta_distribution="uniform[0,2pi]"),
        ]
        for kwargs in cases:
            with pytest.raises(ValueError):
                ExperimentConfig(**kwargs)

    def test_dict_round_trip(self):
        cfg = ExperimentConfig(n_qubits=8, stats_cut=3, master_seed=7)
        assert ExperimentConfig.from_dict(cfg.to_dict()) == cfg

    def test_unknown_keys_rejected(self):
        with pytest.raises(ValueError, match="unknown config keys"):
            ExperimentConfig.from_dict({"n_qubit": 8})

    def test_json_integers_arriving_as_floats(self):
        cfg = ExperimentConfig.from_dict(
            {"n_qubits": 8.0, "n_realizations": 10.0, "n_cool_samples": 2.0}
        )
        assert cfg.n_qubits == 8
        assert cfg.n_realizations == 10
        with pytest.raises(ValueError):
            ExperimentConfig.from_dict({"n_qubits": 8.5})

    def test_file_round_trip(self, tmp_path):
        cfg = ExperimentConfig(n_qubits=6, output_dir="somewhere")
        path = tmp_path / "config.json"
        cfg.to_file(path)
        assert ExperimentConfig.from_file(path) == cfg
        assert json.loads(path.read_text())["n_qubits"] == 6

    def test_curve_stride_rules(self):
        assert ExperimentConfig(n_qubits=16).effective_curve_stride() == 1
        assert ExperimentConfig(n_qubits=18).effective_curve_stride() == 4
        assert ExperimentConfig(n_qubits=18, curve_stride=7).effective_curve_stride() == 7

    def test_curve_cut_and_stats_cuts(self):
        assert ExperimentConfig(n_qubits=10).curve_cut() == 5
        assert ExperimentConfig(n_qubits=10, stats_cut="all").curve_cut() == 5
        assert ExperimentConfig(n_qubits=10, stats_cut=3).curve_cut() == 3
        assert ExperimentConfig(n_qubits=4, stats_cut="all").stats_cuts() == [1, 2, 3]
        assert ExperimentConfig(n_qubits=4).stats_cuts() == [2]

    def test_curve_gate_numbers(self):
        cfg = ExperimentConfig(n_qubits=4, n_heat_gates=25, curve_stride=10)
        assert cfg.curve_gate_numbers() == [0, 10, 20, 25]
        exact = ExperimentConfig(n_qubits=4, n_heat_gates=30, curve_stride=10)
        assert exact.curve_gate_numbers() == [0, 10, 20, 30]

    def test_stage_signatures_track_the_right_fields(self):
        a = ExperimentConfig(master_seed=1)
        b = ExperimentConfig(master_seed=1, hist_r_max=9.0)  # analysis-only knob
        c = ExperimentConfig(master_seed=2)
        assert a.heat_signature() == b.heat_signature()
        assert a.heat_signature() != c.heat_signature()
        d = ExperimentConfig(master_seed=1, beta=7.0)
        assert a.heat_signature() == d.heat_signature()
        assert a.cool_signature() != d.cool_signature()


class TestParseCut:
    def test_accepted_forms(self):
        assert parse_cut("half") == "half"
        assert parse_cut("all") == "all"
        assert parse_cut("3") == 3

    def test_rejected_forms(self):
        with pytest.raises(ValueError):
            parse_cut("quarter")


class TestSeeding:
    def test_realization_seed_is_xor(self):
        assert realization_seed(424242, 0) == 424242
        assert realization_seed(424242, 9) == 424242 ^ 9
        assert realization_seed(2**64 - 1, 1) == 2**64 - 2

    def test_cooling_stream_differs_from_heating_stream(self):
        heat_seed = realization_seed(99, 3)
        cool_seed = cooling_stream(99, 3).seed
        assert cool_seed != heat_seed

    def test_selection_is_deterministic_and_valid(self):
        cfg = ExperimentConfig(n_realizations=50, n_cool_samples=12, master_seed=5)
        first = select_cool_samples(cfg)
        second = select_cool_samples(cfg)
        np.testing.assert_array_equal(first, second)
        assert first.size == 12
        assert len(set(first.tolist())) == 12
        assert first.min() >= 0 and first.max() < 50

    def test_selecting_everything_returns_all_indices(self):
        cfg = ExperimentConfig(n_realizations=8, n_cool_samples=8)
        np.testing.assert_array_equal(select_cool_samples(cfg), np.arange(8))

    def test_selection_depends_on_master_seed(self):
        a = ExperimentConfig(n_realizations=400, n_cool_samples=5, master_seed=1)
        b = ExperimentConfig(n_realizations=400, n_cool_samples=5, master_seed=2)
        assert selection_stream(1).seed != selection_stream(2).seed
        assert not np.array_equal(select_cool_samples(a), select_cool_samples(b))


class TestHeatingStage:
    def test_outputs_and_contents(self, tmp_path):
        cfg = tiny_config(tmp_path / "run")
        result = run_heating_ensemble(cfg)
        out = tmp_path / "run"
        for name in ("heat_config.json", "entropy_curve.csv", "spectra.csv", "manifest.json"):
            assert (out / name).exists()
        assert result.n_realizations == 12
        assert result.n_resumed == 0

        curve_lines = (out / "entropy_curve.csv").read_text().splitlines()
        assert curve_lines[0] == CURVE_HEADER
        assert len(curve_lines) == 1 + len(cfg.curve_gate_numbers())
        final = curve_lines[-1].split(",")
        assert int(final[0]) == 40
        assert 0.0 < float(final[1]) <= cfg.curve_cut()

        items = read_spectra(out / "spectra.csv")
        assert {(r, c) for r, c, _ in items} == {
            (r, c) for r in range(12) for c in range(1, 5)
        }
        for _, _, values in items:
            assert np.sum(values) == pytest.approx(1.0, abs=1e-9)

        for i in range(12):
            assert (out / "checkpoints" / f"real_{i:05d}.npz").exists()
            circuit = read_circuit(out / "circuits" / f"real_{i:05d}.txt")
            assert len(circuit) == 40

    def test_resume_reuses_checkpoints_and_reproduces_bytes(self, tmp_path):
        cfg = tiny_config(tmp_path / "run")
        run_heating_ensemble(cfg)
        out = tmp_path / "run"
        curve_bytes = (out / "entropy_curve.csv").read_bytes()
        spectra_bytes = (out / "spectra.csv").read_bytes()
        for i in (2, 7, 11):
            os.remove(out / "checkpoints" / f"real_{i:05d}.npz")
        result = run_heating_ensemble(cfg)
        assert result.n_resumed == 9
        assert (out / "entropy_curve.csv").read_bytes() == curve_bytes
        assert (out / "spectra.csv").read_bytes() == spectra_bytes

    def test_conflicting_config_is_refused(self, tmp_path):
        run_heating_ensemble(tiny_config(tmp_path / "run"))
        clashing = tiny_config(tmp_path / "run", n_heat_gates=41)
        with pytest.raises(RuntimeError, match="heating"):
            run_heating_ensemble(clashing)

    def test_manifest_inventory(self, tmp_path):
        cfg = tiny_config(tmp_path / "run")
        run_heating_ensemble(cfg)
        manifest = json.loads((tmp_path / "run" / "manifest.json").read_text())
        assert manifest["config"]["master_seed"] == 424242
        assert "entropy_curve.csv" in manifest["files"]
        assert all(len(h) == 64 for h in manifest["files"].values())
        assert "manifest.json" not in manifest["files"]
        assert len(manifest["realization_seeds"]) == 12

    def test_worker_count_does_not_change_outputs(self, tmp_path):
        serial = tiny_config(tmp_path / "serial")
        pooled = tiny_config(tmp_path / "pooled")
        run_heating_ensemble(serial, workers=1)
        run_heating_ensemble(pooled, workers=2)
        for name in ("entropy_curve.csv", "spectra.csv", "heat_config.json"):
            assert (tmp_path / "serial" / name).read_bytes() == (
                tmp_path / "pooled" / name
            ).read_bytes()


class TestCoolingStage:
    def test_summary_and_checkpoints(self, tmp_path):
        cfg = tiny_config(tmp_path / "run")
        run_heating_ensemble(cfg)
        result = run_cooling_ensemble(cfg)
        out = tmp_path / "run"
        lines = (out / "cooling_summary.csv").read_text().splitlines()
        assert lines[0] == SUMMARY_HEADER
        assert len(lines) == 1 + 4
        selected = select_cool_samples(cfg)
        for line, expect_idx in zip(lines[1:], selected):
            sample, outcome, s0, s1, steps = line.split(",")
            assert int(sample) == expect_idx
            assert outcome in (o.value for o in Outcome)
            assert float(s0) >= 0 and float(s1) >= 0
            assert 0 <= int(steps) <= 300
        assert result.n_disentangled == sum(
            1 for row in result.samples if row["outcome"] is Outcome.DISENTANGLED
        )

    def test_rerun_reuses_cool_checkpoints(self, tmp_path):
        cfg = tiny_config(tmp_path / "run")
        run_heating_ensemble(cfg)
        run_cooling_ensemble(cfg)
        out = tmp_path / "run"
        summary = (out / "cooling_summary.csv").read_bytes()
        mtimes = {
            i: os.path.getmtime(out / "checkpoints" / f"cool_{int(i):05d}.npz")
            for i in select_cool_samples(cfg)
        }
        run_cooling_ensemble(cfg)
        assert (out / "cooling_summary.csv").read_bytes() == summary
        for i, mtime in mtimes.items():
            assert os.path.getmtime(out / "checkpoints" / f"cool_{int(i):05d}.npz") == mtime

    def test_requires_completed_heating(self, tmp_path):
        cfg = tiny_config(tmp_path / "fresh")
        with pytest.raises(FileNotFoundError, match="manifest"):
            run_cooling_ensemble(cfg)

    def test_trace_dump_opt_in(self, tmp_path):
        cfg = tiny_config(tmp_path / "run", store_traces=True, trace_stride=50)
        run_heating_ensemble(cfg)
        run_cooling_ensemble(cfg)
        traces = tmp_path / "run" / "traces"
        selected = select_cool_samples(cfg)
        for i in selected:
            trace_file = traces / f"cool_{int(i):05d}.csv"
            assert trace_file.exists()
            header = trace_file.read_text().splitlines()[0]
            assert header == "step,gate,qubits,delta_s,accepted,mean_s0,mean_s1"

    def test_reheat_matches_stored_spectra_exactly(self, tmp_path):
        cfg = tiny_config(tmp_path / "run")
        run_heating_ensemble(cfg)
        state = reheat_realization(cfg, 3)
        stored = read_heat_checkpoint(cfg.output_dir, 3)
        for cut in cfg.stats_cuts():
            np.testing.assert_array_equal(
                entanglement_spectrum(state, cut), stored[f"spectrum_cut_{cut}"]
            )

    def test_cool_checkpoint_fields(self, tmp_path):
        cfg = tiny_config(tmp_path / "run")
        run_heating_ensemble(cfg)
        run_cooling_ensemble(cfg)
        idx = int(select_cool_samples(cfg)[0])
        rec = read_cool_checkpoint(cfg.output_dir, idx)
        assert rec["index"] == idx
        assert rec["initial_mean_s1"] > 0
        assert rec["steps_used"] <= 300


class TestStatsStage:
    def test_reports_and_files(self, tmp_path, capsys):
        cfg = tiny_config(tmp_path / "run")
        run_heating_ensemble(cfg)
        result = run_stats(cfg)
        out = tmp_path / "run"
        fit = json.loads((out / "fit.json").read_text())
        assert set(fit) == {
            "ks_poisson", "ks_goe", "ks_gue", "mean_r_tilde",
            "n_ratios", "drop_count", "best_fit",
        }
        assert fit["best_fit"] in ("poisson", "goe", "gue")
        assert fit["best_fit"] == result.report.best_fit
        assert "spacing statistics" in capsys.readouterr().out

        ratio_lines = (out / "ratios.csv").read_text().splitlines()
        assert ratio_lines[0] == "realization,ratio"
        assert len(ratio_lines) == 1 + fit["n_ratios"]
        hist_lines = (out / "histogram.csv").read_text().splitlines()
        assert hist_lines[0] == "bin_left,bin_right,density"
        assert len(hist_lines) == 1 + round(cfg.hist_r_max / cfg.hist_bin_width)

    def test_requires_spectra(self, tmp_path):
        cfg = tiny_config(tmp_path / "fresh")
        with pytest.raises(FileNotFoundError, match="spectra"):
            run_stats(cfg)


class TestRunAllAndReplay:
    def test_pipeline_and_replay(self, tmp_path):
        cfg = tiny_config(tmp_path / "run")
        result = run_all(cfg)
        assert result.heat.n_realizations == 12
        assert len(result.cool.samples) == 4
        assert result.stats.report.n_ratios > 0

        replay = replay_realization(cfg, 5)
        assert replay.match
        assert replay.mismatches == ()

    def test_replay_detects_tampering(self, tmp_path):
        cfg = tiny_config(tmp_path / "run")
        run_heating_ensemble(cfg)
        circuit_path = tmp_path / "run" / "circuits" / "real_00005.txt"
        circuit_path.write_text(circuit_path.read_text() + "H 0\n")
        replay = replay_realization(cfg, 5)
        assert not replay.match
        assert any("circuit" in m for m in replay.mismatches)

    def test_replay_index_validated(self, tmp_path):
        cfg = tiny_config(tmp_path / "run")
        run_heating_ensemble(cfg)
        with pytest.raises(ValueError):
            replay_realization(cfg, 99)


class TestCli:
    def heat_args(self, out_dir, *extra):
        return [
            "heat", "--out", str(out_dir), "--n-qubits", "5", "--n-gates", "30",
            "--realizations", "6", "--n-cool-samples", "2", "--seed", "11",
            "--max-steps", "200", "--cut", "all", *extra,
        ]

    def test_parser_covers_all_subcommands(self):
        parser = build_parser()
        for command in ("heat", "cool", "stats", "all"):
            args = parser.parse_args([command, "--seed", "3"])
            assert args.command == command
        args = parser.parse_args(["replay", "4", "--out", "x"])
        assert args.command == "replay" and args.realization == 4

    def test_gate_set_choices_enforced(self):
        with pytest.raises(SystemExit):
            build_parser().parse_args(["heat", "--gate-set", "h-only"])

    def test_heat_then_stats_and_replay(self, tmp_path, capsys):
        out = tmp_path / "cli_run"
        assert main(self.heat_args(out)) == 0
        assert "[heat] 6 realizations" in capsys.readouterr().out
        assert main(["stats", "--out", str(out), "--n-qubits", "5", "--n-gates", "30",
                     "--realizations", "6", "--n-cool-samples", "2", "--seed", "11",
                     "--max-steps", "200", "--cut", "all"]) == 0
        assert (out / "fit.json").exists()
        assert main(["replay", "2", "--out", str(out), "--n-qubits", "5",
                     "--n-gates", "30", "--realizations", "6", "--n-cool-samples", "2",
                     "--seed", "11", "--max-steps", "200", "--cut", "all"]) == 0
        assert "reproduced" in capsys.readouterr().out

    def test_replay_exit_code_on_mismatch(self, tmp_path, capsys):
        out = tmp_path / "cli_run"
        assert main(self.heat_args(out)) == 0
        circuit_path = out / "circuits" / "real_00001.txt"
        circuit_path.write_text(circuit_path.read_text() + "H 0\n")
        code = main(["replay", "1", "--out", str(out), "--n-qubits", "5",
                     "--n-gates", "30", "--realizations", "6", "--n-cool-samples", "2",
                     "--seed", "11", "--max-steps", "200", "--cut", "all"])
        assert code == 2
        assert "MISMATCH" in capsys.readouterr().out

    def test_config_file_with_flag_override(self, tmp_path, capsys):
        config_path = tmp_path / "config.json"
        config_path.write_text(json.dumps({
            "n_qubits": 4, "n_heat_gates": 20, "n_realizations": 5,
            "n_cool_samples": 2, "master_seed": 13, "stats_cut": "all",
            "output_dir": str(tmp_path / "from_file"),
        }))
        out = tmp_path / "overridden"
        code = main(["heat", "--config", str(config_path), "--out", str(out)])
        assert code == 0
        recorded = json.loads((out / "heat_config.json").read_text())
        assert recorded["n_qubits"] == 4  # from the file
        assert not (tmp_path / "from_file").exists()  # flag overrode the directory

    def test_errors_produce_json_record_and_nonzero_exit(self, tmp_path, capsys):
        code = main(["cool", "--out", str(tmp_path / "void")])
        assert code == 1
        record = json.loads(capsys.readouterr().err.strip())
        assert record["error"] == "FileNotFoundError"
        assert "manifest" in record["message"]

    def test_bad_config_key_reported(self, tmp_path, capsys):
        config_path = tmp_path / "config.json"
        config_path.write_text(json.dumps({"qubits": 4}))
        code = main(["heat", "--config", str(config_path)])
        assert code == 1
        record = json.loads(capsys.readouterr().err.strip())
        assert record["error"] == "ValueError"
