"""Experiment orchestration: ensembles, persistence, reproducibility.

Pipeline stages share one output directory:

    heat_config.json     heating-stage snapshot guarding checkpoint reuse
    checkpoints/         per-realization npz files (written atomically)
    circuits/            recorded heating circuits, one text file each
    entropy_curve.csv    ensemble mean S0/S1 versus gate number
    spectra.csv          final entanglement spectra at the stats cut(s)
    cool_config.json     cooling-stage snapshot
    cooling_summary.csv  one row per cooled sample
    ratios.csv, histogram.csv, fit.json   spacing-ratio statistics
    manifest.json        config, seeds, checksums, timestamps

Seeding contract: realization i draws from a stream seeded with
master_seed XOR i; thetas come first (uniform on [0, pi]), then the gate
sequence.  Cooling of sample i uses master_seed XOR i XOR COOL_TAG, and
the random subset of cooled samples comes from master_seed XOR SELECT_TAG.
Every CSV/JSON output except manifest.json (which carries timestamps) is
byte-identical across reruns and worker counts; aggregation always reads
checkpoints in realization-index order.
"""
from __future__ import annotations

import dataclasses
import hashlib
import json
import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from datetime import datetime, timezone
from importlib import metadata

import numpy as np

from .circuit import (
    MASK64,
    RngStream,
    apply_circuit,
    format_circuit,
    gate_set,
    heat,
    read_circuit,
    realization_stream,
)
from .cooling import CoolingConfig, Outcome, cool
from .spacings import classify, histogram, pool_spectra, write_histogram, write_ratios
from .spectrum import (
    renyi_entropy,
    spectrum_from_amplitudes,
    write_spectra,
    read_spectra,
)
from .state import StateVector

#: stream-splitting tags (arbitrary fixed 64-bit constants, never changed)
COOL_TAG = 0x9E3779B97F4A7C15
SELECT_TAG = 0xD1B54A32D192ED03

THETA_DISTRIBUTION = "uniform[0,pi]"

HEAT_CONFIG_NAME = "heat_config.json"
COOL_CONFIG_NAME = "cool_config.json"
MANIFEST_NAME = "manifest.json"
CURVE_NAME = "entropy_curve.csv"
SPECTRA_NAME = "spectra.csv"
SUMMARY_NAME = "cooling_summary.csv"
RATIOS_NAME = "ratios.csv"
HISTOGRAM_NAME = "histogram.csv"
FIT_NAME = "fit.json"
CHECKPOINT_DIR = "checkpoints"
CIRCUIT_DIR = "circuits"
TRACE_DIR = "traces"

CURVE_HEADER = "gate_number,mean_s0,mean_s1,stderr_s0,stderr_s1"
SUMMARY_HEADER = "sample,outcome,final_mean_s0,final_mean_s1,steps_used"

try:
    _VERSION = metadata.version("entcool")
except metadata.PackageNotFoundError:  # running from a source tree
    _VERSION = "unknown"


# -- configuration -----------------------------------------------------------


@dataclass
class ExperimentConfig:
    """Flat experiment description; every field has a CLI flag of the same name.

    curve_stride 0 means automatic: every gate for n_qubits <= 16, every
    4th gate above.  stats_cut is "half", "all", or an explicit cut index.
    """

    n_qubits: int = 16
    gate_set: str = "cnot-h-t"
    n_heat_gates: int = 512
    n_realizations: int = 5000
    n_cool_samples: int = 100
    beta: float = 5.0
    max_cool_steps: int = 200000
    master_seed: int = 12345
    theta_distribution: str = THETA_DISTRIBUTION
    stats_cut: str | int = "half"
    output_dir: str = "entcool_run"
    curve_stride: int = 0
    target_entropy: float = 1e-8
    objective_q: float = 1.0
    store_traces: bool = False
    trace_stride: int = 1000
    hist_bin_width: float = 0.1
    hist_r_max: float = 5.0

    def __post_init__(self):
        gate_set(self.gate_set)  # raises on unknown name
        if not 2 <= self.n_qubits <= 24:
            raise ValueError(f"n_qubits must be in [2, 24], got {self.n_qubits}")
        if self.n_heat_gates < 0:
            raise ValueError("n_heat_gates must be >= 0")
        if self.n_realizations < 1:
            raise ValueError("n_realizations must be >= 1")
        if not 1 <= self.n_cool_samples <= self.n_realizations:
            raise ValueError(
                f"n_cool_samples must be in [1, n_realizations], got {self.n_cool_samples}"
            )
        if self.max_cool_steps < 1:
            raise ValueError("max_cool_steps must be >= 1")
        if not (self.beta >= 0 and math.isfinite(self.beta)):
            raise ValueError(f"beta must be finite and >= 0, got {self.beta}")
        if self.theta_distribution != THETA_DISTRIBUTION:
            raise ValueError(
                f"theta_distribution is fixed to {THETA_DISTRIBUTION!r}"
            )
        if isinstance(self.stats_cut, str):
            if self.stats_cut not in ("half", "all"):
                raise ValueError("stats_cut must be 'half', 'all' or an integer")
        elif not 1 <= int(self.stats_cut) <= self.n_qubits - 1:
            raise ValueError(
                f"stats_cut {self.stats_cut} outside [1, {self.n_qubits - 1}]"
            )
        if self.curve_stride < 0:
            raise ValueError("curve_stride must be >= 0 (0 = automatic)")
        if self.target_entropy < 0:
            raise ValueError("target_entropy must be >= 0")
        if self.objective_q < 0:
            raise ValueError("objective_q must be >= 0")
        if self.trace_stride < 1:
            raise ValueError("trace_stride must be >= 1")
        if self.hist_bin_width <= 0 or self.hist_r_max <= 0:
            raise ValueError("histogram bin_width and r_max must be positive")

    # derived knobs

    def effective_curve_stride(self) -> int:
        if self.curve_stride > 0:
            return self.curve_stride
        return 1 if self.n_qubits <= 16 else 4

    def curve_cut(self) -> int:
        if isinstance(self.stats_cut, str):
            return self.n_qubits // 2
        return int(self.stats_cut)

    def stats_cuts(self) -> list[int]:
        if self.stats_cut == "all":
            return list(range(1, self.n_qubits))
        return [self.curve_cut()]

    def curve_gate_numbers(self) -> list[int]:
        stride = self.effective_curve_stride()
        nums = [0]
        nums.extend(range(stride, self.n_heat_gates + 1, stride))
        if nums[-1] != self.n_heat_gates:
            nums.append(self.n_heat_gates)
        return nums

    # serialization

    def to_dict(self) -> dict:
        return dataclasses.asdict(self)

    @classmethod
    def from_dict(cls, data: dict) -> "ExperimentConfig":
        known = {f.name: f for f in dataclasses.fields(cls)}
        unknown = sorted(set(data) - set(known))
        if unknown:
            raise ValueError(f"unknown config keys: {', '.join(unknown)}")
        kwargs = {}
        for name, value in data.items():
            f = known[name]
            if f.type == "int" and isinstance(value, float):
                if value != int(value):
                    raise ValueError(f"config key {name} must be an integer")
                value = int(value)
            kwargs[name] = value
        return cls(**kwargs)

    @classmethod
    def from_file(cls, path) -> "ExperimentConfig":
        with open(path, "r", encoding="utf-8") as fh:
            return cls.from_dict(json.load(fh))

    def to_file(self, path) -> None:
        _atomic_write_text(path, _json_dumps(self.to_dict()))

    # stage signatures: the config subsets whose change invalidates checkpoints

    def heat_signature(self) -> dict:
        return {
            "n_qubits": self.n_qubits,
            "gate_set": self.gate_set,
            "n_heat_gates": self.n_heat_gates,
            "n_realizations": self.n_realizations,
            "master_seed": self.master_seed,
            "theta_distribution": self.theta_distribution,
            "stats_cut": self.stats_cut,
            "curve_stride": self.effective_curve_stride(),
        }

    def cool_signature(self) -> dict:
        sig = self.heat_signature()
        sig.update(
            {
                "n_cool_samples": self.n_cool_samples,
                "beta": self.beta,
                "max_cool_steps": self.max_cool_steps,
                "target_entropy": self.target_entropy,
                "objective_q": self.objective_q,
            }
        )
        return sig


def parse_cut(text: str) -> str | int:
    """CLI form of stats_cut: 'half', 'all', or an integer cut index."""
    if text in ("half", "all"):
        return text
    try:
        return int(text)
    except ValueError:
        raise ValueError(f"cut must be 'half', 'all' or an integer, got {text!r}")


# -- seeding -----------------------------------------------------------------


def realization_seed(master_seed: int, index: int) -> int:
    return (master_seed ^ index) & MASK64


def cooling_stream(master_seed: int, index: int) -> RngStream:
    return RngStream(realization_seed(master_seed, index) ^ COOL_TAG)


def selection_stream(master_seed: int) -> RngStream:
    return RngStream((master_seed ^ SELECT_TAG) & MASK64)


def select_cool_samples(cfg: ExperimentConfig) -> np.ndarray:
    """The sorted random subset of realizations that cooling operates on."""
    stream = selection_stream(cfg.master_seed)
    return stream.choice_without_replacement(cfg.n_realizations, cfg.n_cool_samples)


# -- small file helpers ------------------------------------------------------


def _json_dumps(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True) + "\n"


def _atomic_write_text(path, text: str) -> None:
    tmp = f"{path}.tmp"
    with open(tmp, "w", encoding="ascii") as fh:
        fh.write(text)
    os.replace(tmp, path)


def _atomic_savez(path, **arrays) -> None:
    tmp = f"{path}.tmp"
    with open(tmp, "wb") as fh:
        np.savez(fh, **arrays)
    os.replace(tmp, path)


def _sha256(path) -> str:
    digest = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 20), b""):
            digest.update(chunk)
    return digest.hexdigest()


def _checkpoint_path(out_dir, index: int) -> str:
    return os.path.join(out_dir, CHECKPOINT_DIR, f"real_{index:05d}.npz")


def _cool_checkpoint_path(out_dir, index: int) -> str:
    return os.path.join(out_dir, CHECKPOINT_DIR, f"cool_{index:05d}.npz")


def _circuit_path(out_dir, index: int) -> str:
    return os.path.join(out_dir, CIRCUIT_DIR, f"real_{index:05d}.txt")


def _require_stage_config(path, expected: dict, stage: str) -> None:
    if os.path.exists(path):
        with open(path, "r", encoding="utf-8") as fh:
            found = json.load(fh)
        if found != expected:
            raise RuntimeError(
                f"{path} was produced by a different {stage} configuration; "
                "use a fresh output directory or matching parameters"
            )
    else:
        _atomic_write_text(path, _json_dumps(expected))


def write_manifest(out_dir, cfg: ExperimentConfig, extra: dict | None = None) -> str:
    """Rewrite manifest.json with a fresh file inventory and checksums."""
    inventory = {}
    for root, _dirs, files in os.walk(out_dir):
        for name in sorted(files):
            full = os.path.join(root, name)
            rel = os.path.relpath(full, out_dir)
            if rel == MANIFEST_NAME or rel.endswith(".tmp"):
                continue
            inventory[rel] = _sha256(full)
    manifest = {
        "config": cfg.to_dict(),
        "software_version": _VERSION,
        "written_at": datetime.now(timezone.utc).isoformat(),
        "realization_seeds": [
            realization_seed(cfg.master_seed, i) for i in range(cfg.n_realizations)
        ],
        "files": inventory,
    }
    if extra:
        manifest.update(extra)
    path = os.path.join(out_dir, MANIFEST_NAME)
    _atomic_write_text(path, _json_dumps(manifest))
    return path


# -- heating stage -----------------------------------------------------------


def compute_realization(cfg: ExperimentConfig, index: int):
    """Heat realization `index` from scratch; pure function of (cfg, index).

    Returns (thetas, curve_gates, curve_s0, curve_s1, spectra, circuit)
    where spectra maps each stats cut to its final descending spectrum.
    """
    stream = realization_stream(cfg.master_seed, index)
    thetas = stream.uniform(0.0, math.pi, cfg.n_qubits)
    state = StateVector.product_state(thetas)
    cut = cfg.curve_cut()
    logged = cfg.curve_gate_numbers()
    logged_set = set(logged)
    s0_by_gate = {}
    s1_by_gate = {}

    def record(gate_number: int) -> None:
        spec = spectrum_from_amplitudes(state.amplitudes, cut)
        s0_by_gate[gate_number] = renyi_entropy(spec, 0.0)
        s1_by_gate[gate_number] = renyi_entropy(spec, 1.0)

    record(0)

    def observer(gate_number: int, _gate, _state) -> None:
        if gate_number in logged_set:
            record(gate_number)

    circuit = heat(state, gate_set(cfg.gate_set), cfg.n_heat_gates, stream, observer)
    spectra = {
        c: spectrum_from_amplitudes(state.amplitudes, c) for c in cfg.stats_cuts()
    }
    curve_s0 = np.array([s0_by_gate[g] for g in logged])
    curve_s1 = np.array([s1_by_gate[g] for g in logged])
    return thetas, np.array(logged, dtype=np.int64), curve_s0, curve_s1, spectra, circuit


def _heat_worker(args) -> int:
    cfg_dict, out_dir, index = args
    cfg = ExperimentConfig.from_dict(cfg_dict)
    thetas, gates, s0, s1, spectra, circuit = compute_realization(cfg, index)
    circuit_path = _circuit_path(out_dir, index)
    _atomic_write_text(circuit_path, format_circuit(circuit))
    arrays = {
        "index": np.int64(index),
        "seed": np.uint64(realization_seed(cfg.master_seed, index)),
        "thetas": thetas,
        "curve_gates": gates,
        "curve_s0": s0,
        "curve_s1": s1,
        "cuts": np.array(cfg.stats_cuts(), dtype=np.int64),
    }
    for c, values in spectra.items():
        arrays[f"spectrum_cut_{c}"] = values
    # the npz is written last: its presence marks the realization complete
    _atomic_savez(_checkpoint_path(out_dir, index), **arrays)
    return index


def read_heat_checkpoint(out_dir, index: int) -> dict:
    path = _checkpoint_path(out_dir, index)
    if not os.path.exists(path):
        raise FileNotFoundError(f"heating checkpoint not found: {path}")
    with np.load(path) as data:
        return {key: data[key].copy() for key in data.files}


def _run_indexed_jobs(worker, jobs, workers: int) -> None:
    if workers <= 1 or len(jobs) <= 1:
        for job in jobs:
            worker(job)
        return
    with ProcessPoolExecutor(max_workers=workers) as pool:
        # surface worker exceptions promptly, in submission order
        for _ in pool.map(worker, jobs, chunksize=1):
            pass


@dataclass(frozen=True)
class HeatResult:
    out_dir: str
    curve_path: str
    spectra_path: str
    n_realizations: int
    n_resumed: int


def run_heating_ensemble(cfg: ExperimentConfig, workers: int = 1) -> HeatResult:
    """Heat the full ensemble, resuming from any existing checkpoints."""
    out_dir = cfg.output_dir
    os.makedirs(os.path.join(out_dir, CHECKPOINT_DIR), exist_ok=True)
    os.makedirs(os.path.join(out_dir, CIRCUIT_DIR), exist_ok=True)
    _require_stage_config(
        os.path.join(out_dir, HEAT_CONFIG_NAME), cfg.heat_signature(), "heating"
    )

    pending = [
        i for i in range(cfg.n_realizations)
        if not os.path.exists(_checkpoint_path(out_dir, i))
    ]
    cfg_dict = cfg.to_dict()
    _run_indexed_jobs(_heat_worker, [(cfg_dict, out_dir, i) for i in pending], workers)

    # aggregate in realization-index order so output is schedule-independent
    logged = np.array(cfg.curve_gate_numbers(), dtype=np.int64)
    sum_s0 = np.zeros(logged.size)
    sum_s1 = np.zeros(logged.size)
    sq_s0 = np.zeros(logged.size)
    sq_s1 = np.zeros(logged.size)
    spectra_items = []
    for i in range(cfg.n_realizations):
        data = read_heat_checkpoint(out_dir, i)
        if not np.array_equal(data["curve_gates"], logged):
            raise RuntimeError(
                f"checkpoint {i} logs different gate numbers than the configuration"
            )
        sum_s0 += data["curve_s0"]
        sum_s1 += data["curve_s1"]
        sq_s0 += data["curve_s0"] ** 2
        sq_s1 += data["curve_s1"] ** 2
        for c in cfg.stats_cuts():
            spectra_items.append((i, c, data[f"spectrum_cut_{c}"]))

    n = cfg.n_realizations
    mean_s0 = sum_s0 / n
    mean_s1 = sum_s1 / n

    def stderr(sq, mean):
        if n < 2:
            return np.zeros_like(mean)
        var = np.maximum(sq / n - mean**2, 0.0) * n / (n - 1)
        return np.sqrt(var / n)

    curve_path = os.path.join(out_dir, CURVE_NAME)
    lines = [CURVE_HEADER]
    e0 = stderr(sq_s0, mean_s0)
    e1 = stderr(sq_s1, mean_s1)
    for j, g in enumerate(logged):
        lines.append(
            f"{g},{mean_s0[j]:.17g},{mean_s1[j]:.17g},{e0[j]:.17g},{e1[j]:.17g}"
        )
    _atomic_write_text(curve_path, "\n".join(lines) + "\n")

    spectra_path = os.path.join(out_dir, SPECTRA_NAME)
    write_spectra(spectra_path, spectra_items)
    write_manifest(out_dir, cfg)
    return HeatResult(out_dir, curve_path, spectra_path, n, n - len(pending))


# -- cooling stage -----------------------------------------------------------


def reheat_realization(cfg: ExperimentConfig, index: int) -> StateVector:
    """Rebuild the heated state of a realization from its recorded circuit."""
    data = read_heat_checkpoint(cfg.output_dir, index)
    circuit_path = _circuit_path(cfg.output_dir, index)
    if not os.path.exists(circuit_path):
        raise FileNotFoundError(f"recorded circuit not found: {circuit_path}")
    circuit = read_circuit(circuit_path)
    state = StateVector.product_state(data["thetas"])
    apply_circuit(state, circuit)
    return state


def _cool_worker(args) -> int:
    cfg_dict, out_dir, index = args
    cfg = ExperimentConfig.from_dict(cfg_dict)
    state = reheat_realization(cfg, index)
    trace = cool(
        state,
        gate_set(cfg.gate_set),
        CoolingConfig(
            beta=cfg.beta,
            max_steps=cfg.max_cool_steps,
            target_entropy=cfg.target_entropy,
            objective_q=cfg.objective_q,
        ),
        cooling_stream(cfg.master_seed, index),
    )
    if cfg.store_traces:
        os.makedirs(os.path.join(out_dir, TRACE_DIR), exist_ok=True)
        trace_path = os.path.join(out_dir, TRACE_DIR, f"cool_{index:05d}.csv")
        tmp = f"{trace_path}.tmp"
        trace.to_csv(tmp, entropy_stride=cfg.trace_stride)
        os.replace(tmp, trace_path)
    _atomic_savez(
        _cool_checkpoint_path(out_dir, index),
        index=np.int64(index),
        disentangled=np.int64(trace.outcome is Outcome.DISENTANGLED),
        steps_used=np.int64(trace.steps_used),
        initial_mean_s0=np.float64(trace.initial_mean_s0),
        initial_mean_s1=np.float64(trace.initial_mean_s1),
        final_mean_s0=np.float64(trace.final_mean_s0),
        final_mean_s1=np.float64(trace.final_mean_s1),
    )
    return index


def read_cool_checkpoint(out_dir, index: int) -> dict:
    path = _cool_checkpoint_path(out_dir, index)
    if not os.path.exists(path):
        raise FileNotFoundError(f"cooling checkpoint not found: {path}")
    with np.load(path) as data:
        return {key: data[key].item() for key in data.files}


@dataclass(frozen=True)
class CoolResult:
    summary_path: str
    samples: list
    n_disentangled: int


def run_cooling_ensemble(cfg: ExperimentConfig, workers: int = 1) -> CoolResult:
    """Cool the selected heated samples; requires a completed heating stage."""
    out_dir = cfg.output_dir
    manifest_path = os.path.join(out_dir, MANIFEST_NAME)
    if not os.path.exists(manifest_path):
        raise FileNotFoundError(
            f"manifest not found: {manifest_path} (run the heating stage first)"
        )
    _require_stage_config(
        os.path.join(out_dir, COOL_CONFIG_NAME), cfg.cool_signature(), "cooling"
    )

    selected = select_cool_samples(cfg)
    pending = [
        int(i) for i in selected
        if not os.path.exists(_cool_checkpoint_path(out_dir, int(i)))
    ]
    cfg_dict = cfg.to_dict()
    _run_indexed_jobs(_cool_worker, [(cfg_dict, out_dir, i) for i in pending], workers)

    rows = []
    lines = [SUMMARY_HEADER]
    n_ok = 0
    for i in selected:
        rec = read_cool_checkpoint(out_dir, int(i))
        outcome = (
            Outcome.DISENTANGLED if rec["disentangled"] else Outcome.STEP_BUDGET_EXHAUSTED
        )
        n_ok += int(rec["disentangled"])
        rows.append({"sample": int(i), "outcome": outcome, **rec})
        lines.append(
            f"{int(i)},{outcome.value},{rec['final_mean_s0']:.17g},"
            f"{rec['final_mean_s1']:.17g},{rec['steps_used']}"
        )
    summary_path = os.path.join(out_dir, SUMMARY_NAME)
    _atomic_write_text(summary_path, "\n".join(lines) + "\n")
    write_manifest(out_dir, cfg, {"cooled_samples": [int(i) for i in selected]})
    return CoolResult(summary_path, rows, n_ok)


# -- statistics stage --------------------------------------------------------

_VERDICTS = {
    "poisson": "entanglement cooling expected to succeed (reversible dynamics)",
    "goe": "entanglement cooling expected to fail (irreversible dynamics)",
    "gue": "entanglement cooling expected to fail (irreversible dynamics)",
}


@dataclass(frozen=True)
class StatsResult:
    report: object
    ratios_path: str
    histogram_path: str
    fit_path: str
    verdict: str


def run_stats(cfg: ExperimentConfig) -> StatsResult:
    """Classify the spectra dump; writes ratios.csv, histogram.csv, fit.json."""
    out_dir = cfg.output_dir
    spectra_path = os.path.join(out_dir, SPECTRA_NAME)
    if not os.path.exists(spectra_path):
        raise FileNotFoundError(
            f"spectra dump not found: {spectra_path} (run the heating stage first)"
        )
    items = read_spectra(spectra_path)
    if not items:
        raise RuntimeError(f"spectra dump {spectra_path} contains no spectra")

    pool_cut = None if cfg.stats_cut == "all" else cfg.curve_cut()
    ensemble, ids = pool_spectra(items, pool_cut)
    report = classify(ensemble)

    ratios_path = os.path.join(out_dir, RATIOS_NAME)
    write_ratios(ratios_path, ids, ensemble.ratios)
    histogram_path = os.path.join(out_dir, HISTOGRAM_NAME)
    write_histogram(histogram_path, histogram(ensemble, cfg.hist_bin_width, cfg.hist_r_max))
    fit_path = os.path.join(out_dir, FIT_NAME)
    _atomic_write_text(fit_path, _json_dumps(report.to_dict()))

    verdict = (
        f"{cfg.gate_set}: spacing statistics {report.best_fit.upper()}; "
        f"{_VERDICTS[report.best_fit]}"
    )
    print(verdict)
    write_manifest(out_dir, cfg)
    return StatsResult(report, ratios_path, histogram_path, fit_path, verdict)


# -- full pipeline and replay ------------------------------------------------


@dataclass(frozen=True)
class PipelineResult:
    heat: HeatResult
    cool: CoolResult
    stats: StatsResult


def run_all(cfg: ExperimentConfig, workers: int = 1) -> PipelineResult:
    heat_result = run_heating_ensemble(cfg, workers)
    cool_result = run_cooling_ensemble(cfg, workers)
    stats_result = run_stats(cfg)
    return PipelineResult(heat_result, cool_result, stats_result)


@dataclass(frozen=True)
class ReplayResult:
    index: int
    match: bool
    mismatches: tuple


def replay_realization(cfg: ExperimentConfig, index: int) -> ReplayResult:
    """Recompute one realization from its seed and compare with stored files."""
    if not 0 <= index < cfg.n_realizations:
        raise ValueError(f"realization {index} outside [0, {cfg.n_realizations})")
    stored = read_heat_checkpoint(cfg.output_dir, index)
    circuit_path = _circuit_path(cfg.output_dir, index)
    if not os.path.exists(circuit_path):
        raise FileNotFoundError(f"recorded circuit not found: {circuit_path}")
    with open(circuit_path, "r", encoding="ascii") as fh:
        stored_circuit_text = fh.read()

    thetas, gates, s0, s1, spectra, circuit = compute_realization(cfg, index)
    mismatches = []
    if not np.array_equal(thetas, stored["thetas"]):
        mismatches.append("thetas")
    if not np.array_equal(gates, stored["curve_gates"]):
        mismatches.append("curve_gates")
    if not np.array_equal(s0, stored["curve_s0"]):
        mismatches.append("curve_s0")
    if not np.array_equal(s1, stored["curve_s1"]):
        mismatches.append("curve_s1")
    for c, values in spectra.items():
        key = f"spectrum_cut_{c}"
        if key not in stored or not np.array_equal(values, stored[key]):
            mismatches.append(key)
    if format_circuit(circuit) != stored_circuit_text:
        mismatches.append("circuit")
    return ReplayResult(index, not mismatches, tuple(mismatches))
