"""Command-line pipeline driver.

Subcommands: `heat` (ensemble heating), `cool` (anneal selected samples),
`stats` (spacing-ratio classification), `all` (the three in sequence) and
`replay <realization>` (recompute one realization from its seed and
verify it against the stored files).

Options resolve in order: built-in defaults, then the --config JSON file,
then explicit flags.  Failures print a one-line JSON error record to
stderr and exit nonzero.
"""
from __future__ import annotations

import argparse
import json
import sys

from .ensemble import (
    ExperimentConfig,
    parse_cut,
    replay_realization,
    run_all,
    run_cooling_ensemble,
    run_heating_ensemble,
    run_stats,
)

#: CLI flag name -> ExperimentConfig field
_FLAG_FIELDS = {
    "seed": "master_seed",
    "n_qubits": "n_qubits",
    "gate_set": "gate_set",
    "n_gates": "n_heat_gates",
    "realizations": "n_realizations",
    "n_cool_samples": "n_cool_samples",
    "beta": "beta",
    "max_steps": "max_cool_steps",
    "cut": "stats_cut",
    "out": "output_dir",
    "curve_stride": "curve_stride",
    "target_entropy": "target_entropy",
    "objective_q": "objective_q",
    "store_traces": "store_traces",
    "trace_stride": "trace_stride",
    "hist_bin_width": "hist_bin_width",
    "hist_r_max": "hist_r_max",
}


def _add_common_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--config", help="JSON config file; flags override its keys")
    parser.add_argument("--seed", type=int, help="master seed of the ensemble")
    parser.add_argument("--n-qubits", type=int, help="number of qubits")
    parser.add_argument(
        "--gate-set",
        choices=["cnot-h-t", "cnot-h-s", "cnot-h-not"],
        help="heating/cooling gate set",
    )
    parser.add_argument("--n-gates", type=int, help="heating gates per realization")
    parser.add_argument("--realizations", type=int, help="ensemble size")
    parser.add_argument("--n-cool-samples", type=int, help="samples to cool")
    parser.add_argument("--beta", type=float, help="inverse annealing temperature")
    parser.add_argument("--max-steps", type=int, help="cooling proposal budget")
    parser.add_argument(
        "--cut", type=parse_cut, help="stats bipartition: half, all, or a cut index"
    )
    parser.add_argument("--out", help="output directory")
    parser.add_argument("--workers", type=int, default=1, help="parallel workers")
    parser.add_argument("--curve-stride", type=int, help="gates between curve points (0=auto)")
    parser.add_argument("--target-entropy", type=float, help="cooling stop threshold (bits)")
    parser.add_argument("--objective-q", type=float, help="Renyi order of the objective")
    parser.add_argument(
        "--store-traces",
        action=argparse.BooleanOptionalAction,
        help="write per-proposal cooling trace CSVs",
    )
    parser.add_argument("--trace-stride", type=int, help="entropy logging stride in traces")
    parser.add_argument("--hist-bin-width", type=float, help="ratio histogram bin width")
    parser.add_argument("--hist-r-max", type=float, help="ratio histogram upper edge")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="entcool",
        description="Entanglement heating, Metropolis cooling and spacing statistics",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name, help_text in [
        ("heat", "run the heating ensemble"),
        ("cool", "cool a random subset of heated samples"),
        ("stats", "classify spacing-ratio statistics of the spectra dump"),
        ("all", "heat, cool and classify in sequence"),
        ("replay", "recompute one realization and verify stored results"),
    ]:
        p = sub.add_parser(name, help=help_text)
        _add_common_flags(p)
        if name == "replay":
            p.add_argument("realization", type=int, help="realization index to replay")
    return parser


def _resolve_config(args: argparse.Namespace) -> ExperimentConfig:
    data = {}
    if args.config:
        with open(args.config, "r", encoding="utf-8") as fh:
            data = json.load(fh)
        if not isinstance(data, dict):
            raise ValueError(f"config file {args.config} must hold a JSON object")
    for flag, field in _FLAG_FIELDS.items():
        value = getattr(args, flag, None)
        if value is not None:
            data[field] = value
    return ExperimentConfig.from_dict(data)


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    workers = max(1, args.workers)
    try:
        cfg = _resolve_config(args)
        if args.command == "heat":
            res = run_heating_ensemble(cfg, workers)
            print(
                f"[heat] {res.n_realizations} realizations "
                f"({res.n_resumed} from checkpoints) -> {res.curve_path}"
            )
        elif args.command == "cool":
            res = run_cooling_ensemble(cfg, workers)
            print(
                f"[cool] {res.n_disentangled}/{len(res.samples)} samples "
                f"disentangled -> {res.summary_path}"
            )
        elif args.command == "stats":
            res = run_stats(cfg)
            print(f"[stats] fit report -> {res.fit_path}")
        elif args.command == "all":
            res = run_all(cfg, workers)
            print(
                f"[all] best fit {res.stats.report.best_fit}; "
                f"{res.cool.n_disentangled}/{len(res.cool.samples)} samples disentangled"
            )
        else:  # replay
            res = replay_realization(cfg, args.realization)
            if res.match:
                print(f"replay {res.index}: stored results reproduced bit-exactly")
            else:
                print(f"replay {res.index}: MISMATCH in {', '.join(res.mismatches)}")
                return 2
        return 0
    except Exception as exc:
        record = {"error": type(exc).__name__, "message": str(exc)}
        print(json.dumps(record), file=sys.stderr)
        return 1


def run() -> None:
    sys.exit(main())
