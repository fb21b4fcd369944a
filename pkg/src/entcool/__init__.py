"""Entanglement heating, Metropolis entanglement cooling, and
level-spacing-ratio statistics of entanglement spectra for n-qubit pure
states under stochastic circuits."""

__version__ = "0.1.0"

from .state import (
    Gate,
    StateVector,
    apply_gate,
    cnot,
    gate_matrix,
    h,
    inverse_gate,
    not_gate,
    phase,
    s,
    t,
)
from .circuit import (
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
from .spectrum import (
    DEFAULT_RANK_TOL,
    cut_entropies,
    entanglement_spectrum,
    mean_cut_entropy,
    read_spectra,
    renyi_entropy,
    spectrum_from_amplitudes,
    write_spectra,
)
from .cooling import (
    CoolingConfig,
    CoolingTrace,
    Outcome,
    accept_probability,
    cool,
)
from .spacings import (
    GOE,
    GUE,
    POISSON,
    ClassifyReport,
    RatioEnsemble,
    RatioHistogram,
    SpacingRatios,
    SurmiseModel,
    classify,
    histogram,
    ks_statistic,
    pool_spectra,
    spacing_ratios,
    surmise_cdf,
    surmise_model,
    surmise_pdf,
    surmise_ppf,
)
from .ensemble import (
    ExperimentConfig,
    replay_realization,
    run_all,
    run_cooling_ensemble,
    run_heating_ensemble,
    run_stats,
)

__all__ = [
    "__version__",
    "Gate",
    "StateVector",
    "apply_gate",
    "cnot",
    "gate_matrix",
    "h",
    "inverse_gate",
    "not_gate",
    "phase",
    "s",
    "t",
    "CNOT_H_NOT",
    "CNOT_H_S",
    "CNOT_H_T",
    "Circuit",
    "GateSet",
    "RngStream",
    "apply_circuit",
    "format_circuit",
    "gate_set",
    "heat",
    "inverse_circuit",
    "parse_circuit",
    "read_circuit",
    "realization_stream",
    "sample_gate",
    "write_circuit",
    "DEFAULT_RANK_TOL",
    "cut_entropies",
    "entanglement_spectrum",
    "mean_cut_entropy",
    "read_spectra",
    "renyi_entropy",
    "spectrum_from_amplitudes",
    "write_spectra",
    "CoolingConfig",
    "CoolingTrace",
    "Outcome",
    "accept_probability",
    "cool",
    "GOE",
    "GUE",
    "POISSON",
    "ClassifyReport",
    "RatioEnsemble",
    "RatioHistogram",
    "SpacingRatios",
    "SurmiseModel",
    "classify",
    "histogram",
    "ks_statistic",
    "pool_spectra",
    "spacing_ratios",
    "surmise_cdf",
    "surmise_model",
    "surmise_pdf",
    "surmise_ppf",
    "ExperimentConfig",
    "replay_realization",
    "run_all",
    "run_cooling_ensemble",
    "run_heating_ensemble",
    "run_stats",
]
