"""Line bipartitions, entanglement spectra and Renyi entropies.

A cut c in [1, n-1] splits the qubit line into A = qubits 0..c-1 (the low
bits) and B = qubits c..n-1.  The spectrum of the reduced density matrix of
A is computed as the squared singular values of the amplitude array
reshaped to a 2^{n_B} x 2^{n_A} matrix, i.e. M[b, a] = phi[b * 2^{n_A} + a];
the reduced matrix itself is never formed.

Entropies are in bits (base-2 logarithms) throughout.
"""
from __future__ import annotations

import numpy as np

from .state import StateVector

#: eigenvalues at or below this are treated as numerical zeros (rank cutoff)
DEFAULT_RANK_TOL = 1e-12


def validate_cut(n_qubits: int, cut: int) -> int:
    cut = int(cut)
    if not 1 <= cut <= n_qubits - 1:
        raise ValueError(f"cut {cut} outside [1, {n_qubits - 1}] for n={n_qubits}")
    return cut


def spectrum_from_amplitudes(amps: np.ndarray, cut: int) -> np.ndarray:
    """Descending eigenvalues of the reduced state left of `cut`."""
    size = amps.shape[0]
    n = size.bit_length() - 1
    validate_cut(n, cut)
    m = amps.reshape(1 << (n - cut), 1 << cut)
    sv = np.linalg.svd(m, compute_uv=False)  # descending
    lam = sv * sv
    np.maximum(lam, 0.0, out=lam)
    return lam


def entanglement_spectrum(state: StateVector, cut: int) -> np.ndarray:
    """Spectrum of tr_B |psi><psi| at cut c; min(2^c, 2^{n-c}) values, descending."""
    return spectrum_from_amplitudes(state.amplitudes, cut)


def renyi_entropy(values, q: float, tol: float = DEFAULT_RANK_TOL) -> float:
    """Order-q Renyi entropy in bits of a normalized spectrum.

    q=1 is the von Neumann entropy -sum lam log2 lam; q=0 is log2 of the
    number of eigenvalues above `tol`.  Levels at or below `tol` are
    excluded for every q.
    """
    if q < 0:
        raise ValueError(f"Renyi order must be >= 0, got {q}")
    lam = np.asarray(values, dtype=float)
    retained = lam[lam > tol]
    if retained.size == 0:
        raise ValueError("spectrum has no levels above the rank tolerance")
    if q == 0:
        return float(np.log2(retained.size))
    if q == 1:
        # + 0.0 normalizes the -0.0 produced by a pure state
        return float(-np.sum(retained * np.log2(retained)) + 0.0)
    return float(np.log2(np.sum(retained**q)) / (1.0 - q))


def cut_entropies(
    state: StateVector, q: float, tol: float = DEFAULT_RANK_TOL
) -> np.ndarray:
    """Order-q entropy at every line cut 1..n-1, as an (n-1,) array."""
    if state.n_qubits < 2:
        raise ValueError("need at least 2 qubits for a bipartition")
    amps = state.amplitudes
    return np.array(
        [
            renyi_entropy(spectrum_from_amplitudes(amps, c), q, tol)
            for c in range(1, state.n_qubits)
        ]
    )


def mean_cut_entropy(
    state: StateVector, q: float = 1.0, tol: float = DEFAULT_RANK_TOL
) -> float:
    """Arithmetic mean of the order-q entropy over all n-1 line cuts."""
    return float(np.mean(cut_entropies(state, q, tol)))


# -- spectrum dump file ------------------------------------------------------
#
# CSV with header `realization,cut,level_index,lambda`; lambda is printed
# with 17 significant digits so float64 values round-trip exactly.

SPECTRA_HEADER = "realization,cut,level_index,lambda"


def write_spectra(path, items) -> None:
    """Write (realization, cut, values) triples to the spectrum dump format."""
    with open(path, "w", encoding="ascii") as fh:
        fh.write(SPECTRA_HEADER + "\n")
        for realization, cut, values in items:
            for idx, lam in enumerate(values):
                fh.write(f"{realization},{cut},{idx},{lam:.17g}\n")


def read_spectra(path) -> list[tuple[int, int, np.ndarray]]:
    """Read a spectrum dump back into (realization, cut, values) triples."""
    groups: dict[tuple[int, int], list[float]] = {}
    order: list[tuple[int, int]] = []
    with open(path, "r", encoding="ascii") as fh:
        header = fh.readline().strip()
        if header != SPECTRA_HEADER:
            raise ValueError(f"unexpected spectra header {header!r}")
        for line in fh:
            line = line.strip()
            if not line:
                continue
            r_s, c_s, _idx, lam_s = line.split(",")
            key = (int(r_s), int(c_s))
            if key not in groups:
                groups[key] = []
                order.append(key)
            groups[key].append(float(lam_s))
    return [(r, c, np.array(groups[(r, c)])) for r, c in order]
