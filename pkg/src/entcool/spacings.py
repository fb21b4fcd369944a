"""Level-spacing-ratio statistics and surmise-based classification.

Given a descending entanglement spectrum, consecutive gaps are
eps_i = lam_i - lam_{i+1} and the ratios are r_i = eps_{i+1}/eps_i.  Their
distribution separates uncorrelated (Poisson) from level-repelling
(Wigner-Dyson GOE/GUE) spectra without any unfolding step, because ratios
are invariant under rescaling the spectrum.

Reference densities on r in [0, inf):

    Poisson:       P(r) = 1 / (1+r)^2
    Wigner-Dyson:  P(r) = (1/Z) (r+r^2)^beta / (1+r+r^2)^(1+3*beta/2)

with beta = 1, Z = 8/27 for GOE and beta = 2, Z = 4*pi/(81*sqrt(3)) for
GUE.  Goodness of fit is a two-sided Kolmogorov-Smirnov distance against
the exact model CDFs (Poisson in closed form, GOE/GUE by adaptive
quadrature), never against binned histograms.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.integrate import quad

from .spectrum import DEFAULT_RANK_TOL

#: spacings smaller than this (absolute) are treated as exact degeneracies
DEFAULT_DEGENERATE_TOL = 1e-14

#: fewer pooled ratios than this flags the classification as low-statistics
LOW_STATISTICS_THRESHOLD = 100


# -- surmise models ----------------------------------------------------------


@dataclass(frozen=True)
class SurmiseModel:
    """A reference spacing-ratio law: Poisson or a Wigner-Dyson surmise."""

    name: str
    beta: int  # Dyson index; 0 marks the Poisson law
    z: float  # normalization of the Wigner-Dyson form; unused for Poisson

    @property
    def is_poisson(self) -> bool:
        return self.beta == 0


POISSON = SurmiseModel("poisson", 0, 1.0)
GOE = SurmiseModel("goe", 1, 8.0 / 27.0)
GUE = SurmiseModel("gue", 2, 4.0 * math.pi / (81.0 * math.sqrt(3.0)))

#: classification candidates, in tie-breaking order
MODELS = (POISSON, GOE, GUE)


def surmise_model(name: str) -> SurmiseModel:
    for model in MODELS:
        if model.name == name:
            return model
    raise ValueError(f"unknown surmise model {name!r}")


def surmise_pdf(model: SurmiseModel, r):
    """Model density at r (scalar or array); r < 0 is rejected."""
    arr = np.asarray(r, dtype=float)
    if np.any(arr < 0):
        raise ValueError("spacing ratios are nonnegative")
    if model.is_poisson:
        out = 1.0 / (1.0 + arr) ** 2
    else:
        b = model.beta
        out = (arr + arr**2) ** b / (1.0 + arr + arr**2) ** (1.0 + 1.5 * b) / model.z
    return float(out) if np.isscalar(r) else out


def _wd_cdf_scalar(model: SurmiseModel, r: float) -> float:
    # integrate the shorter side; epsabs keeps the absolute error below 1e-9
    if r <= 1.0:
        val, _ = quad(lambda x: surmise_pdf(model, x), 0.0, r, epsabs=1e-12)
        return min(val, 1.0)
    tail, _ = quad(lambda x: surmise_pdf(model, x), r, np.inf, epsabs=1e-12)
    return min(1.0 - tail, 1.0)


def surmise_cdf(model: SurmiseModel, r):
    """Model CDF at r (scalar or array); Poisson is r/(1+r) in closed form."""
    arr = np.asarray(r, dtype=float)
    if np.any(arr < 0):
        raise ValueError("spacing ratios are nonnegative")
    if model.is_poisson:
        out = arr / (1.0 + arr)
    else:
        out = np.array([_wd_cdf_scalar(model, x) for x in np.atleast_1d(arr)])
        out = out.reshape(arr.shape)
    return float(out) if np.isscalar(r) else out


def _cdf_sorted(model: SurmiseModel, xs: np.ndarray) -> np.ndarray:
    """Model CDF at ascending-sorted points, one quadrature per segment."""
    if model.is_poisson:
        return xs / (1.0 + xs)
    out = np.empty(xs.size)
    acc = 0.0
    prev = 0.0
    for i, x in enumerate(xs):
        if x > prev:
            seg, _ = quad(lambda t: surmise_pdf(model, t), prev, x, epsabs=1e-12)
            acc += seg
            prev = x
        out[i] = acc
    return np.minimum(out, 1.0)


_PPF_GRID: dict[str, tuple[np.ndarray, np.ndarray]] = {}


def _ppf_grid(model: SurmiseModel) -> tuple[np.ndarray, np.ndarray]:
    # dense linear head plus logarithmic tail out to r = 1e5, where both
    # Wigner-Dyson tails hold less than 1e-9 of probability mass
    cached = _PPF_GRID.get(model.name)
    if cached is None:
        rs = np.concatenate([np.linspace(0.0, 10.0, 10001), np.logspace(1.0, 5.0, 2049)[1:]])
        cached = (rs, _cdf_sorted(model, rs))
        _PPF_GRID[model.name] = cached
    return cached


def surmise_ppf(model: SurmiseModel, u):
    """Inverse CDF for u in [0, 1); Poisson is u/(1-u) in closed form."""
    arr = np.asarray(u, dtype=float)
    if np.any(arr < 0) or np.any(arr >= 1):
        raise ValueError("quantile argument must lie in [0, 1)")
    if model.is_poisson:
        out = arr / (1.0 - arr)
    else:
        rs, cdf = _ppf_grid(model)
        out = np.interp(arr, cdf, rs)
    return float(out) if np.isscalar(u) else out


def ks_statistic(samples, model: SurmiseModel) -> float:
    """Two-sided KS distance of an empirical sample from the model CDF."""
    xs = np.sort(np.asarray(samples, dtype=float))
    n = xs.size
    if n == 0:
        raise ValueError("KS statistic of an empty sample")
    f = _cdf_sorted(model, xs)
    grid = np.arange(n, dtype=float)
    return float(max(np.max(f - grid / n), np.max((grid + 1.0) / n - f)))


# -- spacing ratios ----------------------------------------------------------


@dataclass(frozen=True)
class SpacingRatios:
    """Ratios of one spectrum: raw r_i, folded min(r, 1/r), drop accounting."""

    ratios: np.ndarray
    folded: np.ndarray
    drop_count: int
    n_retained: int


def spacing_ratios(
    values,
    tol: float = DEFAULT_RANK_TOL,
    degenerate_tol: float = DEFAULT_DEGENERATE_TOL,
) -> SpacingRatios:
    """Consecutive-gap ratios of the rank-retained descending spectrum.

    Levels at or below `tol` are discarded first.  A ratio whose numerator
    or denominator gap is below `degenerate_tol` (an exact degeneracy up to
    roundoff) is dropped and counted, never silently discarded.  Fewer than
    3 retained levels yield an empty result.
    """
    lam = np.sort(np.asarray(values, dtype=float))[::-1]
    retained = lam[lam > tol]
    empty = np.empty(0)
    if retained.size < 3:
        return SpacingRatios(empty, empty, 0, int(retained.size))
    eps = retained[:-1] - retained[1:]
    den = eps[:-1]
    num = eps[1:]
    good = (den >= degenerate_tol) & (num >= degenerate_tol)
    ratios = num[good] / den[good]
    return SpacingRatios(
        ratios=ratios,
        folded=np.minimum(ratios, 1.0 / ratios),
        drop_count=int(np.count_nonzero(~good)),
        n_retained=int(retained.size),
    )


@dataclass(frozen=True)
class RatioEnsemble:
    """Spacing ratios pooled across realizations at a fixed cut.

    `source_cut` is the cut the ratios came from, or -1 when pooled over
    all cuts.  `drop_count` totals the degenerate spacings discarded while
    building the pool.
    """

    ratios: np.ndarray
    n_realizations: int
    source_cut: int
    drop_count: int

    def __post_init__(self):
        arr = np.asarray(self.ratios, dtype=float)
        if arr.size and (np.any(arr <= 0) or not np.all(np.isfinite(arr))):
            raise ValueError("pooled ratios must be positive and finite")
        object.__setattr__(self, "ratios", arr)

    @property
    def n_ratios(self) -> int:
        return int(self.ratios.size)

    @property
    def folded(self) -> np.ndarray:
        return np.minimum(self.ratios, 1.0 / self.ratios)


def pool_spectra(
    items,
    cut: int | None,
    tol: float = DEFAULT_RANK_TOL,
    degenerate_tol: float = DEFAULT_DEGENERATE_TOL,
) -> tuple[RatioEnsemble, np.ndarray]:
    """Pool ratios from (realization, cut, values) triples at one or all cuts.

    `cut=None` pools every cut present.  Returns the ensemble plus the
    realization index of each pooled ratio, in input order, so per-ratio
    provenance can be written alongside the pool.
    """
    ratios: list[np.ndarray] = []
    sources: list[np.ndarray] = []
    realizations = set()
    drops = 0
    for realization, item_cut, values in items:
        if cut is not None and item_cut != cut:
            continue
        sr = spacing_ratios(values, tol, degenerate_tol)
        drops += sr.drop_count
        realizations.add(realization)
        if sr.ratios.size:
            ratios.append(sr.ratios)
            sources.append(np.full(sr.ratios.size, realization, dtype=np.int64))
    pooled = np.concatenate(ratios) if ratios else np.empty(0)
    ids = np.concatenate(sources) if sources else np.empty(0, dtype=np.int64)
    ensemble = RatioEnsemble(
        ratios=pooled,
        n_realizations=len(realizations),
        source_cut=-1 if cut is None else int(cut),
        drop_count=drops,
    )
    return ensemble, ids


# -- histogram and classification -------------------------------------------


@dataclass(frozen=True)
class RatioHistogram:
    """Density-normalized histogram over [0, r_max] plus overflow fraction."""

    bin_left: np.ndarray
    bin_right: np.ndarray
    density: np.ndarray
    overflow: float
    n_total: int


def histogram(ensemble: RatioEnsemble, bin_width: float, r_max: float) -> RatioHistogram:
    """Bin pooled ratios; bin integrals sum to the fraction of ratios <= r_max."""
    if bin_width <= 0:
        raise ValueError("bin width must be positive")
    if r_max <= 0:
        raise ValueError("r_max must be positive")
    ratios = ensemble.ratios
    empty = np.empty(0)
    if ratios.size == 0:
        return RatioHistogram(empty, empty, empty, 0.0, 0)
    n_bins = max(1, int(round(r_max / bin_width)))
    edges = np.linspace(0.0, n_bins * bin_width, n_bins + 1)
    counts, _ = np.histogram(ratios, bins=edges)
    density = counts / (ratios.size * bin_width)
    overflow = float(np.count_nonzero(ratios > edges[-1]) / ratios.size)
    return RatioHistogram(edges[:-1], edges[1:], density, overflow, int(ratios.size))


@dataclass(frozen=True)
class ClassifyReport:
    """KS distances against the three reference laws and the winning model."""

    ks_poisson: float
    ks_goe: float
    ks_gue: float
    mean_r_tilde: float
    n_ratios: int
    drop_count: int
    best_fit: str
    low_statistics: bool

    def to_dict(self) -> dict:
        return {
            "ks_poisson": self.ks_poisson,
            "ks_goe": self.ks_goe,
            "ks_gue": self.ks_gue,
            "mean_r_tilde": self.mean_r_tilde,
            "n_ratios": self.n_ratios,
            "drop_count": self.drop_count,
            "best_fit": self.best_fit,
        }


def classify(ensemble: RatioEnsemble) -> ClassifyReport:
    """KS-fit the pooled ratios against Poisson, GOE and GUE."""
    if ensemble.n_ratios == 0:
        raise ValueError("cannot classify an empty ratio ensemble")
    ks = {model.name: ks_statistic(ensemble.ratios, model) for model in MODELS}
    best = min(MODELS, key=lambda m: ks[m.name])
    return ClassifyReport(
        ks_poisson=ks["poisson"],
        ks_goe=ks["goe"],
        ks_gue=ks["gue"],
        mean_r_tilde=float(np.mean(ensemble.folded)),
        n_ratios=ensemble.n_ratios,
        drop_count=ensemble.drop_count,
        best_fit=best.name,
        low_statistics=ensemble.n_ratios < LOW_STATISTICS_THRESHOLD,
    )


# -- file interfaces ---------------------------------------------------------

RATIOS_HEADER = "realization,ratio"
HISTOGRAM_HEADER = "bin_left,bin_right,density"


def write_ratios(path, realization_ids, ratios) -> None:
    with open(path, "w", encoding="ascii") as fh:
        fh.write(RATIOS_HEADER + "\n")
        for rid, ratio in zip(realization_ids, ratios):
            fh.write(f"{int(rid)},{ratio:.17g}\n")


def write_histogram(path, hist: RatioHistogram) -> None:
    with open(path, "w", encoding="ascii") as fh:
        fh.write(HISTOGRAM_HEADER + "\n")
        for left, right, dens in zip(hist.bin_left, hist.bin_right, hist.density):
            fh.write(f"{left:.17g},{right:.17g},{dens:.17g}\n")
