"""Spectrum and localization diagnostics for glued-tree walk Hamiltonians.

Holds the closed-form clean SGT spectrum, the inverse participation ratio
(IPR) and its energy-resolved ensemble averages, and the adjacent-gap
ratio used to tell Wigner-like from Poisson-like level statistics.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from . import ensemble
from .graph import MGT, build_mgt
from .hamiltonian import assemble_h, disorder_vector
from .numerics import Spectrum, eigh

__all__ = [
    "ClosedFormSpectrum",
    "closed_form_spectrum",
    "inverse_participation_ratio",
    "state_iprs",
    "averaged_ipr",
    "IprTable",
    "ipr_phase_diagram",
    "CenterIprTable",
    "band_center_ipr_sweep",
    "crossing_points",
    "gap_ratio",
    "POISSON_GAP_RATIO",
    "GOE_GAP_RATIO",
]

# Mean adjacent-gap ratio for uncorrelated (Poisson) levels and for the
# Gaussian orthogonal ensemble (large-N numerical value).
POISSON_GAP_RATIO = 2.0 * np.log(2.0) - 1.0
GOE_GAP_RATIO = 0.5307


@dataclass(frozen=True)
class ClosedFormSpectrum:
    """Clean SGT spectrum as (energy, multiplicity) pairs, energies ascending."""

    depth: int
    gamma: float
    entries: tuple[tuple[float, int], ...]

    @property
    def total_multiplicity(self) -> int:
        return sum(m for _, m in self.entries)

    def multiplicity_at(self, energy: float, atol: float = 1e-12) -> int:
        return sum(m for e, m in self.entries if abs(e - energy) <= atol)

    def expand(self) -> np.ndarray:
        """All eigenvalues with repeats, sorted ascending."""
        return np.concatenate([np.full(m, e) for e, m in self.entries])


def closed_form_spectrum(d: int, gamma: float = 1.0) -> ClosedFormSpectrum:
    """Exact spectrum of the clean SGT Hamiltonian of depth ``d``.

    The graph splits into nested sub-trees: the full column space
    contributes the chain energies ``-2 sqrt(2) gamma cos(k pi / (2(m+1)))``
    with ``m = d``, and each level ``nu = 1..d`` contributes ``2**(nu-1)``
    copies of the depth-``(d - nu)`` chain spectrum.  Energies that
    coincide (exactly, as rationals ``k / (m + 1)``) are merged, which is
    what produces the ``2**d``-fold degeneracy at zero energy.
    """
    if d < 1:
        raise ValueError(f"depth must be >= 1, got {d}")
    counts: dict[Fraction, int] = {}
    for nu in range(d + 1):
        m = d - nu
        weight = 1 if nu == 0 else 2 ** (nu - 1)
        for k in range(1, 2 * m + 2):
            q = Fraction(k, 2 * (m + 1))
            counts[q] = counts.get(q, 0) + weight
    entries = tuple(
        (-2.0 * np.sqrt(2.0) * gamma * np.cos(np.pi * float(q)), counts[q])
        for q in sorted(counts)
    )
    return ClosedFormSpectrum(d, gamma, entries)


def inverse_participation_ratio(psi: np.ndarray) -> float:
    """``sum_j |psi_j|**4`` for a normalized state.

    Equals 1 for a single-site state and ``1/N`` for a state spread
    uniformly over ``N`` sites.
    """
    abs2 = np.abs(np.asarray(psi)) ** 2
    norm = abs2.sum()
    if abs(norm - 1.0) > 1e-9:
        raise ValueError(f"state norm**2 = {norm!r} is not 1 within 1e-9")
    return float((abs2**2).sum())


def state_iprs(vectors: np.ndarray) -> np.ndarray:
    """IPR of every column of an orthonormal eigenvector matrix."""
    return (np.abs(vectors) ** 4).sum(axis=0)


def averaged_ipr(spectrum: Spectrum, energy: float, half_width: float) -> float | None:
    """Mean eigenstate IPR over the window ``|E_j - energy| < half_width``.

    Returns ``None`` (never 0) when no eigenstate falls inside the window.
    """
    if half_width <= 0:
        raise ValueError(f"window half-width must be > 0, got {half_width}")
    mask = np.abs(spectrum.values - energy) < half_width
    if not mask.any():
        return None
    return float(state_iprs(spectrum.vectors[:, mask]).mean())


def _format_float(x) -> str:
    return repr(float(x))


@dataclass(frozen=True)
class IprTable:
    """Energy/disorder grid of ensemble-averaged IPR values (one MGT depth)."""

    depth: int
    gluing: str
    seed: int
    delta_e: float
    n_realizations: int
    e_centers: np.ndarray
    w_values: np.ndarray
    mean: np.ndarray  # (n_E, n_W), NaN where the window caught no states
    stderr: np.ndarray
    n_states: np.ndarray

    def to_csv(self) -> str:
        lines = ["E,W,mean_I2,stderr,n_states,n_realizations"]
        for i, e in enumerate(self.e_centers):
            for j, w in enumerate(self.w_values):
                lines.append(
                    ",".join(
                        [
                            _format_float(e),
                            _format_float(w),
                            _format_float(self.mean[i, j]),
                            _format_float(self.stderr[i, j]),
                            str(int(self.n_states[i, j])),
                            str(self.n_realizations),
                        ]
                    )
                )
        return "\n".join(lines) + "\n"


def _ipr_cell(args) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """One disorder realization of the phase diagram: windowed IPR sums."""
    d, gluing, seed, w, iw, r, delta_e, centers, gamma = args
    g = build_mgt(d, gluing=gluing, seed=seed)
    rng = ensemble.realization_rng(seed, 1, iw, r)
    eps = disorder_vector(w, g.n_vertices, rng)
    spec = eigh(assemble_h(g, gamma, eps))
    iprs = state_iprs(spec.vectors)
    inside = np.abs(spec.values[:, None] - centers[None, :]) < delta_e
    counts = inside.sum(axis=0)
    sums = iprs @ inside
    sumsq = (iprs**2) @ inside
    return counts, sums, sumsq


def ipr_phase_diagram(
    d: int,
    w_values,
    delta_e: float = 0.15,
    realizations: int = 50,
    seed: int = 0,
    gluing: str = "random",
    gamma: float = 1.0,
    workers: int | None = 1,
) -> IprTable:
    """Ensemble-averaged IPR on an (energy, disorder) grid for the MGT.

    Energy windows of half-width ``delta_e`` are centered on a uniform grid
    covering the clean bandwidth plus the broadening ``max(W)/2``; cells
    whose window catches no eigenstate stay NaN.  The graph (including a
    random gluing cycle) is fixed by ``seed``; realizations vary only the
    on-site energies.
    """
    w_values = np.asarray(w_values, dtype=float)
    if w_values.size == 0 or realizations < 1:
        raise ValueError("need a nonempty disorder grid and >= 1 realizations")
    span = 3.0 * np.sqrt(2.0) * gamma + w_values.max() / 2.0
    n_half = int(np.ceil(span / delta_e))
    centers = np.arange(-n_half, n_half + 1) * delta_e

    tasks = [
        (d, gluing, seed, float(w), iw, r, delta_e, centers, gamma)
        for iw, w in enumerate(w_values)
        for r in range(realizations)
    ]
    results = ensemble.run_ordered(_ipr_cell, tasks, workers)

    counts = np.zeros((len(centers), len(w_values)))
    sums = np.zeros_like(counts)
    sumsq = np.zeros_like(counts)
    for idx, (c, s, s2) in enumerate(results):
        iw = idx // realizations
        counts[:, iw] += c
        sums[:, iw] += s
        sumsq[:, iw] += s2

    with np.errstate(invalid="ignore", divide="ignore"):
        mean = sums / counts
        var = np.maximum(sumsq / counts - mean**2, 0.0)
        err = np.sqrt(var / np.maximum(counts, 1))
    mean[counts == 0] = np.nan
    err[counts == 0] = np.nan
    return IprTable(
        d, gluing, seed, delta_e, realizations, centers, w_values, mean, err, counts
    )


@dataclass(frozen=True)
class CenterIprTable:
    """Band-center IPR versus disorder for several depths."""

    depths: tuple[int, ...]
    realizations: tuple[int, ...]
    gluing: str
    seed: int
    n_center: int
    w_values: np.ndarray
    mean: np.ndarray  # (n_depths, n_W)
    std: np.ndarray
    stderr: np.ndarray

    def to_csv(self) -> str:
        lines = ["d,W,mean_I2,std,stderr,n_realizations"]
        for i, d in enumerate(self.depths):
            for j, w in enumerate(self.w_values):
                lines.append(
                    ",".join(
                        [
                            str(d),
                            _format_float(w),
                            _format_float(self.mean[i, j]),
                            _format_float(self.std[i, j]),
                            _format_float(self.stderr[i, j]),
                            str(self.realizations[i]),
                        ]
                    )
                )
        return "\n".join(lines) + "\n"


def _center_cell(args) -> float:
    d, gluing, seed, w, id_, iw, r, n_center, gamma = args
    g = build_mgt(d, gluing=gluing, seed=seed)
    rng = ensemble.realization_rng(seed, 2, id_, iw, r)
    eps = disorder_vector(w, g.n_vertices, rng)
    spec = eigh(assemble_h(g, gamma, eps))
    n = len(spec.values)
    take = min(n_center, n)
    lo = (n - take) // 2
    return float(state_iprs(spec.vectors[:, lo : lo + take]).mean())


def band_center_ipr_sweep(
    depths,
    w_values,
    realizations,
    seed: int = 0,
    n_center: int = 100,
    gluing: str = "random",
    gamma: float = 1.0,
    workers: int | None = 1,
) -> CenterIprTable:
    """Band-center IPR (middle ``n_center`` eigenstates by rank) versus disorder.

    ``realizations`` gives the per-depth ensemble sizes.  The resulting
    curves cross near the localization transition, so they feed directly
    into :func:`crossing_points`.
    """
    depths = tuple(int(d) for d in depths)
    realizations = tuple(int(r) for r in realizations)
    if len(realizations) != len(depths):
        raise ValueError("need one realization count per depth")
    w_values = np.asarray(w_values, dtype=float)

    tasks = [
        (d, gluing, seed, float(w), id_, iw, r, n_center, gamma)
        for id_, d in enumerate(depths)
        for iw, w in enumerate(w_values)
        for r in range(realizations[id_])
    ]
    results = ensemble.run_ordered(_center_cell, tasks, workers)

    mean = np.zeros((len(depths), len(w_values)))
    std = np.zeros_like(mean)
    err = np.zeros_like(mean)
    pos = 0
    for id_ in range(len(depths)):
        for iw in range(len(w_values)):
            vals = np.array(results[pos : pos + realizations[id_]])
            pos += realizations[id_]
            mean[id_, iw] = vals.mean()
            std[id_, iw] = vals.std()
            err[id_, iw] = vals.std() / np.sqrt(len(vals))
    return CenterIprTable(
        depths, realizations, gluing, seed, n_center, w_values, mean, std, err
    )


def crossing_points(table: CenterIprTable) -> dict[tuple[int, int], float]:
    """Pairwise crossing disorder of band-center IPR curves.

    For each depth pair the sign change of the difference of ensemble means
    is located by linear interpolation; pairs that never cross on the grid
    are omitted.
    """
    out: dict[tuple[int, int], float] = {}
    w = table.w_values
    for i in range(len(table.depths)):
        for j in range(i + 1, len(table.depths)):
            diff = table.mean[i] - table.mean[j]
            sign_change = np.nonzero(np.diff(np.sign(diff)) != 0)[0]
            if len(sign_change) == 0:
                continue
            a = sign_change[0]
            frac = diff[a] / (diff[a] - diff[a + 1])
            out[(table.depths[i], table.depths[j])] = float(
                w[a] + frac * (w[a + 1] - w[a])
            )
    return out


def gap_ratio(eigenvalues) -> float:
    """Mean adjacent-gap ratio ``<min(s_i, s_i+1) / max(s_i, s_i+1)>``.

    Computed over the middle half of the sorted spectrum, which avoids the
    band edges.  Reference values: ~0.386 for Poisson statistics, ~0.531
    for the GOE; an equally spaced spectrum gives exactly 1.
    """
    values = np.sort(np.asarray(eigenvalues, dtype=float))
    if len(np.unique(values)) < 3:
        raise ValueError("need at least 3 distinct eigenvalues")
    quarter = len(values) // 4
    middle = values[quarter : len(values) - quarter]
    gaps = np.diff(middle)
    lo = np.minimum(gaps[:-1], gaps[1:])
    hi = np.maximum(gaps[:-1], gaps[1:])
    valid = hi > 0
    if not valid.any():
        raise ValueError("all adjacent gaps vanish in the middle of the spectrum")
    return float((lo[valid] / hi[valid]).mean())
