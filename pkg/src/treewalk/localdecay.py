"""Reduced non-unitary walk model: column-space evolution with local decay.

Disorder couples the column space to the rest of the graph; to leading
order the escape rate from column ``j`` is proportional to
``W**2 (1 - 1/N_j)`` with ``N_j`` the column occupancy.  Evolving under
``H_col - i Gamma / 2`` with those diagonal rates reproduces the
disorder-averaged hitting and column probabilities of the full walk at a
cost polynomial in the depth instead of exponential.
"""

from __future__ import annotations

import numpy as np

from .graph import SGT, column_sizes
from .hamiltonian import column_hamiltonian
from .numerics import nonhermitian_evolution

__all__ = [
    "column_decay_rates",
    "decay_generator",
    "evolve_local_decay",
    "model_walk_series",
    "short_time_column_probability",
]


def column_decay_rates(
    d: int, w: float, gamma: float = 1.0, variant: str = SGT
) -> np.ndarray:
    """Per-column escape rates ``W**2 / (12 gamma) * (1 - 1/N_j)``.

    Root columns hold a single vertex, so their rate vanishes; rates scale
    with ``W**2``.
    """
    if w < 0:
        raise ValueError(f"disorder width must be >= 0, got {w}")
    if gamma <= 0:
        raise ValueError(f"hopping rate must be > 0, got {gamma}")
    sizes = np.asarray(column_sizes(d, variant), dtype=float)
    return w**2 / (12.0 * gamma) * (1.0 - 1.0 / sizes)


def decay_generator(
    d: int, w: float, gamma: float = 1.0, variant: str = SGT
) -> np.ndarray:
    """Complex column-space generator ``H_col - i Gamma / 2``."""
    h = column_hamiltonian(d, variant, gamma).astype(complex)
    h -= 0.5j * np.diag(column_decay_rates(d, w, gamma, variant))
    return h


def evolve_local_decay(
    d: int,
    w: float,
    gamma: float,
    psi0: np.ndarray,
    times: np.ndarray,
    variant: str = SGT,
    tol: float = 1e-8,
) -> np.ndarray:
    """States of the local-decay model at each time, stacked row-wise.

    ``psi0`` lives in the column space (length ``2d+1`` for the SGT).  The
    norm is non-increasing; at ``W = 0`` the evolution is unitary.
    """
    psi0 = np.asarray(psi0, dtype=complex)
    m = 2 * d + 1 if variant == SGT else 2 * d + 2
    if psi0.shape != (m,):
        raise ValueError(f"state has shape {psi0.shape}, expected ({m},)")
    evo = nonhermitian_evolution(decay_generator(d, w, gamma, variant), tol=tol)
    return np.stack([evo.apply(psi0, float(t)) for t in np.asarray(times)])


def model_walk_series(
    d: int,
    w: float,
    times: np.ndarray,
    gamma: float = 1.0,
    variant: str = SGT,
    start_column: int = 0,
) -> tuple[np.ndarray, np.ndarray]:
    """Model predictions ``(p_hit, p_col)`` for the walk from ``start_column``.

    ``p_col`` is the surviving norm of the decayed column-space state and
    ``p_hit`` its weight on the far root column.
    """
    m = 2 * d + 1 if variant == SGT else 2 * d + 2
    psi0 = np.zeros(m, dtype=complex)
    psi0[start_column] = 1.0
    states = evolve_local_decay(d, w, gamma, psi0, times, variant)
    pcol = (np.abs(states) ** 2).sum(axis=1)
    phit = np.abs(states[:, -1]) ** 2
    return phit, pcol


def short_time_column_probability(t: float, w: float, occupancy: int) -> float:
    """Leading-order disorder-averaged column probability.

    ``1 - t**2 W**2 (1 - 1/N) / 12`` for a walk started in a column of
    occupancy ``N``; valid for small ``t W`` only.
    """
    if occupancy < 1:
        raise ValueError(f"column occupancy must be >= 1, got {occupancy}")
    return 1.0 - t**2 * w**2 * (1.0 - 1.0 / occupancy) / 12.0
