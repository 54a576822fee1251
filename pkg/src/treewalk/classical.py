"""Classical diffusive transport through the modified glued trees.

A steady particle flux enters the left root, random-walks over the
columns with per-edge hop rate ``lam``, and escapes through directed
tails at either root.  The column-resolved master equation is linear, so
the steady state is one solve; the same transmission also has a closed
form obtained by solving the interior recurrences, and the two must agree
to near machine precision.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

__all__ = [
    "MasterSystem",
    "build_master",
    "steady_state",
    "analytic_transmission",
    "transmission_vs_disorder",
]


@dataclass(frozen=True)
class MasterSystem:
    """Column-space rate system ``dp/dt = L p + b`` for a depth-``d`` MGT."""

    depth: int
    lam: float
    lam_left: float
    lam_right: float
    flux_in: float
    matrix: np.ndarray
    source: np.ndarray


def build_master(
    d: int,
    lam: float,
    lam_left: float,
    lam_right: float,
    flux_in: float = 1.0,
) -> MasterSystem:
    """Assemble the rate matrix over columns ``0..2d+1``.

    Each tree vertex hops along its edges at rate ``lam`` (two edges lead
    away from the nearest root, one toward it; the leaf columns trade two
    cross edges each), and the roots additionally leak into their tails at
    ``lam_left`` / ``lam_right``.  Probability is conserved up to those two
    leaks, so interior columns of ``L`` sum to zero.
    """
    if d < 1:
        raise ValueError(f"depth must be >= 1, got {d}")
    if min(lam, lam_left, lam_right) <= 0:
        raise ValueError("all rates must be > 0")
    m = 2 * d + 2
    lmat = np.zeros((m, m))
    lmat[0, 0] = -(2 * lam + lam_left)
    lmat[0, 1] = lam
    for j in range(1, m - 1):
        if j < d:
            row = (2 * lam, -3 * lam, lam)
        elif j in (d, d + 1):
            row = (2 * lam, -3 * lam, 2 * lam)
        else:
            row = (lam, -3 * lam, 2 * lam)
        lmat[j, j - 1 : j + 2] = row
    lmat[m - 1, m - 2] = lam
    lmat[m - 1, m - 1] = -(2 * lam + lam_right)
    source = np.zeros(m)
    source[0] = flux_in
    return MasterSystem(d, lam, lam_left, lam_right, flux_in, lmat, source)


def steady_state(system: MasterSystem) -> np.ndarray:
    """Stationary column occupations ``p = -L^{-1} b``.

    Positive escape rates make ``L`` nonsingular; the result is checked for
    nonnegativity, residual, and flux balance
    ``lam_left p_0 + lam_right p_last = flux_in``.
    """
    p = np.linalg.solve(system.matrix, -system.source)
    scale = system.flux_in
    residual = np.linalg.norm(system.matrix @ p + system.source)
    if residual > 1e-10 * scale:
        raise RuntimeError(f"steady-state residual {residual:.3e} too large")
    if p.min() < -1e-12 * scale:
        raise RuntimeError(f"steady state has negative occupation {p.min():.3e}")
    flux_out = system.lam_left * p[0] + system.lam_right * p[-1]
    if abs(flux_out - system.flux_in) > 1e-10 * scale:
        raise RuntimeError(
            f"flux balance violated: out {flux_out!r} vs in {system.flux_in!r}"
        )
    return p


def analytic_transmission(
    d: int, lam: float, lam_left: float, lam_right: float
) -> float:
    """Closed-form fraction of the input flux that exits through the right tail.

    ``1 / (1 + lam_left/lam_right + 2 (1 - 3 * 2**(-d-2)) lam_left/lam)``,
    obtained by solving the interior recurrences of the steady state; it
    equals ``lam_right * p_last / flux_in`` from :func:`steady_state`.
    """
    if d < 1:
        raise ValueError(f"depth must be >= 1, got {d}")
    if min(lam, lam_left, lam_right) <= 0:
        raise ValueError("all rates must be > 0")
    geometry = 2.0 * (1.0 - 3.0 * 2.0 ** (-d - 2))
    return 1.0 / (1.0 + lam_left / lam_right + geometry * lam_left / lam)


def transmission_vs_disorder(d: int, w_values, gamma: float = 1.0) -> np.ndarray:
    """Classical transmission with disorder mapped to the diffusion rate.

    Uses ``lam_left = lam_right = gamma`` and the large-``W`` estimate
    ``lam = gamma**3 / W**2``, giving
    ``(1/2) / (1 + (1 - 3 * 2**(-d-2)) (W/gamma)**2)``; ``W = 0`` is the
    free-diffusion limit 1/2.
    """
    w = np.asarray(w_values, dtype=float)
    if np.any(w < 0):
        raise ValueError("disorder widths must be >= 0")
    geometry = 1.0 - 3.0 * 2.0 ** (-d - 2)
    return 0.5 / (1.0 + geometry * (w / gamma) ** 2)
