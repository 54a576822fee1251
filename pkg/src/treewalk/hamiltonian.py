"""Walk Hamiltonians: clean, disordered, column-reduced, and scattering variants.

The walk generator is ``H = -gamma * A + diag(eps)`` with ``A`` the graph
adjacency matrix and ``eps`` i.i.d. uniform on ``[-W/2, W/2]``.  Energies
and disorder widths are quoted in units of the hopping rate ``gamma``
(default 1).  Matrices are assembled sparse (CSR) and densified on demand
by the numerical kernels.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp

from .graph import MGT, SGT, Graph, n_columns

__all__ = [
    "DisorderSpec",
    "sample_disorder",
    "disorder_vector",
    "assemble_h0",
    "assemble_h",
    "column_hamiltonian",
    "column_basis",
    "ScatteringHamiltonian",
    "scattering_hamiltonian",
    "coordinate_text",
]


@dataclass(frozen=True)
class DisorderSpec:
    """On-site disorder draw: width ``w``, RNG ``seed``, number of sites."""

    w: float
    seed: int
    count: int

    def __post_init__(self):
        if self.w < 0:
            raise ValueError(f"disorder width must be >= 0, got {self.w}")
        if self.count < 0:
            raise ValueError(f"count must be >= 0, got {self.count}")


def disorder_vector(w: float, count: int, rng: np.random.Generator) -> np.ndarray:
    """Draw ``count`` i.i.d. on-site energies, uniform on [-w/2, w/2]."""
    if w < 0:
        raise ValueError(f"disorder width must be >= 0, got {w}")
    if w == 0:
        return np.zeros(count)
    return rng.uniform(-w / 2, w / 2, count)


def sample_disorder(spec: DisorderSpec) -> np.ndarray:
    """Deterministic disorder draw for a :class:`DisorderSpec`."""
    return disorder_vector(spec.w, spec.count, np.random.default_rng(spec.seed))


def adjacency_matrix(g: Graph) -> sp.csr_matrix:
    data = np.ones(len(g.indices))
    return sp.csr_matrix((data, g.indices, g.indptr), shape=(g.n_vertices,) * 2)


def assemble_h0(g: Graph, gamma: float = 1.0) -> sp.csr_matrix:
    """Clean walk Hamiltonian ``-gamma * A`` (zero diagonal)."""
    data = np.full(len(g.indices), -gamma)
    return sp.csr_matrix((data, g.indices, g.indptr), shape=(g.n_vertices,) * 2)


def assemble_h(g: Graph, gamma: float, onsite: np.ndarray) -> sp.csr_matrix:
    """Disordered Hamiltonian ``-gamma * A + diag(onsite)``."""
    onsite = np.asarray(onsite, dtype=float)
    if onsite.shape != (g.n_vertices,):
        raise ValueError(
            f"onsite energies have shape {onsite.shape}, expected ({g.n_vertices},)"
        )
    h = assemble_h0(g, gamma).tolil()
    h.setdiag(onsite)
    return h.tocsr()


def column_hamiltonian(d: int, variant: str = SGT, gamma: float = 1.0) -> np.ndarray:
    """Reduction of the clean Hamiltonian to the column space.

    The SGT reduces to a (2d+1)-site chain with uniform hopping
    ``-sqrt(2) * gamma``; the MGT reduces to a (2d+2)-site chain whose
    middle bond (between the two leaf columns) is ``-2 * gamma`` because
    every leaf carries two cross edges.
    """
    if d < 1:
        raise ValueError(f"depth must be >= 1, got {d}")
    m = n_columns(d, variant)
    h = np.zeros((m, m))
    hop = np.full(m - 1, -np.sqrt(2.0) * gamma)
    if variant == MGT:
        hop[d] = -2.0 * gamma
    idx = np.arange(m - 1)
    h[idx, idx + 1] = hop
    h[idx + 1, idx] = hop
    return h


def column_basis(g: Graph) -> sp.csr_matrix:
    """Sparse (n_columns x N) matrix whose rows are the column states."""
    sizes = np.asarray(g.col_sizes)
    data = np.repeat(1.0 / np.sqrt(sizes), sizes)
    indices = np.arange(g.n_vertices)
    indptr = np.zeros(g.n_columns + 1, dtype=np.int64)
    indptr[1:] = np.cumsum(sizes)
    return sp.csr_matrix((data, indices, indptr), shape=(g.n_columns, g.n_vertices))


@dataclass(frozen=True)
class ScatteringHamiltonian:
    """Boundary-modified Hamiltonian for plane-wave transmission at momentum ``k``.

    Semi-infinite tails with dispersion ``E = -2 * gamma * cos(k)`` attach to
    the two root vertices; eliminating them adds a complex ``e^{ik}`` term
    on each root, making the operator non-Hermitian there and nowhere else.
    """

    graph: Graph
    base: sp.csr_matrix
    gamma: float
    k: float

    @property
    def boundary(self) -> tuple[int, int]:
        """Vertex ids of the two roots (columns 0 and 2d or 2d+1)."""
        start = self.graph.column_start
        return 0, int(start[-1])

    def matrix(self) -> sp.csr_matrix:
        """The complex operator ``H + e^{ik} (P_left + P_right)``."""
        left, right = self.boundary
        n = self.graph.n_vertices
        phase = np.exp(1j * self.k) * self.gamma
        bump = sp.csr_matrix(
            (np.array([phase, phase]), (np.array([left, right]),) * 2), shape=(n, n)
        )
        return (self.base.astype(complex) + bump).tocsr()


def scattering_hamiltonian(
    g: Graph, onsite: np.ndarray, k: float, gamma: float = 1.0
) -> ScatteringHamiltonian:
    """Attach momentum-``k`` boundary terms to the disordered Hamiltonian.

    Only propagating momenta ``0 < k < pi`` are supported; the evanescent
    regime is rejected.
    """
    if not 0 < k < np.pi:
        raise ValueError(f"momentum must lie in (0, pi), got {k}")
    return ScatteringHamiltonian(g, assemble_h(g, gamma, onsite), gamma, k)


def coordinate_text(m: sp.spmatrix | np.ndarray) -> str:
    """Debug export: one "row col value" line per stored entry."""
    coo = sp.coo_matrix(m)
    lines = [
        f"{r} {c} {v!r}"
        for r, c, v in sorted(zip(coo.row.tolist(), coo.col.tolist(), coo.data.tolist()))
    ]
    return "\n".join(lines) + "\n"
