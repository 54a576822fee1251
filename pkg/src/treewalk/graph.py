"""Glued binary tree graphs and their column structure.

Two families are supported:

* ``sgt`` -- the simple glued trees: two depth-``d`` binary trees that
  share their leaf column, giving ``3 * 2**d - 2`` vertices in columns
  ``0..2d``.
* ``mgt`` -- the modified glued trees: two depth-``d`` binary trees whose
  leaf columns (``d`` and ``d+1``, each of size ``2**d``) are joined by an
  alternating cycle, giving ``2**(d+2) - 2`` vertices in columns
  ``0..2d+1``.  The cycle is either the regular one
  ``L0-R0-L1-R1-...-L0`` or a uniformly random alternating Hamiltonian
  cycle drawn from a seed.

Vertices are stored as 0-based contiguous integers in column-major order,
so the vertices of column ``j`` occupy the index range
``[column_start[j], column_start[j] + column_size(j, d, variant))``.
Adjacency is kept as sorted CSR-style neighbor lists, which stays
memory-light for depths up to ``d ~ 16``.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Iterator, NamedTuple

import numpy as np

SGT = "sgt"
MGT = "mgt"
_VARIANTS = (SGT, MGT)

__all__ = [
    "SGT",
    "MGT",
    "Coord",
    "Graph",
    "n_columns",
    "column_size",
    "column_sizes",
    "coord_to_vertex",
    "vertex_to_coord",
    "build_sgt",
    "build_mgt",
    "column_state",
    "to_edgelist_text",
]


class Coord(NamedTuple):
    """Column/row coordinate of a vertex: column ``j``, position ``n`` within it."""

    j: int
    n: int


def n_columns(d: int, variant: str = SGT) -> int:
    """Number of columns: ``2d + 1`` for the SGT, ``2d + 2`` for the MGT."""
    _check_variant(variant)
    return 2 * d + 1 if variant == SGT else 2 * d + 2


def column_size(j: int, d: int, variant: str = SGT) -> int:
    """Number of vertices in column ``j`` of a depth-``d`` glued tree.

    SGT: ``2**j`` for ``j <= d`` and ``2**(2d - j)`` beyond the shared leaf
    column.  MGT: ``2**j`` for ``j <= d`` and ``2**(2d + 1 - j)`` for the
    mirrored tree, so both leaf columns have ``2**d`` vertices.
    """
    _check_variant(variant)
    if d < 1:
        raise ValueError(f"depth must be >= 1, got {d}")
    if not 0 <= j < n_columns(d, variant):
        raise ValueError(f"column {j} out of range for {variant} of depth {d}")
    if j <= d:
        return 2**j
    if variant == SGT:
        return 2 ** (2 * d - j)
    return 2 ** (2 * d + 1 - j)


def column_sizes(d: int, variant: str = SGT) -> tuple[int, ...]:
    return tuple(column_size(j, d, variant) for j in range(n_columns(d, variant)))


def coord_to_vertex(coord: Coord | tuple[int, int], d: int) -> int:
    """Map an SGT coordinate to its 1-based vertex label.

    The label is ``2**j + n`` in the left tree and
    ``3 * 2**d - 2**(2d + 1 - j) + n`` past the leaf column; the map is a
    bijection onto ``1 .. 3 * 2**d - 2``.  Internal vertex ids are this
    label minus one.
    """
    j, n = coord
    if not 0 <= j <= 2 * d:
        raise ValueError(f"column {j} out of range for SGT of depth {d}")
    if not 0 <= n < column_size(j, d, SGT):
        raise ValueError(f"row {n} out of range for column {j} (depth {d})")
    if j <= d:
        return 2**j + n
    return 3 * 2**d - 2 ** (2 * d + 1 - j) + n


def vertex_to_coord(v: int, d: int) -> Coord:
    """Inverse of :func:`coord_to_vertex` (1-based vertex labels)."""
    n_total = 3 * 2**d - 2
    if not 1 <= v <= n_total:
        raise ValueError(f"vertex {v} out of range 1..{n_total}")
    if v <= 2 ** (d + 1) - 1:
        j = v.bit_length() - 1
        return Coord(j, v - 2**j)
    w = 3 * 2**d - v
    j = 2 * d - ((w - 1).bit_length() - 1)
    return Coord(j, 2 ** (2 * d + 1 - j) - w)


@dataclass(frozen=True)
class Graph:
    """Immutable glued-tree instance with CSR adjacency and column labels.

    ``indptr``/``indices`` hold sorted neighbor lists; ``column_of[v]`` is
    the column label of vertex ``v``.  Construction parameters are kept so
    ensembles and exports are reproducible.
    """

    depth: int
    variant: str
    gluing: str | None
    seed: int | None
    col_sizes: tuple[int, ...]
    indptr: np.ndarray = field(repr=False)
    indices: np.ndarray = field(repr=False)
    column_of: np.ndarray = field(repr=False)

    def __post_init__(self):
        self.indptr.setflags(write=False)
        self.indices.setflags(write=False)
        self.column_of.setflags(write=False)

    @property
    def n_vertices(self) -> int:
        return len(self.indptr) - 1

    @property
    def n_edges(self) -> int:
        return len(self.indices) // 2

    @property
    def n_columns(self) -> int:
        return len(self.col_sizes)

    @property
    def column_start(self) -> np.ndarray:
        out = np.zeros(self.n_columns, dtype=np.int64)
        np.cumsum(self.col_sizes[:-1], out=out[1:])
        return out

    def degree(self, v: int) -> int:
        return int(self.indptr[v + 1] - self.indptr[v])

    def degrees(self) -> np.ndarray:
        return np.diff(self.indptr)

    def neighbors(self, v: int) -> np.ndarray:
        return self.indices[self.indptr[v] : self.indptr[v + 1]]

    def edges(self) -> Iterator[tuple[int, int]]:
        """Yield each undirected edge once, as (u, v) with u < v, sorted."""
        src = np.repeat(np.arange(self.n_vertices), np.diff(self.indptr))
        keep = src < self.indices
        yield from zip(src[keep].tolist(), self.indices[keep].tolist())

    def column_slice(self, j: int) -> slice:
        if not 0 <= j < self.n_columns:
            raise ValueError(f"column {j} out of range 0..{self.n_columns - 1}")
        start = int(self.column_start[j])
        return slice(start, start + self.col_sizes[j])


def _check_variant(variant: str):
    if variant not in _VARIANTS:
        raise ValueError(f"unknown variant {variant!r}, expected one of {_VARIANTS}")


def _csr_from_edges(n: int, edge_array: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    src = np.concatenate([edge_array[:, 0], edge_array[:, 1]])
    dst = np.concatenate([edge_array[:, 1], edge_array[:, 0]])
    order = np.lexsort((dst, src))
    src, dst = src[order], dst[order]
    indptr = np.zeros(n + 1, dtype=np.int64)
    indptr[1:] = np.cumsum(np.bincount(src, minlength=n))
    return indptr, dst.astype(np.int32)


def _tree_edge_blocks(d: int, variant: str, start: np.ndarray) -> list[np.ndarray]:
    """Parent edges of the left tree plus the mirrored right tree."""
    blocks = []
    for j in range(1, d + 1):
        n = np.arange(column_size(j, d, variant), dtype=np.int64)
        blocks.append(np.stack([start[j] + n, start[j - 1] + n // 2], axis=1))
    if variant == SGT:
        # Right half: each vertex of column j > d is attached to two
        # vertices of column j - 1, mirroring the left-tree branching.
        for j in range(d + 1, 2 * d + 1):
            n = np.arange(column_size(j, d, variant), dtype=np.int64)
            blocks.append(np.stack([start[j] + n, start[j - 1] + 2 * n], axis=1))
            blocks.append(np.stack([start[j] + n, start[j - 1] + 2 * n + 1], axis=1))
    else:
        # Right tree roots at column 2d+1; parents sit one column further out.
        for j in range(d + 1, 2 * d + 1):
            n = np.arange(column_size(j, d, variant), dtype=np.int64)
            blocks.append(np.stack([start[j] + n, start[j + 1] + n // 2], axis=1))
    return blocks


def build_sgt(d: int) -> Graph:
    """Build the simple glued trees graph of depth ``d`` (``3 * 2**d - 2`` vertices)."""
    sizes = column_sizes(d, SGT)
    n = sum(sizes)
    start = np.zeros(len(sizes), dtype=np.int64)
    start[1:] = np.cumsum(sizes[:-1])
    edge_array = np.concatenate(_tree_edge_blocks(d, SGT, start))
    indptr, indices = _csr_from_edges(n, edge_array)
    column_of = np.repeat(np.arange(len(sizes), dtype=np.int32), sizes)
    return Graph(d, SGT, None, None, sizes, indptr, indices, column_of)


def build_mgt(d: int, gluing: str = "regular", seed: int | None = None) -> Graph:
    """Build the modified glued trees graph of depth ``d`` (``2**(d+2) - 2`` vertices).

    ``gluing="regular"`` wires the fixed alternating cycle
    ``L0-R0-L1-R1-...-L(M-1)-R(M-1)-L0`` on the two leaf columns;
    ``gluing="random"`` draws a uniformly random alternating Hamiltonian
    cycle, deterministically from ``seed``, by threading the cycle through
    two independent uniform permutations of the leaf sets.
    """
    if gluing not in ("regular", "random"):
        raise ValueError(f"unknown gluing {gluing!r}, expected 'regular' or 'random'")
    if gluing == "random" and seed is None:
        raise ValueError("random gluing requires a seed")
    sizes = column_sizes(d, MGT)
    n = sum(sizes)
    start = np.zeros(len(sizes), dtype=np.int64)
    start[1:] = np.cumsum(sizes[:-1])
    blocks = _tree_edge_blocks(d, MGT, start)

    m = 2**d
    if gluing == "regular":
        left = np.arange(m, dtype=np.int64)
        right = np.arange(m, dtype=np.int64)
    else:
        rng = np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(0,)))
        left = rng.permutation(m).astype(np.int64)
        right = rng.permutation(m).astype(np.int64)
    left_v = start[d] + left
    right_v = start[d + 1] + right
    blocks.append(np.stack([left_v, right_v], axis=1))
    blocks.append(np.stack([right_v, np.roll(left_v, -1)], axis=1))

    indptr, indices = _csr_from_edges(n, np.concatenate(blocks))
    column_of = np.repeat(np.arange(len(sizes), dtype=np.int32), sizes)
    return Graph(d, MGT, gluing, seed, sizes, indptr, indices, column_of)


def column_state(g: Graph, j: int) -> np.ndarray:
    """Unit-norm uniform superposition over the vertices of column ``j``."""
    sl = g.column_slice(j)
    psi = np.zeros(g.n_vertices)
    psi[sl] = 1.0 / np.sqrt(g.col_sizes[j])
    return psi


def to_edgelist_text(g: Graph) -> str:
    """Serialize the graph as a JSON header line plus one "u v" pair per edge."""
    header = json.dumps(
        {
            "d": g.depth,
            "variant": g.variant,
            "gluing": g.gluing,
            "seed": g.seed,
            "n": g.n_vertices,
        }
    )
    lines = [f"# {header}"]
    lines.extend(f"{u} {v}" for u, v in g.edges())
    return "\n".join(lines) + "\n"
