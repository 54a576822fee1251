"""Numerical kernels: Hermitian eigensolves, complex solves, and propagators.

All kernels are pure functions (or immutable propagator objects); callers
parallelize across realizations.  Time propagation uses a dense
eigendecomposition below a dimension threshold and a Chebyshev expansion
of ``exp(-iHt)`` with spectral-bound rescaling above it.
"""

from __future__ import annotations

from typing import NamedTuple

import numpy as np
import scipy.linalg
import scipy.sparse as sp
import scipy.sparse.linalg as spla
from scipy.special import jv

__all__ = [
    "SingularSystemError",
    "PropagationError",
    "Spectrum",
    "eigh",
    "solve_complex",
    "Propagator",
    "propagate",
    "propagate_nonhermitian",
    "nonhermitian_evolution",
]

DENSE_THRESHOLD = 4096


class SingularSystemError(RuntimeError):
    """A linear system was singular or too ill-conditioned to trust."""


class PropagationError(RuntimeError):
    """Time propagation could not reach the requested accuracy."""


class Spectrum(NamedTuple):
    values: np.ndarray
    vectors: np.ndarray


def _as_dense(h) -> np.ndarray:
    return h.toarray() if sp.issparse(h) else np.asarray(h)


def eigh(h, check_symmetry: bool = True) -> Spectrum:
    """Full spectrum of a real-symmetric matrix, eigenvalues ascending.

    Degenerate subspaces come back with whatever orthonormal basis LAPACK
    chooses; downstream observables must not depend on that choice.
    """
    a = _as_dense(h)
    if check_symmetry:
        scale = np.abs(a).max() or 1.0
        if np.abs(a - a.T).max() > 1e-12 * scale:
            raise ValueError("matrix is not symmetric within 1e-12 relative tolerance")
    values, vectors = np.linalg.eigh(a)
    return Spectrum(values, vectors)


def _inverse_norm_estimate(solve, solve_adjoint, n: int) -> float:
    op = spla.LinearOperator(
        (n, n), matvec=solve, rmatvec=solve_adjoint, dtype=complex
    )
    return spla.onenormest(op)


def solve_complex(a, b: np.ndarray, cond_warn: float = 1e12) -> np.ndarray:
    """Solve ``A x = b`` for complex ``A``, with an explicit failure on garbage.

    The residual is checked against ``1e-9 * ||b||``; a violation (or a
    factorization breakdown) raises :class:`SingularSystemError` instead of
    returning an inaccurate vector.  A one-norm condition estimate above
    ``cond_warn`` triggers a warning.
    """
    b = np.asarray(b, dtype=complex)
    n = b.shape[0]
    try:
        if sp.issparse(a):
            lu = spla.splu(a.tocsc())
            solve = lu.solve
            solve_adjoint = lambda x: lu.solve(x, trans="H")  # noqa: E731
            a_norm1 = spla.norm(a, 1)
        else:
            lu_piv = scipy.linalg.lu_factor(np.asarray(a, dtype=complex))
            solve = lambda x: scipy.linalg.lu_solve(lu_piv, x)  # noqa: E731
            solve_adjoint = lambda x: scipy.linalg.lu_solve(  # noqa: E731
                lu_piv, x, trans=2
            )
            a_norm1 = np.abs(a).sum(axis=0).max()
        x = solve(b)
    except (RuntimeError, scipy.linalg.LinAlgError, ValueError) as exc:
        raise SingularSystemError(f"linear solve failed: {exc}") from exc

    b_norm = np.linalg.norm(b)
    residual = np.linalg.norm((a @ x) - b)
    if not np.isfinite(residual) or residual > 1e-9 * max(b_norm, 1e-300):
        raise SingularSystemError(
            f"solution residual {residual:.3e} exceeds 1e-9 * ||b|| = {1e-9 * b_norm:.3e}"
        )
    if cond_warn is not None:
        cond = a_norm1 * _inverse_norm_estimate(solve, solve_adjoint, n)
        if cond > cond_warn:
            import warnings

            warnings.warn(
                f"linear system condition estimate {cond:.3e} exceeds {cond_warn:.1e}",
                stacklevel=2,
            )
    return x


def _spectral_bound(h) -> float:
    """Infinity-norm upper bound on the spectral radius of a symmetric matrix."""
    if sp.issparse(h):
        return abs(h).sum(axis=1).max()
    return np.abs(h).sum(axis=1).max()


def _chebyshev_coefficients(z: float, tol: float) -> np.ndarray:
    """Coefficients ``(2 - delta_m0) (-i)^m J_m(z)`` truncated below ``tol``.

    The Bessel tail decays superexponentially once ``m > z``, so the order
    is found by extending the coefficient table until the tail falls below
    ``tol / 10``.
    """
    cap = int(10 * z) + 100_000
    m_max = int(z) + 32
    while True:
        orders = np.arange(m_max + 1)
        bessel = jv(orders, z)
        small = np.abs(bessel) < tol / 10
        # keep through the last coefficient that still matters
        if small[-8:].all():
            cut = len(bessel) - np.argmin(small[::-1])  # first large from the end
            coeff = bessel[: cut + 1].astype(complex)
            coeff[1:] *= 2.0 * (-1j) ** orders[1 : cut + 1]
            return coeff
        if m_max > cap:
            raise PropagationError(
                f"Chebyshev order exceeded cap {cap} for z = {z:.3e} at tol {tol:.1e}"
            )
        m_max *= 2


class Propagator:
    """Immutable applier of ``exp(-iHt)`` for a fixed Hermitian ``H``.

    Below ``dense_threshold`` the matrix is diagonalized once and reused;
    above it each application runs a Chebyshev expansion rescaled by the
    spectral bound (``gamma * max_degree + max|onsite|`` for walk
    Hamiltonians, obtained here as the infinity norm).
    """

    def __init__(self, h, tol: float = 1e-8, dense_threshold: int = DENSE_THRESHOLD):
        self.tol = tol
        n = h.shape[0]
        self.dimension = n
        if n <= dense_threshold:
            self._spectrum = eigh(h)
            self._scaled = None
            self.bound = float(np.abs(self._spectrum.values).max())
        else:
            self._spectrum = None
            bound = float(_spectral_bound(h))
            self.bound = bound
            self._scaled = sp.csr_matrix(h) * (1.0 / bound)

    def apply(self, psi: np.ndarray, t: float) -> np.ndarray:
        if t < 0:
            raise ValueError(f"time must be >= 0, got {t}")
        if t == 0:
            return psi.astype(complex, copy=True)
        if self._spectrum is not None:
            values, vectors = self._spectrum
            return vectors @ (np.exp(-1j * values * t) * (vectors.conj().T @ psi))
        coeff = _chebyshev_coefficients(self.bound * t, self.tol)
        phi_prev = psi.astype(complex)
        acc = coeff[0] * phi_prev
        if len(coeff) > 1:
            phi = self._scaled @ phi_prev
            acc = acc + coeff[1] * phi
            for c in coeff[2:]:
                phi_prev, phi = phi, 2.0 * (self._scaled @ phi) - phi_prev
                acc += c * phi
        return acc


def propagate(
    h,
    psi0: np.ndarray,
    t: float,
    tol: float = 1e-8,
    dense_threshold: int = DENSE_THRESHOLD,
) -> np.ndarray:
    """One-shot ``exp(-iHt) psi0`` for Hermitian ``H`` (unit-norm ``psi0``)."""
    return Propagator(h, tol=tol, dense_threshold=dense_threshold).apply(psi0, t)


class NonHermitianEvolution:
    """Evolution under a decaying complex generator ``K`` (``exp(-iKt)``).

    ``K`` must have a negative-semidefinite anti-Hermitian part (pure decay);
    any growing direction is rejected up front, and a norm increase beyond
    tolerance at evaluation time raises, since it signals a sign error.
    """

    def __init__(self, k_matrix, tol: float = 1e-8):
        k = np.asarray(_as_dense(k_matrix), dtype=complex)
        anti = (k - k.conj().T) / 2j
        gain = np.linalg.eigvalsh(anti).max()
        scale = max(np.abs(k).max(), 1.0)
        if gain > tol * scale:
            raise ValueError(
                f"anti-Hermitian part has a growing direction ({gain:.3e} > 0)"
            )
        self.tol = tol
        values, vectors = scipy.linalg.eig(k)
        self._values = values
        self._vectors = vectors
        self._vectors_inv = np.linalg.inv(vectors)

    def apply(self, psi: np.ndarray, t: float) -> np.ndarray:
        if t < 0:
            raise ValueError(f"time must be >= 0, got {t}")
        out = self._vectors @ (
            np.exp(-1j * self._values * t) * (self._vectors_inv @ psi)
        )
        drift = np.linalg.norm(out) - np.linalg.norm(psi)
        if drift > self.tol:
            raise PropagationError(
                f"norm increased by {drift:.3e} under a decay generator"
            )
        return out


def nonhermitian_evolution(k_matrix, tol: float = 1e-8) -> NonHermitianEvolution:
    return NonHermitianEvolution(k_matrix, tol=tol)


def propagate_nonhermitian(
    k_matrix, psi0: np.ndarray, t: float, tol: float = 1e-8
) -> np.ndarray:
    """One-shot ``exp(-iKt) psi0`` for a decay-only complex generator ``K``."""
    return NonHermitianEvolution(k_matrix, tol=tol).apply(psi0, t)
