"""Bipartite and tripartite entanglement measures.

The one-vs-rest edge ``C_i(jk) = sqrt(2 (1 - Tr rho_i^2))`` is an entanglement
monotone only for pure states. On mixed steady states it is still evaluated
as is and should be read as a purity-based edge.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .analytic import WeakDriveAmplitudes
from .errors import InvalidArgumentError, InvalidStateError, PolygonViolationError
from .lindblad import DensityMatrix
from .quantum import HilbertLayout, kron, partial_trace, sigma_y

POLYGON_TOL = 1e-9
WOOTTERS_CLIP = 1e-10
QUBITS3 = HilbertLayout((2, 2, 2))


@dataclass(frozen=True)
class ConcurrenceTriangle:
    c1_23: float
    c2_31: float
    c3_12: float
    fill: float | None = None
    polygon_ok: bool = True
    projection_weight: float = 1.0

    @property
    def edges(self) -> tuple[float, float, float]:
        return (self.c1_23, self.c2_31, self.c3_12)


def _check_two_qubit(rho: np.ndarray) -> np.ndarray:
    rho = np.asarray(rho, dtype=complex)
    if rho.shape != (4, 4):
        raise InvalidStateError(f"Wootters concurrence needs a 4x4 density matrix, got {rho.shape}")
    if np.max(np.abs(rho - rho.conj().T)) > 1e-10:
        raise InvalidStateError("two-qubit state is not Hermitian")
    if abs(np.trace(rho) - 1.0) > 1e-10:
        raise InvalidStateError(f"two-qubit state has trace {np.trace(rho)}")
    if np.linalg.eigvalsh(rho)[0] < -1e-8:
        raise InvalidStateError("two-qubit state is not positive semidefinite")
    return rho


def _psd_sqrt(rho: np.ndarray) -> np.ndarray:
    w, v = np.linalg.eigh(rho)
    return (v * np.sqrt(np.clip(w, 0.0, None))) @ v.conj().T


def wootters_concurrence(rho) -> float:
    """max(0, l1 - l2 - l3 - l4) from the spectrum of rho (sy x sy) rho* (sy x sy).

    The ``l_i`` (square roots of that spectrum) are taken as the singular
    values of ``sqrt(rho) (sy x sy) sqrt(rho)*``, which avoids square-rooting
    roundoff-sized eigenvalues. The general eigenvalues of the product are
    still computed to reject unphysical input.
    """
    if isinstance(rho, DensityMatrix):
        rho = rho.matrix
    rho = _check_two_qubit(rho)
    yy = kron(sigma_y(), sigma_y())
    ev = np.linalg.eigvals(rho @ yy @ rho.conj() @ yy).real
    if ev.min() < -WOOTTERS_CLIP:
        raise InvalidStateError(f"spin-flipped product has eigenvalue {ev.min():.3e}; state is not physical")
    root = _psd_sqrt(0.5 * (rho + rho.conj().T))
    lam = np.linalg.svd(root @ yy @ root.conj(), compute_uv=False)
    return float(max(0.0, lam[0] - lam[1] - lam[2] - lam[3]))


def purity_concurrence(reduced: np.ndarray) -> float:
    """sqrt(2 (1 - Tr rho^2)) of a (trace-normalized) reduced state.

    ``1 - Tr rho^2`` is accumulated as the sum of 2x2 principal minors,
    ``sum_{i != j} (rho_ii rho_jj - |rho_ij|^2)``, which equals
    ``(Tr rho)^2 - Tr rho^2`` exactly but does not cancel catastrophically
    for nearly pure states.
    """
    reduced = np.asarray(reduced, dtype=complex)
    diag = np.real(np.diag(reduced))
    tr = float(diag.sum())
    minors = np.outer(diag, diag) - np.abs(reduced) ** 2
    np.fill_diagonal(minors, 0.0)
    return math.sqrt(max(0.0, 2.0 * float(minors.sum()) / (tr * tr)))


def one_vs_rest_concurrence(rho: DensityMatrix, subsystem: int) -> float:
    """sqrt(2 (1 - Tr rho_i^2)) for the reduced state of ``subsystem`` (1-based)."""
    if subsystem not in range(1, len(rho.layout.dims) + 1):
        raise InvalidArgumentError(f"subsystem must be in 1..{len(rho.layout.dims)}, got {subsystem}")
    return purity_concurrence(partial_trace(rho.matrix, rho.layout, [subsystem]))


def polygon_holds(c1: float, c2: float, c3: float, tol: float = POLYGON_TOL) -> bool:
    s = (c1 * c1, c2 * c2, c3 * c3)
    return all(s[i] <= s[(i + 1) % 3] + s[(i + 2) % 3] + tol for i in range(3))


def edge_concurrences(a: WeakDriveAmplitudes) -> ConcurrenceTriangle:
    """Edges of the single-excitation pure state; ``fill`` is left unset."""
    p1, p2, p3 = abs(a.c1) ** 2, abs(a.c2) ** 2, abs(a.c3) ** 2
    c1 = 2.0 * math.sqrt(p1 * (p2 + p3))
    c2 = 2.0 * math.sqrt(p2 * (p3 + p1))
    c3 = 2.0 * math.sqrt(p3 * (p1 + p2))
    return ConcurrenceTriangle(c1, c2, c3, None, polygon_holds(c1, c2, c3))


def concurrence_fill(c1: float, c2: float, c3: float) -> tuple[float, bool]:
    """Concurrence fill ``[16/3 (Q - C1^2)(Q - C2^2)(Q - C3^2) Q]^(1/4)``, ``Q = (C1^2 + C2^2 + C3^2)/2``.

    Factors within 1e-9 below zero are clamped to zero; anything more
    negative violates the polygon inequality.

    Raises
    ------
    PolygonViolationError
        Carrying the three squared edges.
    """
    edges = (float(c1), float(c2), float(c3))
    if any(not (e >= 0.0) for e in edges):
        raise InvalidArgumentError(f"edge concurrences must be non-negative, got {edges}")
    sq = tuple(e * e for e in edges)
    q = 0.5 * sum(sq)
    factors = []
    for s in sq:
        f = q - s
        if f < 0.0:
            if f < -POLYGON_TOL:
                raise PolygonViolationError(
                    f"squared edges {sq} violate the polygon inequality by {-f:.3e}", squared_edges=sq
                )
            f = 0.0
        factors.append(f)
    value = 16.0 / 3.0 * factors[0] * factors[1] * factors[2] * q
    return value ** 0.25, True


def with_fill(tri: ConcurrenceTriangle) -> ConcurrenceTriangle:
    fill, ok = concurrence_fill(*tri.edges)
    return ConcurrenceTriangle(tri.c1_23, tri.c2_31, tri.c3_12, fill, ok, tri.projection_weight)


def project_two_level(rho: DensityMatrix) -> tuple[DensityMatrix, float]:
    """Restrict every subsystem to its two lowest levels and renormalize.

    Returns the projected state on a 2x2x2 layout and the population weight
    that survived the projection.
    """
    dims = rho.layout.dims
    if all(d == 2 for d in dims):
        return rho, 1.0
    keep = [i for i in range(rho.layout.total) if all(l < 2 for l in np.unravel_index(i, dims))]
    block = rho.matrix[np.ix_(keep, keep)]
    weight = float(np.real(np.trace(block)))
    if weight <= 0.0:
        raise InvalidStateError("no population left in the two-level subspace")
    layout = HilbertLayout(tuple(2 for _ in dims))
    return DensityMatrix.coerce(block, layout, {"projection_weight": weight}), weight


def triangle_from_state(rho: DensityMatrix, project: bool = False) -> ConcurrenceTriangle:
    """Edges and fill of a tripartite state with two-level subsystems.

    States with higher resonator truncation must be projected first; pass
    ``project=True`` to do that here.
    """
    weight = 1.0
    if rho.layout.dims != QUBITS3.dims:
        if not project:
            raise InvalidArgumentError(
                f"layout {rho.layout.dims} is not two-level; project_two_level() it first or pass project=True"
            )
        rho, weight = project_two_level(rho)
    edges = tuple(one_vs_rest_concurrence(rho, k) for k in (1, 2, 3))
    fill, ok = concurrence_fill(*edges)
    return ConcurrenceTriangle(*edges, fill, ok, weight)


def bipartite_concurrence(rho: DensityMatrix, pair=(1, 3), project: bool = True) -> float:
    """Wootters concurrence between two subsystems after tracing out the third."""
    if project:
        rho, _ = project_two_level(rho)
    reduced = partial_trace(rho.matrix, rho.layout, pair)
    reduced = 0.5 * (reduced + reduced.conj().T)
    return wootters_concurrence(reduced / np.trace(reduced).real)


def dominant_pure_component(rho: DensityMatrix) -> DensityMatrix:
    """Projector onto the eigenvector with the largest eigenvalue."""
    w, v = np.linalg.eigh(rho.matrix)
    return DensityMatrix.from_ket(v[:, -1], rho.layout)
