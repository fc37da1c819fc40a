"""Dense complex linear algebra and operators on the resonator-resonator-atom space.

Matrices are plain ``numpy.ndarray`` objects of dtype ``complex128`` stored
row-major. The subsystem order is fixed everywhere: slot 1 is resonator 1,
slot 2 is resonator 2, slot 3 is the atom, so that the basis ket
``|n1 n2 a>`` has flat index ``(n1 * d2 + n2) * 2 + a``.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass
from functools import reduce

import numpy as np
import scipy.linalg
from scipy.linalg import lapack

from .errors import (
    InvalidArgumentError,
    InvalidDimensionError,
    InvalidEmbeddingError,
    SingularSystemError,
)

# relative to the matrix norm
ZERO_EIGENVALUE_TOL = 1e-10


@dataclass(frozen=True)
class HilbertLayout:
    """Subsystem dimensions in the fixed (resonator 1, resonator 2, atom) order."""

    dims: tuple[int, ...]

    def __post_init__(self):
        dims = tuple(int(d) for d in self.dims)
        object.__setattr__(self, "dims", dims)
        if any(d < 2 for d in dims):
            raise InvalidDimensionError(f"every subsystem needs dimension >= 2, got {dims}")
        if len(dims) == 3 and dims[2] != 2:
            raise InvalidDimensionError(f"the atom is a two-level system, got dimension {dims[2]}")

    @classmethod
    def for_truncation(cls, n_max: int = 1) -> "HilbertLayout":
        """Layout keeping Fock states ``0..n_max`` in each resonator."""
        if n_max < 1:
            raise InvalidDimensionError(f"n_max must be >= 1, got {n_max}")
        return cls((n_max + 1, n_max + 1, 2))

    @property
    def total(self) -> int:
        return int(np.prod(self.dims))

    @property
    def n_max(self) -> int:
        return self.dims[0] - 1

    def index(self, *levels: int) -> int:
        """Flat index of the product basis ket with the given per-slot levels."""
        if len(levels) != len(self.dims):
            raise InvalidArgumentError(f"expected {len(self.dims)} levels, got {len(levels)}")
        return int(np.ravel_multi_index(levels, self.dims))

    def basis(self, *levels: int) -> np.ndarray:
        ket = np.zeros(self.total, dtype=complex)
        ket[self.index(*levels)] = 1.0
        return ket


def identity(d: int) -> np.ndarray:
    return np.eye(d, dtype=complex)


def zeros(rows: int, cols: int | None = None) -> np.ndarray:
    return np.zeros((rows, rows if cols is None else cols), dtype=complex)


def dag(m: np.ndarray) -> np.ndarray:
    return m.conj().T


def annihilation(d: int) -> np.ndarray:
    """Truncated bosonic lowering operator, ``<n-1|a|n> = sqrt(n)``."""
    if d < 2:
        raise InvalidDimensionError(f"ladder operator needs d >= 2, got {d}")
    return np.diag(np.sqrt(np.arange(1, d)), k=1).astype(complex)


def sigma_minus() -> np.ndarray:
    """|g><e| with basis order (ground, excited)."""
    return np.array([[0, 1], [0, 0]], dtype=complex)


def sigma_plus() -> np.ndarray:
    return dag(sigma_minus())


def sigma_z() -> np.ndarray:
    return np.diag([-1.0, 1.0]).astype(complex)


def sigma_y() -> np.ndarray:
    return np.array([[0, -1j], [1j, 0]], dtype=complex)


def kron(*ops: np.ndarray) -> np.ndarray:
    """Kronecker product of one or more matrices, left to right."""
    return reduce(np.kron, ops)


def embed(op: np.ndarray, slot: int, layout: HilbertLayout) -> np.ndarray:
    """Place ``op`` on subsystem ``slot`` (1-based) with identities elsewhere."""
    if not 1 <= slot <= len(layout.dims):
        raise InvalidEmbeddingError(f"slot {slot} outside 1..{len(layout.dims)}")
    d = layout.dims[slot - 1]
    op = np.asarray(op, dtype=complex)
    if op.shape != (d, d):
        raise InvalidEmbeddingError(f"operator shape {op.shape} does not match slot {slot} dimension {d}")
    factors = [op if k == slot - 1 else identity(dk) for k, dk in enumerate(layout.dims)]
    return kron(*factors)


def partial_trace(rho: np.ndarray, layout: HilbertLayout, keep) -> np.ndarray:
    """Reduce ``rho`` to the subsystems in ``keep`` (1-based slot indices).

    The kept subsystems stay in layout order regardless of the order in
    ``keep``.
    """
    keep = sorted(set(int(k) for k in keep))
    if not keep:
        raise InvalidArgumentError("partial_trace needs at least one subsystem to keep")
    n = len(layout.dims)
    if keep[0] < 1 or keep[-1] > n:
        raise InvalidArgumentError(f"subsystem indices must be in 1..{n}, got {keep}")
    rho = np.asarray(rho)
    if rho.shape != (layout.total, layout.total):
        raise InvalidArgumentError(f"rho has shape {rho.shape}, layout expects {layout.total}")

    tensor = rho.reshape(layout.dims + layout.dims)
    letters = "abcdefghijklmnopqrstuvwxyz"
    row = list(letters[:n])
    col = list(letters[n:2 * n])
    for k in range(n):
        if k + 1 not in keep:
            col[k] = row[k]
    out = "".join(row[k - 1] for k in keep) + "".join(col[k - 1] for k in keep)
    reduced = np.einsum("".join(row) + "".join(col) + "->" + out, tensor)
    dk = int(np.prod([layout.dims[k - 1] for k in keep]))
    return reduced.reshape(dk, dk)


def eigenvalues(m: np.ndarray) -> np.ndarray:
    return scipy.linalg.eigvals(np.asarray(m, dtype=complex))


def hermitian_eigensystem(m: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Ascending real eigenvalues and column eigenvectors of a Hermitian matrix."""
    return scipy.linalg.eigh(np.asarray(m, dtype=complex))


def solve(a: np.ndarray, b: np.ndarray, rcond_min: float = 1e-14) -> np.ndarray:
    """Solve ``a x = b`` by LU with a 1-norm condition estimate.

    Raises
    ------
    SingularSystemError
        If the reciprocal condition estimate falls below ``rcond_min``; the
        error carries the condition estimate.
    """
    a = np.asarray(a, dtype=complex)
    b = np.asarray(b, dtype=complex)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise InvalidArgumentError(f"solve needs a square matrix, got shape {a.shape}")
    anorm = np.linalg.norm(a, 1)
    if anorm == 0.0:
        raise SingularSystemError("matrix is identically zero", condition=float("inf"))
    with warnings.catch_warnings():
        # singularity is reported below through the condition estimate
        warnings.simplefilter("ignore", scipy.linalg.LinAlgWarning)
        lu, piv = scipy.linalg.lu_factor(a, check_finite=True)
    rcond, info = lapack.zgecon(lu, anorm, norm="1")
    if info != 0 or not rcond > rcond_min:
        cond = float("inf") if rcond == 0 else 1.0 / rcond
        raise SingularSystemError(f"system is numerically singular (condition ~ {cond:.3e})", condition=cond)
    return scipy.linalg.lu_solve((lu, piv), b)


def expect(op: np.ndarray, rho: np.ndarray) -> complex:
    return complex(np.trace(op @ rho))


def trace_distance(rho: np.ndarray, sigma: np.ndarray) -> float:
    """Half the trace norm of ``rho - sigma`` (both Hermitian)."""
    diff = np.asarray(rho) - np.asarray(sigma)
    diff = 0.5 * (diff + dag(diff))
    return 0.5 * float(np.sum(np.abs(np.linalg.eigvalsh(diff))))
