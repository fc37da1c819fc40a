"""Lindblad dissipators, Liouvillian assembly, steady states and time evolution.

Vectorization is column stacking, ``vec(rho)[i + d*j] = rho[i, j]``, so that
``vec(A X B) = (B^T kron A) vec(X)`` and

    L = -i (I kron H - H^T kron I)
        + sum_k rate_k [conj(O_k) kron O_k - 1/2 I kron O_k^+ O_k - 1/2 (O_k^+ O_k)^T kron I]
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp
import scipy.sparse.linalg as sla

from . import kernels
from .errors import (
    DegenerateSteadyStateError,
    InvalidArgumentError,
    InvalidDimensionError,
    InvalidStateError,
    SingularSystemError,
    StepSizeError,
)
from .model import HamiltonianKind, Operators, SystemParams, build_hamiltonian
from .quantum import HilbertLayout, dag, eigenvalues, solve

log = logging.getLogger(__name__)

HERMITIAN_TOL = 1e-10
TRACE_TOL = 1e-10
PSD_TOL = 1e-8
GAP_TOL = 1e-8
RESIDUAL_TOL = 1e-8


def vec(rho: np.ndarray) -> np.ndarray:
    return np.asarray(rho).reshape(-1, order="F")


def unvec(v: np.ndarray, dim: int | None = None) -> np.ndarray:
    v = np.asarray(v)
    if dim is None:
        dim = math.isqrt(v.size)
    return v.reshape(dim, dim, order="F")


@dataclass(frozen=True)
class CollapseChannel:
    operator: np.ndarray
    rate: float

    def __post_init__(self):
        if not self.rate >= 0.0:
            raise InvalidArgumentError(f"collapse rate must be non-negative, got {self.rate}")
        op = np.asarray(self.operator, dtype=complex)
        if op.ndim != 2 or op.shape[0] != op.shape[1]:
            raise InvalidDimensionError(f"collapse operator must be square, got {op.shape}")
        object.__setattr__(self, "operator", op)


@dataclass(frozen=True, eq=False)
class DensityMatrix:
    """A validated density matrix: Hermitian, unit trace, positive semidefinite.

    ``info`` carries solver diagnostics (spectral gap, residual, ...) and
    does not take part in validation.
    """

    matrix: np.ndarray
    layout: HilbertLayout
    info: dict = field(default_factory=dict)

    def __post_init__(self):
        m = np.array(self.matrix, dtype=complex)
        m.setflags(write=False)
        object.__setattr__(self, "matrix", m)
        if m.shape != (self.layout.total, self.layout.total):
            raise InvalidStateError(f"matrix shape {m.shape} does not match layout total {self.layout.total}")
        herm = float(np.max(np.abs(m - dag(m)))) if m.size else 0.0
        if herm > HERMITIAN_TOL:
            raise InvalidStateError(f"density matrix is not Hermitian (max deviation {herm:.3e})")
        tr = complex(np.trace(m))
        if abs(tr - 1.0) > TRACE_TOL:
            raise InvalidStateError(f"density matrix trace is {tr}, expected 1")
        min_eig = float(np.linalg.eigvalsh(0.5 * (m + dag(m)))[0])
        if min_eig < -PSD_TOL:
            raise InvalidStateError(f"density matrix has eigenvalue {min_eig:.3e} < -{PSD_TOL}")

    @classmethod
    def from_ket(cls, ket, layout: HilbertLayout) -> "DensityMatrix":
        ket = np.asarray(ket, dtype=complex)
        ket = ket / np.linalg.norm(ket)
        return cls(np.outer(ket, ket.conj()), layout)

    @classmethod
    def coerce(cls, m, layout: HilbertLayout, info=None) -> "DensityMatrix":
        """Hermitize and renormalize a numerically computed matrix, then validate."""
        m = np.asarray(m, dtype=complex)
        m = 0.5 * (m + dag(m))
        m = m / np.trace(m).real
        return cls(m, layout, dict(info or {}))

    @property
    def dim(self) -> int:
        return self.layout.total

    def expect(self, op: np.ndarray) -> complex:
        return complex(np.trace(op @ self.matrix))

    def min_eigenvalue(self) -> float:
        return float(np.linalg.eigvalsh(self.matrix)[0])


@dataclass(frozen=True, eq=False)
class Liouvillian:
    matrix: np.ndarray
    layout: HilbertLayout

    def __post_init__(self):
        n = self.layout.total
        if self.matrix.shape != (n * n, n * n):
            raise InvalidDimensionError(f"Liouvillian shape {self.matrix.shape} does not fit layout total {n}")

    def apply(self, rho: np.ndarray) -> np.ndarray:
        return unvec(self.matrix @ vec(rho), self.layout.total)

    def spectrum(self) -> np.ndarray:
        return eigenvalues(self.matrix)


def dissipator_action(op: np.ndarray, rho: np.ndarray) -> np.ndarray:
    """O rho O^+ - 1/2 {O^+ O, rho}."""
    op = np.asarray(op, dtype=complex)
    rho = np.asarray(rho, dtype=complex)
    if op.shape != rho.shape or op.shape[0] != op.shape[1]:
        raise InvalidDimensionError(f"operator {op.shape} and rho {rho.shape} are not conformable")
    od = dag(op)
    odo = od @ op
    return op @ rho @ od - 0.5 * (odo @ rho + rho @ odo)


def lindblad_rhs(h: np.ndarray, channels, rho: np.ndarray) -> np.ndarray:
    """Right-hand side of the master equation evaluated directly on matrices."""
    out = -1j * (h @ rho - rho @ h)
    for ch in channels:
        out = out + ch.rate * dissipator_action(ch.operator, rho)
    return out


def build_liouvillian(h: np.ndarray, channels=(), layout: HilbertLayout | None = None) -> Liouvillian:
    h = np.asarray(h, dtype=complex)
    n = h.shape[0]
    if h.shape != (n, n):
        raise InvalidDimensionError(f"Hamiltonian must be square, got {h.shape}")
    scale = max(1.0, float(np.max(np.abs(h)))) if h.size else 1.0
    if np.max(np.abs(h - dag(h)), initial=0.0) > 1e-12 * scale:
        raise InvalidArgumentError("coherent part must be Hermitian; pass decay through collapse channels")
    if layout is None:
        layout = HilbertLayout((n,)) if n >= 2 else None
    if layout is None or layout.total != n:
        raise InvalidDimensionError(f"layout does not match Hamiltonian dimension {n}")
    eye = np.eye(n, dtype=complex)
    lv = -1j * (np.kron(eye, h) - np.kron(h.T, eye))
    for ch in channels:
        op = ch.operator
        if op.shape != (n, n):
            raise InvalidDimensionError(f"collapse operator shape {op.shape} does not match dimension {n}")
        if ch.rate == 0.0:
            continue
        odo = dag(op) @ op
        lv += ch.rate * (np.kron(op.conj(), op) - 0.5 * np.kron(eye, odo) - 0.5 * np.kron(odo.T, eye))
    return Liouvillian(lv, layout)


def collapse_channels(p: SystemParams, layout: HilbertLayout) -> list[CollapseChannel]:
    ops = Operators.for_layout(layout)
    return [
        CollapseChannel(ops.a1, p.kappa1),
        CollapseChannel(ops.a2, p.kappa2),
        CollapseChannel(ops.sm, p.gamma),
    ]


def system_liouvillian(p: SystemParams, layout: HilbertLayout | None = None) -> Liouvillian:
    """Liouvillian of the full driven-dissipative model on ``layout``."""
    layout = layout or HilbertLayout.for_truncation(1)
    h = build_hamiltonian(p, layout, HamiltonianKind.ROTATING_FRAME)
    return build_liouvillian(h, collapse_channels(p, layout), layout)


DENSE_SPECTRUM_MAX = 256


def spectral_gap(lv: Liouvillian) -> float:
    """Second-smallest eigenvalue magnitude of the Liouvillian.

    Small Liouvillians use the full dense spectrum. Larger ones use ARPACK
    shift-invert just below zero, which returns the three eigenvalues
    nearest the origin; the dense path is the fallback if that fails.
    """
    n = lv.matrix.shape[0]
    if n > DENSE_SPECTRUM_MAX:
        sigma = -1e-6 * max(1.0, float(np.max(np.abs(lv.matrix))))
        try:
            w = sla.eigs(sp.csc_matrix(lv.matrix), k=3, sigma=sigma, which="LM",
                         return_eigenvectors=False, tol=0)
            return float(np.sort(np.abs(w))[1])
        except (sla.ArpackError, RuntimeError):
            log.debug("shift-invert spectrum failed; falling back to dense eigenvalues")
    mags = np.sort(np.abs(lv.spectrum()))
    return float(mags[1]) if mags.size > 1 else float("inf")


def _trace_row(d: int) -> np.ndarray:
    row = np.zeros(d * d, dtype=complex)
    row[np.arange(d) * (d + 1)] = 1.0
    return row


def nullspace_steady_state(lv: Liouvillian) -> np.ndarray:
    """Eigenvector of the eigenvalue closest to zero, scaled to unit trace."""
    w, v = np.linalg.eig(lv.matrix)
    k = int(np.argmin(np.abs(w)))
    rho = unvec(v[:, k], lv.layout.total)
    return rho / np.trace(rho)


def steady_state(lv: Liouvillian, check_gap: bool = True) -> DensityMatrix:
    """Unique stationary state of ``lv``.

    One row of the Liouvillian is replaced by the trace functional and the
    resulting square system is solved. The eigen-nullspace route is used
    only if that system is numerically singular.

    Raises
    ------
    DegenerateSteadyStateError
        If the second-smallest eigenvalue magnitude is not above 1e-8.
    """
    d = lv.layout.total
    info = {}
    if check_gap:
        gap = spectral_gap(lv)
        info["spectral_gap"] = gap
        if gap <= GAP_TOL:
            raise DegenerateSteadyStateError(
                f"Liouvillian has a degenerate zero eigenvalue (spectral gap {gap:.3e})", gap=gap
            )
    a = lv.matrix.copy()
    a[0, :] = _trace_row(d)
    b = np.zeros(d * d, dtype=complex)
    b[0] = 1.0
    try:
        rho = unvec(solve(a, b), d)
        info["method"] = "trace_row"
    except SingularSystemError as exc:
        log.warning("trace-row system singular (cond %.3e); falling back to eigen nullspace", exc.condition)
        rho = nullspace_steady_state(lv)
        info["method"] = "nullspace"
    state = DensityMatrix.coerce(rho, lv.layout, info)
    residual = float(np.linalg.norm(lv.matrix @ vec(state.matrix)))
    state.info["residual"] = residual
    if residual > RESIDUAL_TOL:
        raise DegenerateSteadyStateError(
            f"steady-state residual {residual:.3e} exceeds {RESIDUAL_TOL}", gap=info.get("spectral_gap", float("nan"))
        )
    return state


def _spectral_radius_ok(matrix: np.ndarray, dt: float) -> float:
    bound = float(np.linalg.norm(matrix, 1))
    if dt * bound < 1.0:
        return bound
    radius = float(np.max(np.abs(eigenvalues(matrix)))) if matrix.size else 0.0
    if dt * radius >= 1.0:
        raise StepSizeError(f"dt * spectral radius = {dt * radius:.3f} >= 1; reduce dt")
    return radius


def _kernel(backend: str):
    if backend == "auto":
        return kernels.rk4_evolve
    if backend == "compiled":
        if kernels.compiled is None:
            raise InvalidArgumentError("compiled kernels are not available in this build")
        return kernels.compiled.rk4_evolve
    if backend == "python":
        return kernels.fallback.rk4_evolve
    raise InvalidArgumentError(f"unknown backend {backend!r}")


def integrate(rho0: np.ndarray, lv: Liouvillian, t_final: float, dt: float = 1e-3,
              backend: str = "auto") -> tuple[np.ndarray, float]:
    """Raw RK4 propagation of a matrix; returns ``(rho(t_final), dt_used)``.

    No renormalization or state validation is applied, which makes this the
    right tool for convergence-order studies.
    """
    if not t_final > 0:
        raise InvalidArgumentError(f"t_final must be positive, got {t_final}")
    if not dt > 0:
        raise InvalidArgumentError(f"dt must be positive, got {dt}")
    d = lv.layout.total
    rho0 = np.asarray(rho0, dtype=complex)
    if rho0.shape != (d, d):
        raise InvalidDimensionError("initial state and Liouvillian layouts differ")
    nsteps = max(1, math.ceil(t_final / dt - 1e-9))
    dt = t_final / nsteps
    _spectral_radius_ok(lv.matrix, dt)
    v, taken, max_dev = _kernel(backend)(np.ascontiguousarray(lv.matrix), vec(rho0).copy(), dt, nsteps, d, 1e-2)
    if taken < nsteps or not np.all(np.isfinite(v)):
        raise StepSizeError(f"integration unstable after {taken} steps (trace deviation {max_dev:.3e})")
    return unvec(v, d), dt


def evolve(
    rho0: DensityMatrix,
    lv: Liouvillian,
    t_final: float,
    dt: float = 1e-3,
    backend: str = "auto",
) -> DensityMatrix:
    """Integrate d rho/dt = L rho with fixed-step RK4 up to ``t_final``.

    ``dt`` is shrunk slightly if needed so that an integer number of steps
    lands exactly on ``t_final``. ``backend`` is ``"auto"``, ``"compiled"``
    or ``"python"``.

    Raises
    ------
    StepSizeError
        If ``dt`` times the spectral radius of ``lv`` is not below 1, or the
        trace drifts by more than 1e-2 during integration.
    """
    if rho0.layout.total != lv.layout.total:
        raise InvalidDimensionError("initial state and Liouvillian layouts differ")
    rho, dt = integrate(rho0.matrix, lv, t_final, dt, backend)
    deviation = abs(complex(np.trace(rho)) - 1.0)
    if deviation > 1e-6:
        log.warning("trace drifted by %.3e before renormalization", deviation)
    info = {"trace_deviation": deviation, "steps": round(t_final / dt), "dt": dt}
    return DensityMatrix.coerce(rho, lv.layout, info)
