"""Physical parameters and Hamiltonian builders.

All rates and detunings are dimensionless, measured in units of the cavity
decay rate. The atomic term is ``(delta_a / 2) * sigma_z``, so the bare
ground state ``|000>`` sits at energy ``-delta_a / 2``; only energy
differences matter for the dynamics.
"""

from __future__ import annotations

import dataclasses
import enum
import math
from dataclasses import dataclass

import numpy as np

from .errors import InconsistentParametersError, InvalidArgumentError
from .quantum import HilbertLayout, annihilation, dag, embed, sigma_minus, sigma_z

PARAM_NAMES = (
    "delta1",
    "delta2",
    "delta_a",
    "J",
    "g",
    "omega1",
    "omega2",
    "kappa1",
    "kappa2",
    "gamma",
)


@dataclass(frozen=True)
class SystemParams:
    delta1: float = 0.0
    delta2: float = 0.0
    delta_a: float = 0.0
    J: float = 0.0
    g: float = 0.0
    omega1: float = 0.0
    omega2: float = 0.0
    kappa1: float = 1.0
    kappa2: float = 1.0
    gamma: float = 0.0

    def __post_init__(self):
        for name in PARAM_NAMES:
            value = getattr(self, name)
            if isinstance(value, complex) or not math.isfinite(float(value)):
                raise InvalidArgumentError(f"{name} must be a finite real number, got {value!r}")
            object.__setattr__(self, name, float(value))
        for name in ("kappa1", "kappa2", "gamma"):
            if getattr(self, name) < 0:
                raise InvalidArgumentError(f"{name} must be non-negative, got {getattr(self, name)}")

    @property
    def symmetric_cavities(self) -> bool:
        return self.delta1 == self.delta2 and self.kappa1 == self.kappa2

    @property
    def delta(self) -> float:
        """Common resonator detuning (only meaningful for symmetric cavities)."""
        return self.delta1

    @property
    def kappa(self) -> float:
        return self.kappa1

    def replace(self, **changes) -> "SystemParams":
        """Copy with fields replaced; ``delta``, ``kappa`` and ``omega`` set both resonators."""
        for alias, pair in (("delta", ("delta1", "delta2")), ("kappa", ("kappa1", "kappa2")),
                            ("omega", ("omega1", "omega2"))):
            if alias in changes:
                value = changes.pop(alias)
                for name in pair:
                    changes.setdefault(name, value)
        unknown = set(changes) - set(PARAM_NAMES)
        if unknown:
            raise InvalidArgumentError(f"unknown parameter(s): {sorted(unknown)}")
        return dataclasses.replace(self, **changes)

    def scaled(self, factor: float) -> "SystemParams":
        return SystemParams(**{name: factor * getattr(self, name) for name in PARAM_NAMES})

    def as_dict(self) -> dict:
        return dataclasses.asdict(self)


class HamiltonianKind(enum.Enum):
    ROTATING_FRAME = "rotating_frame"
    EFFECTIVE_NON_HERMITIAN = "effective_non_hermitian"
    JAYNES_CUMMINGS = "jaynes_cummings"


@dataclass(frozen=True)
class Operators:
    """Embedded ladder and number operators for one layout."""

    a1: np.ndarray
    a2: np.ndarray
    sm: np.ndarray
    sz: np.ndarray
    n1: np.ndarray
    n2: np.ndarray
    excited: np.ndarray

    @classmethod
    def for_layout(cls, layout: HilbertLayout) -> "Operators":
        a1 = embed(annihilation(layout.dims[0]), 1, layout)
        a2 = embed(annihilation(layout.dims[1]), 2, layout)
        sm = embed(sigma_minus(), 3, layout)
        return cls(
            a1=a1,
            a2=a2,
            sm=sm,
            sz=embed(sigma_z(), 3, layout),
            n1=dag(a1) @ a1,
            n2=dag(a2) @ a2,
            excited=dag(sm) @ sm,
        )


def build_hamiltonian(
    p: SystemParams,
    layout: HilbertLayout | None = None,
    kind: HamiltonianKind = HamiltonianKind.ROTATING_FRAME,
) -> np.ndarray:
    """Assemble the rotating-frame Hamiltonian on ``layout``.

    ``EFFECTIVE_NON_HERMITIAN`` adds the decay terms
    ``-i kappa_j/2 n_j - i gamma/2 sigma_+ sigma_-``. ``JAYNES_CUMMINGS``
    is the rotating-frame Hamiltonian with the second resonator decoupled
    and undriven; it refuses parameters with nonzero ``J`` or ``omega2``.
    """
    layout = layout or HilbertLayout.for_truncation(1)
    kind = HamiltonianKind(kind)
    if kind is HamiltonianKind.JAYNES_CUMMINGS and (p.J != 0.0 or p.omega2 != 0.0):
        raise InconsistentParametersError(
            f"Jaynes-Cummings reduction requires J = 0 and omega2 = 0 (got J={p.J}, omega2={p.omega2})"
        )
    ops = Operators.for_layout(layout)
    a1, a2, sm = ops.a1, ops.a2, ops.sm
    h = (
        p.delta1 * ops.n1
        + p.delta2 * ops.n2
        + 0.5 * p.delta_a * ops.sz
        + p.J * (dag(a1) @ a2 + dag(a2) @ a1)
        + p.g * (dag(a1) @ sm + a1 @ dag(sm))
        + p.omega1 * (dag(a1) + a1)
        + p.omega2 * (dag(a2) + a2)
    )
    if kind is HamiltonianKind.EFFECTIVE_NON_HERMITIAN:
        h = h - 0.5j * (p.kappa1 * ops.n1 + p.kappa2 * ops.n2 + p.gamma * ops.excited)
    return h


def anti_hermitian_part(h: np.ndarray) -> np.ndarray:
    h = np.asarray(h)
    if h.ndim != 2 or h.shape[0] != h.shape[1]:
        raise InvalidArgumentError(f"expected a square matrix, got shape {h.shape}")
    return 0.5 * (h - dag(h))


def single_excitation_block(p: SystemParams, layout: HilbertLayout | None = None) -> np.ndarray:
    """Effective Hamiltonian on span{|000>, |100>, |010>, |001>}, shifted so <000|H|000> = 0.

    The lower-right 3x3 block is the weak-drive coefficient matrix
    ``[[A, J, g], [J, B, 0], [g, 0, C]]`` and the first column carries the
    drives.
    """
    layout = layout or HilbertLayout.for_truncation(1)
    h = build_hamiltonian(p, layout, HamiltonianKind.EFFECTIVE_NON_HERMITIAN)
    idx = [layout.index(0, 0, 0), layout.index(1, 0, 0), layout.index(0, 1, 0), layout.index(0, 0, 1)]
    block = h[np.ix_(idx, idx)]
    return block - h[idx[0], idx[0]] * np.eye(4)
