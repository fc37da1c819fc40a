"""Closed-form weak-drive amplitudes and resonance formulas.

Tripartite branch
-----------------
With ``c0`` fixed to 1 the single-excitation amplitudes solve

    [[A, J, g], [J, B, 0], [g, 0, C]] @ (c1, c2, c3) = (-omega1, -omega2, 0)

with ``A = B = delta - i kappa/2`` and ``C = delta_a - i gamma/2``. The
amplitudes are obtained by Cramer's rule and normalized afterwards.

The expanded closed forms in :func:`printed_amplitudes` carry the opposite
overall sign for ``c1, c2`` and swap the roles of the two drives in ``c3``;
they solve the system only up to sign when ``omega1 == omega2``. They are
kept for comparison and their residual is reported in
``WeakDriveAmplitudes.printed_residual``.

Jaynes-Cummings branch
----------------------
With ``J = omega2 = 0`` the atomic coefficient is ``delta_a/2 - i gamma/2``
instead of ``delta_a - i gamma/2``. Both conventions are kept as they are;
:func:`jc_equivalent_params` maps one onto the other.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np

from .errors import (
    InconsistentParametersError,
    InvalidArgumentError,
    NearSingularError,
    NoRealSolutionError,
    UnsupportedRegimeError,
)
from .model import SystemParams

SINGULAR_TOL = 1e-12
NORM_TOL = 1e-12


@dataclass(frozen=True)
class WeakDriveAmplitudes:
    """Normalized amplitudes of |000>, |100>, |010>, |001>."""

    c0: complex
    c1: complex
    c2: complex
    c3: complex
    determinant: complex = 0j
    printed_residual: float = 0.0

    def __post_init__(self):
        norm = abs(self.c0) ** 2 + abs(self.c1) ** 2 + abs(self.c2) ** 2 + abs(self.c3) ** 2
        if abs(norm - 1.0) > NORM_TOL:
            raise InvalidArgumentError(f"amplitudes are not normalized (sum of squares {norm!r})")

    @classmethod
    def normalized(cls, c0, c1, c2, c3, **meta) -> "WeakDriveAmplitudes":
        v = np.array([c0, c1, c2, c3], dtype=complex)
        v = v / np.linalg.norm(v)
        return cls(*(complex(x) for x in v), **meta)

    def as_array(self) -> np.ndarray:
        return np.array([self.c0, self.c1, self.c2, self.c3], dtype=complex)

    def ket(self, layout=None) -> np.ndarray:
        """State vector on ``layout`` (default two Fock states per resonator)."""
        from .quantum import HilbertLayout

        layout = layout or HilbertLayout.for_truncation(1)
        ket = np.zeros(layout.total, dtype=complex)
        for amp, levels in zip(self.as_array(), ((0, 0, 0), (1, 0, 0), (0, 1, 0), (0, 0, 1))):
            ket[layout.index(*levels)] = amp
        return ket


@dataclass(frozen=True)
class JCAmplitudes:
    """Normalized amplitudes of |00>, |01> (one photon) and |10> (atom excited)."""

    C0: complex
    C1: complex
    C2: complex
    determinant: complex = 0j

    def __post_init__(self):
        norm = abs(self.C0) ** 2 + abs(self.C1) ** 2 + abs(self.C2) ** 2
        if abs(norm - 1.0) > NORM_TOL:
            raise InvalidArgumentError(f"amplitudes are not normalized (sum of squares {norm!r})")

    @classmethod
    def normalized(cls, C0, C1, C2, **meta) -> "JCAmplitudes":
        v = np.array([C0, C1, C2], dtype=complex)
        v = v / np.linalg.norm(v)
        return cls(*(complex(x) for x in v), **meta)


def _require_symmetric(p: SystemParams) -> None:
    if not p.symmetric_cavities:
        raise UnsupportedRegimeError(
            "closed forms need identical resonators (delta1 == delta2, kappa1 == kappa2); "
            f"got delta=({p.delta1}, {p.delta2}), kappa=({p.kappa1}, {p.kappa2})"
        )


def cavity_coefficient(p: SystemParams) -> complex:
    return complex(p.delta, -0.5 * p.kappa)


def atom_coefficient(p: SystemParams) -> complex:
    return complex(p.delta_a, -0.5 * p.gamma)


def coefficient_matrix(p: SystemParams) -> np.ndarray:
    """The 3x3 weak-drive matrix; resonators may differ here."""
    a = complex(p.delta1, -0.5 * p.kappa1)
    b = complex(p.delta2, -0.5 * p.kappa2)
    c = atom_coefficient(p)
    return np.array([[a, p.J, p.g], [p.J, b, 0.0], [p.g, 0.0, c]], dtype=complex)


def drive_vector(p: SystemParams, c0: complex = 1.0) -> np.ndarray:
    return np.array([-p.omega1 * c0, -p.omega2 * c0, 0.0], dtype=complex)


def det_m(p: SystemParams) -> complex:
    """(delta - i kappa/2)^2 C - g^2 (delta - i kappa/2) - J^2 C."""
    _require_symmetric(p)
    a = cavity_coefficient(p)
    c = atom_coefficient(p)
    return a * a * c - p.g**2 * a - p.J**2 * c


def _det3(m) -> complex:
    return (
        m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1])
        - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
        + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
    )


def cramer_amplitudes(p: SystemParams) -> np.ndarray:
    """Unnormalized (c1, c2, c3) at c0 = 1 as det(M_i) / det(M)."""
    m = coefficient_matrix(p).tolist()
    d = drive_vector(p).tolist()
    det = _det3(m)
    if abs(det) <= SINGULAR_TOL:
        raise NearSingularError(f"|det M| = {abs(det):.3e} is at a resonance pole", determinant=det)
    out = []
    for i in range(3):
        mi = [row[:] for row in m]
        for r in range(3):
            mi[r][i] = d[r]
        out.append(_det3(mi) / det)
    return np.array(out, dtype=complex)


def printed_amplitudes(p: SystemParams) -> np.ndarray:
    """Expanded closed forms for (c1, c2, c3) at c0 = 1 (see module docstring)."""
    _require_symmetric(p)
    a = cavity_coefficient(p)
    c = atom_coefficient(p)
    det = det_m(p)
    if abs(det) <= SINGULAR_TOL:
        raise NearSingularError(f"|det M| = {abs(det):.3e} is at a resonance pole", determinant=det)
    c1 = (c * a * p.omega1 - c * p.J * p.omega2) / det
    c2 = (c * a * p.omega2 - c * p.J * p.omega1 - p.g**2 * p.omega2) / det
    c3 = p.g * (-a * p.omega2 + p.J * p.omega1) / det
    return np.array([c1, c2, c3], dtype=complex)


def linear_residual(p: SystemParams, amplitudes) -> float:
    """max |M c - d| for unnormalized amplitudes at c0 = 1."""
    return float(np.max(np.abs(coefficient_matrix(p) @ np.asarray(amplitudes) - drive_vector(p))))


def weak_drive_amplitudes(p: SystemParams) -> WeakDriveAmplitudes:
    """Normalized single-excitation state for identical resonators.

    Amplitudes come from Cramer's rule. If they miss the linear system by
    more than 1e-10 a dense solve replaces them.
    """
    _require_symmetric(p)
    det = det_m(p)
    if abs(det) <= SINGULAR_TOL:
        raise NearSingularError(f"|det M| = {abs(det):.3e} is at a resonance pole", determinant=det)
    c = cramer_amplitudes(p)
    if linear_residual(p, c) > 1e-10:
        c = np.linalg.solve(coefficient_matrix(p), drive_vector(p))
    printed = linear_residual(p, printed_amplitudes(p))
    return WeakDriveAmplitudes.normalized(1.0, *c, determinant=det, printed_residual=printed)


def resonance_residual(p: SystemParams) -> tuple[float, float]:
    """Resonance pair ``(Re, Im)`` in its expanded textbook form.

    ``Re = delta_a (delta^2 - J^2 - kappa^2/4) + kappa delta gamma - g^2 delta`` and
    ``Im = -(kappa/2)(delta^2 - kappa^2/4 - J^2) - kappa delta delta_a/2 + g^2 kappa/2``.
    These do not coincide with ``det_m(p)`` in general; compare with
    :func:`det_m_parts`.
    """
    d, da, j, g, k, gm = p.delta, p.delta_a, p.J, p.g, p.kappa, p.gamma
    re = da * (d**2 - j**2 - k**2 / 4) + k * d * gm - g**2 * d
    im = -(k / 2) * (d**2 - k**2 / 4 - j**2) - k * d * da / 2 + g**2 * k / 2
    return float(re), float(im)


def det_m_parts(p: SystemParams) -> tuple[float, float]:
    """Exact real and imaginary parts of det M."""
    d, da, j, g, k, gm = p.delta, p.delta_a, p.J, p.g, p.kappa, p.gamma
    _require_symmetric(p)
    re = da * (d**2 - j**2 - k**2 / 4) - k * d * gm / 2 - g**2 * d
    im = -(gm / 2) * (d**2 - k**2 / 4 - j**2) - k * d * da + g**2 * k / 2
    return float(re), float(im)


def _checked_sqrt(radicand: float, what: str) -> float:
    if radicand < 0:
        raise NoRealSolutionError(f"no real {what}: radicand {radicand:.6g} < 0", radicand=radicand)
    return math.sqrt(radicand)


def optimal_g(p: SystemParams) -> float:
    """sqrt((delta_a/delta)(delta^2 - J^2 - kappa^2/4) + kappa gamma)."""
    d = p.delta
    if d == 0:
        raise UnsupportedRegimeError("optimal g divides by the detuning; delta must be nonzero")
    radicand = (p.delta_a / d) * (d**2 - p.J**2 - p.kappa**2 / 4) + p.kappa * p.gamma
    return _checked_sqrt(radicand, "atom-resonator coupling")


def optimal_j(p: SystemParams, variant: str = "printed") -> float:
    """Resonator hopping that puts the system on resonance.

    ``variant="printed"`` is ``sqrt((2 g^2 delta - kappa delta gamma)/delta_a + kappa^2/4 - delta^2)``.
    ``variant="rearranged"`` solves the real-part resonance condition for J:
    ``sqrt(delta^2 - kappa^2/4 - (g^2 delta - kappa delta gamma)/delta_a)``, which
    inverts :func:`optimal_g`.
    """
    d, da, k = p.delta, p.delta_a, p.kappa
    if da == 0:
        raise UnsupportedRegimeError("optimal J divides by the atomic detuning; delta_a must be nonzero")
    if variant == "printed":
        radicand = (2 * p.g**2 * d - k * d * p.gamma) / da + k**2 / 4 - d**2
    elif variant == "rearranged":
        radicand = d**2 - k**2 / 4 - (p.g**2 * d - k * d * p.gamma) / da
    else:
        raise InvalidArgumentError(f"unknown variant {variant!r}")
    return _checked_sqrt(radicand, "hopping rate")


def _require_jc(p: SystemParams) -> None:
    if p.J != 0.0 or p.omega2 != 0.0:
        raise InconsistentParametersError(
            f"Jaynes-Cummings reduction requires J = 0 and omega2 = 0 (got J={p.J}, omega2={p.omega2})"
        )


def jc_atom_coefficient(p: SystemParams) -> complex:
    return complex(0.5 * p.delta_a, -0.5 * p.gamma)


def jc_determinant(p: SystemParams) -> complex:
    return complex(p.delta1, -0.5 * p.kappa1) * jc_atom_coefficient(p) - p.g**2


def jc_amplitudes(p: SystemParams, variant: str = "solve") -> JCAmplitudes:
    """Driven Jaynes-Cummings amplitudes, normalized.

    ``variant="solve"`` gives the solution of the 2x2 system,
    ``C1 = -omega1 (delta_a/2 - i gamma/2) / D`` and ``C2 = omega1 g / D``.
    ``variant="printed"`` flips the sign of both (the expanded form with
    ``+omega1`` on the right-hand side); magnitudes (and hence the concurrence) agree.
    """
    _require_jc(p)
    det = jc_determinant(p)
    if abs(det) <= SINGULAR_TOL:
        raise NearSingularError(f"|D| = {abs(det):.3e} is at the resonance pole", determinant=det)
    c1 = p.omega1 * jc_atom_coefficient(p) / det
    c2 = -p.omega1 * p.g / det
    if variant == "solve":
        c1, c2 = -c1, -c2
    elif variant != "printed":
        raise InvalidArgumentError(f"unknown variant {variant!r}")
    return JCAmplitudes.normalized(1.0, c1, c2, determinant=det)


def jc_residual(p: SystemParams, c1: complex, c2: complex, c0: complex = 1.0) -> float:
    """max residual of the 2x2 Jaynes-Cummings system for unnormalized amplitudes."""
    a = complex(p.delta1, -0.5 * p.kappa1)
    r1 = a * c1 + p.g * c2 + p.omega1 * c0
    r2 = p.g * c1 + jc_atom_coefficient(p) * c2
    return max(abs(r1), abs(r2))


def jc_optimal_g(p: SystemParams) -> complex:
    """Principal square root of (delta - i kappa/2)(delta_a/2 - i gamma/2).

    A negative real product can come out with imaginary part -0.0, which
    would put cmath.sqrt on the lower branch; adding 0.0 clears the sign.
    """
    z = complex(p.delta1, -0.5 * p.kappa1) * jc_atom_coefficient(p)
    return cmath.sqrt(complex(z.real, z.imag + 0.0))


def jc_concurrence(a: JCAmplitudes) -> float:
    return 2.0 * abs(a.C1) * abs(a.C2)


def jc_equivalent_params(p: SystemParams) -> SystemParams:
    """Tripartite parameters whose weak-drive solution equals the JC solution of ``p``.

    The tripartite atomic coefficient is ``delta_a - i gamma/2``; halving
    ``delta_a`` makes it the JC coefficient ``delta_a/2 - i gamma/2``. With
    ``J = omega2 = 0`` the tripartite ``(c0, c1, c3)`` then coincide with the
    JC ``(C0, C1, C2)``.
    """
    _require_jc(p)
    return p.replace(delta_a=0.5 * p.delta_a, delta2=p.delta1, kappa2=p.kappa1)
