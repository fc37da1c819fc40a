import math

import numpy as np
import pytest
from conftest import random_density

from dualcavity import lindblad
from dualcavity.entanglement import project_two_level
from dualcavity.errors import (
    DegenerateSteadyStateError,
    InvalidArgumentError,
    InvalidStateError,
    StepSizeError,
)
from dualcavity.lindblad import CollapseChannel, DensityMatrix, build_liouvillian, dissipator_action
from dualcavity.model import Operators, SystemParams, build_hamiltonian
from dualcavity.quantum import HilbertLayout, sigma_minus, trace_distance

LAYOUT = HilbertLayout.for_truncation(1)
ATOM = HilbertLayout((2,))
FIG_POINT = SystemParams(delta_a=1.0, gamma=0.1, J=0.5, g=0.5, omega1=0.5, omega2=0.5)
GROUND, EXCITED = np.diag([1.0, 0.0]), np.diag([0.0, 1.0])


def test_vec_round_trip(rng):
    m = rng.normal(size=(3, 3))
    assert lindblad.vec(m)[1] == m[1, 0]
    assert np.array_equal(lindblad.unvec(lindblad.vec(m)), m)


def test_density_matrix_validation():
    with pytest.raises(InvalidStateError):
        DensityMatrix(np.diag([0.5, 0.4]), ATOM)
    with pytest.raises(InvalidStateError):
        DensityMatrix(np.array([[0.5, 0.1], [0.3, 0.5]]), ATOM)
    with pytest.raises(InvalidStateError):
        DensityMatrix(np.diag([1.1, -0.1]), ATOM)
    rho = DensityMatrix(np.diag([1.0, 0.0]), ATOM)
    assert not rho.matrix.flags.writeable


def test_dissipator_examples(rng):
    sm = sigma_minus()
    assert np.allclose(dissipator_action(sm, EXCITED), GROUND - EXCITED)
    assert not dissipator_action(sm, GROUND).any()
    for _ in range(5):
        op = rng.normal(size=(4, 4)) + 1j * rng.normal(size=(4, 4))
        assert abs(np.trace(dissipator_action(op, random_density(rng, 4)))) < 1e-12


def test_liouvillian_examples():
    assert not build_liouvillian(np.zeros((2, 2)), [], ATOM).matrix.any()
    gamma = 0.3
    lv = build_liouvillian(np.zeros((2, 2)), [CollapseChannel(sigma_minus(), gamma)], ATOM)
    ev = np.sort(lv.spectrum().real)
    assert np.allclose(ev, [-gamma, -gamma / 2, -gamma / 2, 0.0], atol=1e-14)
    with pytest.raises(InvalidArgumentError):
        build_liouvillian(np.array([[0, 1j], [0, 0]]), [], ATOM)


def test_liouvillian_matches_matrix_rhs(rng):
    p = FIG_POINT.replace(delta1=0.3, delta2=-0.2)
    lv = lindblad.system_liouvillian(p, LAYOUT)
    rho = random_density(rng, LAYOUT.total)
    h = build_hamiltonian(p, LAYOUT)
    direct = lindblad.lindblad_rhs(h, lindblad.collapse_channels(p, LAYOUT), rho)
    assert np.allclose(lv.apply(rho), direct, atol=1e-13)


def test_liouvillian_preserves_trace_and_hermiticity(rng):
    lv = lindblad.system_liouvillian(FIG_POINT, HilbertLayout.for_truncation(2))
    out = lv.apply(random_density(rng, lv.layout.total))
    assert abs(np.trace(out)) < 1e-10
    assert np.max(np.abs(out - out.conj().T)) < 1e-10
    assert np.max(lv.spectrum().real) <= 1e-10


def test_undriven_steady_state_is_vacuum():
    rho = lindblad.steady_state(lindblad.system_liouvillian(SystemParams(g=0.4, J=0.3, gamma=0.2)))
    vac = LAYOUT.index(0, 0, 0)
    assert np.isclose(rho.matrix[vac, vac], 1.0, atol=1e-12)


def test_figure_point_steady_state():
    lv = lindblad.system_liouvillian(FIG_POINT)
    rho = lindblad.steady_state(lv)
    assert rho.info["residual"] <= 1e-8 and rho.info["spectral_gap"] > 1e-8
    assert np.max(np.abs(lv.matrix @ lindblad.vec(rho.matrix))) < 1e-10
    null = lindblad.nullspace_steady_state(lv)
    assert trace_distance(null, rho.matrix) < 1e-10


def test_degenerate_steady_state():
    with pytest.raises(DegenerateSteadyStateError) as info:
        lindblad.steady_state(lindblad.system_liouvillian(SystemParams(kappa1=0.0, kappa2=0.0, g=0.2)))
    assert info.value.gap < 1e-8


def test_driven_cavity_population_from_evolution():
    p = SystemParams(delta1=0.5, omega1=0.01)
    lv = lindblad.system_liouvillian(p)
    rho0 = DensityMatrix.from_ket(LAYOUT.basis(0, 0, 0), LAYOUT)
    rho = lindblad.evolve(rho0, lv, 30.0, dt=0.01)
    n1 = rho.expect(Operators.for_layout(LAYOUT).n1).real
    expected = p.omega1**2 / (p.delta1**2 + 0.25)
    assert abs(n1 - expected) <= 0.05 * expected


def test_evolve_examples():
    rho0 = DensityMatrix(np.diag([0.3, 0.7]), ATOM)
    still = lindblad.evolve(rho0, build_liouvillian(np.zeros((2, 2)), [], ATOM), 1.0, dt=0.1)
    assert np.allclose(still.matrix, rho0.matrix, atol=1e-15)

    gamma = 0.5
    decay = build_liouvillian(np.zeros((2, 2)), [CollapseChannel(sigma_minus(), gamma)], ATOM)
    out = lindblad.evolve(DensityMatrix(EXCITED, ATOM), decay, 20.0 / gamma, dt=0.01)
    assert out.matrix[1, 1].real <= math.exp(-20) + 1e-6


def _late_distance(t_final):
    lv = lindblad.system_liouvillian(FIG_POINT)
    vac = DensityMatrix.from_ket(LAYOUT.basis(0, 0, 0), LAYOUT)
    late = lindblad.evolve(vac, lv, t_final, dt=0.01)
    assert late.info["steps"] == round(t_final / 0.01)
    return trace_distance(late.matrix, lindblad.steady_state(lv).matrix)


def test_evolution_reaches_steady_state():
    assert _late_distance(100.0) <= 1e-4


@pytest.mark.xfail(strict=True, reason="slowest decay rate at the figure point is 0.1415; the t=50 transient is ~2e-4")
def test_evolution_reaches_steady_state_by_t50():
    assert _late_distance(50.0) <= 1e-4


def test_evolve_rejects_unstable_step():
    lv = lindblad.system_liouvillian(FIG_POINT)
    vac = DensityMatrix.from_ket(LAYOUT.basis(0, 0, 0), LAYOUT)
    with pytest.raises(StepSizeError):
        lindblad.evolve(vac, lv, 10.0, dt=5.0)
    with pytest.raises(InvalidArgumentError):
        lindblad.evolve(vac, lv, -1.0)


def test_rk4_fourth_order():
    lv = lindblad.system_liouvillian(FIG_POINT)
    ket = LAYOUT.basis(0, 0, 0)
    rho0 = np.outer(ket, ket)
    ref = lindblad.integrate(rho0, lv, 1.0, dt=0.005)[0]
    errs = [np.max(np.abs(lindblad.integrate(rho0, lv, 1.0, dt=dt)[0] - ref)) for dt in (0.08, 0.04)]
    assert 12.0 <= errs[0] / errs[1] <= 20.0


@pytest.mark.xfail(strict=True, reason="two-photon states carry ~3% of the trace at drive 0.1; 1e-8 is unattainable")
def test_truncation_invariance_of_steady_state():
    p = FIG_POINT.replace(omega=0.1)
    r1 = lindblad.steady_state(lindblad.system_liouvillian(p, HilbertLayout.for_truncation(1)))
    r2 = lindblad.steady_state(lindblad.system_liouvillian(p, HilbertLayout.for_truncation(2)))
    assert trace_distance(r1.matrix, project_two_level(r2)[0].matrix) <= 1e-8


def test_gap_from_shift_invert_matches_dense():
    lv = lindblad.system_liouvillian(FIG_POINT, HilbertLayout.for_truncation(2))
    mags = np.sort(np.abs(lv.spectrum()))
    assert abs(lindblad.spectral_gap(lv) - mags[1]) < 1e-9
