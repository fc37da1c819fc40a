import numpy as np
import pytest

from dualcavity.errors import InconsistentParametersError, InvalidArgumentError
from dualcavity.model import (
    HamiltonianKind,
    Operators,
    SystemParams,
    anti_hermitian_part,
    build_hamiltonian,
    single_excitation_block,
)
from dualcavity.quantum import HilbertLayout

LAYOUT = HilbertLayout.for_truncation(1)


def test_params_validation():
    with pytest.raises(InvalidArgumentError):
        SystemParams(gamma=-0.1)
    with pytest.raises(InvalidArgumentError):
        SystemParams(g=float("nan"))
    p = SystemParams()
    assert p.kappa1 == p.kappa2 == 1.0 and p.symmetric_cavities
    assert not p.replace(delta2=0.3).symmetric_cavities
    q = p.replace(delta=0.2, omega=0.5)
    assert (q.delta1, q.delta2, q.omega1, q.omega2) == (0.2, 0.2, 0.5, 0.5)
    with pytest.raises(InvalidArgumentError):
        p.replace(gama=1.0)


def test_zero_parameters_give_zero_hamiltonian():
    h = build_hamiltonian(SystemParams(kappa1=0.0, kappa2=0.0), LAYOUT)
    assert not h.any()


def test_diagonal_case():
    p = SystemParams(delta1=1.0, delta2=0.7, delta_a=0.4)
    h = build_hamiltonian(p, LAYOUT)
    assert np.count_nonzero(h - np.diag(np.diag(h))) == 0
    for n1 in (0, 1):
        for n2 in (0, 1):
            for a in (0, 1):
                expected = n1 * 1.0 + n2 * 0.7 + (0.2 if a else -0.2)
                assert np.isclose(h[LAYOUT.index(n1, n2, a)] @ LAYOUT.basis(n1, n2, a), expected)


def test_coupling_matrix_elements(rng):
    p = SystemParams(J=rng.uniform(), g=rng.uniform(), delta1=0.3, delta_a=-0.2, omega1=0.1, omega2=0.2)
    h = build_hamiltonian(p, LAYOUT)
    i100, i010, i001 = LAYOUT.index(1, 0, 0), LAYOUT.index(0, 1, 0), LAYOUT.index(0, 0, 1)
    assert np.isclose(h[i100, i010], p.J)
    assert np.isclose(h[i100, i001], p.g)


def test_rotating_frame_is_hermitian(rng):
    for _ in range(20):
        p = SystemParams(*rng.uniform(-1, 1, size=7), *rng.uniform(0, 1, size=3))
        h = build_hamiltonian(p, HilbertLayout.for_truncation(2))
        assert np.allclose(h, h.conj().T, atol=0)


def test_anti_hermitian_part():
    h = build_hamiltonian(SystemParams(g=0.3, J=0.2), LAYOUT)
    assert not anti_hermitian_part(h).any()
    p = SystemParams(gamma=0.1)
    ah = anti_hermitian_part(build_hamiltonian(p, LAYOUT, HamiltonianKind.EFFECTIVE_NON_HERMITIAN))
    ops = Operators.for_layout(LAYOUT)
    expected = -0.5j * (ops.n1 + ops.n2) - 0.05j * ops.excited
    assert np.allclose(ah, expected, atol=1e-15)
    ev = np.linalg.eigvals(ah)
    assert np.allclose(ev.real, 0) and np.all(ev.imag <= 1e-15)


def test_single_excitation_block_is_coefficient_matrix(rng):
    for _ in range(10):
        p = SystemParams(
            delta1=rng.uniform(-1, 1), delta2=rng.uniform(-1, 1), delta_a=rng.uniform(-1, 1),
            J=rng.uniform(), g=rng.uniform(), kappa1=rng.uniform(), kappa2=rng.uniform(), gamma=rng.uniform(),
        )
        a, b = p.delta1 - 0.5j * p.kappa1, p.delta2 - 0.5j * p.kappa2
        c = p.delta_a - 0.5j * p.gamma
        m = np.array([[a, p.J, p.g], [p.J, b, 0], [p.g, 0, c]])
        assert np.allclose(single_excitation_block(p)[1:, 1:], m, atol=1e-12)


def test_jaynes_cummings_kind():
    with pytest.raises(InconsistentParametersError):
        build_hamiltonian(SystemParams(J=0.1), LAYOUT, HamiltonianKind.JAYNES_CUMMINGS)
    p = SystemParams(g=0.4, delta1=0.2, delta_a=0.6)
    h = build_hamiltonian(p, LAYOUT, HamiltonianKind.JAYNES_CUMMINGS)
    idx = [LAYOUT.index(1, 0, 0), LAYOUT.index(0, 0, 1)]
    block = h[np.ix_(idx, idx)] - h[0, 0] * np.eye(2)
    assert np.allclose(block, [[0.2, 0.4], [0.4, 0.6]])
