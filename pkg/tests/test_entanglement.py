import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from dualcavity import entanglement, lindblad
from dualcavity.analytic import WeakDriveAmplitudes
from dualcavity.errors import InvalidArgumentError, InvalidStateError, PolygonViolationError
from dualcavity.lindblad import DensityMatrix
from dualcavity.model import SystemParams
from dualcavity.quantum import HilbertLayout, partial_trace

QUBITS = HilbertLayout((2, 2, 2))
W_EDGE = 2 * math.sqrt(2) / 3


def bell():
    v = np.array([1, 0, 0, 1]) / math.sqrt(2)
    return np.outer(v, v)


def test_wootters_examples(rng):
    assert math.isclose(entanglement.wootters_concurrence(bell()), 1.0, rel_tol=1e-14)
    assert entanglement.wootters_concurrence(np.diag([0.5, 0, 0, 0.5])) == 0.0
    for _ in range(50):
        v = rng.normal(size=4) + 1j * rng.normal(size=4)
        v /= np.linalg.norm(v)
        a, b, c, d = v
        assert abs(entanglement.wootters_concurrence(np.outer(v, v.conj())) - 2 * abs(a * d - b * c)) < 1e-12


def test_wootters_rejects_bad_input():
    with pytest.raises(InvalidStateError):
        entanglement.wootters_concurrence(np.eye(2) / 2)
    with pytest.raises(InvalidStateError):
        entanglement.wootters_concurrence(np.diag([1.2, -0.2, 0, 0]))


def test_wootters_equals_purity_on_pure_states(rng):
    for _ in range(100):
        v = rng.normal(size=4) + 1j * rng.normal(size=4)
        v /= np.linalg.norm(v)
        rho = np.outer(v, v.conj())
        for keep in ([1], [2]):
            red = partial_trace(rho, HilbertLayout((2, 2)), keep)
            assert abs(entanglement.wootters_concurrence(rho) - entanglement.purity_concurrence(red)) <= 1e-10


def test_one_vs_rest_examples():
    prod = DensityMatrix.from_ket(QUBITS.basis(1, 0, 1), QUBITS)
    assert all(entanglement.one_vs_rest_concurrence(prod, k) == 0 for k in (1, 2, 3))
    ghz = DensityMatrix.from_ket(QUBITS.basis(0, 0, 0) + QUBITS.basis(1, 1, 1), QUBITS)
    assert math.isclose(entanglement.one_vs_rest_concurrence(ghz, 2), 1.0)
    amps = WeakDriveAmplitudes.normalized(0.5, 0.3 + 0.1j, -0.4, 0.2j)
    rho = DensityMatrix.from_ket(amps.ket(), QUBITS)
    expected = 2 * abs(amps.c1) * math.sqrt(abs(amps.c2) ** 2 + abs(amps.c3) ** 2)
    assert math.isclose(entanglement.one_vs_rest_concurrence(rho, 1), expected, rel_tol=1e-12)
    with pytest.raises(InvalidArgumentError):
        entanglement.one_vs_rest_concurrence(rho, 4)


def test_edge_examples(rng):
    s = 1 / math.sqrt(3)
    tri = entanglement.edge_concurrences(WeakDriveAmplitudes(0.0, s, s, s))
    assert np.allclose(tri.edges, W_EDGE, atol=1e-15)
    a = WeakDriveAmplitudes.normalized(0.6, 0.5, 0.3j, 0.0)
    tri = entanglement.edge_concurrences(a)
    assert tri.c3_12 == 0 and math.isclose(tri.c1_23, 2 * abs(a.c1) * abs(a.c2))
    assert math.isclose(tri.c1_23, tri.c2_31)
    for _ in range(100):
        amps = WeakDriveAmplitudes.normalized(*(rng.normal(size=4) + 1j * rng.normal(size=4)))
        rho = DensityMatrix.from_ket(amps.ket(), QUBITS)
        num = [entanglement.one_vs_rest_concurrence(rho, k) for k in (1, 2, 3)]
        assert np.allclose(entanglement.edge_concurrences(amps).edges, num, atol=1e-12, rtol=0)
        assert all(0.0 <= e <= 1.0 for e in num)


def test_fill_examples():
    assert entanglement.concurrence_fill(0.0, 0.7, 0.7)[0] == 0
    assert abs(entanglement.concurrence_fill(1, 1, 1)[0] - 1) <= 1e-12
    assert abs(entanglement.concurrence_fill(W_EDGE, W_EDGE, W_EDGE)[0] - 8 / 9) <= 1e-12


def test_fill_polygon_violation():
    with pytest.raises(PolygonViolationError) as info:
        entanglement.concurrence_fill(1.0, 0.1, 0.1)
    assert info.value.squared_edges[0] == 1.0
    # tiny violations from roundoff are clamped
    e = 0.6
    fill, ok = entanglement.concurrence_fill(math.sqrt(2 * e * e + 5e-10), e, e)
    assert ok and fill == 0.0


edges = st.floats(0.0, 1.0, allow_nan=False)


@settings(max_examples=200, deadline=None)
@given(edges, edges, edges)
def test_fill_symmetric(a, b, c):
    if not entanglement.polygon_holds(a, b, c, tol=-1e-6):
        return
    f = entanglement.concurrence_fill(a, b, c)[0]
    for perm in ((b, c, a), (c, a, b), (b, a, c)):
        assert abs(entanglement.concurrence_fill(*perm)[0] - f) <= 1e-12


def test_fill_continuity(rng):
    eps = 1e-8
    for _ in range(100):
        e = rng.uniform(0.3, 1.0, size=3)
        if not entanglement.polygon_holds(*e, tol=-0.05):
            continue
        f = entanglement.concurrence_fill(*e)[0]
        g = entanglement.concurrence_fill(*(e + eps * rng.uniform(-1, 1, 3)))[0]
        assert abs(f - g) <= 0.1 * eps**0.25


def test_polygon_on_random_single_excitation_states(rng):
    v = rng.normal(size=(10_000, 4)) + 1j * rng.normal(size=(10_000, 4))
    for row in v:
        tri = entanglement.edge_concurrences(WeakDriveAmplitudes.normalized(*row))
        assert tri.polygon_ok


def test_triangle_from_state():
    tri = entanglement.triangle_from_state(DensityMatrix.from_ket(QUBITS.basis(0, 0, 0), QUBITS))
    assert tri.edges == (0.0, 0.0, 0.0) and tri.fill == 0.0
    amps = WeakDriveAmplitudes.normalized(0.3, 0.5, -0.4j, 0.6)
    tri = entanglement.triangle_from_state(DensityMatrix.from_ket(amps.ket(), QUBITS))
    ref = entanglement.with_fill(entanglement.edge_concurrences(amps))
    assert np.allclose(tri.edges, ref.edges, atol=1e-12) and abs(tri.fill - ref.fill) < 1e-10


def test_higher_truncation_needs_projection():
    lay = HilbertLayout.for_truncation(2)
    p = SystemParams(delta_a=1.0, gamma=0.1, J=0.5, g=0.5, omega1=0.1, omega2=0.1)
    rho = lindblad.steady_state(lindblad.system_liouvillian(p, lay))
    with pytest.raises(InvalidArgumentError):
        entanglement.triangle_from_state(rho)
    tri = entanglement.triangle_from_state(rho, project=True)
    assert 0.9 < tri.projection_weight < 1.0


def test_dominant_component_and_bipartite():
    p = SystemParams(delta_a=1.0, gamma=0.1, J=0.5, g=0.5, omega1=0.5, omega2=0.5)
    rho = lindblad.steady_state(lindblad.system_liouvillian(p))
    pure = entanglement.dominant_pure_component(rho)
    assert abs(np.trace(pure.matrix @ pure.matrix) - 1) < 1e-12
    c = entanglement.bipartite_concurrence(rho, (1, 3))
    assert 0.0 <= c <= 1.0


@pytest.mark.xfail(strict=True, reason="purity edges of mixed steady states at drive 0.5 break the polygon inequality")
def test_polygon_on_mixed_steady_states():
    p = SystemParams(delta_a=1.0, gamma=0.1, J=0.5, g=0.6, omega1=0.5, omega2=0.5)
    for delta in np.linspace(-3, 3, 41):
        rho = lindblad.steady_state(lindblad.system_liouvillian(p.replace(delta=delta)))
        edges = [entanglement.one_vs_rest_concurrence(rho, k) for k in (1, 2, 3)]
        assert entanglement.polygon_holds(*edges)
