"""Parameter sweeps over the analytic and numeric pipelines, plus figure presets."""

from __future__ import annotations

import dataclasses
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from itertools import product

import numpy as np

from . import analytic, entanglement, lindblad
from .errors import DualCavityError, InvalidArgumentError
from .model import PARAM_NAMES, Operators, SystemParams
from .quantum import HilbertLayout

METHODS = ("analytic", "numeric")
OBSERVABLES = (
    "jc_concurrence",
    "edge_c1",
    "edge_c2",
    "edge_c3",
    "fill",
    "photon_number_1",
    "photon_number_2",
    "atom_excitation",
)
# "delta" sets both resonator detunings, "omega" both drives
AXIS_NAMES = PARAM_NAMES + ("delta", "omega")
NUMERIC_STATES = ("dominant", "mixed")


@dataclass(frozen=True)
class Axis:
    name: str
    start: float
    stop: float
    points: int

    def __post_init__(self):
        if self.name not in AXIS_NAMES:
            raise InvalidArgumentError(f"unknown sweep axis {self.name!r}; choose from {AXIS_NAMES}")
        if int(self.points) != self.points or self.points < 2:
            raise InvalidArgumentError(f"axis {self.name!r} needs at least 2 points, got {self.points}")
        object.__setattr__(self, "points", int(self.points))

    def values(self) -> np.ndarray:
        return np.linspace(self.start, self.stop, self.points)

    @property
    def step(self) -> float:
        return (self.stop - self.start) / (self.points - 1)


@dataclass(frozen=True)
class SweepSpec:
    """What to sweep and what to measure.

    ``family`` optionally names one extra parameter and the values it takes,
    one curve per value (e.g. ``("g", (0.3, 0.6))``). ``numeric_state``
    selects whether numeric edges and fill are evaluated on the dominant
    pure component of the steady state or on the full mixed state.
    """

    base: SystemParams
    axes: tuple[Axis, ...] = ()
    methods: tuple[str, ...] = ("analytic",)
    observables: tuple[str, ...] = ("fill",)
    n_max: int = 1
    family: tuple[str, tuple[float, ...]] | None = None
    numeric_state: str = "dominant"
    name: str = ""

    def __post_init__(self):
        object.__setattr__(self, "axes", tuple(self.axes))
        object.__setattr__(self, "methods", tuple(self.methods))
        object.__setattr__(self, "observables", tuple(self.observables))
        if len(self.axes) > 2:
            raise InvalidArgumentError(f"at most 2 sweep axes are supported, got {len(self.axes)}")
        if len({a.name for a in self.axes}) != len(self.axes):
            raise InvalidArgumentError("sweep axes must be distinct")
        if not self.methods or set(self.methods) - set(METHODS):
            raise InvalidArgumentError(f"methods must be a non-empty subset of {METHODS}, got {self.methods}")
        if not self.observables or set(self.observables) - set(OBSERVABLES):
            raise InvalidArgumentError(f"observables must be a non-empty subset of {OBSERVABLES}")
        if self.n_max < 1:
            raise InvalidArgumentError(f"n_max must be >= 1, got {self.n_max}")
        if self.numeric_state not in NUMERIC_STATES:
            raise InvalidArgumentError(f"numeric_state must be one of {NUMERIC_STATES}")
        if self.family is not None:
            fname, fvalues = self.family
            if fname not in AXIS_NAMES:
                raise InvalidArgumentError(f"unknown family parameter {fname!r}")
            if fname in {a.name for a in self.axes}:
                raise InvalidArgumentError("family parameter cannot also be a sweep axis")
            object.__setattr__(self, "family", (fname, tuple(float(v) for v in fvalues)))

    def curves(self) -> list[tuple[str, "SweepSpec"]]:
        """One (label, spec) per family member; label is ``""`` without a family."""
        if self.family is None:
            return [("", self)]
        fname, fvalues = self.family
        return [
            (f"{fname}{v:g}", dataclasses.replace(self, base=self.base.replace(**{fname: v}), family=None))
            for v in fvalues
        ]

    def grid(self) -> list[dict]:
        """Grid coordinates in row-major order over the axes."""
        if not self.axes:
            return [{}]
        names = [a.name for a in self.axes]
        return [dict(zip(names, map(float, combo))) for combo in product(*(a.values() for a in self.axes))]

    def as_dict(self) -> dict:
        return {
            "name": self.name,
            "base": self.base.as_dict(),
            "axes": [dataclasses.asdict(a) for a in self.axes],
            "methods": list(self.methods),
            "observables": list(self.observables),
            "n_max": self.n_max,
            "family": None if self.family is None else {"name": self.family[0], "values": list(self.family[1])},
            "numeric_state": self.numeric_state,
        }


@dataclass
class PointRecord:
    curve: str
    index: int
    coords: dict
    method: str
    values: dict = field(default_factory=dict)
    errors: dict = field(default_factory=dict)
    diagnostics: dict = field(default_factory=dict)

    @property
    def ok(self) -> bool:
        return not self.errors


@dataclass
class SweepResult:
    spec: SweepSpec
    records: list[PointRecord]

    def curve_labels(self) -> list[str]:
        seen = []
        for r in self.records:
            if r.curve not in seen:
                seen.append(r.curve)
        return seen

    def select(self, method: str, curve: str | None = None) -> list[PointRecord]:
        return [r for r in self.records if r.method == method and (curve is None or r.curve == curve)]

    def series(self, observable: str, method: str, curve: str = "") -> np.ndarray:
        """Values along the grid; failed points are NaN (for analysis only)."""
        return np.array([r.values.get(observable, np.nan) for r in self.select(method, curve)], dtype=float)

    def coordinates(self, axis: str, curve: str = "") -> np.ndarray:
        method = self.spec.methods[0]
        return np.array([r.coords[axis] for r in self.select(method, curve)], dtype=float)


def _point_params(base: SystemParams, coords: dict) -> SystemParams:
    return base.replace(**coords) if coords else base


def _evaluate_analytic(p: SystemParams, observables, rec: PointRecord) -> None:
    tri_obs = {"edge_c1", "edge_c2", "edge_c3", "fill", "photon_number_1", "photon_number_2", "atom_excitation"}
    wanted = set(observables)
    if "jc_concurrence" in wanted:
        try:
            amps = analytic.jc_amplitudes(p)
            rec.values["jc_concurrence"] = analytic.jc_concurrence(amps)
            rec.diagnostics["jc_det_abs"] = abs(amps.determinant)
        except DualCavityError as exc:
            rec.errors["jc_concurrence"] = exc.code
    if wanted & tri_obs:
        try:
            amps = analytic.weak_drive_amplitudes(p)
        except DualCavityError as exc:
            for obs in wanted & tri_obs:
                rec.errors[obs] = exc.code
            return
        rec.diagnostics["det_m_abs"] = abs(amps.determinant)
        rec.diagnostics["printed_residual"] = amps.printed_residual
        tri = entanglement.edge_concurrences(amps)
        direct = {
            "edge_c1": tri.c1_23,
            "edge_c2": tri.c2_31,
            "edge_c3": tri.c3_12,
            "photon_number_1": abs(amps.c1) ** 2,
            "photon_number_2": abs(amps.c2) ** 2,
            "atom_excitation": abs(amps.c3) ** 2,
        }
        for obs, value in direct.items():
            if obs in wanted:
                rec.values[obs] = float(value)
        if "fill" in wanted:
            try:
                rec.values["fill"] = entanglement.concurrence_fill(*tri.edges)[0]
            except DualCavityError as exc:
                rec.errors["fill"] = exc.code


def _evaluate_numeric(p: SystemParams, observables, layout: HilbertLayout, numeric_state: str,
                      rec: PointRecord) -> None:
    wanted = set(observables)
    try:
        rho = lindblad.steady_state(lindblad.system_liouvillian(p, layout))
    except DualCavityError as exc:
        for obs in wanted:
            rec.errors[obs] = exc.code
        return
    rec.diagnostics["spectral_gap"] = rho.info.get("spectral_gap")
    rec.diagnostics["residual"] = rho.info.get("residual")
    ops = Operators.for_layout(layout)
    populations = {
        "photon_number_1": rho.expect(ops.n1).real,
        "photon_number_2": rho.expect(ops.n2).real,
        "atom_excitation": rho.expect(ops.excited).real,
    }
    for obs, value in populations.items():
        if obs in wanted:
            rec.values[obs] = float(value)

    edge_obs = wanted & {"edge_c1", "edge_c2", "edge_c3", "fill"}
    if not edge_obs and "jc_concurrence" not in wanted:
        return
    try:
        qubits, weight = entanglement.project_two_level(rho)
    except DualCavityError as exc:
        for obs in edge_obs | (wanted & {"jc_concurrence"}):
            rec.errors[obs] = exc.code
        return
    rec.diagnostics["projection_weight"] = weight
    if "jc_concurrence" in wanted:
        try:
            rec.values["jc_concurrence"] = entanglement.bipartite_concurrence(qubits, (1, 3), project=False)
        except DualCavityError as exc:
            rec.errors["jc_concurrence"] = exc.code
    if not edge_obs:
        return
    if numeric_state == "dominant":
        rec.diagnostics["dominant_weight"] = float(np.linalg.eigvalsh(qubits.matrix)[-1])
        qubits = entanglement.dominant_pure_component(qubits)
    edges = [entanglement.one_vs_rest_concurrence(qubits, k) for k in (1, 2, 3)]
    for obs, value in zip(("edge_c1", "edge_c2", "edge_c3"), edges):
        if obs in wanted:
            rec.values[obs] = float(value)
    if "fill" in wanted:
        try:
            rec.values["fill"] = entanglement.concurrence_fill(*edges)[0]
        except DualCavityError as exc:
            rec.errors["fill"] = exc.code


def evaluate_point(spec: SweepSpec, coords: dict, method: str, curve: str = "", index: int = 0) -> PointRecord:
    rec = PointRecord(curve, index, dict(coords), method)
    try:
        p = _point_params(spec.base, coords)
    except DualCavityError as exc:
        rec.errors = {obs: exc.code for obs in spec.observables}
        return rec
    if method == "analytic":
        _evaluate_analytic(p, spec.observables, rec)
    else:
        _evaluate_numeric(p, spec.observables, HilbertLayout.for_truncation(spec.n_max), spec.numeric_state, rec)
    return rec


def run_sweep(spec: SweepSpec, jobs: int = 1) -> SweepResult:
    """Evaluate every grid point of every curve with every requested method.

    Records are ordered by curve, then grid index (row-major over the axes),
    then method. Points are independent; ``jobs > 1`` evaluates them on a
    thread pool and merges by index.
    """
    tasks = []
    for label, curve_spec in spec.curves():
        for index, coords in enumerate(curve_spec.grid()):
            for method in spec.methods:
                tasks.append((curve_spec, coords, method, label, index))

    def work(task):
        return evaluate_point(*task)

    if jobs > 1 and len(tasks) > 1:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            records = list(pool.map(work, tasks))
    else:
        records = [work(t) for t in tasks]
    return SweepResult(spec, records)


_FIG_BASE = SystemParams(kappa1=1.0, kappa2=1.0, gamma=0.1, delta_a=1.0, omega1=0.5, omega2=0.5)
_DELTA = Axis("delta", -3.0, 3.0, 201)
_G = Axis("g", 0.0, 1.0, 201)
_J = Axis("J", 0.0, 1.0, 201)
_OMEGA = Axis("omega", 0.0, 1.0, 201)
_EDGES = ("edge_c1", "edge_c2", "edge_c3")
_BOTH = ("analytic", "numeric")

PRESETS = {
    "fig2a": SweepSpec(_FIG_BASE.replace(J=0.0, omega2=0.0), (_DELTA,), _BOTH, ("jc_concurrence",),
                       family=("g", (0.3, 0.6)), name="fig2a"),
    "fig2c": SweepSpec(_FIG_BASE.replace(g=0.001, omega2=0.0), (_DELTA,), _BOTH, _EDGES,
                       family=("J", (0.3, 0.6)), name="fig2c"),
    "fig3a": SweepSpec(_FIG_BASE.replace(g=0.5, J=0.5), (_DELTA,), _BOTH, _EDGES, name="fig3a"),
    "fig3b": SweepSpec(_FIG_BASE.replace(J=0.5, delta=0.0), (_G,), _BOTH, _EDGES, name="fig3b"),
    "fig6a": SweepSpec(_FIG_BASE.replace(J=0.5), (_DELTA,), _BOTH, ("fill",),
                       family=("g", (0.3, 0.6)), name="fig6a"),
    "fig6b": SweepSpec(_FIG_BASE.replace(g=0.5), (_DELTA,), _BOTH, ("fill",),
                       family=("J", (0.3, 0.6)), name="fig6b"),
    "fig7a": SweepSpec(_FIG_BASE.replace(g=0.5, J=0.5), (_DELTA, _OMEGA), ("analytic",), ("fill",), name="fig7a"),
    "fig7b": SweepSpec(_FIG_BASE.replace(J=0.5), (_DELTA, _G), ("analytic",), ("fill",), name="fig7b"),
    "fig8a": SweepSpec(_FIG_BASE.replace(J=0.5, delta=0.0), (_G,), _BOTH, ("fill",),
                       family=("gamma", (0.05, 0.1, 0.2)), name="fig8a"),
    "fig8b": SweepSpec(_FIG_BASE.replace(J=0.5, delta=0.0), (_G,), _BOTH, ("fill",),
                       family=("omega", (0.1, 0.5, 1.0)), name="fig8b"),
}

PRESET_NOTES = {
    "fig2c": "drive on resonator 1 only; edges stand in for the bipartite concurrence",
    "fig7a": "analytic only by default (201 x 201 surface)",
    "fig7b": "analytic only by default (201 x 201 surface)",
    "fig8a": "gamma family values are representative defaults",
    "fig8b": "omega family values are representative defaults",
}


def figure_preset(name: str) -> SweepSpec:
    """Sweep reproducing one figure panel.

    Common fixed values: kappa = 1, gamma = 0.1, delta_a = 1, omega = 0.5,
    J = 0.5 when J is held fixed and g = 0.5 when g is held fixed. Grid
    density (201 points) and ranges (delta in [-3, 3], g, J, omega in
    [0, 1]) are defaults.
    """
    try:
        return PRESETS[name]
    except KeyError:
        raise InvalidArgumentError(f"unknown preset {name!r}; choose from {sorted(PRESETS)}") from None
