"""Scenario runner: registered parameter sets, CSV emission, summary report.

Each registered scenario bakes in one reported result's parameter set,
builds the requested model, integrates (and solves for the steady state
where the quoted number is a steady-state value), writes one CSV per
trajectory plus a key = value summary file, and returns typed check rows
comparing the reproduced numbers against their targets.  The pipeline is
deterministic: no randomness, no timestamps, floats printed with 17
significant digits, so reruns with identical configuration yield
byte-identical files.

Trajectory CSVs carry the fixed schema

    t,P000,P111,PGHZp,PGHZm,fidelity,trace,min_eig

with populations of the atomic (cavity-traced) state and fidelity =
sqrt(PGHZm).  The paired-curve comparison scenario tracks all eight qubit
product populations instead; table scenarios emit one row per parameter
set.  A plain matplotlib plot script is written next to every CSV but
never executed here.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, replace
from pathlib import Path
from typing import Callable, Dict, List, Mapping, Optional, Sequence, Tuple

import numpy as np

from .dynamics import (
    IntegratorControls,
    LindbladModel,
    SteadyStateResult,
    Trajectory,
    integrate,
    population,
    reduce_to_atoms,
    steady_state_krylov,
)
from .effective import (
    build_effective_full_model,
    build_effective_zpump,
    symmetric_hr_4x4,
    zeno_decompose,
)
from .hilbert import DensityMatrix, SpaceSpec, StateVector, build_space, ket_from_labels
from .model import (
    G_UNITS,
    MHZ_2PI,
    ModelParams,
    build_collapse_channels,
    build_hk,
    build_hr,
    build_stark_compensation,
    named_states,
)

__all__ = [
    "SCHEMA",
    "ScenarioConfig",
    "CheckRow",
    "ScenarioResult",
    "SCENARIOS",
    "scenario_defaults",
    "parse_config",
    "emit_config",
    "run_scenario",
    "run_param_table",
    "run_g_fluctuation",
    "run_appendix_compare",
    "emit_report",
]

#: Column order of every standard trajectory CSV.
SCHEMA = ("t", "P000", "P111", "PGHZp", "PGHZm", "fidelity", "trace", "min_eig")

_QUBIT_LABELS = tuple("".join(b) for b in itertools.product("01", repeat=3))

#: Paired-curve CSVs track every qubit product population.
APPENDIX_SCHEMA = ("t",) + tuple(f"P{lab}" for lab in _QUBIT_LABELS) + ("trace", "min_eig")

_MODELS = ("full", "effective", "zpump-only", "symmetric-4x4")

_FMT = "%.17g"


def _fmt(x: float) -> str:
    return _FMT % (x,)


@dataclass(frozen=True)
class ScenarioConfig:
    """Everything one scenario run depends on.

    params keeps the units it was declared in ("g-units" or "MHz×2π");
    conversion to g-units happens once at model-build time, with atom 1's
    coupling as the reference.  tmax and the integrator tolerances are
    always in g-units (time axis g·t) regardless of the params units.
    """

    scenario: str
    params: ModelParams
    model: str = "full"
    initial: str = "mixed"
    cutoff: int = 1
    tmax: float = 2000.0
    n_points: int = 201
    rtol: float = 1e-8
    atol: float = 1e-10
    out_dir: str = ""

    def __post_init__(self):
        if self.scenario not in SCENARIOS:
            raise ValueError(
                f"unknown scenario {self.scenario!r}; registered: {sorted(SCENARIOS)}"
            )
        if self.model not in _MODELS:
            raise ValueError(f"unknown model selector {self.model!r}")
        if not self.tmax > 0:
            raise ValueError("tmax must be positive")
        if self.n_points < 2:
            raise ValueError("need at least two output points")
        if self.model in ("full", "zpump-only") and self.cutoff < 1:
            raise ValueError("full-model runs need cavity cutoff >= 1")

    def with_updates(self, **kwargs) -> "ScenarioConfig":
        return replace(self, **kwargs)

    def resolved_out_dir(self) -> Path:
        return Path(self.out_dir) if self.out_dir else Path("runs") / self.scenario


@dataclass(frozen=True)
class CheckRow:
    """One reproduced number against its target.

    kind "abs": pass iff |value - target| <= tol; "floor": value >= target - tol;
    "ceil": value <= target + tol.
    """

    name: str
    value: float
    target: float
    tol: float
    kind: str = "abs"

    @property
    def passed(self) -> bool:
        if self.kind == "abs":
            return abs(self.value - self.target) <= self.tol
        if self.kind == "floor":
            return self.value >= self.target - self.tol
        if self.kind == "ceil":
            return self.value <= self.target + self.tol
        raise ValueError(f"unknown check kind {self.kind!r}")

    def render(self) -> str:
        verdict = "PASS" if self.passed else "FAIL"
        rel = {"abs": "=", "floor": ">=", "ceil": "<="}[self.kind]
        return (
            f"{verdict}  {self.name}: {self.value:.6f} "
            f"(target {rel} {self.target:g}, tol {self.tol:g})"
        )


@dataclass(frozen=True)
class ScenarioResult:
    """Output record of one scenario run."""

    scenario: str
    summary: Dict[str, object]
    checks: Tuple[CheckRow, ...]
    csv_paths: Tuple[Path, ...]
    trajectories: Tuple[Trajectory, ...] = ()

    @property
    def all_passed(self) -> bool:
        return all(c.passed for c in self.checks)


# --------------------------------------------------------------------------
# configuration files


_PARAM_KEYS = (
    "omega", "delta1", "delta2", "delta3", "omega_r", "delta_cap", "u",
    "gamma_e", "gamma_r", "kappa",
)
_RUN_KEYS = ("cutoff", "tmax", "rtol", "atol", "model", "initial", "out_dir")
_G_KEYS = ("g_mhz", "g1_mhz", "g2_mhz", "g3_mhz")
_ALL_KEYS = ("units",) + _G_KEYS + _PARAM_KEYS + _RUN_KEYS


def emit_config(config: ScenarioConfig) -> str:
    """Render a config as the flat key = value format parse_config reads."""
    p = config.params
    lines = [f"# scenario: {config.scenario}"]
    if p.units == G_UNITS:
        lines.append("units = g")
        if p.g != (1.0, 1.0, 1.0):
            raise ValueError(
                "g-units configs fix the couplings at 1; express unequal "
                "couplings in MHz units"
            )
    else:
        lines.append("units = mhz")
        if p.g[0] == p.g[1] == p.g[2]:
            lines.append(f"g_mhz = {p.g[0]!r}")
        else:
            for k, val in zip(("g1_mhz", "g2_mhz", "g3_mhz"), p.g):
                lines.append(f"{k} = {val!r}")
    if p.u[0] != p.u[1] or p.u[0] != p.u[2]:
        raise ValueError("config files carry a single uniform u value")
    values = {
        "omega": p.omega, "delta1": p.delta[0], "delta2": p.delta[1],
        "delta3": p.delta[2], "omega_r": p.omega_r, "delta_cap": p.delta_cap,
        "u": p.u[0], "gamma_e": p.gamma_e, "gamma_r": p.gamma_r, "kappa": p.kappa,
    }
    for k in _PARAM_KEYS:
        lines.append(f"{k} = {values[k]!r}")
    lines.append(f"cutoff = {config.cutoff}")
    lines.append(f"tmax = {config.tmax!r}")
    lines.append(f"rtol = {config.rtol!r}")
    lines.append(f"atol = {config.atol!r}")
    lines.append(f"model = {config.model}")
    lines.append(f"initial = {config.initial}")
    lines.append(f"out_dir = {config.out_dir}")
    return "\n".join(lines) + "\n"


def parse_config(text: str, scenario: str) -> ScenarioConfig:
    """Parse the flat key = value format into a ScenarioConfig.

    Unknown keys are errors.  Missing keys fall back to the named
    scenario's defaults.  In MHz units the couplings come from g_mhz
    (uniform) or g1_mhz/g2_mhz/g3_mhz; g-units configs must not carry
    coupling keys (the reference coupling is 1 by definition).
    """
    raw: Dict[str, str] = {}
    for lineno, line in enumerate(text.splitlines(), 1):
        stripped = line.split("#", 1)[0].strip()
        if not stripped:
            continue
        if "=" not in stripped:
            raise ValueError(f"line {lineno}: expected key = value, got {line!r}")
        key, val = (s.strip() for s in stripped.split("=", 1))
        if key not in _ALL_KEYS:
            raise ValueError(f"line {lineno}: unknown config key {key!r}")
        if key in raw:
            raise ValueError(f"line {lineno}: duplicate key {key!r}")
        raw[key] = val

    base = scenario_defaults(scenario)
    units_tag = raw.pop("units", "g" if base.params.units == G_UNITS else "mhz")
    if units_tag not in ("g", "mhz"):
        raise ValueError(f"units must be 'g' or 'mhz', got {units_tag!r}")

    if units_tag == "g":
        for k in _G_KEYS:
            if k in raw:
                raise ValueError(f"{k} is meaningless in g-units (coupling is 1)")
        g = (1.0, 1.0, 1.0)
    elif "g_mhz" in raw:
        if any(k in raw for k in ("g1_mhz", "g2_mhz", "g3_mhz")):
            raise ValueError("give either g_mhz or the three g1/g2/g3_mhz keys")
        g = (float(raw.pop("g_mhz")),) * 3
    elif any(k in raw for k in ("g1_mhz", "g2_mhz", "g3_mhz")):
        try:
            g = tuple(float(raw.pop(k)) for k in ("g1_mhz", "g2_mhz", "g3_mhz"))
        except KeyError as exc:
            raise ValueError("g1_mhz, g2_mhz, g3_mhz must all be given") from exc
    elif base.params.units == MHZ_2PI:
        g = base.params.g
    else:
        raise ValueError("mhz configs need g_mhz or g1_mhz/g2_mhz/g3_mhz")

    same_units = (units_tag == "g") == (base.params.units == G_UNITS)

    def param(key: str, old: float) -> float:
        if key in raw:
            return float(raw.pop(key))
        if not same_units:
            raise ValueError(f"units changed to {units_tag!r}; key {key!r} must be given")
        return old

    bp = base.params
    params = ModelParams(
        g=g,
        omega=param("omega", bp.omega),
        delta=(
            param("delta1", bp.delta[0]),
            param("delta2", bp.delta[1]),
            param("delta3", bp.delta[2]),
        ),
        omega_r=param("omega_r", bp.omega_r),
        delta_cap=param("delta_cap", bp.delta_cap),
        u=(lambda u: (u, u, u))(param("u", bp.u[0])),
        gamma_e=param("gamma_e", bp.gamma_e),
        gamma_r=param("gamma_r", bp.gamma_r),
        kappa=param("kappa", bp.kappa),
        units=G_UNITS if units_tag == "g" else MHZ_2PI,
    )
    config = base.with_updates(
        params=params,
        cutoff=int(raw.pop("cutoff", base.cutoff)),
        tmax=float(raw.pop("tmax", base.tmax)),
        rtol=float(raw.pop("rtol", base.rtol)),
        atol=float(raw.pop("atol", base.atol)),
        model=raw.pop("model", base.model),
        initial=raw.pop("initial", base.initial),
        out_dir=raw.pop("out_dir", base.out_dir),
    )
    assert not raw
    return config


# --------------------------------------------------------------------------
# scenario defaults

_FIG3_PARAMS = ModelParams(
    omega=0.02, delta=(-0.01, 0.02, -0.01), gamma_e=0.1, kappa=0.0
)
_FIG4_PARAMS = ModelParams(
    g=(50.0, 50.0, 50.0), omega=0.5, delta=(-0.25, 0.5, -0.25),
    omega_r=50.0, delta_cap=2900.0, u=(2900.0, 2900.0, 2900.0),
    gamma_e=3.0, gamma_r=0.144, kappa=1.0, units=MHZ_2PI,
)


def scenario_defaults(name: str) -> ScenarioConfig:
    """The registered default configuration of a scenario."""
    if name not in SCENARIOS:
        raise ValueError(f"unknown scenario {name!r}; registered: {sorted(SCENARIOS)}")
    if name in ("fig3", "fig3-inset"):
        params = _FIG3_PARAMS if name == "fig3" else _FIG3_PARAMS.with_updates(kappa=0.1)
        return ScenarioConfig(scenario=name, params=params, model="zpump-only", cutoff=2)
    if name == "fig4-full":
        return ScenarioConfig(scenario=name, params=_FIG4_PARAMS, model="full", cutoff=1)
    if name == "fig4-eff":
        return ScenarioConfig(scenario=name, params=_FIG4_PARAMS, model="effective")
    if name == "table":
        return ScenarioConfig(scenario=name, params=_TABLE_ROWS[0][1], model="full", cutoff=1)
    if name == "gfluct":
        return ScenarioConfig(scenario=name, params=_FIG4_PARAMS, model="full", cutoff=1)
    if name == "appendix":
        params = _FIG3_PARAMS.with_updates(gamma_e=0.0)
        return ScenarioConfig(
            scenario=name, params=params, model="zpump-only", cutoff=1, initial="001"
        )
    if name == "zeno-report":
        return ScenarioConfig(scenario=name, params=_FIG3_PARAMS, model="zpump-only", cutoff=1)
    if name == "custom":
        return ScenarioConfig(scenario=name, params=_FIG3_PARAMS, model="zpump-only", cutoff=2)
    raise AssertionError(name)


# --------------------------------------------------------------------------
# model and state construction


def build_model(config: ScenarioConfig) -> LindbladModel:
    """Construct the LindbladModel a config selects (g-units internally).

    model "effective" builds the combined reduced model when the Rydberg
    drive is on, and the bare Z-pump reduction when omega_r == 0.
    """
    params = config.params.to_g_units()
    if config.model == "full":
        space = build_space(3, ("0", "1", "e", "r"), config.cutoff)
        h = build_hk(params, space) + build_hr(params, space)
        h = h + build_stark_compensation(params, space)
        return LindbladModel(space, h, tuple(build_collapse_channels(params, space)))
    if config.model == "zpump-only":
        space = build_space(3, ("0", "1", "e"), config.cutoff)
        return LindbladModel(
            space, build_hk(params, space), tuple(build_collapse_channels(params, space))
        )
    if config.model == "effective":
        if params.omega_r == 0:
            tdh, channels = build_effective_zpump(params)
            return LindbladModel(tdh.space, tdh, tuple(channels))
        return build_effective_full_model(params)
    raise ValueError(f"model {config.model!r} is not a Lindblad model")


def initial_state(config: ScenarioConfig, space: SpaceSpec) -> DensityMatrix:
    """Resolve the config's initial-state selector on a model's space."""
    name = config.initial
    if name == "mixed":
        return named_states(space)["mixed"]
    if len(name) == 3 and set(name) <= {"0", "1"}:
        return ket_from_labels(space, name).to_density_matrix()
    states = named_states(space)
    if name in states:
        state = states[name]
        return state if isinstance(state, DensityMatrix) else state.to_density_matrix()
    raise ValueError(f"unknown initial state {name!r}")


def _atomic_kets(space: SpaceSpec) -> Dict[str, StateVector]:
    at = space.without_cavity() if space.has_cavity else space
    ns = named_states(at)
    return {
        "P000": ket_from_labels(at, "000"),
        "P111": ket_from_labels(at, "111"),
        "PGHZp": ns["GHZ+"],
        "PGHZm": ns["GHZ-"],
    }


def standard_observables(space: SpaceSpec) -> Dict[str, Callable[[np.ndarray], float]]:
    """The fixed-schema observables: atomic populations plus fidelity."""
    kets = _atomic_kets(space)

    def pop(ket):
        return lambda rho: population(reduce_to_atoms(space, rho), ket)

    obs = {name: pop(k) for name, k in kets.items()}
    ghzm = kets["PGHZm"]
    obs["fidelity"] = lambda rho: float(
        np.sqrt(max(population(reduce_to_atoms(space, rho), ghzm), 0.0))
    )
    return obs


def _qubit_observables(space: SpaceSpec) -> Dict[str, Callable[[np.ndarray], float]]:
    at = space.without_cavity() if space.has_cavity else space
    out = {}
    for lab in _QUBIT_LABELS:
        ket = ket_from_labels(at, lab)
        out[f"P{lab}"] = lambda rho, k=ket: population(reduce_to_atoms(space, rho), k)
    return out


# --------------------------------------------------------------------------
# file emission


def write_csv(path: Path, header: Sequence[str], columns: Mapping[str, np.ndarray]) -> None:
    n = len(columns[header[0]])
    for name in header:
        if len(columns[name]) != n:
            raise ValueError(f"column {name!r} has mismatched length")
    lines = [",".join(header)]
    for i in range(n):
        lines.append(",".join(_fmt(float(columns[name][i])) for name in header))
    path.write_text("\n".join(lines) + "\n")


def _trajectory_columns(traj: Trajectory, header: Sequence[str]) -> Dict[str, np.ndarray]:
    cols = {"t": traj.times}
    for name in header[1:]:
        cols[name] = traj.record(name)
    return cols


_PLOT_TEMPLATE = """\
#!/usr/bin/env python3
# Renders {csv} produced by the {scenario} scenario.
import csv
import matplotlib.pyplot as plt

with open("{csv}") as fh:
    rows = list(csv.DictReader(fh))
t = [float(r["t"]) for r in rows]
fig, ax = plt.subplots()
for column in ({columns}):
    ax.plot(t, [float(r[column]) for r in rows], label=column)
ax.set_xlabel("g t")
ax.set_ylabel("population")
ax.legend()
fig.savefig("{stem}.png", dpi=160)
"""


def _write_plot_script(out: Path, scenario: str, csv_name: str, columns: Sequence[str]) -> Path:
    stem = csv_name.rsplit(".", 1)[0]
    script = _PLOT_TEMPLATE.format(
        csv=csv_name,
        scenario=scenario,
        columns=", ".join(f'"{c}"' for c in columns) + ("," if len(columns) == 1 else ""),
        stem=stem,
    )
    path = out / f"{stem}_plot.py"
    path.write_text(script)
    return path


def _write_summary(out: Path, scenario: str, summary: Mapping[str, object],
                   checks: Sequence[CheckRow]) -> Path:
    lines = [f"scenario = {scenario}"]
    for key, val in summary.items():
        lines.append(f"{key} = {_fmt(val) if isinstance(val, float) else val}")
    for check in checks:
        lines.append(check.render())
    path = out / f"{scenario}_summary.txt"
    path.write_text("\n".join(lines) + "\n")
    return path


# --------------------------------------------------------------------------
# scenario runners


def _expm_controls(config: ScenarioConfig) -> IntegratorControls:
    return IntegratorControls(
        rtol=config.rtol, atol=config.atol, method="expm", n_points=config.n_points
    )


def _run_standard_trajectory(config: ScenarioConfig, model: LindbladModel) -> Trajectory:
    obs = standard_observables(model.space)
    rho0 = initial_state(config, model.space)
    controls = (
        _expm_controls(config)
        if model.is_static
        else IntegratorControls(rtol=config.rtol, atol=config.atol, n_points=config.n_points)
    )
    return integrate(model, rho0, (0.0, config.tmax), observables=obs, controls=controls)


def _steady_summary(model: LindbladModel, seed: DensityMatrix) -> Tuple[SteadyStateResult, Dict[str, float]]:
    res = steady_state_krylov(model, rho0=seed)
    kets = _atomic_kets(model.space)
    rho_at = reduce_to_atoms(model.space, res.state.data)
    pop = float(np.real(np.vdot(kets["PGHZm"].data, rho_at @ kets["PGHZm"].data)))
    info = {
        "steady_PGHZm": pop,
        "steady_fidelity": float(np.sqrt(max(pop, 0.0))),
        "steady_residual": res.residual,
        "steady_converged": res.converged,
    }
    return res, info


def _run_fig3(config: ScenarioConfig) -> ScenarioResult:
    out = config.resolved_out_dir()
    out.mkdir(parents=True, exist_ok=True)
    model = build_model(config)
    traj = _run_standard_trajectory(config, model)
    csv_path = out / f"{config.scenario}.csv"
    write_csv(csv_path, SCHEMA, _trajectory_columns(traj, SCHEMA))
    _write_plot_script(out, config.scenario, csv_path.name, SCHEMA[1:5])
    p000 = float(traj.record("P000")[-1])
    p111 = float(traj.record("P111")[-1])
    checks = (
        CheckRow("P000 at t=2000/g", p000, 0.875, 0.010),
        CheckRow("P111 at t=2000/g", p111, 0.125, 0.005),
    )
    summary = {
        "evaluation_time": float(traj.times[-1]),
        "P000": p000,
        "P111": p111,
        "PGHZ_sum": float(traj.record("PGHZp")[-1] + traj.record("PGHZm")[-1]),
    }
    paths = [csv_path, _write_summary(out, config.scenario, summary, checks)]
    return ScenarioResult(config.scenario, summary, checks, tuple(paths), (traj,))


def _run_fig3_inset(config: ScenarioConfig) -> ScenarioResult:
    """Z-pump GHZ-coherence sums with and without cavity leakage."""
    out = config.resolved_out_dir()
    out.mkdir(parents=True, exist_ok=True)
    sums = {}
    paths: List[Path] = []
    trajs = []
    for tag, kappa in (("leaky", config.params.kappa), ("ideal", 0.0)):
        cfg = config.with_updates(params=config.params.with_updates(kappa=kappa))
        model = build_model(cfg)
        traj = _run_standard_trajectory(cfg, model)
        trajs.append(traj)
        name = f"{config.scenario}.csv" if tag == "leaky" else f"{config.scenario}-ideal.csv"
        csv_path = out / name
        write_csv(csv_path, SCHEMA, _trajectory_columns(traj, SCHEMA))
        _write_plot_script(out, config.scenario, csv_path.name, ("PGHZp", "PGHZm"))
        paths.append(csv_path)
        sums[tag] = float(traj.record("PGHZp")[-1] + traj.record("PGHZm")[-1])
    checks = (
        CheckRow("PGHZ+ + PGHZ- with cavity loss", sums["leaky"], 0.9866, 0.005),
        CheckRow("PGHZ+ + PGHZ- without cavity loss", sums["ideal"], 0.9982, 0.002),
    )
    summary = {
        "evaluation_time": config.tmax,
        "PGHZ_sum_leaky": sums["leaky"],
        "PGHZ_sum_ideal": sums["ideal"],
        "note": "sums read at t=2000/g on the cavity-laser pumping model",
    }
    paths.append(_write_summary(out, config.scenario, summary, checks))
    return ScenarioResult(config.scenario, summary, checks, tuple(paths), tuple(trajs))


def _run_fig4(config: ScenarioConfig) -> ScenarioResult:
    """Trajectory plus steady state for the driven scheme (full or effective)."""
    out = config.resolved_out_dir()
    out.mkdir(parents=True, exist_ok=True)
    model = build_model(config)
    traj = _run_standard_trajectory(config, model)
    csv_path = out / f"{config.scenario}.csv"
    write_csv(csv_path, SCHEMA, _trajectory_columns(traj, SCHEMA))
    _write_plot_script(out, config.scenario, csv_path.name, ("PGHZm", "fidelity"))
    seed = initial_state(config, model.space)
    _, steady_info = _steady_summary(model, seed)
    summary: Dict[str, object] = {
        "trajectory_tmax": float(traj.times[-1]),
        "final_PGHZm": float(traj.record("PGHZm")[-1]),
        "final_fidelity": float(traj.record("fidelity")[-1]),
    }
    summary.update(steady_info)
    checks: Tuple[CheckRow, ...] = ()
    if config.scenario == "fig4-full":
        checks = (
            CheckRow("steady-state fidelity to GHZ-", summary["steady_fidelity"], 0.9905, 0.005),
        )
    paths = [csv_path, _write_summary(out, config.scenario, summary, checks)]
    return ScenarioResult(config.scenario, summary, checks, tuple(paths), (traj,))


_TABLE_ROWS: Tuple[Tuple[str, ModelParams, float], ...] = (
    (
        "delta-100g",
        ModelParams(
            g=(10.6,) * 3, omega=0.002 * 10.6, delta=(-0.001 * 10.6, 0.002 * 10.6, -0.001 * 10.6),
            omega_r=10.6, delta_cap=1060.0, u=(1060.0,) * 3,
            gamma_e=3.0, gamma_r=0.03, kappa=1.3, units=MHZ_2PI,
        ),
        0.9628,
    ),
    (
        "delta-80g",
        ModelParams(
            g=(14.4,) * 3, omega=0.005 * 14.4, delta=(-0.0025 * 14.4, 0.005 * 14.4, -0.0025 * 14.4),
            omega_r=14.4, delta_cap=1152.0, u=(1152.0,) * 3,
            gamma_e=3.0, gamma_r=0.03, kappa=0.66, units=MHZ_2PI,
        ),
        0.9815,
    ),
    (
        "delta-40g",
        ModelParams(
            g=(185.0,) * 3, omega=0.002 * 185.0, delta=(-0.001 * 185.0, 0.002 * 185.0, -0.001 * 185.0),
            omega_r=0.5 * 185.0, delta_cap=40.0 * 185.0, u=(40.0 * 185.0,) * 3,
            gamma_e=3.0, gamma_r=0.144, kappa=53.0, units=MHZ_2PI,
        ),
        0.9824,
    ),
)


def _steady_row(name: str, params: ModelParams, cutoff: int) -> Dict[str, object]:
    cfg = ScenarioConfig(scenario="custom", params=params, model="full", cutoff=cutoff)
    model = build_model(cfg)
    seed = named_states(model.space)["mixed"]
    _, info = _steady_summary(model, seed)
    row: Dict[str, object] = {"name": name}
    row.update(info)
    return row


def run_param_table(out_dir: Optional[Path] = None, cutoff: int = 1) -> List[Dict[str, object]]:
    """Steady-state fidelities for the three reported parameter sets."""
    rows = []
    for name, params, target in _TABLE_ROWS:
        row = _steady_row(name, params, cutoff)
        row["target"] = target
        rows.append(row)
    if out_dir is not None:
        out_dir.mkdir(parents=True, exist_ok=True)
        header = ("name", "fidelity", "population", "residual", "target")
        lines = [",".join(header)]
        for r in rows:
            lines.append(
                ",".join(
                    (
                        str(r["name"]),
                        _fmt(r["steady_fidelity"]),
                        _fmt(r["steady_PGHZm"]),
                        _fmt(r["steady_residual"]),
                        _fmt(r["target"]),
                    )
                )
            )
        (out_dir / "table.csv").write_text("\n".join(lines) + "\n")
    return rows


def _run_table(config: ScenarioConfig) -> ScenarioResult:
    out = config.resolved_out_dir()
    rows = run_param_table(out, cutoff=config.cutoff)
    checks = tuple(
        CheckRow(f"fidelity {row['name']}", row["steady_fidelity"], row["target"], 0.005)
        for row in rows
    )
    summary: Dict[str, object] = {}
    for row in rows:
        summary[f"fidelity_{row['name']}"] = row["steady_fidelity"]
        summary[f"residual_{row['name']}"] = row["steady_residual"]
    paths = (out / "table.csv", _write_summary(out, config.scenario, summary, checks))
    return ScenarioResult(config.scenario, summary, checks, paths)


_GFLUCT_ROWS: Tuple[Tuple[str, Tuple[float, float, float], float, float, str], ...] = (
    ("g-50-50-50", (50.0, 50.0, 50.0), 0.9905, 0.005, "abs"),
    ("g-50-45-40", (50.0, 45.0, 40.0), 0.9900, 0.003, "floor"),
    ("g-50-45-55", (50.0, 45.0, 55.0), 0.9900, 0.003, "floor"),
)


def run_g_fluctuation(out_dir: Optional[Path] = None, cutoff: int = 1) -> List[Dict[str, object]]:
    """Steady-state fidelities under unequal cavity couplings."""
    rows = []
    for name, g, target, tol, kind in _GFLUCT_ROWS:
        params = _FIG4_PARAMS.with_updates(g=g)
        row = _steady_row(name, params, cutoff)
        row.update({"target": target, "tol": tol, "kind": kind})
        rows.append(row)
    if out_dir is not None:
        out_dir.mkdir(parents=True, exist_ok=True)
        header = ("name", "fidelity", "population", "residual", "target")
        lines = [",".join(header)]
        for r in rows:
            lines.append(
                ",".join(
                    (
                        str(r["name"]),
                        _fmt(r["steady_fidelity"]),
                        _fmt(r["steady_PGHZm"]),
                        _fmt(r["steady_residual"]),
                        _fmt(r["target"]),
                    )
                )
            )
        (out_dir / "gfluct.csv").write_text("\n".join(lines) + "\n")
    return rows


def _run_gfluct(config: ScenarioConfig) -> ScenarioResult:
    out = config.resolved_out_dir()
    rows = run_g_fluctuation(out, cutoff=config.cutoff)
    checks = tuple(
        CheckRow(f"fidelity {row['name']}", row["steady_fidelity"], row["target"],
                 row["tol"], row["kind"])
        for row in rows
    )
    summary = {f"fidelity_{row['name']}": row["steady_fidelity"] for row in rows}
    paths = (out / "gfluct.csv", _write_summary(out, config.scenario, summary, checks))
    return ScenarioResult(config.scenario, summary, checks, paths)


def run_appendix_compare(
    out_dir: Optional[Path] = None,
    omega: float = 0.02,
    tmax: float = 2000.0,
    n_points: int = 201,
    cutoff: int = 1,
) -> Dict[str, object]:
    """Full-vs-reduced pumping curves for the two reported initial states.

    Both models run without dissipation (the comparison isolates the
    Hamiltonian reduction).  Returns the paired trajectories and the max
    pointwise population deviation per initial state; CSVs carry all eight
    qubit product populations for overlay plotting.
    """
    params = ModelParams(omega=omega, delta=(-omega / 2, omega, -omega / 2))
    space = build_space(3, ("0", "1", "e"), cutoff)
    full = LindbladModel(space, build_hk(params, space), ())
    tdh, _ = build_effective_zpump(params)
    reduced = LindbladModel(tdh.space, tdh, ())
    grid = np.linspace(0.0, tmax, n_points)
    result: Dict[str, object] = {"deviations": {}, "trajectories": {}}
    for init in ("001", "011"):
        tr_full = integrate(
            full, ket_from_labels(space, init).to_density_matrix(), grid,
            observables=_qubit_observables(space),
            controls=IntegratorControls(method="expm"),
        )
        tr_red = integrate(
            reduced, ket_from_labels(tdh.space, init).to_density_matrix(), grid,
            observables=_qubit_observables(tdh.space),
        )
        dev = max(
            float(np.max(np.abs(tr_full.record(f"P{lab}") - tr_red.record(f"P{lab}"))))
            for lab in _QUBIT_LABELS
        )
        result["deviations"][init] = dev
        result["trajectories"][init] = (tr_full, tr_red)
        if out_dir is not None:
            out_dir.mkdir(parents=True, exist_ok=True)
            for tag, tr in (("full", tr_full), ("reduced", tr_red)):
                path = out_dir / f"appendix-{tag}-{init}.csv"
                write_csv(path, APPENDIX_SCHEMA, _trajectory_columns(tr, APPENDIX_SCHEMA))
            _write_plot_script(
                out_dir, "appendix", f"appendix-full-{init}.csv",
                tuple(f"P{lab}" for lab in _QUBIT_LABELS),
            )
    return result


def _run_appendix(config: ScenarioConfig) -> ScenarioResult:
    out = config.resolved_out_dir()
    params = config.params.to_g_units()
    result = run_appendix_compare(
        out, omega=params.omega, tmax=config.tmax,
        n_points=config.n_points, cutoff=config.cutoff,
    )
    devs = result["deviations"]
    checks = tuple(
        CheckRow(f"max pointwise deviation from |{init}>", devs[init], 0.0, 0.05, "ceil")
        for init in sorted(devs)
    )
    summary = {f"max_deviation_{init}": devs[init] for init in sorted(devs)}
    csvs = tuple(sorted(out.glob("appendix-*.csv")))
    paths = csvs + (_write_summary(out, config.scenario, summary, checks),)
    trajs = tuple(t for pair in result["trajectories"].values() for t in pair)
    return ScenarioResult(config.scenario, summary, checks, paths, trajs)


def _zeno_block_states(space: SpaceSpec) -> List[StateVector]:
    """The closed one-excitation block of the cavity coupling.

    Spanned by the five dark states at photon number 0, the symmetric
    bright state, and the ground state with one photon.
    """
    states = named_states(space)
    block = [states[f"D{k}"] for k in range(1, 6)]
    s3 = 1 / np.sqrt(3)
    v = np.zeros(space.dim, dtype=complex)
    for labels in ("e00", "0e0", "00e"):
        v[space.basis_index(labels, 0)] = s3
    block.append(StateVector(space, v))
    block.append(ket_from_labels(space, "000", photon=1))
    return block


def _run_zeno_report(config: ScenarioConfig) -> ScenarioResult:
    """Spectral decomposition of the cavity-coupling block, written as text."""
    out = config.resolved_out_dir()
    out.mkdir(parents=True, exist_ok=True)
    params = config.params.to_g_units()
    space = build_space(3, ("0", "1", "e"), max(config.cutoff, 1))
    coupling = build_hk(params.with_updates(omega=0.0, delta=(0.0, 0.0, 0.0)), space)
    block = _zeno_block_states(space)
    decomp = zeno_decompose(coupling, subspace=block)
    eigs = decomp.eigenvalues
    dims = decomp.dims
    sqrt3 = float(np.sqrt(3.0))
    nan = float("nan")
    three = len(eigs) == 3
    checks = (
        CheckRow("negative coupling eigenvalue / g", float(eigs[0]), -sqrt3, 1e-10),
        CheckRow("zero coupling eigenvalue", float(eigs[1]) if three else nan, 0.0, 1e-10),
        CheckRow("positive coupling eigenvalue / g", float(eigs[-1]), sqrt3, 1e-10),
        CheckRow("zero-eigenvalue subspace dimension", float(dims[1]) if three else nan, 5.0, 0.0),
    )
    lines = ["one-excitation block of the cavity coupling", ""]
    lines.append(f"block dimension = {sum(dims)}")
    lines.append(f"eigenvalues / g = {', '.join(_fmt(e) for e in eigs)}")
    lines.append(f"subspace dimensions = {tuple(int(d) for d in dims)}")
    lines.append("")
    lines.append("basis: D1..D5 at photon 0, symmetric bright state, |000>|1_c>")
    lines.append("zero subspace hosts the pumping; the +/- sqrt(3) g doublet is the")
    lines.append("bright pair split by the collective cavity coupling")
    text = "\n".join(lines) + "\n"
    report = out / "zeno-report.txt"
    report.write_text(text)
    print(text, end="")
    summary = {
        "eigenvalues": ", ".join(_fmt(e) for e in eigs),
        "dims": str(tuple(int(d) for d in dims)),
    }
    paths = (report, _write_summary(out, config.scenario, summary, checks))
    return ScenarioResult(config.scenario, summary, checks, paths)


def _run_symmetric_4x4(config: ScenarioConfig) -> ScenarioResult:
    """Exact propagation of the collective drive ladder, standard schema.

    The four amplitudes live on (in order) the all-plus product state, the
    symmetric one- and two-excitation Rydberg states, and |rrr>; the CSV
    populations are those of the embedded three-atom pure state.
    """
    out = config.resolved_out_dir()
    out.mkdir(parents=True, exist_ok=True)
    params = config.params.to_g_units()
    if config.initial not in ("+++",):
        raise ValueError("the collective ladder starts from the all-plus state")
    h4 = symmetric_hr_4x4(params.omega_r, params.delta_cap, params.u[0])
    w, v = np.linalg.eigh(h4)
    c0 = np.zeros(4, dtype=complex)
    c0[0] = 1.0
    grid = np.linspace(0.0, config.tmax, config.n_points)
    amps = (v @ (np.exp(-1j * np.outer(w, grid)) * (v.conj().T @ c0)[:, None])).T
    p = np.abs(amps) ** 2
    cols = {
        "t": grid,
        "P000": p[:, 0] / 8.0,
        "P111": p[:, 0] / 8.0,
        "PGHZp": p[:, 0] / 4.0,
        "PGHZm": np.zeros(grid.size),
        "fidelity": np.zeros(grid.size),
        "trace": p.sum(axis=1),
        "min_eig": np.zeros(grid.size),
    }
    csv_path = out / f"{config.scenario}.csv"
    write_csv(csv_path, SCHEMA, cols)
    _write_plot_script(out, config.scenario, csv_path.name, ("P000", "PGHZp"))
    summary = {
        "final_Prrr": float(p[-1, 3]),
        "max_Prrr": float(p[:, 3].max()),
    }
    paths = (csv_path, _write_summary(out, config.scenario, summary, ()))
    return ScenarioResult(config.scenario, summary, (), paths)


def _run_custom(config: ScenarioConfig) -> ScenarioResult:
    if config.model == "symmetric-4x4":
        return _run_symmetric_4x4(config)
    out = config.resolved_out_dir()
    out.mkdir(parents=True, exist_ok=True)
    model = build_model(config)
    traj = _run_standard_trajectory(config, model)
    csv_path = out / f"{config.scenario}.csv"
    write_csv(csv_path, SCHEMA, _trajectory_columns(traj, SCHEMA))
    _write_plot_script(out, config.scenario, csv_path.name, SCHEMA[1:5])
    summary = {name: float(traj.record(name)[-1]) for name in SCHEMA[1:]}
    summary["tmax"] = float(traj.times[-1])
    paths = (csv_path, _write_summary(out, config.scenario, summary, ()))
    return ScenarioResult(config.scenario, summary, (), paths, (traj,))


SCENARIOS: Dict[str, Callable[[ScenarioConfig], ScenarioResult]] = {
    "fig3": _run_fig3,
    "fig3-inset": _run_fig3_inset,
    "fig4-full": _run_fig4,
    "fig4-eff": _run_fig4,
    "table": _run_table,
    "gfluct": _run_gfluct,
    "appendix": _run_appendix,
    "zeno-report": _run_zeno_report,
    "custom": _run_custom,
}


def run_scenario(config: ScenarioConfig) -> ScenarioResult:
    """Run one registered scenario to completion (files written, checks evaluated)."""
    return SCENARIOS[config.scenario](config)


def emit_report(results: Sequence[ScenarioResult], path: Path) -> str:
    """Aggregate check rows from completed scenarios into one pass/fail report.

    When both fig4 scenarios are present, the cross-model pointwise
    population comparison over their shared time grid is appended.
    """
    lines = ["reproduction report", "===================", ""]
    by_name = {r.scenario: r for r in results}
    rows: List[CheckRow] = []
    for result in results:
        rows.extend(result.checks)
    if "fig4-full" in by_name and "fig4-eff" in by_name:
        full = by_name["fig4-full"].trajectories
        eff = by_name["fig4-eff"].trajectories
        if full and eff and np.array_equal(full[0].times, eff[0].times):
            dev = max(
                float(np.max(np.abs(full[0].record(n) - eff[0].record(n))))
                for n in ("P000", "P111", "PGHZp", "PGHZm")
            )
            rows.append(
                CheckRow("full vs reduced fig4 populations (pointwise)", dev, 0.0, 0.02, "ceil")
            )
    for row in rows:
        lines.append(row.render())
    lines.append("")
    n_pass = sum(r.passed for r in rows)
    lines.append(f"{n_pass}/{len(rows)} checks passed")
    text = "\n".join(lines) + "\n"
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(text)
    return text
