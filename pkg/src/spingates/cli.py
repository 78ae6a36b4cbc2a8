"""Command-line front end: config parsing, experiment execution, CSV output.

All user-facing frequencies are quoted as plain numbers f meaning an angular
frequency of 2*pi*f rad/us (f in MHz); times are in us.  Config files are
flat ``key = value`` text with ``#`` comments; command-line flags override
config keys.  Results are emitted as CSV with at least 12 significant digits
so downstream plotting reproduces the curves exactly.
"""

from __future__ import annotations

import argparse
import dataclasses
import math
import os
import sys
from dataclasses import dataclass

import numpy as np

from .integrate import IntegratorConfig, Trajectory, norm_drift
from .model import (
    Frame,
    OneQubitParams,
    TwoQubitParams,
    from_mhz,
    to_mhz,
)
from .gates import run_cnot_gate, run_not_gate, superposition_cnot_input, digital_cnot_input
from .sweep import (
    GateKind,
    Scale,
    SweepResult,
    SweepSpec,
    find_threshold,
    mathieu_residual,
    rotating_not_trajectory,
    run_sweep,
)

GATES = tuple(k.value for k in GateKind)
FRAMES = tuple(f.value for f in Frame)
SCALES = tuple(s.value for s in Scale)


class ConfigError(ValueError):
    """Malformed config text or an out-of-range value; message names the spot."""


@dataclass
class ExperimentConfig:
    """Typed experiment description in user-facing units.

    Frequencies are in MHz-as-2*pi-rad/us; ``omega = None`` selects the
    resonant drive for the chosen gate.  Defaults are the benchmark parameter
    sets: Omega = 0.1 with omega0 = 200 for the single qubit, and omega1 =
    100, omega2 = 110, J = 10 for the pair.
    """

    gate: str = "not"
    Omega: float = 0.1
    omega0: float = 200.0
    omega1: float = 100.0
    omega2: float = 110.0
    J: float = 10.0
    omega: float | None = None
    delta: float = 0.0
    delta_min: float = 0.0
    delta_max: float = 1e-2
    delta_points: int = 201
    scale: str = "linear"
    frame: str = "rotating"
    rel_tol: float = 1e-10
    abs_tol: float = 1e-12
    samples: int = 200
    fidelity_threshold: float = 0.99
    jobs: int = 0
    out: str = "-"

    def validate(self) -> "ExperimentConfig":
        if self.gate not in GATES:
            raise ConfigError(f"gate must be one of {GATES}, got {self.gate!r}")
        if self.frame not in FRAMES:
            raise ConfigError(f"frame must be one of {FRAMES}, got {self.frame!r}")
        if self.scale not in SCALES:
            raise ConfigError(f"scale must be one of {SCALES}, got {self.scale!r}")
        for name in ("Omega", "omega0", "omega1", "omega2", "J"):
            value = getattr(self, name)
            if not (math.isfinite(value) and value > 0):
                raise ConfigError(f"{name} must be finite and > 0, got {value!r}")
        if self.omega1 == self.omega2:
            raise ConfigError("omega1 and omega2 must differ")
        if self.omega is not None and not (math.isfinite(self.omega) and self.omega > 0):
            raise ConfigError(f"omega must be finite and > 0, got {self.omega!r}")
        if not math.isfinite(self.delta):
            raise ConfigError(f"delta must be finite, got {self.delta!r}")
        if not self.delta_min < self.delta_max:
            raise ConfigError("delta_min must be < delta_max")
        if self.delta_points < 2:
            raise ConfigError(f"delta_points must be >= 2, got {self.delta_points}")
        for name in ("rel_tol", "abs_tol"):
            value = getattr(self, name)
            if not value > 0:
                raise ConfigError(f"{name} must be > 0, got {value!r}")
        if self.samples < 1:
            raise ConfigError(f"samples must be >= 1, got {self.samples}")
        if not 0.0 < self.fidelity_threshold < 1.0:
            raise ConfigError(
                f"fidelity_threshold must lie in (0, 1), got {self.fidelity_threshold!r}")
        if self.jobs < 0:
            raise ConfigError(f"jobs must be >= 0, got {self.jobs}")
        return self

    # -- derived objects ----------------------------------------------------

    def gate_kind(self) -> GateKind:
        return GateKind(self.gate)

    def frame_kind(self) -> Frame:
        return Frame(self.frame)

    def integrator_config(self) -> IntegratorConfig:
        return IntegratorConfig(rel_tol=self.rel_tol, abs_tol=self.abs_tol)

    def one_qubit_params(self, delta: float | None = None) -> OneQubitParams:
        return OneQubitParams.from_mhz(
            omega0=self.omega0, Omega=self.Omega,
            delta=self.delta if delta is None else delta, omega=self.omega)

    def two_qubit_params(self, delta: float | None = None) -> TwoQubitParams:
        return TwoQubitParams.from_mhz(
            omega1=self.omega1, omega2=self.omega2, J=self.J, Omega=self.Omega,
            delta=self.delta if delta is None else delta, omega=self.omega)

    def gate_params(self, delta: float | None = None):
        if self.gate_kind() is GateKind.NOT:
            return self.one_qubit_params(delta)
        return self.two_qubit_params(delta)

    def resolved_jobs(self) -> int:
        return self.jobs if self.jobs > 0 else (os.cpu_count() or 1)


_FIELD_TYPES = {f.name: f for f in dataclasses.fields(ExperimentConfig)}
_OPTIONAL_FLOATS = {"omega"}


def _convert(key: str, raw: str, lineno: int):
    if key in _OPTIONAL_FLOATS and raw.lower() in ("none", "auto"):
        return None
    field = _FIELD_TYPES[key]
    target = field.type
    try:
        if target == "int":
            return int(raw)
        if target == "str":
            return raw
        return float(raw)
    except ValueError:
        raise ConfigError(f"line {lineno}: invalid value for {key}: {raw!r}") from None


def parse_config(text: str) -> ExperimentConfig:
    """Parse flat ``key = value`` config text into a validated ExperimentConfig.

    Blank lines and ``#`` comments (full-line or trailing) are ignored;
    unknown keys are rejected.
    """
    values: dict = {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        body = line.split("#", 1)[0].strip()
        if not body:
            continue
        if "=" not in body:
            raise ConfigError(f"line {lineno}: expected 'key = value', got {line.strip()!r}")
        key, raw = (part.strip() for part in body.split("=", 1))
        if key not in _FIELD_TYPES:
            raise ConfigError(f"line {lineno}: unknown key {key!r}")
        if not raw:
            raise ConfigError(f"line {lineno}: missing value for {key!r}")
        values[key] = _convert(key, raw, lineno)
    return ExperimentConfig(**values).validate()


def format_config(cfg: ExperimentConfig) -> str:
    """Serialize a config back to key = value text (parse round-trips)."""
    lines = []
    for field in dataclasses.fields(ExperimentConfig):
        value = getattr(cfg, field.name)
        if value is None:
            text = "none"
        elif isinstance(value, str):
            text = value
        else:
            text = repr(value)
        lines.append(f"{field.name} = {text}")
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# CSV emission
# ---------------------------------------------------------------------------

def _fmt(x: float) -> str:
    return f"{x:.12e}"


def _population_header(dim: int) -> list[str]:
    if dim == 2:
        return ["p0", "p1"]
    return ["p00", "p01", "p10", "p11"]


def _write_rows(stream, header: list[str], rows) -> None:
    stream.write(",".join(header) + "\n")
    for row in rows:
        stream.write(",".join(_fmt(v) for v in row) + "\n")


def emit_csv(result: SweepResult | Trajectory, destination) -> None:
    """Write a sweep table or a trajectory as CSV.

    Sweep columns: delta_2piMHz, M1, M2, M3, then one population column per
    basis state.  Trajectory columns: t_us, norm, then populations.
    ``destination`` may be a path, ``"-"`` for stdout, or a writable stream.
    Values carry 13 significant digits; the final line is newline-terminated.
    """
    if isinstance(result, SweepResult):
        if len(result) == 0:
            raise ValueError("empty sweep result")
        header = ["delta_2piMHz", "M1", "M2", "M3"]
        header += _population_header(result.populations.shape[1])
        rows = np.column_stack([result.deltas / (2.0 * math.pi), result.m1,
                                result.m2, result.m3, result.populations])
    elif isinstance(result, Trajectory):
        if len(result) == 0:
            raise ValueError("empty trajectory")
        header = ["t_us", "norm"] + _population_header(result.states.shape[1])
        rows = np.column_stack([result.times, result.norms, result.populations])
    else:
        raise TypeError(f"cannot emit {type(result).__name__} as CSV")

    if hasattr(destination, "write"):
        _write_rows(destination, header, rows)
    elif destination == "-":
        _write_rows(sys.stdout, header, rows)
    else:
        with open(destination, "w", newline="") as stream:
            _write_rows(stream, header, rows)


_GNUPLOT_SWEEP = """\
set datafile separator ","
set key autotitle columnhead
set xlabel "delta (2pi MHz)"
set ylabel "fidelity / population"
set grid
plot "{csv}" using 1:2 with lines, \\
     "" using 1:3 with lines, \\
     "" using 1:4 with lines
"""


def _write_gnuplot(csv_path: str) -> str:
    script_path = csv_path + ".gp"
    with open(script_path, "w") as stream:
        stream.write(_GNUPLOT_SWEEP.format(csv=csv_path))
    return script_path


# ---------------------------------------------------------------------------
# Subcommands
# ---------------------------------------------------------------------------

def _load_config(args) -> ExperimentConfig:
    if args.config:
        with open(args.config) as handle:
            cfg = parse_config(handle.read())
    else:
        cfg = ExperimentConfig()
    overrides = {}
    for field in dataclasses.fields(ExperimentConfig):
        value = getattr(args, field.name, None)
        if value is not None:
            overrides[field.name] = value
    if overrides:
        cfg = dataclasses.replace(cfg, **overrides)
    if getattr(args, "force_gate", None):
        cfg = dataclasses.replace(cfg, gate=args.force_gate)
    return cfg.validate()


def _print_report(label: str, run, delta_mhz: float) -> None:
    report = run.fidelity
    pops = run.trajectory.populations[-1]
    names = _population_header(len(pops))
    print(f"{label}  delta = {_fmt(delta_mhz)} (2pi MHz)")
    print(f"  M1 overlap vs delta=0 reference : {_fmt(report.overlap_vs_reference)}")
    print(f"  M2 population overlap vs ideal  : {_fmt(report.bhattacharyya_vs_ideal)}")
    print(f"  M3 target-state population      : {_fmt(report.target_population)}")
    print("  final populations: " + ", ".join(
        f"{n} = {_fmt(p)}" for n, p in zip(names, pops)))
    print(f"  norm drift: {_fmt(norm_drift(run.trajectory))}")


def _cmd_not_gate(cfg: ExperimentConfig) -> int:
    run = run_not_gate(cfg.one_qubit_params(), cfg=cfg.integrator_config(),
                       frame=cfg.frame_kind(), n_samples=cfg.samples)
    _print_report("NOT gate", run, cfg.delta)
    return 0


def _cmd_cnot_gate(cfg: ExperimentConfig) -> int:
    gate = cfg.gate_kind()
    if gate is GateKind.NOT:
        gate = GateKind.CNOT_DIGITAL
    initial = (superposition_cnot_input() if gate is GateKind.CNOT_SUPERPOSITION
               else digital_cnot_input())
    run = run_cnot_gate(cfg.two_qubit_params(), initial=initial,
                        cfg=cfg.integrator_config(), frame=cfg.frame_kind(),
                        n_samples=cfg.samples)
    _print_report(f"CNOT gate ({'superposition' if gate is GateKind.CNOT_SUPERPOSITION else 'digital'} input)",
                  run, cfg.delta)
    return 0


def _sweep_spec(cfg: ExperimentConfig) -> SweepSpec:
    return SweepSpec(gate=cfg.gate_kind(), params=cfg.gate_params(delta=0.0),
                     delta_min=from_mhz(cfg.delta_min), delta_max=from_mhz(cfg.delta_max),
                     n_points=cfg.delta_points, scale=Scale(cfg.scale),
                     fidelity_threshold=cfg.fidelity_threshold, frame=cfg.frame_kind())


def _cmd_sweep(cfg: ExperimentConfig, gnuplot: bool) -> int:
    result = run_sweep(_sweep_spec(cfg), cfg.integrator_config(), jobs=cfg.resolved_jobs())
    emit_csv(result, cfg.out)
    if cfg.out != "-":
        print(f"wrote {len(result)} sweep rows to {cfg.out}")
        if gnuplot:
            print(f"wrote plot script to {_write_gnuplot(cfg.out)}")
    return 0


def _cmd_threshold(cfg: ExperimentConfig) -> int:
    spec = _sweep_spec(cfg)
    if spec.delta_min == 0.0:
        # bisection needs a positive lower end; start one grid cell in
        spec = dataclasses.replace(spec, delta_min=spec.delta_max / (spec.n_points - 1))
    delta_star = find_threshold(spec, cfg.integrator_config())
    print(f"gate = {cfg.gate}, fidelity threshold = {cfg.fidelity_threshold}")
    print(f"delta* = {_fmt(to_mhz(delta_star))} if quoted values are 2pi MHz units "
          f"(angular {_fmt(delta_star)} rad/us)")
    print(f"delta* = {_fmt(delta_star)} if quoted values are plain angular MHz "
          f"(i.e. rad/us read directly)")
    return 0


def _cmd_trajectory(cfg: ExperimentConfig) -> int:
    gate = cfg.gate_kind()
    if gate is GateKind.NOT:
        run = run_not_gate(cfg.one_qubit_params(), cfg=cfg.integrator_config(),
                           frame=cfg.frame_kind(), n_samples=cfg.samples)
    else:
        initial = (superposition_cnot_input() if gate is GateKind.CNOT_SUPERPOSITION
                   else digital_cnot_input())
        run = run_cnot_gate(cfg.two_qubit_params(), initial=initial,
                            cfg=cfg.integrator_config(), frame=cfg.frame_kind(),
                            n_samples=cfg.samples)
    emit_csv(run.trajectory, cfg.out)
    if cfg.out != "-":
        print(f"wrote {len(run.trajectory)} trajectory samples to {cfg.out}")
    return 0


def _cmd_validate(cfg: ExperimentConfig) -> int:
    """Internal consistency suite: closed-form residuals and frame equivalence."""
    checks: list[tuple[str, float, float]] = []  # (name, value, bound)
    tight = IntegratorConfig(rel_tol=1e-12, abs_tol=1e-14)
    lab_tol = IntegratorConfig(rel_tol=1e-13, abs_tol=1e-15)

    for delta_mhz in (0.0, 1e-3):
        p = cfg.one_qubit_params(delta=delta_mhz)
        traj = rotating_not_trajectory(p, cfg=tight, n_samples=2000)
        checks.append((f"second-order residual (delta = {delta_mhz})",
                       mathieu_residual(traj, p), 1e-4))
        checks.append((f"norm drift (delta = {delta_mhz})", norm_drift(traj), 1e-9))

    for delta_mhz in (0.0, 2e-4):
        p = cfg.one_qubit_params(delta=delta_mhz)
        rot = run_not_gate(p, cfg=lab_tol, frame=Frame.ROTATING, n_samples=100)
        lab = run_not_gate(p, cfg=lab_tol, frame=Frame.LAB, n_samples=100)
        diff = float(np.max(np.abs(rot.trajectory.populations - lab.trajectory.populations)))
        checks.append((f"one-qubit frame equivalence (delta = {delta_mhz})", diff, 1e-7))

    for delta_mhz in (0.0, 2e-4):
        p2 = cfg.two_qubit_params(delta=delta_mhz)
        rot = run_cnot_gate(p2, cfg=lab_tol, frame=Frame.ROTATING, n_samples=100)
        lab = run_cnot_gate(p2, cfg=lab_tol, frame=Frame.LAB, n_samples=100)
        diff = float(np.max(np.abs(rot.trajectory.populations - lab.trajectory.populations)))
        checks.append((f"two-qubit frame equivalence (delta = {delta_mhz})", diff, 1e-7))

    failed = 0
    for name, value, bound in checks:
        ok = value <= bound
        failed += not ok
        print(f"{'PASS' if ok else 'FAIL'}  {name}: {value:.3e} (bound {bound:.0e})")
    print(f"{len(checks) - failed}/{len(checks)} checks passed")
    return 0 if failed == 0 else 1


# ---------------------------------------------------------------------------
# Argument parsing
# ---------------------------------------------------------------------------

def _add_common_flags(sub: argparse.ArgumentParser, gate_choice: bool = True) -> None:
    sub.add_argument("--config", help="key = value config file")
    sub.add_argument("--out", help="output path ('-' for stdout)")
    sub.add_argument("--frame", choices=FRAMES)
    if gate_choice:
        sub.add_argument("--gate", choices=GATES)
    sub.add_argument("--Omega", type=float, help="Rabi frequency (2pi MHz)")
    sub.add_argument("--omega0", type=float, help="one-qubit Larmor frequency (2pi MHz)")
    sub.add_argument("--omega1", type=float, help="first Larmor frequency (2pi MHz)")
    sub.add_argument("--omega2", type=float, help="second Larmor frequency (2pi MHz)")
    sub.add_argument("--J", type=float, help="Ising coupling (2pi MHz)")
    sub.add_argument("--omega", type=float, help="RF drive frequency (2pi MHz, default resonant)")
    sub.add_argument("--delta", type=float, help="modulation frequency (2pi MHz)")
    sub.add_argument("--delta-min", dest="delta_min", type=float)
    sub.add_argument("--delta-max", dest="delta_max", type=float)
    sub.add_argument("--delta-points", dest="delta_points", type=int)
    sub.add_argument("--scale", choices=SCALES)
    sub.add_argument("--rel-tol", dest="rel_tol", type=float)
    sub.add_argument("--abs-tol", dest="abs_tol", type=float)
    sub.add_argument("--samples", type=int, help="trajectory samples per run")
    sub.add_argument("--fidelity", dest="fidelity_threshold", type=float,
                     help="fidelity floor for threshold search")
    sub.add_argument("--jobs", type=int, help="worker processes (0 = all cores)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="spingates",
        description="Simulate NOT/CNOT spin gates under a cosine-modulated longitudinal field.")
    subs = parser.add_subparsers(dest="command", required=True)

    sub = subs.add_parser("not-gate", help="run one NOT pulse and print the fidelity report")
    _add_common_flags(sub, gate_choice=False)

    sub = subs.add_parser("cnot-gate", help="run one CNOT pulse and print the fidelity report")
    _add_common_flags(sub)

    sub = subs.add_parser("sweep", help="tabulate fidelity measures over a delta grid as CSV")
    _add_common_flags(sub)
    sub.add_argument("--gnuplot", action="store_true",
                     help="also write a gnuplot script next to the CSV")

    sub = subs.add_parser("threshold", help="bisect for the fidelity-collapse threshold delta*")
    _add_common_flags(sub)

    sub = subs.add_parser("trajectory", help="emit one pulse trajectory as CSV")
    _add_common_flags(sub)

    sub = subs.add_parser("validate", help="run closed-form and frame-equivalence checks")
    _add_common_flags(sub)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exit_:  # argparse reports usage errors with code 2
        return int(exit_.code or 0)

    try:
        if args.command == "not-gate":
            args.force_gate = "not"
            return _cmd_not_gate(_load_config(args))
        cfg = _load_config(args)
        if args.command == "cnot-gate":
            return _cmd_cnot_gate(cfg)
        if args.command == "sweep":
            return _cmd_sweep(cfg, gnuplot=args.gnuplot)
        if args.command == "threshold":
            return _cmd_threshold(cfg)
        if args.command == "trajectory":
            return _cmd_trajectory(cfg)
        if args.command == "validate":
            return _cmd_validate(cfg)
        parser.error(f"unknown command {args.command!r}")
    except (ConfigError, ValueError, RuntimeError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
