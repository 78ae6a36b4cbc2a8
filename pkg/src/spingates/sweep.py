"""Modulation-frequency sweeps, threshold location, and closed-form cross-checks.

A sweep runs the chosen gate once per point on a delta grid and tabulates
the three fidelity measures plus the final populations.  ``find_threshold``
bisects for the largest delta at which the gate-appropriate measure still
clears a fidelity floor.  The one-qubit rotating-frame dynamics also admit a
closed-form reduction to a single second-order equation with a complex
periodic coefficient (a complex Mathieu equation); ``mathieu_residual``
checks an integrated trajectory against that reduction, which validates the
first-order system and the reduction against each other.
"""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, replace
from enum import Enum

import numpy as np

from .gates import (
    FidelityReport,
    GateRun,
    PulseSpec,
    digital_cnot_input,
    run_cnot_gate,
    run_not_gate,
    run_pulse,
    superposition_cnot_input,
)
from .integrate import IntegratorConfig, Trajectory
from .model import Frame, OneQubitParams, TwoQubitParams, basis_state, one_qubit_rhs


class GateKind(Enum):
    NOT = "not"
    CNOT_DIGITAL = "cnot-digital"
    CNOT_SUPERPOSITION = "cnot-superposition"


class Scale(Enum):
    LINEAR = "linear"
    LOG = "log"


# Measure used for thresholding: the target population for digital inputs,
# the phase-insensitive population overlap for the superposition input.
_SELECTED_MEASURE = {
    GateKind.NOT: "target_population",
    GateKind.CNOT_DIGITAL: "target_population",
    GateKind.CNOT_SUPERPOSITION: "bhattacharyya_vs_ideal",
}


@dataclass(frozen=True)
class SweepSpec:
    """Grid definition and gate selection for a modulation sweep.

    ``delta_min``/``delta_max`` are angular frequencies in rad/us.  ``params``
    is the base parameter bundle; its own ``delta`` field is replaced point by
    point.
    """

    gate: GateKind
    params: OneQubitParams | TwoQubitParams
    delta_min: float
    delta_max: float
    n_points: int = 201
    scale: Scale = Scale.LINEAR
    fidelity_threshold: float = 0.99
    frame: Frame = Frame.ROTATING

    def __post_init__(self):
        if not self.delta_min < self.delta_max:
            raise ValueError("delta_min must be < delta_max")
        if self.n_points < 2:
            raise ValueError("n_points must be >= 2")
        if not 0.0 < self.fidelity_threshold < 1.0:
            raise ValueError("fidelity_threshold must lie in (0, 1)")
        if self.scale is Scale.LOG and self.delta_min <= 0.0:
            raise ValueError("log scale requires delta_min > 0")
        expected = TwoQubitParams if self.gate is not GateKind.NOT else OneQubitParams
        if not isinstance(self.params, expected):
            raise ValueError(f"{self.gate.value} sweep needs {expected.__name__}")

    def grid(self) -> np.ndarray:
        if self.scale is Scale.LOG:
            return np.geomspace(self.delta_min, self.delta_max, self.n_points)
        return np.linspace(self.delta_min, self.delta_max, self.n_points)


@dataclass(frozen=True)
class SweepResult:
    """Per-delta fidelity measures and final populations, rows ordered by delta."""

    gate: GateKind
    deltas: np.ndarray        # (m,) rad/us
    m1: np.ndarray            # (m,)
    m2: np.ndarray            # (m,)
    m3: np.ndarray            # (m,)
    populations: np.ndarray   # (m, dim)
    threshold_delta_star: float | None = None

    def selected_fidelity(self) -> np.ndarray:
        """The measure that thresholding uses for this gate kind."""
        return {"target_population": self.m3,
                "bhattacharyya_vs_ideal": self.m2}[_SELECTED_MEASURE[self.gate]]

    def __len__(self) -> int:
        return self.deltas.shape[0]


class SweepError(RuntimeError):
    """A sweep point failed; the message identifies the offending delta."""


def _gate_run(gate: GateKind, params, delta: float, cfg: IntegratorConfig,
              frame: Frame) -> GateRun:
    p = replace(params, delta=delta)
    if gate is GateKind.NOT:
        return run_not_gate(p, cfg=cfg, frame=frame, n_samples=1)
    initial = digital_cnot_input() if gate is GateKind.CNOT_DIGITAL else superposition_cnot_input()
    return run_cnot_gate(p, initial=initial, cfg=cfg, frame=frame, n_samples=1)


def _measure_at(gate: GateKind, params, delta: float, cfg: IntegratorConfig,
                frame: Frame) -> float:
    report = _gate_run(gate, params, delta, cfg, frame).fidelity
    return getattr(report, _SELECTED_MEASURE[gate])


def _sweep_point(args) -> np.ndarray:
    spec, cfg, delta = args
    try:
        run = _gate_run(spec.gate, spec.params, delta, cfg, spec.frame)
    except Exception as exc:
        raise SweepError(f"sweep point delta = {delta!r} rad/us failed: {exc}") from exc
    report: FidelityReport = run.fidelity
    pops = run.trajectory.populations[-1]
    return np.concatenate(([delta, *report.as_tuple()], pops))


def run_sweep(spec: SweepSpec, cfg: IntegratorConfig = IntegratorConfig(),
              jobs: int = 1) -> SweepResult:
    """Run the gate at every grid delta and tabulate measures and populations.

    ``jobs > 1`` distributes points over a process pool; results are gathered
    in grid order and are identical to a serial run.  Any point failure
    aborts the whole sweep with the offending delta named.
    """
    deltas = spec.grid()
    work = [(spec, cfg, float(d)) for d in deltas]
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            rows = list(pool.map(_sweep_point, work))
    else:
        rows = [_sweep_point(w) for w in work]
    table = np.vstack(rows)
    return SweepResult(gate=spec.gate, deltas=table[:, 0], m1=table[:, 1],
                       m2=table[:, 2], m3=table[:, 3], populations=table[:, 4:])


class ThresholdBracketError(RuntimeError):
    """The fidelity floor is not bracketed by [delta_min, delta_max]."""


def find_threshold(spec: SweepSpec, cfg: IntegratorConfig = IntegratorConfig(),
                   rel_precision: float = 1e-3) -> float:
    """Largest delta whose selected fidelity still reaches the threshold.

    Requires fidelity(delta_min) >= threshold > fidelity(delta_max); the
    crossing is then located by bisection to the given relative precision.
    Fidelity need not be monotone in delta (the collapse has oscillatory
    tails), so the value returned is the first crossing from the left within
    the verified bracket; its fidelity has been evaluated and clears the
    threshold, while the bracket's upper end does not.
    """
    theta = spec.fidelity_threshold
    lo, hi = spec.delta_min, spec.delta_max
    f_lo = _measure_at(spec.gate, spec.params, lo, cfg, spec.frame)
    f_hi = _measure_at(spec.gate, spec.params, hi, cfg, spec.frame)
    if f_lo < theta or f_hi >= theta:
        raise ThresholdBracketError(
            f"threshold {theta} not bracketed: fidelity({lo!r}) = {f_lo!r}, "
            f"fidelity({hi!r}) = {f_hi!r}")
    while hi - lo > rel_precision * hi:
        mid = 0.5 * (lo + hi)
        if _measure_at(spec.gate, spec.params, mid, cfg, spec.frame) >= theta:
            lo = mid
        else:
            hi = mid
    return lo


# ---------------------------------------------------------------------------
# Closed-form cross-checks for the one-qubit rotating frame
# ---------------------------------------------------------------------------

def mathieu_alpha(t, p: OneQubitParams):
    """Complex coefficient alpha(t) of the second-order reduction d0'' + alpha d0 = 0.

        alpha(t) = 1/4 [Omega^2 + omega^2 (1 - (omega0/omega) cos(delta t))^2]
                   + i (omega0 delta / 2) sin(delta t)

    Accepts a scalar or an array of times.
    """
    if not p.omega > 0.0:
        raise ValueError("mathieu_alpha requires omega > 0")
    t = np.asarray(t, dtype=np.float64)
    real = 0.25 * (p.Omega ** 2
                   + p.omega ** 2 * (1.0 - (p.omega0 / p.omega) * np.cos(p.delta * t)) ** 2)
    imag = 0.5 * p.omega0 * p.delta * np.sin(p.delta * t)
    out = real + 1j * imag
    return complex(out) if out.ndim == 0 else out


def reconstruct_excited_amplitude(traj: Trajectory, p: OneQubitParams) -> np.ndarray:
    """Rebuild d1 from d0 and its derivative along a rotating-frame trajectory.

        d1 = ((omega - omega0 cos(delta t)) / Omega) d0 - i (2/Omega) d0'

    with d0' evaluated from the library's equations of motion (not from
    finite differences).  The elimination above is an independent
    transcription of the same physics, so agreement with the integrated d1
    cross-validates the two against each other: a sign or coefficient slip in
    either one shows up as a mismatch proportional to d0.
    """
    if traj.states.shape[1] != 2:
        raise ValueError("reconstruction needs a one-qubit trajectory")
    d0 = traj.states[:, 0]
    # d0' from the model's rotating-frame matrices, vectorized over samples
    rhs = one_qubit_rhs(Frame.ROTATING, p)
    derivatives = rhs.b0 @ traj.states.T + np.cos(p.delta * traj.times) * (rhs.b1 @ traj.states.T)
    d0_dot = derivatives[0]
    detuning = p.omega - p.omega0 * np.cos(p.delta * traj.times)
    return (detuning / p.Omega) * d0 - (2j / p.Omega) * d0_dot


class ConsistencyError(RuntimeError):
    """An integrated trajectory violates a closed-form identity."""


RECONSTRUCTION_TOL = 1e-6


def mathieu_residual(traj: Trajectory, p: OneQubitParams) -> float:
    """Normalized residual of the second-order reduction along a trajectory.

    The second derivative of d0 is formed by central differences on the
    (uniform, dense) sample grid; the residual is

        max_k |d0''(t_k) + alpha(t_k) d0(t_k)|  /  max_k |alpha(t_k) d0(t_k)|

    over interior samples, so it is limited by the finite-difference
    truncation at the chosen sampling.  The call also verifies the d1
    reconstruction identity to within 1e-6 in max norm and raises
    ConsistencyError if it fails.

    Requires at least 1000 samples.
    """
    if traj.states.shape[1] != 2:
        raise ValueError("mathieu_residual needs a one-qubit rotating-frame trajectory")
    n = len(traj)
    if n < 1000:
        raise ValueError(f"trajectory too sparse: {n} samples, need >= 1000")
    dt = traj.times[1] - traj.times[0]

    mismatch = np.max(np.abs(reconstruct_excited_amplitude(traj, p) - traj.states[:, 1]))
    if mismatch > RECONSTRUCTION_TOL:
        raise ConsistencyError(
            f"excited-amplitude reconstruction off by {mismatch!r} (> {RECONSTRUCTION_TOL})")

    d0 = traj.states[:, 0]
    second = (d0[2:] - 2.0 * d0[1:-1] + d0[:-2]) / dt ** 2
    alpha = mathieu_alpha(traj.times[1:-1], p)
    restoring = alpha * d0[1:-1]
    numerator = float(np.max(np.abs(second + restoring)))
    denominator = float(np.max(np.abs(restoring)))
    if denominator == 0.0:
        return 0.0 if numerator == 0.0 else math.inf
    return numerator / denominator


def rotating_not_trajectory(p: OneQubitParams, initial=None,
                            cfg: IntegratorConfig = IntegratorConfig(),
                            n_samples: int = 2000) -> Trajectory:
    """Densely sampled rotating-frame pulse suitable for the residual checks."""
    if initial is None:
        initial = basis_state(2, 0)
    spec = PulseSpec.pi_pulse(p, initial, frame=Frame.ROTATING)
    return run_pulse(spec, cfg, n_samples)
