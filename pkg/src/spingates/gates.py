"""Pulse construction, ideal gate targets, and fidelity measures.

A NOT experiment drives the single spin at its Larmor frequency for one
pi-pulse (tau = pi/Omega); a CNOT experiment drives the spin pair at the
|10> <-> |11> level splitting for the same pulse area.  Gate quality is
summarized by three measures:

* M1, squared overlap with the endpoint of the unmodulated (delta = 0)
  reference run: isolates the damage done by the field modulation alone.
* M2, squared Bhattacharyya overlap of the population distributions with
  the ideal target: phase-insensitive.
* M3, the population of the designated target basis state (for an initial
  |0> NOT this is exactly |c1(tau)|^2).

All three lie in [0, 1] and equal 1 for a perfect gate.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from functools import lru_cache
from typing import NamedTuple

import numpy as np

from .integrate import IntegratorConfig, Trajectory, integrate
from .model import (
    Frame,
    OneQubitParams,
    TwoQubitParams,
    as_state,
    basis_state,
    make_rhs,
)

HALF_TURN_PHASE = 1j  # e^{i pi/2}, the phase picked up by the swapped amplitudes


def pi_pulse_duration(Omega: float) -> float:
    """Duration tau = pi/Omega of a full population-transfer pulse, in us."""
    if not (math.isfinite(Omega) and Omega > 0.0):
        raise ValueError(f"Omega must be finite and > 0, got {Omega!r}")
    return math.pi / Omega


@dataclass(frozen=True)
class PulseSpec:
    """A single rectangular RF pulse acting on a prepared state."""

    duration: float
    frame: Frame
    params: OneQubitParams | TwoQubitParams
    initial_state: np.ndarray

    @classmethod
    def pi_pulse(cls, params, initial_state, frame: Frame = Frame.ROTATING) -> "PulseSpec":
        return cls(duration=pi_pulse_duration(params.Omega), frame=frame,
                   params=params, initial_state=as_state(initial_state))


def run_pulse(spec: PulseSpec, cfg: IntegratorConfig = IntegratorConfig(),
              n_samples: int = 200) -> Trajectory:
    """Integrate the amplitude equations over [0, duration]."""
    rhs = make_rhs(spec.frame, spec.params)
    return integrate(rhs, spec.initial_state, 0.0, spec.duration, cfg, n_samples)


# ---------------------------------------------------------------------------
# Ideal targets
# ---------------------------------------------------------------------------

def ideal_not_target(initial) -> np.ndarray:
    """Ideal NOT action: swap the |0> and |1> amplitudes, times e^{i pi/2}."""
    state = as_state(initial)
    if state.shape[0] != 2:
        raise ValueError(f"NOT target needs a dim-2 state, got {state.shape[0]}")
    return HALF_TURN_PHASE * state[::-1]


def ideal_cnot_target(initial) -> np.ndarray:
    """Ideal CNOT action: swap the |10> and |11> amplitudes, times e^{i pi/2}.

    The |00> and |01> amplitudes (control qubit off) are untouched.
    """
    state = as_state(initial)
    if state.shape[0] != 4:
        raise ValueError(f"CNOT target needs a dim-4 state, got {state.shape[0]}")
    out = state.copy()
    out[2] = HALF_TURN_PHASE * state[3]
    out[3] = HALF_TURN_PHASE * state[2]
    return out


def digital_cnot_input() -> np.ndarray:
    """Basis-state benchmark input |10>: control on, target off."""
    return basis_state(4, 2)


def superposition_cnot_input() -> np.ndarray:
    """Weighted four-component benchmark input with populations (0.2, 0.1, 0.6, 0.1)."""
    return as_state([math.sqrt(0.2), math.sqrt(0.1), math.sqrt(0.6), math.sqrt(0.1)])


# ---------------------------------------------------------------------------
# Fidelity measures
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class FidelityReport:
    """The three gate-quality measures, each in [0, 1]."""

    overlap_vs_reference: float   # M1
    bhattacharyya_vs_ideal: float  # M2
    target_population: float      # M3

    def as_tuple(self) -> tuple[float, float, float]:
        return (self.overlap_vs_reference, self.bhattacharyya_vs_ideal,
                self.target_population)


def fidelity_report(sim, ideal, reference) -> FidelityReport:
    """Compute (M1, M2, M3) for a simulated final state.

    ``ideal`` is the exact gate target, ``reference`` the endpoint of the
    delta = 0 run with otherwise identical settings.  The designated basis
    state for M3 is the most populated component of the ideal target.
    """
    sim = np.asarray(sim, dtype=np.complex128).reshape(-1)
    ideal = np.asarray(ideal, dtype=np.complex128).reshape(-1)
    reference = np.asarray(reference, dtype=np.complex128).reshape(-1)
    if not (sim.shape == ideal.shape == reference.shape):
        raise ValueError("sim, ideal and reference states must share one dimension")
    m1 = float(np.abs(np.vdot(reference, sim)) ** 2)
    p_sim = np.abs(sim) ** 2
    p_ideal = np.abs(ideal) ** 2
    m2 = float(np.sum(np.sqrt(p_sim * p_ideal)) ** 2)
    m3 = float(p_sim[int(np.argmax(p_ideal))])
    return FidelityReport(overlap_vs_reference=m1, bhattacharyya_vs_ideal=m2,
                          target_population=m3)


class GateRun(NamedTuple):
    trajectory: Trajectory
    fidelity: FidelityReport


# delta = 0 reference endpoints, computed once per parameter set.  Keyed by
# hashable snapshots only; safe for concurrent reads after first fill.
@lru_cache(maxsize=256)
def _reference_final_state(frame: Frame, params, initial_key: tuple,
                           duration: float, cfg: IntegratorConfig) -> np.ndarray:
    spec = PulseSpec(duration=duration, frame=frame, params=params,
                     initial_state=np.array(initial_key, dtype=np.complex128))
    final = run_pulse(spec, cfg, n_samples=1).final_state
    final.setflags(write=False)
    return final


def _run_gate(params, initial, ideal, cfg, frame, n_samples, duration=None) -> GateRun:
    initial = as_state(initial)
    if duration is None:
        duration = pi_pulse_duration(params.Omega)
    spec = PulseSpec(duration=duration, frame=frame, params=params, initial_state=initial)
    traj = run_pulse(spec, cfg, n_samples)
    sim = traj.final_state
    if params.delta == 0.0:
        # The run is its own unmodulated reference, so M1 is 1 by definition.
        report = fidelity_report(sim, ideal, sim)
        report = FidelityReport(overlap_vs_reference=1.0,
                                bhattacharyya_vs_ideal=report.bhattacharyya_vs_ideal,
                                target_population=report.target_population)
    else:
        reference = _reference_final_state(frame, replace(params, delta=0.0),
                                           tuple(initial.tolist()), duration, cfg)
        report = fidelity_report(sim, ideal, reference)
    return GateRun(traj, report)


def run_not_gate(params: OneQubitParams, initial=None,
                 cfg: IntegratorConfig = IntegratorConfig(),
                 frame: Frame = Frame.ROTATING, n_samples: int = 200) -> GateRun:
    """Drive one pi-pulse on the single spin and score it against the ideal NOT.

    ``params.omega`` defaults to the resonant choice omega0 unless it was set
    explicitly when the parameters were built.  The initial state defaults
    to |0>.
    """
    if initial is None:
        initial = basis_state(2, 0)
    return _run_gate(params, initial, ideal_not_target(initial), cfg, frame, n_samples)


def run_cnot_gate(params: TwoQubitParams, initial=None,
                  cfg: IntegratorConfig = IntegratorConfig(),
                  frame: Frame = Frame.ROTATING, n_samples: int = 200) -> GateRun:
    """Drive one pi-pulse on the spin pair and score it against the ideal CNOT.

    ``params.omega`` defaults to the |10> <-> |11> level splitting unless set
    explicitly.  The initial state defaults to the digital input |10>.
    """
    if initial is None:
        initial = digital_cnot_input()
    return _run_gate(params, initial, ideal_cnot_target(initial), cfg, frame, n_samples)
