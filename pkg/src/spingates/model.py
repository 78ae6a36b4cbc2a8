"""Spin model: parameters, basis conventions, and amplitude equations of motion.

Single spin-1/2 nuclei sit in a strong longitudinal field whose magnitude is
modulated as cos(delta*t), plus a transverse RF drive at frequency omega.
This module holds the parameter bundles, the right-hand sides of the complex
amplitude ODEs in both the lab and the rotating frame, the two-qubit energy
spectrum, and the resonance-frequency selectors used to address the NOT and
CNOT transitions.

Conventions
-----------
* All frequencies are angular, in rad/us.  Benchmark values are usually
  quoted as plain numbers f with the understanding that the angular
  frequency is 2*pi*f rad/us (f in MHz, time in us); use ``from_mhz`` /
  ``to_mhz`` or the ``*.from_mhz`` constructors to convert.
* One-qubit basis order is (|0>, |1>); two-qubit order is
  (|00>, |01>, |10>, |11>) with the left (first) qubit acting as control.
* The modulation phase is fixed so that cos(delta*t) = 1 at t = 0.
* State vectors are plain complex numpy arrays normalized to 1.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from enum import Enum
from functools import lru_cache

import numpy as np

TWO_PI = 2.0 * math.pi

STATE_LABELS = {2: ("0", "1"), 4: ("00", "01", "10", "11")}


def from_mhz(f: float) -> float:
    """Convert a frequency quoted in MHz to angular rad/us."""
    return TWO_PI * f


def to_mhz(w: float) -> float:
    """Convert an angular frequency in rad/us back to MHz."""
    return w / TWO_PI


class Frame(Enum):
    """Which set of amplitude equations to integrate.

    LAB keeps the explicit e^{+/- i omega t} drive factors; ROTATING uses the
    phase-transformed amplitudes whose drive coupling is constant.  The two
    frames agree componentwise on populations at all times.
    """

    LAB = "lab"
    ROTATING = "rotating"


def _require_positive(name: str, value: float) -> None:
    if not (math.isfinite(value) and value > 0.0):
        raise ValueError(f"{name} must be finite and > 0, got {value!r}")


def _require_finite(name: str, value: float) -> None:
    if not math.isfinite(value):
        raise ValueError(f"{name} must be finite, got {value!r}")


@dataclass(frozen=True)
class OneQubitParams:
    """Drive/modulation/Larmor frequency bundle for the single-spin system.

    Parameters
    ----------
    omega0 : float
        Larmor frequency of the spin (rad/us).
    Omega : float
        Rabi frequency of the transverse RF drive (rad/us).
    delta : float, optional
        Modulation frequency of the longitudinal field (rad/us).  The
        dynamics are even in delta (the field enters through cos(delta*t)),
        so negative values are accepted and equivalent to their magnitude.
    omega : float, optional
        RF drive frequency (rad/us).  Defaults to the resonant choice
        omega = omega0.
    """

    omega0: float
    Omega: float
    delta: float = 0.0
    omega: float | None = None

    def __post_init__(self):
        _require_positive("omega0", self.omega0)
        _require_positive("Omega", self.Omega)
        _require_finite("delta", self.delta)
        if self.omega is None:
            object.__setattr__(self, "omega", self.omega0)
        _require_positive("omega", self.omega)

    @classmethod
    def from_mhz(cls, omega0: float, Omega: float, delta: float = 0.0,
                 omega: float | None = None) -> "OneQubitParams":
        """Build from frequencies quoted in MHz (multiplied by 2*pi on ingest)."""
        return cls(omega0=from_mhz(omega0), Omega=from_mhz(Omega),
                   delta=from_mhz(delta),
                   omega=None if omega is None else from_mhz(omega))


@dataclass(frozen=True)
class TwoQubitParams:
    """Two Larmor frequencies plus the Ising coupling J and drive parameters.

    The two qubits must be spectrally addressable (omega1 != omega2) and the
    Ising coupling J must be positive.  ``omega`` defaults to the resonant
    frequency of the |10> <-> |11> transition, i.e. the level splitting
    E11 - E10 = omega2 + J/2 (see :func:`cnot_resonance`).
    """

    omega1: float
    omega2: float
    J: float
    Omega: float
    delta: float = 0.0
    omega: float | None = None

    def __post_init__(self):
        _require_positive("omega1", self.omega1)
        _require_positive("omega2", self.omega2)
        if self.omega1 == self.omega2:
            raise ValueError("omega1 and omega2 must differ (addressability)")
        _require_positive("J", self.J)
        _require_positive("Omega", self.Omega)
        _require_finite("delta", self.delta)
        if self.omega is None:
            object.__setattr__(self, "omega", self.omega2 + 0.5 * self.J)
        _require_positive("omega", self.omega)

    @classmethod
    def from_mhz(cls, omega1: float, omega2: float, J: float, Omega: float,
                 delta: float = 0.0, omega: float | None = None) -> "TwoQubitParams":
        """Build from frequencies quoted in MHz (multiplied by 2*pi on ingest)."""
        return cls(omega1=from_mhz(omega1), omega2=from_mhz(omega2),
                   J=from_mhz(J), Omega=from_mhz(Omega), delta=from_mhz(delta),
                   omega=None if omega is None else from_mhz(omega))


def standard_not_params(delta_mhz: float = 0.0) -> OneQubitParams:
    """Benchmark single-qubit parameter set: Omega = 0.1, omega0 = 200 (MHz)."""
    return OneQubitParams.from_mhz(omega0=200.0, Omega=0.1, delta=delta_mhz)


def standard_cnot_params(delta_mhz: float = 0.0) -> TwoQubitParams:
    """Benchmark two-qubit parameter set: Omega = 0.1, omega1 = 100, omega2 = 110, J = 10 (MHz)."""
    return TwoQubitParams.from_mhz(omega1=100.0, omega2=110.0, J=10.0,
                                   Omega=0.1, delta=delta_mhz)


# ---------------------------------------------------------------------------
# State vectors
# ---------------------------------------------------------------------------

NORM_TOL = 1e-9


def as_state(amplitudes) -> np.ndarray:
    """Validate and return a normalized complex state vector.

    Raises ValueError if any amplitude is non-finite or if the squared norm
    deviates from 1 by more than 1e-9.
    """
    state = np.asarray(amplitudes, dtype=np.complex128).reshape(-1)
    if not np.all(np.isfinite(state.view(np.float64))):
        raise ValueError("state amplitudes must be finite")
    norm2 = float(np.sum(np.abs(state) ** 2))
    if abs(norm2 - 1.0) > NORM_TOL:
        raise ValueError(f"state norm^2 = {norm2!r} deviates from 1 by more than {NORM_TOL}")
    return state


def basis_state(dim: int, index: int) -> np.ndarray:
    """Computational basis vector |index> of the given dimension."""
    if not 0 <= index < dim:
        raise ValueError(f"basis index {index} out of range for dim {dim}")
    state = np.zeros(dim, dtype=np.complex128)
    state[index] = 1.0
    return state


def populations(state: np.ndarray) -> np.ndarray:
    """Squared magnitudes of the amplitudes."""
    return np.abs(np.asarray(state)) ** 2


# ---------------------------------------------------------------------------
# Right-hand sides
# ---------------------------------------------------------------------------

class ModulatedRHS:
    """Derivative function of the form

        y'(t) = (B0 + cos(delta t) B1) y + e^{i omega t} B2 y + e^{-i omega t} B3 y

    where the B matrices are constant.  Every amplitude system in this
    package fits this shape, which lets the integrator run a compiled fast
    path; instances are also plain callables ``f(t, y) -> dy/dt`` so they can
    be used anywhere a derivative function is expected.
    """

    __slots__ = ("b0", "b1", "b2", "b3", "delta", "omega", "dim")

    def __init__(self, b0, b1, b2=None, b3=None, delta=0.0, omega=0.0):
        self.b0 = np.ascontiguousarray(b0, dtype=np.complex128)
        self.b1 = np.ascontiguousarray(b1, dtype=np.complex128)
        self.b2 = None if b2 is None else np.ascontiguousarray(b2, dtype=np.complex128)
        self.b3 = None if b3 is None else np.ascontiguousarray(b3, dtype=np.complex128)
        self.delta = float(delta)
        self.omega = float(omega)
        self.dim = self.b0.shape[0]

    def __call__(self, t, y):
        out = self.b0 @ y + math.cos(self.delta * t) * (self.b1 @ y)
        if self.b2 is not None:
            phase = cmath.exp(1j * self.omega * t)
            out = out + phase * (self.b2 @ y) + phase.conjugate() * (self.b3 @ y)
        return out

    def diagonal_angular_rates(self, t: float = 0.0) -> np.ndarray:
        """Instantaneous Hermitian diagonal h_i(t) such that y_i' ~ -i h_i y_i.

        Used by the integrator to pick a global phase gauge that removes the
        common fast rotation before stepping.
        """
        diag = self.b0.diagonal() + math.cos(self.delta * t) * self.b1.diagonal()
        return -diag.imag


@lru_cache(maxsize=None)
def one_qubit_rhs(frame: Frame, p: OneQubitParams) -> ModulatedRHS:
    """Amplitude equations for the driven single spin.

    Lab frame (amplitudes c0, c1):

        i c0' = -(omega0 cos(delta t)/2) c0 - (Omega/2) e^{+i omega t} c1
        i c1' = +(omega0 cos(delta t)/2) c1 - (Omega/2) e^{-i omega t} c0

    Rotating frame (c0 = e^{+i omega t/2} d0, c1 = e^{-i omega t/2} d1):

        i d0' = +((omega - omega0 cos(delta t))/2) d0 - (Omega/2) d1
        i d1' = -((omega - omega0 cos(delta t))/2) d1 - (Omega/2) d0
    """
    half_rabi = 0.5 * p.Omega
    if frame is Frame.ROTATING:
        h0 = np.array([[0.5 * p.omega, -half_rabi],
                       [-half_rabi, -0.5 * p.omega]], dtype=np.complex128)
        h1 = np.diag([-0.5 * p.omega0, 0.5 * p.omega0]).astype(np.complex128)
        return ModulatedRHS(-1j * h0, -1j * h1, delta=p.delta)
    h1 = np.diag([-0.5 * p.omega0, 0.5 * p.omega0]).astype(np.complex128)
    drive_up = np.array([[0.0, -half_rabi], [0.0, 0.0]], dtype=np.complex128)
    return ModulatedRHS(np.zeros((2, 2), dtype=np.complex128), -1j * h1,
                        b2=-1j * drive_up, b3=-1j * drive_up.conj().T,
                        delta=p.delta, omega=p.omega)


# Drive topology: the RF field couples exactly the pairs that differ in one
# qubit, i.e. {00-01, 00-10, 01-11, 10-11}; there is no direct 00-11 or
# 01-10 matrix element.
_EDGES = ((0, 1), (0, 2), (1, 3), (2, 3))


@lru_cache(maxsize=None)
def two_qubit_rhs(frame: Frame, p: TwoQubitParams) -> ModulatedRHS:
    """Amplitude equations for the Ising-coupled driven spin pair.

    Lab frame (amplitudes C00, C01, C10, C11):

        i C00' = -1/2 ((omega1+omega2) cos(delta t) - J/2) C00 - (Omega/2)(C01 + C10) e^{+i omega t}
        i C01' = -1/2 ((omega1-omega2) cos(delta t) + J/2) C01 - (Omega/2)(C00 e^{-i omega t} + C11 e^{+i omega t})
        i C10' = -1/2 ((omega2-omega1) cos(delta t) + J/2) C10 - (Omega/2)(C00 e^{-i omega t} + C11 e^{+i omega t})
        i C11' = -1/2 (-(omega1+omega2) cos(delta t) - J/2) C11 - (Omega/2)(C01 + C10) e^{-i omega t}

    Rotating frame (C00 = e^{+i omega t/2} D00, C01 = e^{-i omega t/2} D01,
    C10 = e^{-i omega t/2} D10, C11 = e^{-3 i omega t/2} D11): same diagonal
    with -omega, +omega, +omega, +3*omega added inside the bracket and a
    constant -Omega/2 coupling on each driven pair.
    """
    hs = 0.5 * (p.omega1 + p.omega2)
    hd = 0.5 * (p.omega1 - p.omega2)
    quarter_j = 0.25 * p.J
    half_rabi = 0.5 * p.Omega
    # cos(delta t) part of the diagonal, common to both frames
    h1 = np.diag([-hs, -hd, hd, hs]).astype(np.complex128)
    ising = np.diag([quarter_j, -quarter_j, -quarter_j, quarter_j]).astype(np.complex128)
    if frame is Frame.ROTATING:
        h0 = ising + np.diag([0.5 * p.omega, -0.5 * p.omega,
                              -0.5 * p.omega, -1.5 * p.omega])
        for i, j in _EDGES:
            h0[i, j] = h0[j, i] = -half_rabi
        return ModulatedRHS(-1j * h0, -1j * h1, delta=p.delta)
    drive_up = np.zeros((4, 4), dtype=np.complex128)
    for i, j in _EDGES:
        drive_up[i, j] = -half_rabi
    return ModulatedRHS(-1j * ising, -1j * h1,
                        b2=-1j * drive_up, b3=-1j * drive_up.conj().T,
                        delta=p.delta, omega=p.omega)


def _checked(state, dim: int) -> np.ndarray:
    state = np.asarray(state, dtype=np.complex128).reshape(-1)
    if state.shape[0] != dim:
        raise ValueError(f"state must have dimension {dim}, got {state.shape[0]}")
    return state


def rhs_one_qubit(frame: Frame, t: float, state, p: OneQubitParams) -> np.ndarray:
    """Time derivative of the one-qubit amplitude vector at time t (us)."""
    return one_qubit_rhs(frame, p)(t, _checked(state, 2))


def rhs_two_qubit(frame: Frame, t: float, state, p: TwoQubitParams) -> np.ndarray:
    """Time derivative of the two-qubit amplitude vector at time t (us)."""
    return two_qubit_rhs(frame, p)(t, _checked(state, 4))


def make_rhs(frame: Frame, p) -> ModulatedRHS:
    """Derivative function for either parameter bundle, dispatched on type."""
    if isinstance(p, OneQubitParams):
        return one_qubit_rhs(frame, p)
    if isinstance(p, TwoQubitParams):
        return two_qubit_rhs(frame, p)
    raise TypeError(f"unsupported parameter type {type(p).__name__}")


# ---------------------------------------------------------------------------
# Spectrum and resonances
# ---------------------------------------------------------------------------

def energy_spectrum(p: TwoQubitParams) -> np.ndarray:
    """Diagonal two-qubit energies (E00, E01, E10, E11) at delta = 0, rad/us.

        E00 = -1/2 (omega1 + omega2 - J/2)    E01 = -1/2 (omega1 - omega2 + J/2)
        E10 = -1/2 (omega2 - omega1 + J/2)    E11 = +1/2 (omega1 + omega2 + J/2)

    The four energies sum to zero.
    """
    w1, w2, j = p.omega1, p.omega2, p.J
    return np.array([
        -0.5 * (w1 + w2 - 0.5 * j),
        -0.5 * (w1 - w2 + 0.5 * j),
        -0.5 * (w2 - w1 + 0.5 * j),
        +0.5 * (w1 + w2 + 0.5 * j),
    ])


def not_resonance(p: OneQubitParams) -> float:
    """Resonant RF frequency for the one-qubit flip: omega = omega0."""
    return p.omega0


def cnot_resonance(p: TwoQubitParams) -> float:
    """Resonant RF frequency for the |10> <-> |11> transition.

    This is the level splitting E11 - E10 = omega2 + J/2 of the diagonal
    spectrum: the target-qubit transition shifted by the Ising coupling when
    the control qubit is |1>.  Driving at this frequency while every other
    transition (split by at least J) stays off-resonant realizes the CNOT.
    """
    spectrum = energy_spectrum(p)
    return float(spectrum[3] - spectrum[2])


# ---------------------------------------------------------------------------
# Frame transformation
# ---------------------------------------------------------------------------

# Phase exponents k_i such that (lab amplitude)_i = e^{i k_i omega t} (rotating amplitude)_i
_FRAME_EXPONENTS = {2: np.array([0.5, -0.5]),
                    4: np.array([0.5, -0.5, -0.5, -1.5])}


def rotating_to_lab(state, omega: float, t: float) -> np.ndarray:
    """Map a rotating-frame amplitude vector to lab-frame amplitudes at time t.

    The map is a pure componentwise phase, so populations are identical in
    both frames.
    """
    state = np.asarray(state, dtype=np.complex128).reshape(-1)
    try:
        exponents = _FRAME_EXPONENTS[state.shape[0]]
    except KeyError:
        raise ValueError(f"no frame map for dimension {state.shape[0]}") from None
    return state * np.exp(1j * exponents * omega * t)


def lab_to_rotating(state, omega: float, t: float) -> np.ndarray:
    """Inverse of :func:`rotating_to_lab`."""
    state = np.asarray(state, dtype=np.complex128).reshape(-1)
    try:
        exponents = _FRAME_EXPONENTS[state.shape[0]]
    except KeyError:
        raise ValueError(f"no frame map for dimension {state.shape[0]}") from None
    return state * np.exp(-1j * exponents * omega * t)
