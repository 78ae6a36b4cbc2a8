"""Adaptive Dormand-Prince 5(4) integration of complex amplitude ODEs.

One embedded explicit Runge-Kutta scheme drives two code paths: a generic
Python loop accepting any derivative callable, and a compiled kernel for the
matrix-form systems produced by :mod:`spingates.model` (used automatically
when the derivative is a :class:`~spingates.model.ModulatedRHS`).  Both
paths clamp steps so that every requested sample time and the final time are
hit exactly, and neither ever renormalizes the state: norm drift is a
measured diagnostic of integration quality, not something to hide.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .model import ModulatedRHS

try:
    from numba import njit

    NUMBA_AVAILABLE = True
except ImportError:  # pragma: no cover - numba is a declared dependency
    NUMBA_AVAILABLE = False

    def njit(*args, **kwargs):
        if len(args) == 1 and callable(args[0]):
            return args[0]

        def wrap(func):
            return func

        return wrap


class IntegrationError(RuntimeError):
    """Integration aborted; ``t_reached`` is the last successfully reached time."""

    def __init__(self, message: str, t_reached: float):
        super().__init__(f"{message} (last reached t = {t_reached!r} us)")
        self.t_reached = t_reached


@dataclass(frozen=True)
class IntegratorConfig:
    """Error control and budget knobs for :func:`integrate`.

    ``max_step = None`` resolves to (span)/100 at call time; ``initial_step =
    None`` selects the first step from the local derivative scale.
    """

    rel_tol: float = 1e-10
    abs_tol: float = 1e-12
    max_step: float | None = None
    initial_step: float | None = None
    max_steps: int = 10 ** 8

    def __post_init__(self):
        if not (self.rel_tol > 0.0 and self.abs_tol > 0.0):
            raise ValueError("tolerances must be > 0")
        if self.max_step is not None and not self.max_step > 0.0:
            raise ValueError("max_step must be > 0")
        if self.initial_step is not None and not self.initial_step > 0.0:
            raise ValueError("initial_step must be > 0")
        if self.max_steps < 1:
            raise ValueError("max_steps must be >= 1")


@dataclass(frozen=True)
class Trajectory:
    """Time-ordered record of states and squared norms during a pulse.

    ``times`` runs from pulse start to pulse end inclusive; ``states`` has one
    row per sample; ``norms[k]`` is sum_i |states[k, i]|^2.
    """

    times: np.ndarray
    states: np.ndarray
    norms: np.ndarray

    @property
    def populations(self) -> np.ndarray:
        return np.abs(self.states) ** 2

    @property
    def final_state(self) -> np.ndarray:
        return self.states[-1]

    def __len__(self) -> int:
        return self.times.shape[0]


def norm_drift(traj: Trajectory) -> float:
    """Largest deviation of the squared norm from 1 over the trajectory."""
    if len(traj) == 0:
        raise ValueError("trajectory is empty")
    return float(np.max(np.abs(traj.norms - 1.0)))


# ---------------------------------------------------------------------------
# Dormand-Prince 5(4) tableau (FSAL: the 7th stage equals the next first one)
# ---------------------------------------------------------------------------

_C2, _C3, _C4, _C5 = 1.0 / 5.0, 3.0 / 10.0, 4.0 / 5.0, 8.0 / 9.0
_A21 = 1.0 / 5.0
_A31, _A32 = 3.0 / 40.0, 9.0 / 40.0
_A41, _A42, _A43 = 44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0
_A51, _A52, _A53, _A54 = 19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0
_A61, _A62, _A63, _A64, _A65 = (9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0,
                                49.0 / 176.0, -5103.0 / 18656.0)
_B1, _B3, _B4, _B5, _B6 = (35.0 / 384.0, 500.0 / 1113.0, 125.0 / 192.0,
                           -2187.0 / 6784.0, 11.0 / 84.0)
_E1, _E3, _E4, _E5, _E6, _E7 = (71.0 / 57600.0, -71.0 / 16695.0, 71.0 / 1920.0,
                                -17253.0 / 339200.0, 22.0 / 525.0, -1.0 / 40.0)

_MIN_FACTOR, _MAX_FACTOR, _SAFETY = 0.2, 5.0, 0.9

_STATUS_OK = 0
_STATUS_STEP_BUDGET = 1
_STATUS_NOT_FINITE = 2
_STATUS_UNDERFLOW = 3


@njit(cache=True)
def _dp5_matrix_kernel(b0, b1, b2, b3, has_drive, delta, omega, ts, y0,
                       rtol, atol, max_step, h_start, max_steps):  # pragma: no cover - compiled
    n = y0.shape[0]
    m = ts.shape[0]
    ys = np.empty((m, n), np.complex128)
    for i in range(n):
        ys[0, i] = y0[i]

    t = ts[0]
    direction = 1.0 if ts[m - 1] >= t else -1.0
    y = y0.copy()

    def f(tt, yy):
        out = np.dot(b0, yy) + math.cos(delta * tt) * np.dot(b1, yy)
        if has_drive:
            phase = complex(math.cos(omega * tt), math.sin(omega * tt))
            out = out + phase * np.dot(b2, yy) + phase.conjugate() * np.dot(b3, yy)
        return out

    k1 = f(t, y)
    h = h_start
    idx = 1
    steps = 0
    status = _STATUS_OK
    t_tiny = 16.0 * 2.220446049250313e-16

    while idx < m:
        target = ts[idx]
        if h > max_step:
            h = max_step
        # stretch-hit: snap to the sample time whenever the natural step
        # reaches within a relative whisker, so no ulp-sized remainder is left
        gap = abs(target - t)
        hit = h * (1.0 + 1e-10) >= gap
        if hit:
            h = gap
        if h <= t_tiny * max(abs(t), 1.0):
            status = _STATUS_UNDERFLOW
            break
        hs = direction * h

        y2 = y + hs * (_A21 * k1)
        k2 = f(t + _C2 * hs, y2)
        y3 = y + hs * (_A31 * k1 + _A32 * k2)
        k3 = f(t + _C3 * hs, y3)
        y4 = y + hs * (_A41 * k1 + _A42 * k2 + _A43 * k3)
        k4 = f(t + _C4 * hs, y4)
        y5 = y + hs * (_A51 * k1 + _A52 * k2 + _A53 * k3 + _A54 * k4)
        k5 = f(t + _C5 * hs, y5)
        y6 = y + hs * (_A61 * k1 + _A62 * k2 + _A63 * k3 + _A64 * k4 + _A65 * k5)
        k6 = f(t + hs, y6)
        y_new = y + hs * (_B1 * k1 + _B3 * k3 + _B4 * k4 + _B5 * k5 + _B6 * k6)
        k7 = f(t + hs, y_new)

        err_acc = 0.0
        for i in range(n):
            err_i = hs * (_E1 * k1[i] + _E3 * k3[i] + _E4 * k4[i]
                          + _E5 * k5[i] + _E6 * k6[i] + _E7 * k7[i])
            scale = atol + rtol * max(abs(y[i]), abs(y_new[i]))
            q = abs(err_i) / scale
            err_acc += q * q
        err = math.sqrt(err_acc / n)

        if not math.isfinite(err):
            status = _STATUS_NOT_FINITE
            break

        steps += 1
        if err <= 1.0:
            t = target if hit else t + hs
            y = y_new
            k1 = k7
            if hit:
                for i in range(n):
                    ys[idx, i] = y[i]
                idx += 1
            if err == 0.0:
                factor = _MAX_FACTOR
            else:
                factor = min(_MAX_FACTOR, max(_MIN_FACTOR, _SAFETY * err ** -0.2))
            h = min(h * factor, max_step)
        else:
            h = h * max(_MIN_FACTOR, _SAFETY * err ** -0.2)
        if steps >= max_steps:
            if idx < m:
                status = _STATUS_STEP_BUDGET
            break

    return ys, status, t


def _dp5_generic(rhs, ts, y0, rtol, atol, max_step, h_start, max_steps):
    """Python twin of the compiled kernel for arbitrary derivative callables."""
    m = ts.shape[0]
    ys = np.empty((m, y0.shape[0]), np.complex128)
    ys[0] = y0

    t = ts[0]
    direction = 1.0 if ts[m - 1] >= t else -1.0
    y = y0.copy()
    k1 = np.asarray(rhs(t, y), dtype=np.complex128)
    h = h_start
    idx = 1
    steps = 0
    t_tiny = 16.0 * np.finfo(np.float64).eps

    while idx < m:
        target = ts[idx]
        if h > max_step:
            h = max_step
        # stretch-hit: snap to the sample time whenever the natural step
        # reaches within a relative whisker, so no ulp-sized remainder is left
        gap = abs(target - t)
        hit = h * (1.0 + 1e-10) >= gap
        if hit:
            h = gap
        if h <= t_tiny * max(abs(t), 1.0):
            raise IntegrationError("step size underflow", t)
        hs = direction * h

        k2 = np.asarray(rhs(t + _C2 * hs, y + hs * (_A21 * k1)), dtype=np.complex128)
        k3 = np.asarray(rhs(t + _C3 * hs, y + hs * (_A31 * k1 + _A32 * k2)), dtype=np.complex128)
        k4 = np.asarray(rhs(t + _C4 * hs, y + hs * (_A41 * k1 + _A42 * k2 + _A43 * k3)),
                        dtype=np.complex128)
        k5 = np.asarray(rhs(t + _C5 * hs, y + hs * (_A51 * k1 + _A52 * k2 + _A53 * k3 + _A54 * k4)),
                        dtype=np.complex128)
        k6 = np.asarray(rhs(t + hs, y + hs * (_A61 * k1 + _A62 * k2 + _A63 * k3
                                              + _A64 * k4 + _A65 * k5)), dtype=np.complex128)
        y_new = y + hs * (_B1 * k1 + _B3 * k3 + _B4 * k4 + _B5 * k5 + _B6 * k6)
        k7 = np.asarray(rhs(t + hs, y_new), dtype=np.complex128)

        err_vec = hs * (_E1 * k1 + _E3 * k3 + _E4 * k4 + _E5 * k5 + _E6 * k6 + _E7 * k7)
        scale = atol + rtol * np.maximum(np.abs(y), np.abs(y_new))
        with np.errstate(invalid="ignore"):  # non-finite stages abort below
            err = math.sqrt(float(np.mean(np.abs(err_vec / scale) ** 2)))

        if not math.isfinite(err):
            raise IntegrationError("non-finite derivative or state", t)

        steps += 1
        if err <= 1.0:
            t = target if hit else t + hs
            y = y_new
            k1 = k7
            if hit:
                ys[idx] = y
                idx += 1
            factor = _MAX_FACTOR if err == 0.0 else min(
                _MAX_FACTOR, max(_MIN_FACTOR, _SAFETY * err ** -0.2))
            h = min(h * factor, max_step)
        else:
            h = h * max(_MIN_FACTOR, _SAFETY * err ** -0.2)
        if steps >= max_steps and idx < m:
            raise IntegrationError(f"step budget of {max_steps} exhausted", t)

    return ys


def _rms(vec: np.ndarray) -> float:
    return math.sqrt(float(np.mean(np.abs(vec) ** 2)))


def _initial_step(rhs, t0, y0, direction, rtol, atol, max_step) -> float:
    """Deterministic first-step heuristic from the local derivative scale."""
    scale = atol + rtol * np.abs(y0)
    f0 = np.asarray(rhs(t0, y0), dtype=np.complex128)
    if not np.all(np.isfinite(f0.view(np.float64))):
        raise IntegrationError("non-finite derivative at the initial state", t0)
    d0, d1 = _rms(y0 / scale), _rms(f0 / scale)
    h0 = 1e-6 if (d0 < 1e-5 or d1 < 1e-5) else 0.01 * d0 / d1
    h0 = min(h0, max_step)
    y1 = y0 + h0 * direction * f0
    f1 = np.asarray(rhs(t0 + h0 * direction, y1), dtype=np.complex128)
    d2 = _rms((f1 - f0) / scale) / h0
    if max(d1, d2) <= 1e-15:
        h1 = max(1e-6, h0 * 1e-3)
    else:
        h1 = (0.01 / max(d1, d2)) ** 0.2
    return min(100.0 * h0, h1, max_step)


def _gauge_sigma(rhs: ModulatedRHS, t0: float, y0: np.ndarray) -> float:
    """Occupation-weighted mean of the instantaneous diagonal rates.

    Used as a global phase gauge: shifting every diagonal by sigma removes
    the fast common rotation of the occupied components (which carries no
    population dynamics) before stepping, and the exact phase
    e^{-i sigma (t - t0)} is restored on the returned samples.  Centering on
    the initially occupied subspace keeps the large-amplitude components
    slow, which is what bounds norm drift over long runs.
    """
    rates = rhs.diagonal_angular_rates(t0)
    weights = np.abs(y0) ** 2
    total = float(weights.sum())
    if total == 0.0:
        return float(0.5 * (rates.min() + rates.max()))
    return float(np.dot(weights, rates) / total)


def integrate(rhs, y0, t0: float, t1: float,
              cfg: IntegratorConfig = IntegratorConfig(),
              n_samples: int = 200) -> Trajectory:
    """Integrate y' = rhs(t, y) from t0 to t1 with dense sampling.

    Parameters
    ----------
    rhs : callable(t, y) -> dy/dt
        Derivative function.  :class:`~spingates.model.ModulatedRHS`
        instances are routed to a compiled kernel; any other callable runs
        through the pure-Python loop of the same scheme.
    y0 : array_like
        Initial complex state.
    t0, t1 : float
        Integration span in us.  ``t1 < t0`` integrates backwards; ``t1 ==
        t0`` returns a single-sample trajectory.
    cfg : IntegratorConfig
        Error-control settings.  Local error per step is controlled against
        ``abs_tol + rel_tol * |y|`` by the embedded 4th-order estimate.
    n_samples : int
        Number of output intervals: the trajectory holds ``n_samples + 1``
        evenly spaced samples including both endpoints, each hit exactly by
        step clamping.

    Raises
    ------
    IntegrationError
        On step-budget exhaustion, step underflow, or a non-finite
        derivative; the exception carries the last reached time.
    """
    y0 = np.asarray(y0, dtype=np.complex128).reshape(-1)
    if n_samples < 1:
        raise ValueError("n_samples must be >= 1")
    if t1 == t0:
        states = y0[np.newaxis, :].copy()
        return Trajectory(times=np.array([float(t0)]), states=states,
                          norms=np.sum(np.abs(states) ** 2, axis=1))

    span = abs(t1 - t0)
    direction = 1.0 if t1 > t0 else -1.0
    max_step = cfg.max_step if cfg.max_step is not None else span / 100.0
    ts = np.linspace(float(t0), float(t1), n_samples + 1)

    if isinstance(rhs, ModulatedRHS):
        sigma = _gauge_sigma(rhs, t0, y0)
        shifted = ModulatedRHS(rhs.b0 + 1j * sigma * np.eye(rhs.dim),
                               rhs.b1, rhs.b2, rhs.b3, rhs.delta, rhs.omega)
        h_start = cfg.initial_step if cfg.initial_step is not None else _initial_step(
            shifted, t0, y0, direction, cfg.rel_tol, cfg.abs_tol, max_step)
        empty = np.zeros((rhs.dim, rhs.dim), dtype=np.complex128)
        has_drive = shifted.b2 is not None
        ys, status, t_reached = _dp5_matrix_kernel(
            shifted.b0, shifted.b1,
            shifted.b2 if has_drive else empty,
            shifted.b3 if has_drive else empty,
            has_drive, shifted.delta, shifted.omega, ts, y0,
            cfg.rel_tol, cfg.abs_tol, max_step, min(h_start, max_step),
            cfg.max_steps)
        if status == _STATUS_STEP_BUDGET:
            raise IntegrationError(f"step budget of {cfg.max_steps} exhausted", t_reached)
        if status == _STATUS_NOT_FINITE:
            raise IntegrationError("non-finite derivative or state", t_reached)
        if status == _STATUS_UNDERFLOW:
            raise IntegrationError("step size underflow", t_reached)
        if sigma != 0.0:
            ys = ys * np.exp(-1j * sigma * (ts - t0))[:, np.newaxis]
    else:
        h_start = cfg.initial_step if cfg.initial_step is not None else _initial_step(
            rhs, t0, y0, direction, cfg.rel_tol, cfg.abs_tol, max_step)
        ys = _dp5_generic(rhs, ts, y0, cfg.rel_tol, cfg.abs_tol, max_step,
                          min(h_start, max_step), cfg.max_steps)

    return Trajectory(times=ts, states=ys, norms=np.sum(np.abs(ys) ** 2, axis=1))
