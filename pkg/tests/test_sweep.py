"""Sweep, threshold, and closed-form cross-check tests."""

import math

import numpy as np
import pytest

from spingates import (
    ConsistencyError,
    Frame,
    GateKind,
    IntegratorConfig,
    Scale,
    SweepSpec,
    ThresholdBracketError,
    Trajectory,
    find_threshold,
    from_mhz,
    mathieu_alpha,
    mathieu_residual,
    reconstruct_excited_amplitude,
    rotating_not_trajectory,
    run_sweep,
    standard_cnot_params,
    standard_not_params,
)

TIGHT = IntegratorConfig(rel_tol=1e-12, abs_tol=1e-14)


def not_spec(delta_min_mhz=0.0, delta_max_mhz=1e-2, n_points=11, **kwargs):
    return SweepSpec(gate=GateKind.NOT, params=standard_not_params(),
                     delta_min=from_mhz(delta_min_mhz),
                     delta_max=from_mhz(delta_max_mhz), n_points=n_points, **kwargs)


# ---------------------------------------------------------------------------
# run_sweep
# ---------------------------------------------------------------------------

def test_sweep_rows_ordered_and_complete():
    spec = not_spec(n_points=7)
    result = run_sweep(spec)
    assert len(result) == 7
    assert np.all(np.diff(result.deltas) > 0)
    np.testing.assert_allclose(result.deltas, spec.grid(), rtol=1e-15)


def test_sweep_delta_zero_row_is_reference_point():
    result = run_sweep(not_spec(n_points=3))
    assert result.m1[0] == 1.0
    assert result.m3[0] >= 1.0 - 1e-8


def test_sweep_population_rows_sum_to_one():
    result = run_sweep(not_spec(n_points=5))
    np.testing.assert_allclose(result.populations.sum(axis=1), 1.0, atol=1e-8)


def test_sweep_small_modulation_band_keeps_fidelity():
    # every row at delta <= 2e-4 clears 0.99
    result = run_sweep(not_spec(delta_max_mhz=2e-4, n_points=10))
    assert np.all(result.m3 >= 0.99)


def test_sweep_reproducible_bit_identical():
    spec = not_spec(n_points=5)
    a, b = run_sweep(spec), run_sweep(spec)
    np.testing.assert_array_equal(a.m1, b.m1)
    np.testing.assert_array_equal(a.m2, b.m2)
    np.testing.assert_array_equal(a.m3, b.m3)
    np.testing.assert_array_equal(a.populations, b.populations)


def test_parallel_sweep_matches_serial():
    spec = not_spec(n_points=6)
    serial = run_sweep(spec, jobs=1)
    parallel = run_sweep(spec, jobs=2)
    np.testing.assert_array_equal(serial.m3, parallel.m3)
    np.testing.assert_array_equal(serial.populations, parallel.populations)


def test_sweep_log_scale_grid():
    spec = not_spec(delta_min_mhz=1e-4, n_points=5, scale=Scale.LOG)
    grid = spec.grid()
    ratios = grid[1:] / grid[:-1]
    np.testing.assert_allclose(ratios, ratios[0], rtol=1e-12)


def test_sweep_spec_validation():
    with pytest.raises(ValueError):
        not_spec(delta_min_mhz=2e-3, delta_max_mhz=1e-3)
    with pytest.raises(ValueError):
        not_spec(n_points=1)
    with pytest.raises(ValueError):
        not_spec(fidelity_threshold=1.0)
    with pytest.raises(ValueError):
        not_spec(delta_min_mhz=0.0, scale=Scale.LOG)
    with pytest.raises(ValueError):
        SweepSpec(gate=GateKind.CNOT_DIGITAL, params=standard_not_params(),
                  delta_min=0.0, delta_max=1.0)


def test_superposition_case_is_pointwise_more_stable_than_digital():
    kwargs = dict(params=standard_cnot_params(), delta_min=0.0,
                  delta_max=from_mhz(1e-2), n_points=9)
    digital = run_sweep(SweepSpec(gate=GateKind.CNOT_DIGITAL, **kwargs), TIGHT)
    superposition = run_sweep(SweepSpec(gate=GateKind.CNOT_SUPERPOSITION, **kwargs), TIGHT)
    assert np.all(superposition.m2 >= digital.m2)


# ---------------------------------------------------------------------------
# find_threshold
# ---------------------------------------------------------------------------

def test_not_threshold_sits_in_expected_decade():
    spec = not_spec(delta_min_mhz=1e-4, delta_max_mhz=1e-2)
    delta_star = find_threshold(spec)
    assert from_mhz(1e-4) <= delta_star <= from_mhz(1e-3)


def test_threshold_bracket_is_verified():
    spec = not_spec(delta_min_mhz=1e-4, delta_max_mhz=1e-2)
    delta_star = find_threshold(spec)
    from spingates.sweep import _measure_at

    assert _measure_at(spec.gate, spec.params, delta_star,
                       IntegratorConfig(), spec.frame) >= spec.fidelity_threshold
    assert _measure_at(spec.gate, spec.params, delta_star * (1.0 + 2e-3),
                       IntegratorConfig(), spec.frame) < spec.fidelity_threshold


def test_threshold_unbracketed_raises():
    # at these tiny deltas the fidelity never drops below the floor
    spec = not_spec(delta_min_mhz=1e-6, delta_max_mhz=1e-5)
    with pytest.raises(ThresholdBracketError):
        find_threshold(spec)
    # and with an absurd floor the lower end already fails
    spec = not_spec(delta_min_mhz=1e-4, delta_max_mhz=1e-2,
                    fidelity_threshold=0.999999999)
    with pytest.raises(ThresholdBracketError):
        find_threshold(spec)


def test_threshold_self_consistent_under_refinement():
    spec = not_spec(delta_min_mhz=1e-4, delta_max_mhz=1e-2)
    coarse = find_threshold(spec, rel_precision=1e-3)
    fine = find_threshold(spec, rel_precision=1e-4)
    assert abs(coarse - fine) <= 2e-3 * coarse


# ---------------------------------------------------------------------------
# Closed-form cross-checks
# ---------------------------------------------------------------------------

def test_mathieu_alpha_resonant_static_limit():
    p = standard_not_params()
    alpha = mathieu_alpha(0.0, p)
    assert alpha == pytest.approx(0.25 * p.Omega ** 2, rel=1e-14)
    assert alpha.imag == 0.0


def test_mathieu_alpha_imaginary_part_vanishes_at_zero_time():
    p = standard_not_params(delta_mhz=3e-3)
    assert mathieu_alpha(0.0, p).imag == 0.0


def test_mathieu_alpha_spot_value_against_duplicate_coding():
    p = standard_not_params(delta_mhz=1e-3)
    t = 1.0
    expected = (0.25 * (p.Omega ** 2 + p.omega ** 2
                        * (1.0 - (p.omega0 / p.omega) * math.cos(p.delta * t)) ** 2)
                + 0.5j * p.omega0 * p.delta * math.sin(p.delta * t))
    assert mathieu_alpha(t, p) == pytest.approx(expected, rel=1e-14)


def test_residual_small_on_resonant_run():
    p = standard_not_params()
    traj = rotating_not_trajectory(p, cfg=TIGHT, n_samples=2000)
    assert mathieu_residual(traj, p) <= 1e-4


def test_residual_small_with_modulation():
    p = standard_not_params(delta_mhz=1e-3)
    traj = rotating_not_trajectory(p, cfg=TIGHT, n_samples=2000)
    assert mathieu_residual(traj, p) <= 1e-4


def test_reconstruction_matches_analytic_rabi():
    # resonant run: d0 = cos(Omega t / 2), reconstructed d1 = i sin(Omega t / 2)
    p = standard_not_params()
    traj = rotating_not_trajectory(p, cfg=TIGHT, n_samples=2000)
    rebuilt = reconstruct_excited_amplitude(traj, p)
    expected = 1j * np.sin(0.5 * p.Omega * traj.times)
    assert np.max(np.abs(rebuilt - expected)) < 1e-8
    assert np.max(np.abs(rebuilt - traj.states[:, 1])) < 1e-6


def test_residual_zero_trajectory():
    times = np.linspace(0.0, 5.0, 2001)
    states = np.zeros((2001, 2), complex)
    traj = Trajectory(times=times, states=states, norms=np.zeros(2001))
    assert mathieu_residual(traj, standard_not_params()) == 0.0


def test_residual_rejects_sparse_sampling():
    p = standard_not_params()
    traj = rotating_not_trajectory(p, cfg=TIGHT, n_samples=200)
    with pytest.raises(ValueError, match="sparse"):
        mathieu_residual(traj, p)


def test_residual_large_for_non_solution_trajectory():
    # frozen states have d0'' = 0, so the normalized residual is ~1
    times = np.linspace(0.0, 5.0, 1500)
    amps = np.full((1500, 2), math.sqrt(0.5), dtype=complex)
    traj = Trajectory(times=times, states=amps, norms=np.ones(1500))
    assert mathieu_residual(traj, standard_not_params()) == pytest.approx(1.0, abs=1e-12)


def test_reconstruction_mismatch_raises(monkeypatch):
    # doctor the model's coupling sign: the elimination identity now fails
    # against the honestly integrated trajectory
    import spingates.sweep as sweep_module
    from spingates import ModulatedRHS

    p = standard_not_params()
    traj = rotating_not_trajectory(p, cfg=TIGHT, n_samples=1200)
    clean = sweep_module.one_qubit_rhs(Frame.ROTATING, p)
    doctored = ModulatedRHS(-clean.b0, clean.b1, delta=clean.delta)
    monkeypatch.setattr(sweep_module, "one_qubit_rhs", lambda frame, params: doctored)
    with pytest.raises(ConsistencyError):
        mathieu_residual(traj, p)
