"""Model-level checks: equations of motion, spectrum, resonances, invariants."""

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from spingates import (
    Frame,
    OneQubitParams,
    TwoQubitParams,
    as_state,
    basis_state,
    cnot_resonance,
    energy_spectrum,
    from_mhz,
    lab_to_rotating,
    make_rhs,
    not_resonance,
    rhs_one_qubit,
    rhs_two_qubit,
    rotating_to_lab,
    standard_cnot_params,
    standard_not_params,
)

TWO_PI = 2.0 * math.pi


# ---------------------------------------------------------------------------
# Independent oracles: Hamiltonians assembled from scratch, not shared with
# the library implementation.
# ---------------------------------------------------------------------------

def oracle_h_one(frame, t, p):
    cos_mod = math.cos(p.delta * t)
    if frame is Frame.ROTATING:
        det = 0.5 * (p.omega - p.omega0 * cos_mod)
        return np.array([[det, -p.Omega / 2], [-p.Omega / 2, -det]], complex)
    h = np.array([[-0.5 * p.omega0 * cos_mod, 0.0], [0.0, 0.5 * p.omega0 * cos_mod]],
                 complex)
    h[0, 1] = -0.5 * p.Omega * np.exp(1j * p.omega * t)
    h[1, 0] = np.conj(h[0, 1])
    return h


def oracle_h_two(frame, t, p):
    cos_mod = math.cos(p.delta * t)
    w1, w2, j, w = p.omega1, p.omega2, p.J, p.omega
    diag = np.array([
        -0.5 * ((w1 + w2) * cos_mod - 0.5 * j),
        -0.5 * ((w1 - w2) * cos_mod + 0.5 * j),
        -0.5 * ((w2 - w1) * cos_mod + 0.5 * j),
        -0.5 * (-(w1 + w2) * cos_mod - 0.5 * j),
    ])
    if frame is Frame.ROTATING:
        diag = diag + np.array([0.5 * w, -0.5 * w, -0.5 * w, -1.5 * w])
        off = -0.5 * p.Omega
        h = np.diag(diag).astype(complex)
        for a, b in ((0, 1), (0, 2), (1, 3), (2, 3)):
            h[a, b] = h[b, a] = off
        return h
    h = np.diag(diag).astype(complex)
    up = -0.5 * p.Omega * np.exp(1j * p.omega * t)
    for a, b in ((0, 1), (0, 2), (1, 3), (2, 3)):
        h[a, b] = up
        h[b, a] = np.conj(up)
    return h


def random_state(rng, dim):
    vec = rng.normal(size=dim) + 1j * rng.normal(size=dim)
    return vec / np.linalg.norm(vec)


# ---------------------------------------------------------------------------
# One-qubit equations
# ---------------------------------------------------------------------------

def test_lab_rhs_pure_larmor_phase():
    # drive off: |0> only precesses, at rate +omega0/2
    p = OneQubitParams(omega0=from_mhz(200.0), Omega=1e-30, delta=0.0)
    deriv = rhs_one_qubit(Frame.LAB, 0.0, basis_state(2, 0), p)
    assert deriv[0] == pytest.approx(0.5j * p.omega0, abs=1e-12)
    assert deriv[1] == pytest.approx(0.0, abs=1e-12)


def test_rotating_rhs_on_resonance_drives_excited_state():
    p = standard_not_params()
    deriv = rhs_one_qubit(Frame.ROTATING, 0.0, basis_state(2, 0), p)
    assert deriv[0] == pytest.approx(0.0, abs=1e-14)
    assert deriv[1] == pytest.approx(0.5j * p.Omega, abs=1e-14)


def test_lab_rhs_frozen_spot_value():
    # independently computed 2x2 matrix-times-vector value at t = 0
    p = standard_not_params()
    state = as_state([1 / math.sqrt(2), 1 / math.sqrt(2)])
    deriv = rhs_one_qubit(Frame.LAB, 0.0, state, p)
    assert deriv[0] == pytest.approx(444.5104379627445j, rel=1e-13)
    assert deriv[1] == pytest.approx(-444.0661496689287j, rel=1e-13)


@pytest.mark.parametrize("frame", list(Frame))
def test_one_qubit_rhs_matches_matrix_oracle(frame):
    rng = np.random.default_rng(7)
    p = OneQubitParams.from_mhz(omega0=200.0, Omega=0.1, delta=3e-3)
    for t in (0.0, 0.37, 2.5, 4.999):
        state = random_state(rng, 2)
        expected = -1j * (oracle_h_one(frame, t, p) @ state)
        got = rhs_one_qubit(frame, t, state, p)
        np.testing.assert_allclose(got, expected, rtol=1e-13, atol=1e-13)


def test_one_qubit_rhs_rejects_wrong_dimension():
    p = standard_not_params()
    with pytest.raises(ValueError, match="dimension"):
        rhs_one_qubit(Frame.LAB, 0.0, np.zeros(4, complex), p)


# ---------------------------------------------------------------------------
# Two-qubit equations
# ---------------------------------------------------------------------------

def test_two_qubit_rotating_frozen_spot_value():
    # drive at 105 (2pi MHz), initial |10>: diagonal rate i/2 (omega2-omega1+J/2+omega),
    # drive feeds D00 and D11 at +i Omega/2, D01 untouched
    p = TwoQubitParams.from_mhz(omega1=100.0, omega2=110.0, J=10.0, Omega=0.1,
                                omega=105.0)
    deriv = rhs_two_qubit(Frame.ROTATING, 0.0, basis_state(4, 2), p)
    assert deriv[2] == pytest.approx(376.9911184307752j, rel=1e-13)
    assert deriv[0] == pytest.approx(0.3141592653589793j, rel=1e-13)
    assert deriv[3] == pytest.approx(0.3141592653589793j, rel=1e-13)
    assert deriv[1] == pytest.approx(0.0, abs=1e-15)


@pytest.mark.parametrize("frame", list(Frame))
def test_two_qubit_rhs_matches_matrix_oracle(frame):
    rng = np.random.default_rng(11)
    p = TwoQubitParams.from_mhz(omega1=100.0, omega2=110.0, J=10.0, Omega=0.1,
                                delta=2e-3)
    for t in (0.0, 0.123, 1.9, 4.75):
        state = random_state(rng, 4)
        expected = -1j * (oracle_h_two(frame, t, p) @ state)
        got = rhs_two_qubit(frame, t, state, p)
        np.testing.assert_allclose(got, expected, rtol=1e-13, atol=1e-13)


@pytest.mark.parametrize("frame", list(Frame))
@pytest.mark.parametrize("index", range(4))
def test_undriven_basis_state_evolves_by_pure_phase(frame, index):
    # with Omega -> 0 the Hamiltonian is diagonal: the derivative of a basis
    # state is an imaginary multiple of itself
    p = TwoQubitParams.from_mhz(omega1=100.0, omega2=110.0, J=10.0, Omega=1e-30,
                                delta=1e-3, omega=105.0)
    state = basis_state(4, index)
    deriv = rhs_two_qubit(frame, 1.3, state, p)
    off_support = [i for i in range(4) if i != index]
    assert np.allclose(deriv[off_support], 0.0, atol=1e-25)
    assert abs(deriv[index].real) < 1e-25


@pytest.mark.parametrize("frame", list(Frame))
def test_coupling_topology(frame):
    # drive from the {|00>, |11>} subspace lands only on {|01>, |10>} and
    # vice versa: no direct 00-11 or 01-10 matrix element
    p = standard_cnot_params(delta_mhz=1e-3)
    p_undriven = TwoQubitParams(omega1=p.omega1, omega2=p.omega2, J=p.J,
                                Omega=1e-300, delta=p.delta, omega=p.omega)
    rng = np.random.default_rng(3)
    for seed_support, image_support in (([0, 3], [1, 2]), ([1, 2], [0, 3])):
        amps = np.zeros(4, complex)
        amps[seed_support] = random_state(rng, 2)
        drive_part = (rhs_two_qubit(frame, 0.8, amps, p)
                      - rhs_two_qubit(frame, 0.8, amps, p_undriven))
        assert np.allclose(drive_part[seed_support], 0.0, atol=1e-12)
        assert np.any(np.abs(drive_part[image_support]) > 1e-3)


def test_lab_and_rotating_derivatives_agree_through_phase_map():
    # d/dt |c_i|^2 computed in the lab frame equals d/dt |d_i|^2 computed in
    # the rotating frame at the mapped state
    p = standard_cnot_params(delta_mhz=1e-3)
    rng = np.random.default_rng(5)
    for t in (0.0, 0.7, 3.2):
        d_state = random_state(rng, 4)
        c_state = rotating_to_lab(d_state, p.omega, t)
        dc = rhs_two_qubit(Frame.LAB, t, c_state, p)
        dd = rhs_two_qubit(Frame.ROTATING, t, d_state, p)
        pop_rate_lab = 2.0 * np.real(np.conj(c_state) * dc)
        pop_rate_rot = 2.0 * np.real(np.conj(d_state) * dd)
        np.testing.assert_allclose(pop_rate_lab, pop_rate_rot, atol=1e-10)


# ---------------------------------------------------------------------------
# Shared RHS properties
# ---------------------------------------------------------------------------

state_values = st.floats(-1.0, 1.0, allow_nan=False)


@st.composite
def normalized_states(draw, dim):
    parts = draw(st.lists(state_values, min_size=2 * dim, max_size=2 * dim))
    vec = np.array(parts[:dim]) + 1j * np.array(parts[dim:])
    norm = np.linalg.norm(vec)
    if norm < 1e-3:
        vec = vec + 1.0
        norm = np.linalg.norm(vec)
    return vec / norm


@settings(max_examples=60, deadline=None)
@given(state=normalized_states(4), t=st.floats(0.0, 10.0, allow_nan=False),
       frame=st.sampled_from(list(Frame)))
def test_flow_is_norm_preserving(state, t, frame):
    # derivative = -i H state with H Hermitian, so Re<state|derivative> = 0
    p = standard_cnot_params(delta_mhz=2e-3)
    deriv = rhs_two_qubit(frame, t, state, p)
    assert abs(np.real(np.vdot(state, deriv))) < 1e-12


@settings(max_examples=40, deadline=None)
@given(state=normalized_states(2), t=st.floats(0.0, 10.0, allow_nan=False),
       frame=st.sampled_from(list(Frame)),
       delta_mhz=st.floats(0.0, 0.1, allow_nan=False))
def test_modulation_parity(state, t, frame, delta_mhz):
    # cos(-delta t) = cos(delta t): the equations are even in delta
    plus = OneQubitParams.from_mhz(omega0=200.0, Omega=0.1, delta=delta_mhz)
    minus = OneQubitParams.from_mhz(omega0=200.0, Omega=0.1, delta=-delta_mhz)
    np.testing.assert_array_equal(rhs_one_qubit(frame, t, state, plus),
                                  rhs_one_qubit(frame, t, state, minus))


def test_delta_zero_diagonal_is_time_independent():
    p = standard_cnot_params(delta_mhz=0.0)
    rhs = make_rhs(Frame.ROTATING, p)
    rates_early = rhs.diagonal_angular_rates(0.0)
    rates_late = rhs.diagonal_angular_rates(4.2)
    np.testing.assert_array_equal(rates_early, rates_late)


def test_delta_zero_resonant_reduction():
    # on resonance at delta = 0: d0' = +i (Omega/2) d1 and d1' = +i (Omega/2) d0
    p = standard_not_params()
    for state in (basis_state(2, 0), basis_state(2, 1),
                  as_state([0.6, 0.8j])):
        deriv = rhs_one_qubit(Frame.ROTATING, 1.7, state, p)
        np.testing.assert_allclose(deriv, 0.5j * p.Omega * state[::-1], atol=1e-15)


# ---------------------------------------------------------------------------
# Spectrum and resonances
# ---------------------------------------------------------------------------

def test_energy_spectrum_benchmark_values():
    p = standard_cnot_params()
    expected = TWO_PI * np.array([-102.5, 2.5, -7.5, 107.5])
    np.testing.assert_allclose(energy_spectrum(p), expected, rtol=1e-14)


def test_energy_spectrum_sums_to_zero():
    p = TwoQubitParams.from_mhz(omega1=87.0, omega2=131.0, J=4.5, Omega=0.2)
    assert energy_spectrum(p).sum() == pytest.approx(0.0, abs=1e-10)


def test_energy_spectrum_degenerate_uncoupled_limit():
    # omega1 = omega2 = wbar with J -> 0 gives (-wbar, 0, 0, +wbar)
    p = TwoQubitParams(omega1=from_mhz(100.0), omega2=from_mhz(100.0) * (1 + 1e-15),
                       J=1e-12, Omega=1.0)
    np.testing.assert_allclose(energy_spectrum(p),
                               [-from_mhz(100.0), 0.0, 0.0, from_mhz(100.0)],
                               atol=1e-9)


def test_not_resonance_values():
    assert not_resonance(standard_not_params()) == from_mhz(200.0)
    # the resonant choice zeroes the rotating-frame detuning at delta = 0
    p = standard_not_params()
    resonant = OneQubitParams(omega0=p.omega0, Omega=p.Omega, omega=not_resonance(p))
    deriv = rhs_one_qubit(Frame.ROTATING, 0.0, basis_state(2, 0), resonant)
    assert deriv[0] == 0.0


def test_cnot_resonance_is_target_splitting():
    p = standard_cnot_params()
    spectrum = energy_spectrum(p)
    assert cnot_resonance(p) == pytest.approx(spectrum[3] - spectrum[2], rel=1e-15)
    # omega2 + J/2 = 115 for the benchmark set; the level splitting of the
    # driven |10> <-> |11> transition
    assert cnot_resonance(p) == pytest.approx(from_mhz(115.0), rel=1e-14)
    assert TwoQubitParams.from_mhz(omega1=100.0, omega2=110.0, J=10.0,
                                   Omega=0.1).omega == pytest.approx(from_mhz(115.0))


def test_cnot_resonance_tracks_coupling():
    base = dict(omega1=from_mhz(100.0), omega2=from_mhz(110.0), Omega=1.0)
    small_j = TwoQubitParams(J=1e-9, **base)
    assert cnot_resonance(small_j) == pytest.approx(from_mhz(110.0), rel=1e-9)


# ---------------------------------------------------------------------------
# Frame maps, parameters, state validation
# ---------------------------------------------------------------------------

@pytest.mark.parametrize("dim", [2, 4])
def test_frame_map_preserves_populations_and_round_trips(dim):
    rng = np.random.default_rng(13)
    state = random_state(rng, dim)
    omega, t = from_mhz(115.0), 2.31
    lab = rotating_to_lab(state, omega, t)
    np.testing.assert_allclose(np.abs(lab) ** 2, np.abs(state) ** 2, rtol=1e-14)
    np.testing.assert_allclose(lab_to_rotating(lab, omega, t), state, rtol=1e-13)


def test_frames_coincide_at_pulse_start():
    state = np.array([0.5, 0.5, 0.5, 0.5], complex)
    np.testing.assert_array_equal(rotating_to_lab(state, from_mhz(115.0), 0.0), state)


@pytest.mark.parametrize("kwargs", [
    dict(omega0=-1.0, Omega=1.0),
    dict(omega0=1.0, Omega=0.0),
    dict(omega0=float("nan"), Omega=1.0),
    dict(omega0=1.0, Omega=1.0, delta=float("inf")),
])
def test_one_qubit_params_reject_bad_values(kwargs):
    with pytest.raises(ValueError):
        OneQubitParams(**kwargs)


def test_two_qubit_params_require_addressable_qubits_and_coupling():
    with pytest.raises(ValueError, match="omega1 and omega2"):
        TwoQubitParams(omega1=1.0, omega2=1.0, J=1.0, Omega=1.0)
    with pytest.raises(ValueError, match="J"):
        TwoQubitParams(omega1=1.0, omega2=2.0, J=0.0, Omega=1.0)


def test_as_state_normalization_gate():
    as_state([1.0, 0.0])                      # exact
    as_state([1.0 + 4e-10, 0.0])              # inside the 1e-9 band
    with pytest.raises(ValueError, match="norm"):
        as_state([1.0 + 1e-6, 0.0])
    with pytest.raises(ValueError, match="finite"):
        as_state([float("nan"), 0.0])
