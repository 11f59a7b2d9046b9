import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from nlamp import fock
from nlamp.errors import DivergentAmplification, InvalidGain, InvalidState
from nlamp.fock import (
    FockDensityMatrix,
    apply_filter,
    coherent_state,
    mean_field,
    mean_photon_derivative,
    mean_photon_number,
)

from conftest import gains, random_density, seeds


def brute_filter(rho, g):
    """Independent filter: explicit diagonal operator and matrix products."""
    G = np.diag([g**n for n in range(rho.shape[0])])
    out = G @ rho @ G
    return out / np.trace(out).real, np.trace(out).real


def brute_mean_field(rho):
    a = np.zeros(rho.shape, dtype=complex)
    for n in range(1, rho.shape[0]):
        a[n - 1, n] = np.sqrt(n)
    return np.trace(rho @ a)


def slope_double_sum(pops, g):
    """d<n>/dg as the symmetric double sum over (n - m)**2 e_nm / N**2."""
    n = np.arange(pops.size)
    N = np.sum(g ** (2 * n) * pops)
    e = 2 * g ** (2 * (n[:, None] + n[None, :]) - 1) * pops[:, None] * pops[None, :]
    return float(np.sum(n[:, None] * (n[:, None] - n[None, :]) * e) / N**2)


# -- apply_filter -------------------------------------------------------------

def test_coherent_state_is_amplified_to_coherent_state():
    out = apply_filter(coherent_state(0.5, 25), 2.0)
    target = fock.coherent_amplitudes(1.0, 25)
    assert np.vdot(target, out.state.rho @ target).real >= 1 - 1e-8


def test_fock_state_is_invariant():
    for g in (0.3, 1.7, 2.5):
        out = apply_filter(fock.basis_state(3, 10), g)
        assert np.allclose(out.state.rho, fock.basis_state(3, 10).to_density().rho, atol=1e-12)
        assert mean_photon_number(out.state) == pytest.approx(3.0, abs=1e-12)


def test_unit_gain_is_identity(rng):
    rho = random_density(rng, 12)
    out = apply_filter(rho, 1.0)
    assert out.weight == pytest.approx(1.0, abs=1e-12)
    assert np.allclose(out.state.rho, rho.rho, atol=1e-12)


def test_balanced_qubit_mean_field_drops_under_amplification():
    psi = fock.superposition([1, 1])
    out = apply_filter(psi, 2.0)
    expected, weight = brute_filter(psi.to_density().rho, 2.0)
    assert brute_mean_field(expected) == pytest.approx(0.4, abs=1e-12)
    assert mean_field(out.state) == pytest.approx(0.4, abs=1e-12)
    assert mean_field(psi) == pytest.approx(0.5, abs=1e-12)
    assert out.weight == pytest.approx(weight)


@given(seed=seeds, g=gains)
@settings(max_examples=40, deadline=None)
def test_filter_matches_brute_force(seed, g):
    rho = random_density(np.random.default_rng(seed), 8, decay=0.3)
    out = apply_filter(rho, g, truncated=True)
    expected, weight = brute_filter(rho.rho, g)
    assert np.allclose(out.state.rho, expected, atol=1e-10)
    assert out.weight == pytest.approx(weight, rel=1e-12)


def test_input_is_not_mutated(rng):
    rho = random_density(rng, 6)
    before = rho.rho.copy()
    apply_filter(rho, 0.5)
    assert np.array_equal(rho.rho, before)
    with pytest.raises(ValueError):
        rho.rho[0, 0] = 2


def test_invalid_gain():
    for g in (0.0, -1.0, float("nan"), float("inf")):
        with pytest.raises(InvalidGain):
            apply_filter(fock.vacuum(4), g)


def test_amplification_of_heavy_tail_is_flagged(rng):
    flat = random_density(rng, 20)
    with pytest.raises(DivergentAmplification):
        apply_filter(flat, 1.5)
    # attenuation is always fine, and a truncated device is allowed explicitly
    apply_filter(flat, 0.5)
    apply_filter(flat, 1.5, truncated=True)


def test_thermal_state_beyond_physical_bound_is_flagged():
    # V = nbar + 1/2 = 3.5 exceeds the physical bound for g = 1.2
    with pytest.raises(DivergentAmplification):
        apply_filter(fock.thermal_state(3.0, 40), 1.2)


# -- observables ---------------------------------------------------------------

def test_mean_field_examples():
    assert mean_field(coherent_state(0.3 + 0.4j, 30)) == pytest.approx(0.3 + 0.4j, abs=1e-12)
    assert mean_field(fock.basis_state(1, 5)) == 0
    assert mean_field(fock.superposition([1, 1])) == pytest.approx(0.5)


@given(seed=seeds)
@settings(max_examples=30, deadline=None)
def test_mean_field_matches_operator_trace(seed):
    rho = random_density(np.random.default_rng(seed), 7)
    assert mean_field(rho) == pytest.approx(brute_mean_field(rho.rho), abs=1e-12)


def test_pure_and_mixed_mean_field_agree():
    psi = coherent_state(0.7 - 0.2j, 30)
    assert mean_field(psi) == pytest.approx(mean_field(psi.to_density()), abs=1e-14)


def test_mean_photon_number_examples():
    assert mean_photon_number(fock.vacuum()) == 0
    assert mean_photon_number(coherent_state(1.0, 30)) == pytest.approx(1.0, abs=1e-10)
    out = apply_filter(fock.superposition([1, 0, 1]), 2.0)
    assert mean_photon_number(out.state) == pytest.approx(32 / 17, abs=1e-12)


# -- monotonicity -------------------------------------------------------------

def test_derivative_of_fock_state_vanishes():
    assert mean_photon_derivative(fock.basis_state(2, 10).to_density(), 1.5) == pytest.approx(0, abs=1e-9)


def test_derivative_of_balanced_qubit():
    # <n>(g) = g**2 / (1 + g**2), slope 1/2 at g = 1
    rho = fock.superposition([1, 1]).to_density()
    assert mean_photon_derivative(rho, 1.0) == pytest.approx(0.5, abs=1e-8)


def test_derivative_of_thermal_state():
    # populations x**n with x = 1/3; filtered mean y/(1-y), y = g**2 x
    rho = fock.thermal_state(0.5, 40)
    g, x = 0.8, 1 / 3
    expected = 2 * g * x / (1 - g * g * x) ** 2
    value = mean_photon_derivative(rho, g)
    assert value > 0
    assert value == pytest.approx(expected, rel=1e-7)


@given(seed=seeds, g=st.floats(0.3, 1.8))
@settings(max_examples=60, deadline=None)
def test_finite_difference_matches_double_sum(seed, g):
    rho = random_density(np.random.default_rng(seed), 10, rank=3)
    fd = mean_photon_derivative(rho, g, truncated=True)
    exact = slope_double_sum(rho.populations, g)
    assert fd == pytest.approx(exact, rel=1e-6, abs=1e-8)
    assert fd >= -fock.TOL_DERIV


# -- invariants -----------------------------------------------------------------

@given(seed=seeds, g1=gains, g2=gains)
@settings(max_examples=40, deadline=None)
def test_filter_composition(seed, g1, g2):
    rho = random_density(np.random.default_rng(seed), 10, decay=0.2)
    twice = apply_filter(apply_filter(rho, g1, truncated=True).state, g2, truncated=True)
    once = apply_filter(rho, g1 * g2, truncated=True)
    assert np.allclose(twice.state.rho, once.state.rho, atol=fock.TOL_NORM)


@given(seed=seeds, g=gains, phi=st.floats(-np.pi, np.pi))
@settings(max_examples=40, deadline=None)
def test_filter_commutes_with_phase_rotation(seed, g, phi):
    rho = random_density(np.random.default_rng(seed), 10, decay=0.2)
    a = apply_filter(fock.phase_rotate(rho, phi), g, truncated=True).state.rho
    b = fock.phase_rotate(apply_filter(rho, g, truncated=True).state, phi).rho
    assert np.allclose(a, b, atol=fock.TOL_NORM)


@given(alpha_re=st.floats(-1, 1), alpha_im=st.floats(-1, 1), g=st.floats(0.3, 2.0))
@settings(max_examples=40, deadline=None)
def test_coherent_state_action(alpha_re, alpha_im, g):
    alpha = complex(alpha_re, alpha_im)
    out = apply_filter(coherent_state(alpha, 40), g)
    target = coherent_state(g * alpha, 40)
    assert fock.fidelity(out.state, target) >= 1 - 1e-6
    assert out.weight == pytest.approx(np.exp((g * g - 1) * abs(alpha) ** 2), rel=1e-8)


def test_state_validation():
    with pytest.raises(InvalidState):
        fock.FockState(np.array([1.0, 1.0]))
    with pytest.raises(InvalidState):
        FockDensityMatrix(np.array([[0.5, 0.6], [0.6, 0.5]]))
    with pytest.raises(InvalidState):
        FockDensityMatrix(np.array([[0.5, 0.1j], [0.2j, 0.5]]))
