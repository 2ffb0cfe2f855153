import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from fock_partition import channels, states
from fock_partition.channels import ChannelSpec
from fock_partition.errors import DomainError

SURVIVALS = [0.3, 0.5, 0.7, 0.9]


def coherent(alpha, dim):
    k = np.arange(dim)
    amp = np.exp(-abs(alpha) ** 2 / 2) * np.array([alpha**j / math.sqrt(math.factorial(j)) for j in k])
    return np.outer(amp, amp.conj())


def test_channel_spec():
    ch = ChannelSpec(0.17834)
    assert ch.survival == pytest.approx(math.exp(-2 * 0.17834))
    assert ch.survival + ch.T == 1.0
    assert ChannelSpec.from_survival(0.7).survival == 0.7
    assert ChannelSpec(0.1).then(ChannelSpec(0.2)).kt == pytest.approx(0.3)
    with pytest.raises(DomainError):
        ChannelSpec(-0.1)
    with pytest.raises(DomainError):
        ChannelSpec.from_survival(0.0)


def test_damp_diagonal_examples():
    out = channels.damp_diagonal(states.number_state(2), ChannelSpec.from_survival(0.7))
    np.testing.assert_allclose(out.probs, [0.09, 0.42, 0.49], atol=1e-15)
    out = channels.damp_diagonal(states.number_state(1), ChannelSpec.from_survival(0.5))
    np.testing.assert_allclose(out.probs, [0.5, 0.5], atol=1e-15)
    th = states.thermal_state(0.3, 10)
    same = channels.damp_diagonal(th, ChannelSpec(0.0))
    np.testing.assert_array_equal(same.probs, th.probs)


@pytest.mark.parametrize("survival", SURVIVALS)
def test_number_states_become_binomial(survival):
    ch = ChannelSpec.from_survival(survival)
    for m in range(13):
        out = channels.damp_diagonal(states.number_state(m, m + 3), ch)
        target = states.binomial_state(m, survival, m + 3)
        assert np.max(np.abs(out.probs - target.probs)) <= 1e-12
        assert abs(out.trace - 1.0) <= 1e-12


def test_thermal_stays_thermal():
    # loss maps chaotic light with mean n to chaotic light with mean eta n
    gamma, eta = 0.4, 0.6
    out = channels.damp_diagonal(states.thermal_state(gamma, 200), ChannelSpec.from_survival(eta))
    n_out = eta * (1 - gamma) / gamma
    np.testing.assert_allclose(out.probs[:30], states.thermal_state(1 / (1 + n_out), 30).probs, atol=1e-13)


def test_damp_matrix_matches_diagonal():
    for kt in (0.05, 0.35, 1.2):
        ch = ChannelSpec(kt)
        state = states.binomial_state(9, 0.4, 16)
        full = channels.damp_matrix(state.density_matrix(), ch)
        np.testing.assert_allclose(np.diag(full).real, channels.damp_diagonal(state, ch).probs, atol=1e-12)
        assert np.max(np.abs(full - np.diag(np.diag(full)))) == 0.0


def test_coherent_mean_photon():
    alpha, eta, dim = 1.3 + 0.4j, 0.6, 40
    out = channels.damp_matrix(coherent(alpha, dim), ChannelSpec.from_survival(eta))
    mean = float(np.real(np.trace(out @ np.diag(np.arange(dim)))))
    assert mean == pytest.approx(eta * abs(alpha) ** 2, abs=1e-10)
    # a coherent state stays coherent with amplitude sqrt(eta) alpha
    np.testing.assert_allclose(out, coherent(math.sqrt(eta) * alpha, dim), atol=1e-12)


def test_damp_matrix_identity_and_validation():
    rho = channels.random_density_matrices(6, 1)[0]
    np.testing.assert_array_equal(channels.damp_matrix(rho, ChannelSpec(0.0)), rho)
    with pytest.raises(DomainError):
        channels.damp_matrix(np.array([[0.5, 0.3], [0.0, 0.5]]), ChannelSpec(0.1))


@pytest.mark.parametrize("kt", [0.05, 0.35, 1.2])
def test_trace_hermiticity_positivity(kt):
    ch = ChannelSpec(kt)
    for rho in channels.random_density_matrices(12):
        out = channels.damp_matrix(rho, ch)
        assert abs(np.trace(out) - 1.0) <= 1e-10
        assert np.max(np.abs(out - out.conj().T)) <= 1e-14
        assert np.linalg.eigvalsh(out).min() >= -1e-10


@settings(max_examples=30, deadline=None)
@given(st.floats(0, 2), st.floats(0, 2))
def test_semigroup(kt1, kt2):
    a, b = ChannelSpec(kt1), ChannelSpec(kt2)
    both = ChannelSpec(kt1 + kt2)
    for rho in channels.random_density_matrices(10, 2):
        twice = channels.damp_matrix(channels.damp_matrix(rho, a), b)
        assert np.max(np.abs(twice - channels.damp_matrix(rho, both))) <= 1e-10
    nb = states.negbinomial_state(2, 0.5, 30, eps_tail=1.0)
    twice = channels.damp_diagonal(channels.damp_diagonal(nb, a), b)
    assert np.max(np.abs(twice.probs - channels.damp_diagonal(nb, both).probs)) <= 1e-10


def test_large_kt_goes_to_vacuum():
    ch = ChannelSpec(20.0)
    assert ch.survival < 1e-8
    for state in (states.thermal_state(0.3, 60), states.binomial_state(12, 0.7, 16)):
        out = channels.damp_diagonal(state, ch)
        assert abs(out.probs[0] - state.trace) <= 1e-7
    for rho in channels.random_density_matrices(16):
        out = channels.damp_matrix(rho, ch)
        vac = np.zeros_like(out)
        vac[0, 0] = 1.0
        assert np.max(np.abs(out - vac)) <= 1e-7


def test_coherences_decay_slower_than_populations():
    # off-diagonal entries scale with sqrt(survival), so survival just below
    # 1e-8 leaves coherences near 1e-4
    rho = coherent(1.0, 12)
    out = channels.damp_matrix(rho, ChannelSpec.from_survival(1e-9))
    assert np.max(np.abs(np.diag(out)[1:])) < 1e-8
    assert abs(out[0, 1]) > 1e-6


def test_vacuum_is_dark():
    assert channels.vacuum_residual(ChannelSpec(0.7), 16) <= 1e-12


def test_generator_first_order():
    r1 = channels.generator_residual(1e-4, 16)
    r2 = channels.generator_residual(5e-5, 16)
    assert r1 / r2 == pytest.approx(2.0, rel=1e-3)


def test_generator_residual_matches_second_order_term():
    # (rho(dt) - rho)/dt - L rho = dt/2 L^2 rho + O(dt^2)
    dt, dim = 1e-5, 16
    worst = 0.0
    for rho in channels.random_density_matrices(dim):
        worst = max(worst, np.max(np.abs(channels.lindblad_generator(channels.lindblad_generator(rho)))))
    assert channels.generator_residual(dt, dim) == pytest.approx(dt / 2 * worst, rel=1e-3)


def test_fixed_point_check():
    value = channels.channel_fixed_point_check(ChannelSpec(0.5), 16, dt=1e-5)
    assert value <= 1e-3
    with pytest.raises(DomainError):
        channels.channel_fixed_point_check(ChannelSpec(0.0), 16)


def test_random_matrices_are_reproducible_states():
    first = channels.random_density_matrices(8)
    second = channels.random_density_matrices(8)
    for a, b in zip(first, second):
        np.testing.assert_array_equal(a, b)
        assert np.linalg.eigvalsh(a).min() > 0
        assert np.trace(a).real == pytest.approx(1.0)
