"""Unit tests for the cv_teleportation_lab.optimize.closed_form module."""

import math

import numpy as np
import pytest

from cv_teleportation_lab.exceptions import InvalidArgumentError, UnsupportedStateError
from cv_teleportation_lab.metrics import cond_var_product, hk_fidelity, improved_fidelity
from cv_teleportation_lab.models import BeamSplitterBell, ProtocolConfig, QNDBell
from cv_teleportation_lab.optimize import (
    effective_gprime,
    gains_max_t,
    gains_min_v,
    hessian_at_minimum,
    hk_threshold,
    improved_squeezers,
    noise_bloch_messiah,
    noise_standard_form,
    optimal_gprime,
    optimal_local_ops,
    quantum_threshold,
    squeezer_for_gprime,
    t_max,
    t_max_opt,
    t_v_min,
    t_v_min_opt,
    v_min,
    v_t_max,
)
from cv_teleportation_lab.protocol_engine import added_noise_qnd_scalar, bell_matrix, run_protocol, shared_state_qnd
from cv_teleportation_lab.symplectic_core import (
    SIGMA_3,
    make_beamsplitter,
    make_bell_qnd,
    make_phase,
    make_squeezer,
)

G_VALUES = [0.5, 1.0, 2.5]


def _standard_pair(kappa: float) -> tuple[float, float]:
    return math.cosh(2 * kappa) / 2, math.sinh(2 * kappa) / 2


class TestOptimalGains:
    """Unit tests for the optimal gains and the figures they reach."""

    def test_gains_min_v(self) -> None:
        """Test G_x = g/g' and G_p = g g'/(1 + g^2)."""
        assert gains_min_v(2.5, 1.0) == pytest.approx((2.5, 2.5 / 7.25))

    def test_gains_max_t(self) -> None:
        """Test G_x = (1 + g^2)/(g g') and G_p = g'/g."""
        assert gains_max_t(2.5, 1.0) == pytest.approx((7.25 / 2.5, 0.4))

    @pytest.mark.parametrize(("g", "g_prime"), [(0.0, 1.0), (1.0, -1.0), (1.0, math.nan)])
    def test_invalid_arguments(self, g: float, g_prime: float) -> None:
        """Test that both constants must be finite and positive."""
        with pytest.raises(InvalidArgumentError, match="finite and positive"):
            gains_min_v(g, g_prime)
        with pytest.raises(InvalidArgumentError, match="finite and positive"):
            gains_max_t(g, g_prime)

    @pytest.mark.parametrize("g_prime", [0.7, 1.0, 1.64])
    def test_v_min_independent_of_g_prime(self, g_prime: float) -> None:
        """Test that the V-minimizing gains reach 1/(4(1 + g^2)) for every g'."""
        var_x, var_p = added_noise_qnd_scalar(2.5, g_prime, *gains_min_v(2.5, g_prime))
        assert cond_var_product(var_x, var_p) == pytest.approx(v_min(2.5))
        assert v_min(2.5) == pytest.approx(1 / 29)

    @pytest.mark.parametrize("g_prime", [0.7, 1.0, 1.64])
    def test_v_t_max_independent_of_g_prime(self, g_prime: float) -> None:
        """Test that the T-maximizing gains leave V = (1/g^2 + 1/g^4)/4 for every g'."""
        var_x, var_p = added_noise_qnd_scalar(2.5, g_prime, *gains_max_t(2.5, g_prime))
        assert cond_var_product(var_x, var_p) == pytest.approx(v_t_max(2.5))

    def test_t_v_min_worked_example(self) -> None:
        """Test T_V_min(g = 2.5, g' = 1) against its quoted value 1.32."""
        assert t_v_min(2.5, 1.0) == pytest.approx(1.32, abs=5e-2)

    def test_t_max_worked_example(self) -> None:
        """Test T_max(g = 2.5, g' = 1) against its quoted value 1.38."""
        assert t_max(2.5, 1.0) == pytest.approx(1.38, abs=5e-2)


class TestOptimalGPrime:
    """Unit tests for the optimal Bell constant."""

    def test_optimal_gprime(self) -> None:
        """Test g'_opt(2.5) against its quoted value 1.64."""
        assert optimal_gprime(2.5) == pytest.approx(1.64, abs=5e-3)

    @pytest.mark.parametrize("g", G_VALUES)
    def test_t_v_min_opt(self, g: float) -> None:
        """Test T_V_min at g'_opt against its closed form."""
        assert t_v_min_opt(g) == pytest.approx(t_v_min(g, optimal_gprime(g)))

    @pytest.mark.parametrize("g", G_VALUES)
    def test_t_max_opt(self, g: float) -> None:
        """Test T_max at g'_opt against its closed form."""
        assert t_max_opt(g) == pytest.approx(t_max(g, optimal_gprime(g)))

    @pytest.mark.parametrize("g", G_VALUES)
    def test_t_max_opt_is_maximum(self, g: float) -> None:
        """Test that g'_opt beats nearby Bell constants."""
        g_opt = optimal_gprime(g)
        assert t_max(g, g_opt) > t_max(g, 0.9 * g_opt)
        assert t_max(g, g_opt) > t_max(g, 1.1 * g_opt)


class TestThresholds:
    """Unit tests for the threshold entangling constants."""

    def test_quantum_threshold(self) -> None:
        """Test that V_T_max = 1/4 at g = sqrt((sqrt(5) + 1)/2)."""
        assert quantum_threshold() == pytest.approx(1.27, abs=5e-3)
        assert v_t_max(quantum_threshold()) == pytest.approx(0.25)

    def test_hk_threshold(self) -> None:
        """Test that the g' = g scheme reaches F = 1/2 at g = sqrt(3/10)."""
        assert hk_threshold() == pytest.approx(0.548, abs=5e-4)
        assert hk_fidelity(hk_threshold()) == pytest.approx(0.5)


class TestLimits:
    """Unit tests for the behaviour of the closed forms at extreme entangling constants."""

    @pytest.mark.parametrize("g", [1e3, 1e4])
    def test_t_v_min_opt_approaches_two(self, g: float) -> None:
        """Test that T_V_min at g'_opt falls short of 2 by about 2/g."""
        assert t_v_min_opt(g) < 2  # noqa: PLR2004
        assert 2 - t_v_min_opt(g) == pytest.approx(2 / g, rel=1e-2)

    @pytest.mark.parametrize("g", [1e3, 1e4])
    def test_t_v_min_unit_gprime_approaches_one_and_a_half(self, g: float) -> None:
        """Test that T_V_min with g' = 1 tends to 1 + 1/2."""
        assert t_v_min(g, 1.0) == pytest.approx(1.5, abs=1e-5)

    @pytest.mark.parametrize("g", np.logspace(-3, 3, 25).tolist())
    def test_improved_fidelity_beats_classical(self, g: float) -> None:
        """Test that local squeezers give F > 1/2 for every g > 0."""
        assert improved_fidelity(g) > 0.5  # noqa: PLR2004

    def test_improved_fidelity_increases(self) -> None:
        """Test that the fidelity with local squeezers grows towards 1 with g."""
        fidelities = [improved_fidelity(g) for g in np.logspace(-3, 3, 25)]
        assert np.all(np.diff(fidelities) > 0)
        assert fidelities[-1] == pytest.approx(1.0, abs=1e-3)


class TestSqueezers:
    """Unit tests for the local squeezers."""

    def test_improved_squeezers(self) -> None:
        """Test S_A = diag(a, 1/a) and S_B = diag(1/a, a) with a = 2^(1/4) at g = g' = 1."""
        a = 2**0.25
        s_a, s_b = improved_squeezers(1.0, 1.0)
        np.testing.assert_allclose(s_a, np.diag([a, 1 / a]))
        np.testing.assert_allclose(s_b, np.diag([1 / a, a]))

    @pytest.mark.parametrize("g_prime", [0.5, 1.0, 3.0])
    def test_improved_squeezer_noise(self, g_prime: float) -> None:
        """Test that the squeezers make the noise isotropic, (sqrt(1 + g^2) - g) I."""
        s_a, s_b = improved_squeezers(2.5, g_prime)
        noise = run_protocol(ProtocolConfig(g=2.5, bell=QNDBell(g_prime=g_prime), s_a=s_a, s_b=s_b)).noise
        np.testing.assert_allclose(noise, (math.hypot(1.0, 2.5) - 2.5) * np.eye(2), atol=1e-12)

    @pytest.mark.parametrize("g_prime", [0.5, 1.0, 3.0])
    def test_squeezer_for_gprime(self, g_prime: float) -> None:
        """Test that Alice's squeezer turns g' into g'_opt."""
        r_a = math.log(squeezer_for_gprime(2.5, g_prime)[0, 0])
        assert effective_gprime(g_prime, r_a) == pytest.approx(optimal_gprime(2.5))


class TestOptimalLocalOps:
    """Unit tests for the optimal local operations."""

    def test_minimum_photon_noise(self) -> None:
        """Test N_min = sqrt(2) - 1 at g = 1 with isotropic noise."""
        ops = optimal_local_ops(shared_state_qnd(1.0), make_bell_qnd(1.0))
        assert ops.photon_noise == pytest.approx(math.sqrt(2) - 1)

        config = ProtocolConfig(g=1.0, bell=QNDBell(g_prime=1.0), s_a=ops.s_a, s_b=ops.s_b)
        np.testing.assert_allclose(run_protocol(config).noise, ops.photon_noise * np.eye(2), atol=1e-10)

    @pytest.mark.parametrize("g", G_VALUES)
    def test_minimum_is_epr_floor(self, g: float) -> None:
        """Test that 2(a - c) equals e^(-2 kappa) of the shared state."""
        a = math.hypot(1.0, g) / 2
        kappa = 0.5 * math.acosh(2 * a)
        ops = optimal_local_ops(shared_state_qnd(g), make_bell_qnd(0.7))
        assert ops.photon_noise == pytest.approx(math.exp(-2 * kappa))

    def test_beamsplitter_bell(self) -> None:
        """Test that a beam-splitter Bell stage reaches the same minimum."""
        bell = BeamSplitterBell(transmissivity=0.6, reflectivity=0.8)
        ops = optimal_local_ops(shared_state_qnd(2.5), make_beamsplitter(0.6, 0.8))
        noise = run_protocol(ProtocolConfig(g=2.5, bell=bell, s_a=ops.s_a, s_b=ops.s_b)).noise
        np.testing.assert_allclose(noise, ops.photon_noise * np.eye(2), atol=1e-10)
        np.testing.assert_array_equal(bell_matrix(bell), make_beamsplitter(0.6, 0.8))

    def test_mixed_state(self) -> None:
        """Test that a mixed shared state is not supported."""
        with pytest.raises(UnsupportedStateError):
            optimal_local_ops(np.eye(4), make_bell_qnd(1.0))


class TestNoiseForms:
    """Unit tests for the photon-noise forms of a standard-form state."""

    @pytest.mark.parametrize("kappa", [0.0, 0.5, 1.0])
    def test_identity_reaches_minimum(self, kappa: float) -> None:
        """Test that the identity gives 2(a - c)."""
        a, c = _standard_pair(kappa)
        assert noise_standard_form(a, c, np.eye(2), np.eye(2)) == pytest.approx(2 * (a - c))
        assert noise_bloch_messiah(a, c, 0.0, 0.0, 0.0, 0.0) == pytest.approx(2 * (a - c))

    @pytest.mark.parametrize(
        "params",
        [
            (0.3, -0.2, 0.4, 1.1, -0.7, 2.0),
            (1.0, 1.0, 0.0, 0.0, 0.0, 0.0),
            (-0.5, 0.8, 3.0, -2.5, 0.1, -1.2),
        ],
    )
    def test_forms_agree(self, params: tuple[float, ...]) -> None:
        """Test the trace form against the sum and difference form."""
        r_a, r_b, alpha, beta, gamma, delta = params
        a, c = _standard_pair(0.5)
        s_tilde = make_phase(alpha) @ make_squeezer(r_a) @ make_phase(beta)
        s_b = make_phase(gamma) @ make_squeezer(r_b) @ make_phase(delta)

        expected = noise_bloch_messiah(
            a, c, r_a + r_b, r_a - r_b, alpha + beta - gamma - delta, alpha - beta - gamma + delta
        )
        assert noise_standard_form(a, c, SIGMA_3 @ s_tilde @ SIGMA_3, s_b) == pytest.approx(expected)

    def test_invalid_pair(self) -> None:
        """Test that (a, c) must satisfy a^2 - c^2 = 1/4."""
        with pytest.raises(InvalidArgumentError, match="standard-form pair"):
            noise_standard_form(1.0, 0.1, np.eye(2), np.eye(2))

    def test_hessian_at_minimum(self) -> None:
        """Test the Hessian [[2(2a - c), 0], [0, 2c]]."""
        a, c = _standard_pair(0.5)
        np.testing.assert_allclose(hessian_at_minimum(a, c), np.diag([2 * (2 * a - c), 2 * c]))
