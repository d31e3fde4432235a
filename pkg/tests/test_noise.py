"""Tests for Kraus channels and the noisy backends."""

import numpy as np
import pytest
from pydantic import ValidationError

from src.algorithms import long_circuit, long_program
from src.exceptions import CapacityError, ParameterError, WidthMismatchError
from src.simulation.gates import GateSequence, h
from src.simulation.noise import (
    KrausChannel,
    NoiseSpec,
    amplitude_damping,
    apply_channel,
    combined_success,
    evolve_density,
    noisy_distribution,
    phase_damping,
    prefix_predicate,
    run_noisy,
)
from src.simulation.oracle import marked_oracle
from src.simulation.state import MixedState, basis_state, uniform_state


def _density(bits: str) -> MixedState:
    return MixedState.from_pure(basis_state(len(bits), bits))


class TestChannels:
    """Kraus operators of the damping channels."""

    @pytest.mark.parametrize('factory', [amplitude_damping, phase_damping])
    def test_completeness(self, factory, rng):
        for gamma in np.concatenate([[0.0, 1.0], rng.uniform(0, 1, 20)]):
            assert factory(gamma).completeness_defect() < 1e-12

    def test_gamma_range(self):
        with pytest.raises(ParameterError):
            amplitude_damping(1.2)
        with pytest.raises(ParameterError):
            phase_damping(-0.1)

    def test_incomplete_kraus_set_rejected(self):
        with pytest.raises(ParameterError):
            KrausChannel(kraus=(np.eye(2) * 0.5,))

    def test_zero_damping_is_identity(self, rng):
        amps = rng.normal(size=4) + 1j * rng.normal(size=4)
        rho = MixedState(np.outer(amps, amps.conj()) / np.vdot(amps, amps).real)
        out = apply_channel(rho, amplitude_damping(0.0), 1)
        assert np.allclose(out.matrix, rho.matrix, atol=1e-15)

    def test_full_amplitude_damping_resets_qubit(self):
        out = apply_channel(_density('1'), amplitude_damping(1.0), 0)
        assert np.allclose(out.matrix, _density('0').matrix)

    def test_partial_amplitude_damping(self):
        out = apply_channel(_density('1'), amplitude_damping(0.3), 0)
        assert np.allclose(out.matrix, np.diag([0.3, 0.7]))

    def test_full_phase_damping_kills_coherence(self):
        out = apply_channel(MixedState.from_pure(uniform_state(1)), phase_damping(1.0), 0)
        assert np.allclose(out.matrix, np.diag([0.5, 0.5]))

    def test_phase_damping_keeps_populations(self, rng):
        amps = rng.normal(size=8) + 1j * rng.normal(size=8)
        rho = MixedState(np.outer(amps, amps.conj()) / np.vdot(amps, amps).real)
        out = apply_channel(rho, phase_damping(0.4), 2)
        assert np.allclose(out.probabilities(), rho.probabilities())

    def test_channel_acts_on_named_qubit(self):
        """Damping qubit 1 of |01> gives |00>; damping qubit 0 leaves it alone."""
        rho = _density('01')
        assert np.allclose(apply_channel(rho, amplitude_damping(1.0), 1).matrix, _density('00').matrix)
        assert np.allclose(apply_channel(rho, amplitude_damping(1.0), 0).matrix, rho.matrix)

    def test_qubit_out_of_range(self):
        with pytest.raises(WidthMismatchError):
            apply_channel(_density('01'), amplitude_damping(0.1), 2)

    @pytest.mark.parametrize('g1, g2', [(0.1, 0.2), (0.02, 0.5), (0.3, 0.0)])
    def test_amplitude_damping_composes(self, g1, g2, rng):
        """AD(g1) then AD(g2) is AD(1 - (1 - g1)(1 - g2))."""
        amps = rng.normal(size=4) + 1j * rng.normal(size=4)
        rho = MixedState(np.outer(amps, amps.conj()) / np.vdot(amps, amps).real)
        twice = apply_channel(apply_channel(rho, amplitude_damping(g1), 0), amplitude_damping(g2), 0)
        once = apply_channel(rho, amplitude_damping(1 - (1 - g1) * (1 - g2)), 0)
        np.testing.assert_allclose(twice.matrix, once.matrix, atol=1e-14)

    def test_dephasing_probability(self):
        gamma = 0.19
        assert abs(phase_damping(gamma).dephasing_probability() - (1 - np.sqrt(1 - gamma)) / 2) < 1e-14
        assert amplitude_damping(0.3).dephasing_probability() is None
        assert amplitude_damping(0.0).dephasing_probability() == 0.0

    def test_custom_channel_matches_labelled_channel(self, rng):
        """An unlabelled copy of a damping channel takes the generic path to the same result."""
        amps = rng.normal(size=8) + 1j * rng.normal(size=8)
        rho = MixedState(np.outer(amps, amps.conj()) / np.vdot(amps, amps).real)
        for channel in (amplitude_damping(0.27), phase_damping(0.4)):
            custom = KrausChannel(kraus=channel.kraus)
            for q in range(3):
                np.testing.assert_allclose(
                    apply_channel(rho, custom, q).matrix, apply_channel(rho, channel, q).matrix, atol=1e-14
                )


class TestNoiseSpec:
    def test_trajectory_floor(self):
        with pytest.raises(ValidationError):
            NoiseSpec(backend='trajectories', trajectories=50)

    def test_gamma_checked(self):
        with pytest.raises(ValidationError):
            NoiseSpec(gamma=2.0)

    def test_with_gamma_keeps_custom_channel(self):
        channel = phase_damping(0.2)
        spec = NoiseSpec.custom(KrausChannel(kraus=channel.kraus, gamma=0.2))
        assert spec.with_gamma(0.5).kraus_channel() is spec.kraus_channel()

    def test_custom_needs_channel(self):
        with pytest.raises(ParameterError):
            NoiseSpec(channel='custom').kraus_channel()


class TestNoisyRuns:
    """Density-matrix and trajectory estimates of success."""

    def test_zero_noise_equals_noiseless(self, five_bit_oracle):
        est = run_noisy(long_circuit(five_bit_oracle), NoiseSpec(gamma=0.0), five_bit_oracle)
        assert est.backend == 'density-matrix'
        assert abs(est.success_rate - 1.0) < 1e-9
        assert est.stderr == 0.0

    def test_noisy_density_stays_physical(self):
        rho = evolve_density(long_circuit(marked_oracle(4, '1001')), amplitude_damping(0.05))
        assert rho.physicality_problems(1e-9) == []

    def test_density_limit(self):
        with pytest.raises(CapacityError, match='trajectories'):
            evolve_density(GateSequence(width=14, gates=(h(0),)), amplitude_damping(0.1))

    def test_trajectories_agree_with_density_matrix(self):
        f = marked_oracle(3, '110')
        circuit = long_circuit(f)
        exact = run_noisy(circuit, NoiseSpec(gamma=0.05, backend='density-matrix'), f)
        sampled = run_noisy(circuit, NoiseSpec(gamma=0.05, backend='trajectories', trajectories=400), f, seed=9)
        assert sampled.backend == 'trajectories'
        assert abs(sampled.success_rate - exact.success_rate) <= 4 * sampled.stderr + 0.01

    def test_program_trajectories_match_gate_replay(self):
        """Closed-form clean iterates give the same dephasing trajectories as a full gate replay."""
        f = marked_oracle(5, '10110')
        spec = NoiseSpec(channel='phase_damping', gamma=0.03, backend='trajectories', trajectories=150)
        structured = run_noisy(long_program(f), spec, f, seed=4)
        flat = run_noisy(long_circuit(f), spec, f, seed=4)
        assert abs(structured.success_rate - flat.success_rate) < 1e-10
        assert abs(structured.stderr - flat.stderr) < 1e-10

    def test_phase_damping_trajectories_agree_with_density_matrix(self):
        f = marked_oracle(4, '0110')
        exact = run_noisy(long_program(f), NoiseSpec(channel='phase_damping', gamma=0.05, backend='density-matrix'), f)
        spec = NoiseSpec(channel='phase_damping', gamma=0.05, backend='trajectories', trajectories=1000)
        sampled = run_noisy(long_program(f), spec, f, seed=3)
        assert abs(sampled.success_rate - exact.success_rate) <= 4 * sampled.stderr + 0.01

    def test_common_errors_across_gamma(self):
        """With a fixed seed a stronger dephasing never strikes fewer sites, so success falls."""
        f = marked_oracle(4, '1100')
        rates = [
            run_noisy(
                long_program(f),
                NoiseSpec(channel='phase_damping', gamma=gamma, backend='trajectories', trajectories=300),
                f,
                seed=8,
            ).success_rate
            for gamma in (0.0, 0.02, 0.2)
        ]
        assert abs(rates[0] - 1.0) < 1e-9
        assert rates[0] >= rates[1] >= rates[2]

    def test_custom_channel_density_run(self):
        circuit = long_circuit(marked_oracle(3, '010'))
        channel = amplitude_damping(0.04)
        labelled = evolve_density(circuit, channel)
        custom = evolve_density(circuit, KrausChannel(kraus=channel.kraus))
        np.testing.assert_allclose(custom.matrix, labelled.matrix, atol=1e-12)

    def test_trajectories_are_seeded(self):
        f = marked_oracle(3, '011')
        spec = NoiseSpec(channel='phase_damping', gamma=0.1, backend='trajectories', trajectories=100)
        first = run_noisy(long_circuit(f), spec, f, seed=2)
        second = run_noisy(long_circuit(f), spec, f, seed=2)
        assert first == second

    def test_shot_estimate(self):
        f = marked_oracle(4, '0101')
        circuit = long_circuit(f)
        spec = NoiseSpec(gamma=0.02)
        exact = run_noisy(circuit, spec, f)
        shots = run_noisy(circuit, spec, f, shots=2000, seed=1)
        assert abs(shots.success_rate - exact.success_rate) < 0.05
        assert shots.stderr > 0

    def test_prefix_predicate(self):
        pred = prefix_predicate('10', 4)
        assert list(pred.marked_indices()) == [8, 9, 10, 11]
        assert pred('1011') == 1 and pred('0110') == 0
        with pytest.raises(WidthMismatchError):
            prefix_predicate('10101', 4)

    def test_noisy_distribution_normalised(self):
        probs = noisy_distribution(long_circuit(marked_oracle(3, '101')), NoiseSpec(channel='phase_damping', gamma=0.1))
        assert abs(probs.sum() - 1.0) < 1e-10
        spec = NoiseSpec(channel='phase_damping', gamma=0.1, backend='trajectories', trajectories=200)
        averaged = noisy_distribution(long_program(marked_oracle(3, '101')), spec)
        assert abs(averaged.sum() - 1.0) < 1e-10

    def test_combined_success(self):
        assert abs(combined_success(0.653, 0.887) - 0.653 * 0.887) < 1e-15
        with pytest.raises(ParameterError):
            combined_success(1.2, 0.5)
