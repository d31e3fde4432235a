"""Tests for gates, gate sequences and the dense gate kernels."""

import numpy as np
import pytest
from pydantic import ValidationError

from src.exceptions import ParameterError, WidthMismatchError
from src.simulation.gates import (
    H_MATRIX,
    Gate,
    GateSequence,
    apply_gate_density,
    apply_gate_rows,
    apply_matrix_rows,
    h,
    mcu,
    phase,
    sequence_unitary,
    simulate_sequence,
    x,
)
from src.simulation.state import basis_state


class TestGate:
    """Gate validation and the one-line text form."""

    def test_single_qubit_gate_rejects_two_qubits(self):
        with pytest.raises(ValidationError):
            Gate(name='H', qubits=(0, 1))

    def test_angle_required_for_rotations(self):
        with pytest.raises(ValidationError):
            Gate(name='RZ', qubits=(0,))
        with pytest.raises(ValidationError):
            Gate(name='X', qubits=(0,), angle=0.3)

    def test_repeated_qubit_rejected(self):
        with pytest.raises(ValidationError):
            mcu((0, 1, 1), np.pi)

    def test_text_line_keeps_angle(self):
        gate = mcu((0, 2, 3), 2.3523)
        assert gate.to_line() == 'MCU 0 2 3 2.3523'
        assert Gate.from_line(gate.to_line()) == gate


class TestGateSequence:
    """Composition, repetition and the text format of sequences."""

    def test_gate_outside_width_rejected(self):
        with pytest.raises(ValidationError):
            GateSequence(width=2, gates=(h(2),))

    def test_join_requires_equal_width(self):
        with pytest.raises(WidthMismatchError):
            GateSequence(width=2) + GateSequence(width=3)

    def test_repeated_and_noise_sites(self):
        """An MCU over three qubits is one gate but three noise sites."""
        seq = GateSequence(width=3, gates=(h(0), mcu((0, 1, 2), np.pi)))
        assert len(seq.repeated(3)) == 6
        assert seq.noise_sites() == 4
        with pytest.raises(ParameterError):
            seq.repeated(-1)

    def test_text_form_parses_back(self):
        seq = GateSequence(width=3, gates=(h(0), x(2), phase(1, 0.25), mcu((0, 1, 2), -1.5)))
        text = seq.to_text()
        assert text.startswith('# width 3\n')
        assert GateSequence.from_text(text) == seq


class TestKernels:
    """Dense action of the gate set."""

    def test_hadamard_unitary(self):
        seq = GateSequence(width=1, gates=(h(0),))
        assert np.allclose(sequence_unitary(seq), H_MATRIX)

    def test_cnot_acts_control_first(self):
        """CNOT(0, 1) maps |10> to |11>."""
        seq = GateSequence(width=2, gates=(Gate(name='CNOT', qubits=(0, 1)),))
        assert simulate_sequence(seq, basis_state(2, '10')).probability_of('11') == 1.0
        assert simulate_sequence(seq, basis_state(2, '01')).probability_of('01') == 1.0

    def test_mcu_phases_all_ones(self):
        seq = GateSequence(width=2, gates=(mcu((0, 1), 0.8),))
        assert np.allclose(sequence_unitary(seq), np.diag([1, 1, 1, np.exp(0.8j)]))

    def test_mcu_on_subset_of_qubits(self):
        """Controls on qubits 1 and 2 ignore qubit 0."""
        seq = GateSequence(width=3, gates=(mcu((1, 2), np.pi),))
        expected = np.ones(8, dtype=complex)
        expected[[3, 7]] = -1
        assert np.allclose(sequence_unitary(seq), np.diag(expected))

    def test_density_kernel_matches_vector_kernel(self):
        """U ρ U^† computed gate by gate equals |ψ><ψ| of the simulated vector."""
        seq = GateSequence(
            width=3,
            gates=(
                h(0), h(1), Gate(name='CNOT', qubits=(1, 2)), mcu((0, 1, 2), 0.7),
                Gate(name='RX', qubits=(2,), angle=0.4), Gate(name='T', qubits=(0,)),
                Gate(name='RZ', qubits=(1,), angle=-1.1), x(0),
            ),
        )
        psi = simulate_sequence(seq).amplitudes
        rho = np.zeros((8, 8), dtype=complex)
        rho[0, 0] = 1.0
        for gate in seq.gates:
            apply_gate_density(rho, gate, 3)
        np.testing.assert_allclose(rho, np.outer(psi, psi.conj()), atol=1e-12)

    def test_wide_unitary_refused(self):
        with pytest.raises(ParameterError):
            sequence_unitary(GateSequence(width=11))

    def test_row_kernel_matches_simulation(self, rng):
        """A batch of random vectors run in place matches each vector simulated alone."""
        seq = GateSequence(
            width=4,
            gates=(
                h(3), Gate(name='CNOT', qubits=(3, 0)), mcu((1, 3), 1.3), phase(2, 0.2),
                Gate(name='RX', qubits=(0,), angle=2.1), x(1), Gate(name='CNOT', qubits=(2, 1)),
            ),
        )
        rows = rng.normal(size=(5, 16)) + 1j * rng.normal(size=(5, 16))
        rows /= np.linalg.norm(rows, axis=1, keepdims=True)
        expected = rows @ sequence_unitary(seq).T
        for gate in seq.gates:
            apply_gate_rows(rows, gate, 4)
        np.testing.assert_allclose(rows, expected, atol=1e-12)

    def test_row_kernel_checks_length(self):
        with pytest.raises(WidthMismatchError):
            apply_gate_rows(np.zeros((2, 8), dtype=complex), h(0), 4)

    def test_kernels_refuse_strided_arrays(self):
        rows = np.zeros((4, 8), dtype=complex)[:, ::2]
        with pytest.raises(ParameterError):
            apply_matrix_rows(rows, np.eye(2), 0, 2)

    def test_matrix_kernel_on_named_qubit(self):
        """A non-unitary 2x2 matrix on qubit 1 of |01> keeps only the bit-1 component scaled."""
        rows = np.zeros((1, 4), dtype=complex)
        rows[0, 1] = 1.0
        apply_matrix_rows(rows, np.diag([1.0, 0.5]), 1, 2)
        np.testing.assert_allclose(rows[0], [0, 0.5, 0, 0])
