"""Elementary gates, gate sequences and their dense simulation kernels.

Qubit j is character j of the MSB-first bitstring, which is also axis j of the state
tensor reshaped to (2,) * m. Density tensors carry the ket axes 0..m-1 followed by the
bra axes m..2m-1.
"""

from typing import Literal

import numpy as np
from pydantic import BaseModel, ConfigDict, model_validator

from src.exceptions import ParameterError, WidthMismatchError
from src.simulation.state import PureState, basis_state

GateName = Literal['H', 'X', 'CNOT', 'T', 'TDG', 'RX', 'RZ', 'PHASE', 'MCU']

_SINGLE = {'H', 'X', 'T', 'TDG', 'RX', 'RZ', 'PHASE'}
_ANGLED = {'RX', 'RZ', 'PHASE', 'MCU'}

H_MATRIX = np.array([[1, 1], [1, -1]], dtype=np.complex128) / np.sqrt(2)
X_MATRIX = np.array([[0, 1], [1, 0]], dtype=np.complex128)
T_MATRIX = np.diag([1, np.exp(1j * np.pi / 4)]).astype(np.complex128)
CNOT_MATRIX = np.array(
    [[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0]],
    dtype=np.complex128,
)


class Gate(BaseModel):
    model_config = ConfigDict(frozen=True)

    name: GateName
    qubits: tuple[int, ...]
    angle: float | None = None

    @model_validator(mode='after')
    def _check_shape(self) -> 'Gate':
        if not self.qubits or any(q < 0 for q in self.qubits):
            raise ValueError(f'{self.name} needs non-negative qubit indices')
        if len(set(self.qubits)) != len(self.qubits):
            raise ValueError(f'{self.name} repeats a qubit: {self.qubits}')
        if self.name in _SINGLE and len(self.qubits) != 1:
            raise ValueError(f'{self.name} acts on one qubit, got {self.qubits}')
        if self.name == 'CNOT' and len(self.qubits) != 2:
            raise ValueError(f'CNOT acts on (control, target), got {self.qubits}')
        if (self.name in _ANGLED) != (self.angle is not None):
            raise ValueError(f'{self.name} angle mismatch: {self.angle}')
        return self

    def to_line(self) -> str:
        parts = [self.name, *map(str, self.qubits)]
        if self.angle is not None:
            parts.append(repr(float(self.angle)))
        return ' '.join(parts)

    @classmethod
    def from_line(cls, line: str) -> 'Gate':
        name, *rest = line.split()
        angle = None
        if name in _ANGLED:
            if not rest:
                raise ValueError(f'{name} line is missing its angle: {line!r}')
            angle = float(rest.pop())
        return cls(name=name, qubits=tuple(int(q) for q in rest), angle=angle)


def h(q: int) -> Gate:
    return Gate(name='H', qubits=(q,))


def x(q: int) -> Gate:
    return Gate(name='X', qubits=(q,))


def phase(q: int, angle: float) -> Gate:
    return Gate(name='PHASE', qubits=(q,), angle=angle)


def mcu(qubits, angle: float) -> Gate:
    """U(angle) on the last qubit, controlled on all the others being |1>."""
    return Gate(name='MCU', qubits=tuple(qubits), angle=angle)


class GateSequence(BaseModel):
    model_config = ConfigDict(frozen=True)

    width: int
    gates: tuple[Gate, ...] = ()

    @model_validator(mode='after')
    def _check_indices(self) -> 'GateSequence':
        if self.width < 1:
            raise ValueError(f'Sequence width must be >= 1, got {self.width}')
        for gate in self.gates:
            if max(gate.qubits) >= self.width:
                raise ValueError(f'{gate.to_line()} exceeds width {self.width}')
        return self

    def __len__(self) -> int:
        return len(self.gates)

    def __add__(self, other: 'GateSequence') -> 'GateSequence':
        if other.width != self.width:
            raise WidthMismatchError(f'Cannot join widths {self.width} and {other.width}')
        return GateSequence(width=self.width, gates=self.gates + other.gates)

    def repeated(self, times: int) -> 'GateSequence':
        if times < 0:
            raise ParameterError(f'Repeat count must be >= 0, got {times}')
        return GateSequence(width=self.width, gates=self.gates * times)

    def noise_sites(self) -> int:
        """Number of (gate, touched qubit) pairs."""
        return sum(len(g.qubits) for g in self.gates)

    def to_text(self) -> str:
        lines = [f'# width {self.width}']
        lines.extend(g.to_line() for g in self.gates)
        return '\n'.join(lines) + '\n'

    @classmethod
    def from_text(cls, text: str) -> 'GateSequence':
        width = None
        gates = []
        for raw in text.splitlines():
            line = raw.strip()
            if not line:
                continue
            if line.startswith('#'):
                tokens = line[1:].split()
                if len(tokens) == 2 and tokens[0] == 'width':
                    width = int(tokens[1])
                continue
            gates.append(Gate.from_line(line))
        if width is None:
            width = max((max(g.qubits) for g in gates), default=0) + 1
        return cls(width=width, gates=tuple(gates))


def gate_matrix(gate: Gate) -> np.ndarray:
    """Local unitary of a non-MCU gate."""
    match gate.name:
        case 'H':
            return H_MATRIX
        case 'X':
            return X_MATRIX
        case 'T':
            return T_MATRIX
        case 'TDG':
            return T_MATRIX.conj()
        case 'CNOT':
            return CNOT_MATRIX
        case 'PHASE':
            return np.diag([1.0, np.exp(1j * gate.angle)]).astype(np.complex128)
        case 'RZ':
            return np.diag([np.exp(-0.5j * gate.angle), np.exp(0.5j * gate.angle)]).astype(np.complex128)
        case 'RX':
            c, s = np.cos(gate.angle / 2), np.sin(gate.angle / 2)
            return np.array([[c, -1j * s], [-1j * s, c]], dtype=np.complex128)
    raise ParameterError(f'{gate.name} has no local matrix')


def _halves(array: np.ndarray, q: int, nbits: int) -> tuple[np.ndarray, np.ndarray]:
    """Views of the bit-0 and bit-1 halves of qubit q of an nbits register.

    The register is the trailing 2^nbits of a C-contiguous array; anything before it is batch.
    """
    view = array.reshape(-1, 2, 1 << (nbits - q - 1))
    return view[:, 0, :], view[:, 1, :]


def _transform_halves(a: np.ndarray, b: np.ndarray, u: np.ndarray) -> None:
    """(a, b) <- (u00 a + u01 b, u10 a + u11 b), in place."""
    u00, u01, u10, u11 = u.ravel()
    if u01 == 0 and u10 == 0:
        if u00 != 1:
            a *= u00
        if u11 != 1:
            b *= u11
    elif u00 == 0 and u11 == 0:
        t = a.copy()
        np.multiply(b, u01, out=a)
        np.multiply(t, u10, out=b)
    elif u00 == u01 == u10 == -u11:
        # Hadamard-shaped butterfly
        t = a + b
        np.subtract(a, b, out=b)
        np.multiply(t, u00, out=a)
        b *= u00
    else:
        t = u00 * a
        t += u01 * b
        b *= u11
        b += u10 * a
        a[...] = t


def _ones_index(nbits: int, qubits) -> tuple:
    index = [slice(None)] * (nbits + 1)
    for q in qubits:
        index[q + 1] = 1
    return tuple(index)


def _act(array: np.ndarray, gate: Gate, nbits: int, conjugate: bool = False) -> None:
    """Apply a gate (or its complex conjugate) in place to an nbits register."""
    if gate.name == 'MCU':
        factor = np.exp(-1j * gate.angle if conjugate else 1j * gate.angle)
        array.reshape((-1,) + (2,) * nbits)[_ones_index(nbits, gate.qubits)] *= factor
        return
    if gate.name == 'CNOT':
        control, target = gate.qubits
        tensor = array.reshape((-1,) + (2,) * nbits)
        sub = tensor[_ones_index(nbits, (control,))]
        axis = target + 1 - (control < target)
        a, b = np.moveaxis(sub, axis, 0)
        t = a.copy()
        a[...] = b
        b[...] = t
        return
    u = gate_matrix(gate)
    a, b = _halves(array, gate.qubits[0], nbits)
    _transform_halves(a, b, u.conj() if conjugate else u)


def _require_contiguous(array: np.ndarray) -> None:
    if not array.flags.c_contiguous:
        raise ParameterError('In-place kernels need a C-contiguous array')


def apply_gate_rows(rows: np.ndarray, gate: Gate, m: int) -> np.ndarray:
    """Apply a gate in place to every m-qubit amplitude vector along the last axis."""
    _require_contiguous(rows)
    if rows.shape[-1] != 1 << m:
        raise WidthMismatchError(f'Rows of length {rows.shape[-1]} are not {m}-qubit vectors')
    _act(rows, gate, m)
    return rows


def apply_matrix_rows(rows: np.ndarray, matrix: np.ndarray, q: int, m: int) -> np.ndarray:
    """Any 2x2 matrix (a Kraus operator, say) on qubit q of every row, in place."""
    _require_contiguous(rows)
    a, b = _halves(rows, q, m)
    _transform_halves(a, b, np.asarray(matrix, dtype=np.complex128))
    return rows


def apply_gate_density(rho: np.ndarray, gate: Gate, m: int) -> np.ndarray:
    """rho -> U rho U^dagger in place on a (2^m, 2^m) density matrix.

    The ket index is the leading half of a 2m-bit register over the flattened matrix; the
    bra index is an m-bit register along each row.
    """
    _require_contiguous(rho)
    _act(rho, gate, 2 * m)
    _act(rho, gate, m, conjugate=True)
    return rho


def simulate_sequence(sequence: GateSequence, initial: PureState | None = None) -> PureState:
    """Run a sequence on `initial` (default |0...0>)."""
    if initial is None:
        initial = basis_state(sequence.width, '0' * sequence.width)
    if initial.m != sequence.width:
        raise WidthMismatchError(f'Sequence width {sequence.width} vs state width {initial.m}')
    amps = initial.amplitudes.copy()
    for gate in sequence.gates:
        _act(amps, gate, sequence.width)
    return PureState(amps, validate=False)


def sequence_unitary(sequence: GateSequence) -> np.ndarray:
    """Dense unitary of a sequence (width <= 10); row j of the batch is column j."""
    if sequence.width > 10:
        raise ParameterError(f'Dense unitary of width {sequence.width} is too large')
    basis = np.eye(1 << sequence.width, dtype=np.complex128)
    for gate in sequence.gates:
        _act(basis, gate, sequence.width)
    return np.ascontiguousarray(basis.T)
