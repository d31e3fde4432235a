"""Single-qubit Kraus noise and noisy execution of gate sequences.

The noise unit is one channel application per (gate, touched qubit) pair, after the gate.
A multi-controlled phase is a single gate and so touches each of its qubits once.

Trajectories of a dephasing channel, (1 - λ)ρ + λZρZ (phase damping is one), are unravelled
into Z errors drawn independently of the state. For a SearchProgram the iterates a trajectory
passes through without an error are then applied in their exact closed form, and only the
struck iterates are replayed gate by gate.
"""

import logging
from dataclasses import dataclass
from typing import Iterator, Literal

import numpy as np
from pydantic import BaseModel, PrivateAttr, model_validator

from src.config import Config
from src.exceptions import CapacityError, ParameterError, WidthMismatchError
from src.simulation.gates import GateSequence, apply_gate_density, apply_gate_rows, apply_matrix_rows
from src.simulation.operators import SearchOperator, SearchProgram, apply_compiled_rows
from src.simulation.state import MixedState, Predicate, check_bits, predicate_mask

logger = logging.getLogger(__name__)

_CFG = Config.default()

ChannelLabel = Literal['amplitude_damping', 'phase_damping', 'custom']
Backend = Literal['auto', 'density-matrix', 'trajectories']
Circuit = GateSequence | SearchProgram


@dataclass(frozen=True)
class KrausChannel:
    kraus: tuple[np.ndarray, ...]
    label: ChannelLabel = 'custom'
    gamma: float | None = None

    def __post_init__(self):
        if not self.kraus or any(np.shape(e) != (2, 2) for e in self.kraus):
            raise ParameterError('A single-qubit channel needs 2x2 Kraus operators')
        defect = self.completeness_defect()
        if defect > 1e-12:
            raise ParameterError(f'Kraus operators are not complete (defect {defect:.3g})')

    def completeness_defect(self) -> float:
        total = sum(e.conj().T @ e for e in self.kraus)
        return float(np.max(np.abs(total - np.eye(2))))

    def superoperator(self) -> np.ndarray:
        """4x4 map acting on the (ket, bra) index pair of one qubit."""
        return sum(np.kron(e, e.conj()) for e in self.kraus)

    def dephasing_probability(self) -> float | None:
        """λ when the channel equals (1 - λ)ρ + λZρZ, otherwise None."""
        s = self.superoperator()
        d = np.diag(s)
        if np.max(np.abs(s - np.diag(d))) > 1e-12:
            return None
        if abs(d[0] - 1) > 1e-12 or abs(d[3] - 1) > 1e-12 or abs(d[1] - d[2]) > 1e-12 or abs(d[1].imag) > 1e-12:
            return None
        return float(min(max((1.0 - d[1].real) / 2, 0.0), 1.0))


def _check_gamma(gamma: float) -> float:
    if not 0.0 <= gamma <= 1.0:
        raise ParameterError(f'gamma must lie in [0, 1], got {gamma}')
    return float(gamma)


def amplitude_damping(gamma: float) -> KrausChannel:
    gamma = _check_gamma(gamma)
    e0 = np.array([[1, 0], [0, np.sqrt(1 - gamma)]], dtype=np.complex128)
    e1 = np.array([[0, np.sqrt(gamma)], [0, 0]], dtype=np.complex128)
    return KrausChannel(kraus=(e0, e1), label='amplitude_damping', gamma=gamma)


def phase_damping(gamma: float) -> KrausChannel:
    gamma = _check_gamma(gamma)
    e0 = np.array([[1, 0], [0, np.sqrt(1 - gamma)]], dtype=np.complex128)
    e1 = np.array([[0, 0], [0, np.sqrt(gamma)]], dtype=np.complex128)
    return KrausChannel(kraus=(e0, e1), label='phase_damping', gamma=gamma)


class NoiseSpec(BaseModel):
    """Channel, backend and trajectory budget. Noise always follows every gate."""

    channel: ChannelLabel = 'amplitude_damping'
    gamma: float = 0.0
    backend: Backend = 'auto'
    trajectories: int | None = None

    _custom: KrausChannel | None = PrivateAttr(default=None)

    @model_validator(mode='after')
    def _check(self) -> 'NoiseSpec':
        if not 0.0 <= self.gamma <= 1.0:
            raise ValueError(f'gamma must lie in [0, 1], got {self.gamma}')
        if self.backend == 'trajectories' and self.trajectories is not None:
            if self.trajectories < _CFG.min_trajectories:
                raise ValueError(f'trajectories must be >= {_CFG.min_trajectories}, got {self.trajectories}')
        return self

    @classmethod
    def custom(cls, channel: KrausChannel, backend: Backend = 'auto', trajectories: int | None = None) -> 'NoiseSpec':
        spec = cls(channel='custom', gamma=channel.gamma or 0.0, backend=backend, trajectories=trajectories)
        spec._custom = channel
        return spec

    def kraus_channel(self) -> KrausChannel:
        match self.channel:
            case 'amplitude_damping':
                return amplitude_damping(self.gamma)
            case 'phase_damping':
                return phase_damping(self.gamma)
        if self._custom is None:
            raise ParameterError('A custom noise spec must be built with NoiseSpec.custom')
        return self._custom

    def trajectory_count(self) -> int:
        return self.trajectories or _CFG.default_trajectories

    def with_gamma(self, gamma: float) -> 'NoiseSpec':
        spec = self.model_copy(update={'gamma': gamma})
        spec._custom = self._custom
        return spec


@dataclass(frozen=True)
class NoisyEstimate:
    success_rate: float
    stderr: float
    backend: str


@dataclass(frozen=True)
class PrefixPredicate:
    """Marks every basis state of a width-m register whose first bits equal `prefix`."""

    prefix: str
    m: int

    def __post_init__(self):
        check_bits(self.prefix)
        if len(self.prefix) > self.m:
            raise WidthMismatchError(f'Prefix {self.prefix!r} is longer than {self.m} qubits')

    def marked_indices(self) -> np.ndarray:
        tail = self.m - len(self.prefix)
        start = int(self.prefix, 2) << tail
        return np.arange(start, start + (1 << tail), dtype=np.int64)

    def __call__(self, bits: str) -> int:
        return int(bits.startswith(self.prefix))


def prefix_predicate(prefix: str, m: int) -> PrefixPredicate:
    return PrefixPredicate(prefix=prefix, m=m)


def _channel_in_place(rho: np.ndarray, channel: KrausChannel, q: int, m: int) -> None:
    """Φ on qubit q of a C-contiguous (2^m, 2^m) density matrix, in place."""
    view = rho.reshape(1 << q, 2, 1 << (m - 1), 2, 1 << (m - 1 - q))
    blocks = [[view[:, i, :, j, :] for j in (0, 1)] for i in (0, 1)]
    if channel.label == 'phase_damping':
        keep = np.sqrt(1.0 - channel.gamma)
        blocks[0][1] *= keep
        blocks[1][0] *= keep
        return
    if channel.label == 'amplitude_damping':
        gamma = channel.gamma
        keep = np.sqrt(1.0 - gamma)
        blocks[0][0] += gamma * blocks[1][1]
        blocks[0][1] *= keep
        blocks[1][0] *= keep
        blocks[1][1] *= 1.0 - gamma
        return
    superop = channel.superoperator()
    old = [blocks[k][l].copy() for k in (0, 1) for l in (0, 1)]
    for i in (0, 1):
        for j in (0, 1):
            out = blocks[i][j]
            out[...] = 0
            for kl, block in enumerate(old):
                coeff = superop[2 * i + j, kl]
                if coeff != 0:
                    out += coeff * block


def apply_channel(rho: MixedState, channel: KrausChannel, qubit: int) -> MixedState:
    """Φ(ρ) = Σ E ρ E^† on one qubit."""
    m = rho.m
    if not 0 <= qubit < m:
        raise WidthMismatchError(f'Qubit {qubit} outside 0..{m - 1}')
    out = np.array(rho.matrix, dtype=np.complex128, order='C')
    _channel_in_place(out, channel, qubit, m)
    return MixedState(out, validate=False)


def _flatten(circuit: Circuit) -> GateSequence:
    return circuit.gates() if isinstance(circuit, SearchProgram) else circuit


def _resolve_backend(spec: NoiseSpec, width: int) -> str:
    if spec.backend != 'auto':
        return spec.backend
    return 'density-matrix' if width <= _CFG.dense_backend_max_qubits else 'trajectories'


def evolve_density(circuit: Circuit, channel: KrausChannel) -> MixedState:
    """Noisy evolution of |0...0><0...0| through the circuit."""
    circuit = _flatten(circuit)
    m = circuit.width
    if m > _CFG.max_mixed_qubits:
        raise CapacityError(
            f'A {m}-qubit density matrix exceeds the {_CFG.max_mixed_qubits}-qubit limit; '
            'use the trajectories backend'
        )
    dim = 1 << m
    rho = np.zeros((dim, dim), dtype=np.complex128)
    rho[0, 0] = 1.0
    for gate in circuit.gates:
        apply_gate_density(rho, gate, m)
        for q in gate.qubits:
            _channel_in_place(rho, channel, q, m)
    return MixedState(rho, validate=False)


def _negate_ones(rows: np.ndarray, struck: np.ndarray, q: int, m: int) -> None:
    """Z on qubit q of the selected rows."""
    view = rows.reshape(rows.shape[0], 1 << q, 2, 1 << (m - q - 1))
    view[struck, :, 1, :] *= -1


def _replay(rows: np.ndarray, block: GateSequence, hits: np.ndarray) -> None:
    """Gate-by-gate run of a block with a Z after every (gate, qubit) site flagged in `hits`."""
    m = block.width
    site = 0
    for gate in block.gates:
        apply_gate_rows(rows, gate, m)
        for q in gate.qubits:
            struck = np.flatnonzero(hits[:, site])
            if struck.size:
                _negate_ones(rows, struck, q, m)
            site += 1


def _blocks(circuit: Circuit) -> list[tuple[SearchOperator | None, GateSequence]]:
    if isinstance(circuit, SearchProgram):
        return circuit.blocks()
    return [(None, circuit)]


def _dephased_rows(circuit: Circuit, errors: np.ndarray) -> np.ndarray:
    """Final amplitudes of a batch of Z-error trajectories; errors[t, s] flags site s of trajectory t."""
    blocks = _blocks(circuit)
    width = blocks[0][1].width
    rows = np.zeros((errors.shape[0], 1 << width), dtype=np.complex128)
    rows[:, 0] = 1.0
    offset = 0
    for op, block in blocks:
        sites = block.noise_sites()
        hits = errors[:, offset:offset + sites]
        offset += sites
        if op is None:
            _replay(rows, block, hits)
            continue
        struck = np.flatnonzero(hits.any(axis=1))
        if struck.size == 0:
            apply_compiled_rows(rows, op)
            continue
        replayed = rows[struck]
        _replay(replayed, block, hits[struck])
        apply_compiled_rows(rows, op)
        rows[struck] = replayed
    return rows


def _jump_rows(circuit: Circuit, channel: KrausChannel, uniforms: np.ndarray) -> np.ndarray:
    """Final amplitudes of a batch of Kraus-jump trajectories; uniforms[t, s] picks the branch at site s."""
    circuit = _flatten(circuit)
    m = circuit.width
    rows = np.zeros((uniforms.shape[0], 1 << m), dtype=np.complex128)
    rows[:, 0] = 1.0
    site = 0
    for gate in circuit.gates:
        apply_gate_rows(rows, gate, m)
        for q in gate.qubits:
            branches = []
            for e in channel.kraus:
                branch = rows.copy()
                apply_matrix_rows(branch, e, q, m)
                branches.append(branch)
            weights = np.stack([np.sum(np.abs(b) ** 2, axis=1) for b in branches], axis=1)
            cumulative = np.cumsum(weights, axis=1)
            draw = uniforms[:, site, None] * cumulative[:, -1:]
            pick = np.minimum((cumulative <= draw).sum(axis=1), len(branches) - 1)
            for k, branch in enumerate(branches):
                chosen = pick == k
                if chosen.any():
                    rows[chosen] = branch[chosen] / np.sqrt(weights[chosen, k])[:, None]
            site += 1
    return rows


def _trajectory_batches(circuit: Circuit, spec: NoiseSpec, seed: int) -> Iterator[np.ndarray]:
    """Per-trajectory basis distributions, one (batch, 2^m) array at a time.

    Trajectory t draws all its site uniforms from its own spawned stream, so a fixed seed
    couples the error sets across gammas.
    """
    count = spec.trajectory_count()
    if count < _CFG.min_trajectories:
        raise ParameterError(f'trajectories must be >= {_CFG.min_trajectories}, got {count}')
    channel = spec.kraus_channel()
    lam = channel.dephasing_probability()
    sites = circuit.noise_sites()
    streams = np.random.SeedSequence(seed).spawn(count)
    for start in range(0, count, _CFG.trajectory_batch):
        batch = streams[start:start + _CFG.trajectory_batch]
        uniforms = np.stack([np.random.default_rng(s).random(sites) for s in batch])
        if lam is not None:
            rows = _dephased_rows(circuit, uniforms < lam)
        else:
            rows = _jump_rows(circuit, channel, uniforms)
        yield np.abs(rows) ** 2


def noisy_distribution(circuit: Circuit, spec: NoiseSpec, seed: int = 0) -> np.ndarray:
    """Final basis distribution under noise (exact, or a trajectory average)."""
    width = circuit.width
    backend = _resolve_backend(spec, width)
    if backend == 'density-matrix':
        return evolve_density(circuit, spec.kraus_channel()).probabilities()
    total = np.zeros(1 << width)
    for probs in _trajectory_batches(circuit, spec, seed):
        total += probs.sum(axis=0)
    return total / spec.trajectory_count()


def run_noisy(
    circuit: Circuit,
    spec: NoiseSpec,
    success_predicate: Predicate,
    shots: int | None = None,
    seed: int = 0,
) -> NoisyEstimate:
    """Probability that the final measurement satisfies the predicate, under noise."""
    width = circuit.width
    mask = predicate_mask(success_predicate, width)
    backend = _resolve_backend(spec, width)
    logger.debug('Noisy run: width=%d sites=%d backend=%s gamma=%g', width, circuit.noise_sites(), backend, spec.gamma)

    if backend == 'density-matrix':
        exact = float(evolve_density(circuit, spec.kraus_channel()).probabilities()[mask].sum())
        exact = min(max(exact, 0.0), 1.0)
        if shots is None:
            return NoisyEstimate(success_rate=exact, stderr=0.0, backend=backend)
        if shots < 1:
            raise ParameterError(f'shots must be >= 1, got {shots}')
        hits = int(np.random.default_rng(seed).binomial(shots, exact))
        rate = hits / shots
        return NoisyEstimate(success_rate=rate, stderr=float(np.sqrt(rate * (1 - rate) / shots)), backend=backend)

    per_trajectory = np.concatenate([probs[:, mask].sum(axis=1) for probs in _trajectory_batches(circuit, spec, seed)])
    stderr = float(per_trajectory.std(ddof=1) / np.sqrt(per_trajectory.size))
    return NoisyEstimate(success_rate=float(per_trajectory.mean()), stderr=stderr, backend=backend)


def combined_success(p1_bar: float, p2_bar: float) -> float:
    """Two-stage success: the product of the per-stage success rates."""
    for value in (p1_bar, p2_bar):
        if not 0.0 <= value <= 1.0:
            raise ParameterError(f'Success rates must lie in [0, 1], got {value}')
    return p1_bar * p2_bar
