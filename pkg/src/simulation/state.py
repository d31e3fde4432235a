"""Dense pure and mixed state representations.

Basis index convention: the bitstring b_{m-1}...b_0 is read MSB-first, so index 12 on
five qubits is "01100" and the "first p qubits" are the p most significant bits. Qubit j
of a gate sequence is character j of that bitstring.
"""

from dataclasses import dataclass
from typing import Callable, Protocol

import numpy as np

from src.config import Config
from src.exceptions import CapacityError, ParameterError, WidthMismatchError

_CFG = Config.default()


class MarksIndices(Protocol):
    """Anything that can list the basis indices it marks (oracles do)."""

    m: int

    def marked_indices(self) -> np.ndarray: ...


Predicate = MarksIndices | Callable[[str], int]


def bitstring(index: int, m: int) -> str:
    return format(index, f'0{m}b')


def check_bits(bits: str, m: int | None = None) -> str:
    if not bits or any(c not in '01' for c in bits):
        raise WidthMismatchError(f'{bits!r} is not a bitstring')
    if m is not None and len(bits) != m:
        raise WidthMismatchError(f'Expected {m} bits, got {len(bits)} in {bits!r}')
    return bits


def _check_capacity(m: int, limit: int, kind: str) -> None:
    if m < 1 or m > limit:
        raise CapacityError(f'{kind} state on {m} qubits is outside the supported range 1..{limit}')


def _qubit_count(dim: int) -> int:
    if dim < 2 or dim & (dim - 1):
        raise WidthMismatchError(f'Dimension {dim} is not a power of two >= 2')
    return dim.bit_length() - 1


class PureState:
    """Normalised amplitude vector over m qubits."""

    __slots__ = ('amplitudes',)

    def __init__(self, amplitudes, *, validate: bool = True):
        amps = np.asarray(amplitudes, dtype=np.complex128)
        if amps.ndim != 1:
            raise WidthMismatchError('Amplitudes must be a flat vector')
        _check_capacity(_qubit_count(amps.size), _CFG.max_pure_qubits, 'Pure')
        if validate:
            norm = float(np.vdot(amps, amps).real)
            if abs(norm - 1.0) > _CFG.norm_tol:
                raise ParameterError(f'State is not normalised (norm^2 = {norm:.12g})')
        self.amplitudes = amps

    @property
    def m(self) -> int:
        return self.amplitudes.size.bit_length() - 1

    def copy(self) -> 'PureState':
        return PureState(self.amplitudes.copy(), validate=False)

    def norm_squared(self) -> float:
        return float(np.vdot(self.amplitudes, self.amplitudes).real)

    def probabilities(self) -> np.ndarray:
        return np.abs(self.amplitudes) ** 2

    def probability_of(self, bits: str) -> float:
        check_bits(bits, self.m)
        return float(abs(self.amplitudes[int(bits, 2)]) ** 2)

    def fidelity(self, other: 'PureState') -> float:
        """|<self|other>|^2, insensitive to global phase."""
        if other.m != self.m:
            raise WidthMismatchError(f'Cannot compare {self.m}-qubit and {other.m}-qubit states')
        return float(abs(np.vdot(self.amplitudes, other.amplitudes)) ** 2)

    def __repr__(self) -> str:
        return f'PureState(m={self.m})'


class MixedState:
    """Density matrix over m qubits."""

    __slots__ = ('matrix',)

    def __init__(self, matrix, *, validate: bool = True):
        rho = np.asarray(matrix, dtype=np.complex128)
        if rho.ndim != 2 or rho.shape[0] != rho.shape[1]:
            raise WidthMismatchError('Density matrix must be square')
        _check_capacity(_qubit_count(rho.shape[0]), _CFG.max_mixed_qubits, 'Mixed')
        self.matrix = rho
        if validate:
            problems = self.physicality_problems(_CFG.hermitian_tol)
            if problems:
                raise ParameterError(f'Not a density matrix: {"; ".join(problems)}')

    @classmethod
    def from_pure(cls, state: PureState) -> 'MixedState':
        return cls(np.outer(state.amplitudes, state.amplitudes.conj()), validate=False)

    @property
    def m(self) -> int:
        return self.matrix.shape[0].bit_length() - 1

    def trace(self) -> complex:
        return complex(np.trace(self.matrix))

    def probabilities(self) -> np.ndarray:
        return np.clip(np.real(np.diag(self.matrix)), 0.0, None)

    def physicality_problems(self, tol: float) -> list[str]:
        problems = []
        herm = float(np.max(np.abs(self.matrix - self.matrix.conj().T)))
        if herm > tol:
            problems.append(f'hermiticity defect {herm:.3g}')
        tr = self.trace()
        if abs(tr - 1.0) > tol:
            problems.append(f'trace {tr:.12g}')
        min_eig = float(np.min(np.linalg.eigvalsh((self.matrix + self.matrix.conj().T) / 2)))
        if min_eig < -tol:
            problems.append(f'negative eigenvalue {min_eig:.3g}')
        return problems

    def __repr__(self) -> str:
        return f'MixedState(m={self.m})'


@dataclass(frozen=True)
class PrefixDistribution:
    """Exact outcome distribution of the first p qubits."""

    p: int
    probs: np.ndarray

    def prob(self, prefix: str) -> float:
        check_bits(prefix, self.p)
        return float(self.probs[int(prefix, 2)])

    def most_likely(self) -> str:
        return bitstring(int(np.argmax(self.probs)), self.p)

    def as_dict(self) -> dict[str, float]:
        return {bitstring(i, self.p): float(v) for i, v in enumerate(self.probs)}


def uniform_state(m: int) -> PureState:
    """H^{⊗m}|0^m>."""
    _check_capacity(m, _CFG.max_pure_qubits, 'Pure')
    dim = 1 << m
    return PureState(np.full(dim, 1.0 / np.sqrt(dim), dtype=np.complex128), validate=False)


def basis_state(m: int, bits: str) -> PureState:
    check_bits(bits, m)
    _check_capacity(m, _CFG.max_pure_qubits, 'Pure')
    amps = np.zeros(1 << m, dtype=np.complex128)
    amps[int(bits, 2)] = 1.0
    return PureState(amps, validate=False)


def predicate_mask(predicate: Predicate, m: int) -> np.ndarray:
    """Boolean vector over the 2^m basis states marking predicate(x) = 1."""
    mask = np.zeros(1 << m, dtype=bool)
    if hasattr(predicate, 'marked_indices'):
        if predicate.m != m:
            raise WidthMismatchError(f'Predicate on {predicate.m} bits applied to {m} qubits')
        mask[predicate.marked_indices()] = True
        return mask
    for x in range(1 << m):
        mask[x] = bool(predicate(bitstring(x, m)))
    return mask


def apply_diagonal_phase(state: PureState, predicate: Predicate, phase: float) -> PureState:
    """Multiply the amplitude of every marked basis state by e^{i*phase}."""
    mask = predicate_mask(predicate, state.m)
    amps = state.amplitudes.copy()
    amps[mask] *= np.exp(1j * phase)
    return PureState(amps, validate=False)


def apply_suffix_diffusion(state: PureState, s: int, theta: float) -> PureState:
    """I_{m-s} ⊗ [(1 - e^{iθ})|φ_s><φ_s| - I_s].

    Within each prefix block the low-s amplitudes a become (1 - e^{iθ}) * mean(a) - a.
    """
    if s < 1 or s > state.m:
        raise ParameterError(f'Suffix width {s} outside 1..{state.m}')
    blocks = state.amplitudes.reshape(1 << (state.m - s), 1 << s)
    means = blocks.mean(axis=1, keepdims=True)
    out = (1.0 - np.exp(1j * theta)) * means - blocks
    return PureState(out.reshape(-1), validate=False)


def prefix_distribution(state: PureState, p: int) -> PrefixDistribution:
    if p < 1 or p > state.m:
        raise ParameterError(f'Prefix width {p} outside 1..{state.m}')
    probs = state.probabilities().reshape(1 << p, 1 << (state.m - p)).sum(axis=1)
    return PrefixDistribution(p=p, probs=probs)


def marginal_prefix(probs: np.ndarray, p: int) -> PrefixDistribution:
    """Prefix marginal of an arbitrary basis distribution (e.g. a noisy one)."""
    m = _qubit_count(probs.size)
    if p < 1 or p > m:
        raise ParameterError(f'Prefix width {p} outside 1..{m}')
    return PrefixDistribution(p=p, probs=probs.reshape(1 << p, 1 << (m - p)).sum(axis=1))


def _normalised(probs: np.ndarray) -> np.ndarray:
    probs = np.clip(np.asarray(probs, dtype=float), 0.0, None)
    return probs / probs.sum()


def sample_distribution(dist: PrefixDistribution, shots: int, seed: int) -> dict[str, int]:
    if shots < 1:
        raise ParameterError(f'shots must be >= 1, got {shots}')
    rng = np.random.default_rng(seed)
    counts = rng.multinomial(shots, _normalised(dist.probs))
    return {bitstring(i, dist.p): int(c) for i, c in enumerate(counts) if c}


def sample_prefix(state: PureState, p: int, shots: int, seed: int) -> dict[str, int]:
    """Multinomial draw of `shots` measurements of the first p qubits."""
    return sample_distribution(prefix_distribution(state, p), shots, seed)


def draw_outcome(dist: PrefixDistribution, seed: int, certainty_tol: float = _CFG.certainty_tol) -> str:
    """One measurement outcome; a probability-1 outcome is returned without sampling."""
    best = int(np.argmax(dist.probs))
    if dist.probs[best] >= 1.0 - certainty_tol:
        return bitstring(best, dist.p)
    rng = np.random.default_rng(seed)
    return bitstring(int(rng.choice(dist.probs.size, p=_normalised(dist.probs))), dist.p)
