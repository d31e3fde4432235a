"""The named search iterates, as state transforms and as compiled gate sequences.

Every kind is the same shape, a diffusion (1 - e^{iθ})|φ_s><φ_s| - I on the low s qubits
after a phase oracle U_f^φ:

    G, G2   full-width diffusion, θ = φ = π
    G1, G3  suffix diffusion,     θ = φ = π
    Gg, G4  full-width diffusion, free (θ, φ)
    L       full-width diffusion, θ = φ = ω
"""

import math
from typing import Literal

import numpy as np
from pydantic import BaseModel, ConfigDict, model_validator

from src.exceptions import ParameterError, WidthMismatchError
from src.simulation.gates import GateSequence, h, mcu, x
from src.simulation.oracle import MarkedOracle, phase_oracle_gates
from src.simulation.state import PureState, apply_diagonal_phase, apply_suffix_diffusion

OperatorKind = Literal['G', 'G1', 'G2', 'G3', 'G4', 'Gg', 'L']

_REFLECTIONS = {'G', 'G1', 'G2', 'G3'}
_FULL_WIDTH = {'G', 'G2', 'G4', 'Gg', 'L'}


class SearchOperator(BaseModel):
    model_config = ConfigDict(frozen=True)

    kind: OperatorKind
    oracle: MarkedOracle
    suffix_width: int
    theta: float
    phi: float

    @model_validator(mode='after')
    def _check_kind(self) -> 'SearchOperator':
        m = self.oracle.m
        if not 1 <= self.suffix_width <= m:
            raise ValueError(f'Diffusion width {self.suffix_width} outside 1..{m}')
        if self.kind in _FULL_WIDTH and self.suffix_width != m:
            raise ValueError(f'{self.kind} diffuses over the full {m}-qubit register')
        if self.kind in _REFLECTIONS and not (self.theta == math.pi and self.phi == math.pi):
            raise ValueError(f'{self.kind} is a reflection: theta = phi = pi')
        if self.kind == 'L' and self.theta != self.phi:
            raise ValueError('L uses the same angle for diffusion and oracle')
        return self

    @property
    def width(self) -> int:
        return self.oracle.m


def grover(oracle: MarkedOracle, kind: OperatorKind = 'G') -> SearchOperator:
    return SearchOperator(kind=kind, oracle=oracle, suffix_width=oracle.m, theta=math.pi, phi=math.pi)


def local_grover(oracle: MarkedOracle, prefix: int, kind: OperatorKind = 'G1') -> SearchOperator:
    """Reflection on the last m - prefix qubits inside every prefix block."""
    if not 1 <= prefix < oracle.m:
        raise ParameterError(f'Local diffusion needs 1 <= prefix < {oracle.m}, got {prefix}')
    return SearchOperator(kind=kind, oracle=oracle, suffix_width=oracle.m - prefix, theta=math.pi, phi=math.pi)


def generalized_grover(oracle: MarkedOracle, theta: float, phi: float, kind: OperatorKind = 'Gg') -> SearchOperator:
    return SearchOperator(kind=kind, oracle=oracle, suffix_width=oracle.m, theta=theta, phi=phi)


def long_iterate(oracle: MarkedOracle, omega: float) -> SearchOperator:
    return SearchOperator(kind='L', oracle=oracle, suffix_width=oracle.m, theta=omega, phi=omega)


def apply_search_operator(state: PureState, op: SearchOperator) -> PureState:
    if state.m != op.width:
        raise WidthMismatchError(f'{op.kind} acts on {op.width} qubits, state has {state.m}')
    state = apply_diagonal_phase(state, op.oracle, op.phi)
    return apply_suffix_diffusion(state, op.suffix_width, op.theta)


def apply_repeated(state: PureState, op: SearchOperator, times: int) -> PureState:
    for _ in range(times):
        state = apply_search_operator(state, op)
    return state


def diffusion_gates(width: int, suffix_width: int, theta: float) -> GateSequence:
    """H X ∧(U(θ)) X H on the low `suffix_width` qubits; equals minus the semantic diffusion."""
    scope = range(width - suffix_width, width)
    layer_h = tuple(h(q) for q in scope)
    layer_x = tuple(x(q) for q in scope)
    return GateSequence(width=width, gates=layer_h + layer_x + (mcu(scope, theta),) + layer_x + layer_h)


def compile_operator(op: SearchOperator) -> GateSequence:
    """Oracle (empty for an empty marked set) followed by the diffusion."""
    return phase_oracle_gates(op.oracle, op.phi) + diffusion_gates(op.width, op.suffix_width, op.theta)


def preparation_gates(width: int) -> GateSequence:
    return GateSequence(width=width, gates=tuple(h(q) for q in range(width)))


def apply_compiled_rows(rows: np.ndarray, op: SearchOperator) -> np.ndarray:
    """In-place action of compile_operator(op) on a batch of amplitude vectors.

    This is minus the semantic operator: a -> a - (1 - e^{iθ}) * block mean, after the oracle phase.
    """
    if rows.shape[-1] != 1 << op.width:
        raise WidthMismatchError(f'{op.kind} acts on {op.width} qubits, rows have length {rows.shape[-1]}')
    if not rows.flags.c_contiguous:
        raise ParameterError('Rows must be C-contiguous to be updated in place')
    if not op.oracle.is_empty:
        rows[:, op.oracle.marked_indices()] *= np.exp(1j * op.phi)
    blocks = rows.reshape(rows.shape[0], -1, 1 << op.suffix_width)
    blocks -= (1.0 - np.exp(1j * op.theta)) * blocks.mean(axis=2, keepdims=True)
    return rows


class SearchProgram(BaseModel):
    """H-layer preparation from |0...0> followed by each operator repeated its count."""

    model_config = ConfigDict(frozen=True)

    width: int
    steps: tuple[tuple[SearchOperator, int], ...] = ()

    @model_validator(mode='after')
    def _check_steps(self) -> 'SearchProgram':
        for op, times in self.steps:
            if op.width != self.width:
                raise ValueError(f'{op.kind} acts on {op.width} qubits, program has {self.width}')
            if times < 0:
                raise ValueError(f'{op.kind} repeat count must be >= 0, got {times}')
        return self

    def blocks(self) -> list[tuple[SearchOperator | None, GateSequence]]:
        """Gate blocks in execution order; every operator repetition is its own block."""
        out: list[tuple[SearchOperator | None, GateSequence]] = [(None, preparation_gates(self.width))]
        for op, times in self.steps:
            compiled = compile_operator(op)
            out.extend([(op, compiled)] * times)
        return out

    def gates(self) -> GateSequence:
        program = preparation_gates(self.width)
        for op, times in self.steps:
            program = program + compile_operator(op).repeated(times)
        return program

    def noise_sites(self) -> int:
        return sum(seq.noise_sites() for _, seq in self.blocks())


def search_program(width: int, steps: list[tuple[SearchOperator, int]]) -> SearchProgram:
    for op, times in steps:
        if op.width != width:
            raise WidthMismatchError(f'{op.kind} acts on {op.width} qubits, program has {width}')
        if times < 0:
            raise ParameterError(f'{op.kind} repeat count must be >= 0, got {times}')
    return SearchProgram(width=width, steps=tuple(steps))


def compile_program(width: int, steps: list[tuple[SearchOperator, int]]) -> GateSequence:
    """H-layer preparation followed by each operator repeated its count, from |0...0>."""
    return search_program(width, steps).gates()
