"""Boolean-function oracles, subfunctions and the subfunction phase-oracle construction."""

import numpy as np
from pydantic import BaseModel, ConfigDict, model_validator

from src.exceptions import ParameterError, WidthMismatchError
from src.simulation.gates import Gate, GateSequence, h, mcu, phase, x
from src.simulation.state import check_bits


class MarkedOracle(BaseModel):
    """f: {0,1}^m -> {0,1} represented by its marked set."""

    model_config = ConfigDict(frozen=True)

    m: int
    marked: frozenset[str] = frozenset()

    @model_validator(mode='after')
    def _check_marked(self) -> 'MarkedOracle':
        if self.m < 1:
            raise ValueError(f'Oracle width must be >= 1, got {self.m}')
        for bits in self.marked:
            check_bits(bits, self.m)
        return self

    def eval(self, bits: str) -> int:
        check_bits(bits, self.m)
        return int(bits in self.marked)

    def marked_indices(self) -> np.ndarray:
        return np.array(sorted(int(b, 2) for b in self.marked), dtype=np.int64)

    @property
    def is_empty(self) -> bool:
        return not self.marked

    @property
    def target(self) -> str:
        """The single marked string of a search oracle."""
        if len(self.marked) != 1:
            raise ParameterError(f'Expected exactly one marked string, found {len(self.marked)}')
        return next(iter(self.marked))


class SubfunctionId(BaseModel):
    """The last-k-bits assignment i that selects f_i."""

    model_config = ConfigDict(frozen=True)

    k: int
    i: str

    @model_validator(mode='after')
    def _check_width(self) -> 'SubfunctionId':
        if self.k < 0:
            raise ValueError(f'k must be >= 0, got {self.k}')
        if self.k and len(self.i) != self.k:
            raise ValueError(f'Subfunction id {self.i!r} must have exactly {self.k} bits')
        if self.i and any(c not in '01' for c in self.i):
            raise ValueError(f'{self.i!r} is not a bitstring')
        return self

    @property
    def index(self) -> int:
        return int(self.i, 2) if self.i else 0

    @classmethod
    def all_ids(cls, k: int) -> list['SubfunctionId']:
        if k == 0:
            return [cls(k=0, i='')]
        return [cls(k=k, i=format(j, f'0{k}b')) for j in range(1 << k)]


def marked_oracle(m: int, target: str) -> MarkedOracle:
    check_bits(target, m)
    return MarkedOracle(m=m, marked=frozenset({target}))


def empty_oracle(m: int) -> MarkedOracle:
    return MarkedOracle(m=m)


def subfunction(f: MarkedOracle, sid: SubfunctionId) -> MarkedOracle:
    """f_i(x) = f(x ∥ i) on m - k bits."""
    if sid.k >= f.m:
        raise ParameterError(f'Suffix width k={sid.k} must be smaller than m={f.m}')
    if sid.k == 0:
        return f
    width = f.m - sid.k
    return MarkedOracle(m=width, marked=frozenset(b[:width] for b in f.marked if b[width:] == sid.i))


def restrict_prefix(f_i: MarkedOracle, x_i: str) -> MarkedOracle:
    """f_{i,x_i}(y) = f_i(x_i ∥ y) on the remaining bits."""
    p = len(check_bits(x_i))
    if p >= f_i.m:
        raise WidthMismatchError(f'Prefix {x_i!r} leaves no bits of the {f_i.m}-bit oracle')
    return MarkedOracle(m=f_i.m - p, marked=frozenset(b[p:] for b in f_i.marked if b[:p] == x_i))


def classical_eval(f: MarkedOracle, bits: str) -> int:
    return f.eval(bits)


def target_subfunction_id(f: MarkedOracle, k: int) -> SubfunctionId:
    """The id whose subfunction holds the (single) target."""
    return SubfunctionId(k=k, i=f.target[f.m - k:] if k else '')


def _conjugation(target: str, offset: int = 0) -> tuple[Gate, ...]:
    return tuple(x(offset + j) for j, bit in enumerate(target) if bit == '0')


def phase_oracle_gates(f: MarkedOracle, angle: float, width: int | None = None) -> GateSequence:
    """U_f^angle as X^{1-t_j} conjugation around a multi-controlled U(angle).

    An empty marked set compiles to the empty (identity) sequence.
    """
    width = f.m if width is None else width
    if f.is_empty:
        return GateSequence(width=width)
    target = f.target
    flips = _conjugation(target)
    return GateSequence(width=width, gates=flips + (mcu(range(f.m), angle),) + flips)


def bit_flip_oracle(f: MarkedOracle) -> GateSequence:
    """|x>|b> -> |x>|b ⊕ f(x)> on m + 1 qubits, ancilla last."""
    width = f.m + 1
    if f.is_empty:
        return GateSequence(width=width)
    ancilla = f.m
    flips = _conjugation(f.target)
    core = (h(ancilla), mcu(range(width), np.pi), h(ancilla))
    return GateSequence(width=width, gates=flips + core + flips)


def synthesize_subfunction_phase_oracle(bit_oracle: GateSequence, sid: SubfunctionId, alpha: float) -> GateSequence:
    """Build U_{f_i}^alpha from the bit-flip oracle of f.

    Register layout: x on qubits 0..n-k-1, the k-bit id register next, ancilla last.
    On |x>|0^k>|0> the result is e^{i*alpha*f_i(x)}|x>|0^k>|0>.
    """
    n = bit_oracle.width - 1
    if sid.k < 1 or n - sid.k < 1:
        raise WidthMismatchError(f'Bit-flip oracle of width {bit_oracle.width} cannot host a {sid.k}-bit id')
    prepare = tuple(x(n - sid.k + j) for j, bit in enumerate(sid.i) if bit == '1')
    gates = (
        prepare
        + bit_oracle.gates
        + (phase(n, alpha),)
        + bit_oracle.gates
        + prepare
    )
    return GateSequence(width=bit_oracle.width, gates=gates)
