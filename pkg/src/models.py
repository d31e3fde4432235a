import math
from typing import Literal

from pydantic import BaseModel, ConfigDict, Field, model_validator

from src.simulation.noise import NoiseSpec
from src.simulation.oracle import SubfunctionId


class LongParams(BaseModel):
    """Exact (phase-matched) Grover on an m-qubit register."""

    model_config = ConfigDict(frozen=True)

    m: int
    J: int
    iterations: int
    omega: float
    lam: float

    @model_validator(mode='after')
    def _check(self) -> 'LongParams':
        if self.iterations != self.J + 1:
            raise ValueError('iterations must equal J + 1')
        if math.sin(math.pi / (4 * self.J + 6)) > math.sin(self.lam) + 1e-12:
            raise ValueError(f'J={self.J} leaves the arcsin domain for m={self.m}')
        if not 0 < self.omega <= math.pi + 1e-12:
            raise ValueError(f'omega={self.omega} outside (0, pi]')
        return self


class GrkParams(BaseModel):
    """Iteration counts of the (asymptotically exact) partial search."""

    model_config = ConfigDict(frozen=True)

    n: int
    q: int
    alpha_q: float
    beta_q: float
    j1: int
    j2: int
    lambda_prime: float

    @model_validator(mode='after')
    def _check(self) -> 'GrkParams':
        if self.j1 < 0 or self.j2 < 0:
            raise ValueError('iteration counts must be non-negative')
        if not self.alpha_q >= self.beta_q >= 0:
            raise ValueError(f'expected alpha_q >= beta_q >= 0, got {self.alpha_q}, {self.beta_q}')
        return self


class IdgsPlan(BaseModel):
    """Every derived parameter of a two-stage run (k = 0 is the single-machine partial search)."""

    model_config = ConfigDict(frozen=True)

    n: int
    k: int
    p: int
    width: int  # n - k, the stage-1 register
    p1: int
    p2: int
    theta1: float
    theta_prime: float
    gamma_p: float
    eta_p: float
    a_t: float
    a_nt: float
    E: float
    F: float
    theta: float
    phi: float
    mirrored: bool = False
    stage2: LongParams

    @property
    def stage2_width(self) -> int:
        return self.n - self.p - self.k

    def normalization(self) -> float:
        """a_t^2 + a_nt^2 + non-target mass of the state before the final phase step."""
        m = 2 ** (self.width - self.p)
        return self.a_t**2 + self.a_nt**2 + (2**self.p - 1) * m * self.F**2

    @property
    def stage1_queries(self) -> int:
        return self.p1 + self.p2 + 1


class NodeReport(BaseModel):
    """What one node sends back for classical merging."""

    model_config = ConfigDict(frozen=True)

    id: SubfunctionId
    prefix: str
    suffix: str
    candidate: str
    verified: int
    stage1_prob: float = Field(description='Probability of the measured prefix')
    stage2_prob: float = Field(description='Probability of the measured suffix')


class RunConfig(BaseModel):
    n: int
    k: int
    p: int
    base_seed: int = 0
    parallelism: int = Field(default=1, ge=1)
    noise: NoiseSpec | None = None
    brute_force_tail: bool = False
    mode: Literal['inprocess', 'multiprocess'] = 'inprocess'
    mirrored: bool = False

    @model_validator(mode='after')
    def _check(self) -> 'RunConfig':
        if self.mode == 'multiprocess' and self.noise is not None:
            raise ValueError('multiprocess mode carries no noise model on the wire')
        return self


class IdgsResult(BaseModel):
    target: str | None
    reports: list[NodeReport]

    @property
    def found(self) -> bool:
        return self.target is not None


class NotFound(BaseModel):
    """No node verified a candidate (only possible under noise)."""

    reports: list[NodeReport]
    reason: str = 'no candidate passed classical verification'


class GateCosts(BaseModel):
    model_config = ConfigDict(frozen=True)

    n: int
    cnot_cost: int
    cnot_depth: int
    t_cost: int
    t_depth: int
    h_cost: int
    h_depth: int

    @property
    def depth(self) -> int:
        return max(self.cnot_depth, self.t_depth, self.h_depth)


class DepthReport(BaseModel):
    n: int
    k: int
    p: int
    d_g2: int
    d_g3: int
    d_g4: int
    d_l: int
    p1: int
    p2: int
    stage2_iterations: int
    stage1_total: int
    stage2_total: int
    overall: int
    grover_iterations: int
    grover_baseline: int
    saving: int
    stage1_queries: int
    stage2_queries: int
    node_queries: int
    total_queries: int
    total_queries_formula: float
    query_gap_constant: float
    warnings: list[str] = Field(default_factory=list)
    notes: list[str] = Field(default_factory=list)


class DepthTheoremCheck(BaseModel):
    n: int
    k: int
    p: int
    hypotheses_met: bool
    holds: bool
    stage1_depth: int
    stage2_depth: int
    note: str = ''


class ComparisonRow(BaseModel):
    algorithm: str
    qubits: int
    exact: bool
    circuit_depth: int
    total_queries: int


class IdentityCheck(BaseModel):
    name: str
    passed: bool
    max_residual: float
    tolerance: float
    cases: int
    note: str = ''


class SweepRow(BaseModel):
    gamma: float
    algorithm: Literal['idgs', 'long']
    backend: str
    p1_bar: float | None = None
    p2_bar: float | None = None
    success: float
    stderr: float
