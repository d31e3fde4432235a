"""Validated command configurations, built from flags merged over an optional JSON file."""

import json
import os
from typing import Literal, TypeVar

from pydantic import BaseModel, Field, field_validator, model_validator

from src.models import RunConfig
from src.simulation.noise import Backend, ChannelLabel, NoiseSpec
from src.simulation.state import check_bits

ConfigModel = TypeVar('ConfigModel', bound=BaseModel)

CHANNEL_ALIASES: dict[str, ChannelLabel] = {
    'ad': 'amplitude_damping',
    'amplitude_damping': 'amplitude_damping',
    'pd': 'phase_damping',
    'phase_damping': 'phase_damping',
}


def _check_target(target: str, n: int) -> None:
    check_bits(target, n)


class PlanConfig(BaseModel):
    n: int = Field(ge=2)
    k: int = Field(default=1, ge=0)
    p: int = Field(default=1, ge=1)
    mirrored: bool = False
    scan: bool = False
    n_max: int | None = None

    @model_validator(mode='after')
    def _check(self) -> 'PlanConfig':
        if not self.scan and self.p + self.k >= self.n:
            raise ValueError(f'p + k must be smaller than n (n={self.n}, k={self.k}, p={self.p})')
        return self


class RunCommandConfig(BaseModel):
    n: int = Field(ge=2)
    k: int = Field(ge=1)
    p: int = Field(ge=1)
    target: str
    seed: int = 0
    parallelism: int = Field(default=1, ge=1)
    mode: Literal['inprocess', 'multiprocess'] = 'inprocess'
    brute_force_tail: bool = False
    mirrored: bool = False
    noise: NoiseSpec | None = None
    timing: bool = False
    output: str | None = None

    @model_validator(mode='after')
    def _check(self) -> 'RunCommandConfig':
        _check_target(self.target, self.n)
        if self.p + self.k >= self.n:
            raise ValueError(f'p + k must be smaller than n (n={self.n}, k={self.k}, p={self.p})')
        return self

    def to_run_config(self) -> RunConfig:
        return RunConfig(
            n=self.n,
            k=self.k,
            p=self.p,
            base_seed=self.seed,
            parallelism=self.parallelism,
            noise=self.noise,
            brute_force_tail=self.brute_force_tail,
            mode=self.mode,
            mirrored=self.mirrored,
        )


class NoiseSweepConfig(BaseModel):
    n: int = Field(default=5, ge=3)
    k: int = Field(default=1, ge=1)
    p: int = Field(default=2, ge=1)
    target: str = '01100'
    channel: ChannelLabel = 'amplitude_damping'
    grid: list[float] | None = None
    backend: Backend = 'auto'
    trajectories: int | None = None
    shots: int | None = Field(default=None, ge=1)
    seed: int = 0
    algorithms: list[Literal['idgs', 'long']] = Field(default_factory=lambda: ['idgs', 'long'])
    output: str | None = None

    @field_validator('channel', mode='before')
    @classmethod
    def _alias_channel(cls, value):
        return CHANNEL_ALIASES.get(value, value)

    @field_validator('grid')
    @classmethod
    def _check_grid(cls, grid):
        if grid is not None:
            bad = [g for g in grid if not 0.0 <= g <= 1.0]
            if bad:
                raise ValueError(f'gamma values must lie in [0, 1]: {bad}')
        return grid

    @model_validator(mode='after')
    def _check(self) -> 'NoiseSweepConfig':
        _check_target(self.target, self.n)
        if self.p + self.k >= self.n:
            raise ValueError(f'p + k must be smaller than n (n={self.n}, k={self.k}, p={self.p})')
        return self

    def noise_spec(self) -> NoiseSpec:
        return NoiseSpec(channel=self.channel, backend=self.backend, trajectories=self.trajectories)


class DepthConfig(BaseModel):
    n: int = Field(ge=3)
    k: int = Field(default=1, ge=0)
    p: int = Field(default=1, ge=1)
    compare: bool = False

    @model_validator(mode='after')
    def _check(self) -> 'DepthConfig':
        if self.p + self.k >= self.n:
            raise ValueError(f'p + k must be smaller than n (n={self.n}, k={self.k}, p={self.p})')
        return self


CircuitOp = Literal['g', 'g1', 'g2', 'g3', 'g4', 'gg', 'l', 'stage1', 'stage2', 'bit-oracle', 'subfunction-oracle']


class DumpCircuitConfig(BaseModel):
    """`target` is the marked string of the width n - k register the operator acts on."""

    op: CircuitOp
    n: int = Field(ge=2)
    k: int = Field(default=0, ge=0)
    p: int | None = Field(default=None, ge=1)
    target: str | None = None
    theta: float | None = None
    phi: float | None = None
    i: str | None = None
    alpha: float | None = None
    output: str | None = None

    @model_validator(mode='after')
    def _check(self) -> 'DumpCircuitConfig':
        width = self.n - self.k
        if width < 1:
            raise ValueError(f'k={self.k} leaves no qubits of n={self.n}')
        if self.target is not None:
            full = self.n if self.op in ('bit-oracle', 'subfunction-oracle') else width
            _check_target(self.target, full)
        if self.op in ('g1', 'g3', 'g4', 'stage1') and self.p is None:
            raise ValueError(f'{self.op} needs -p')
        if self.op == 'gg' and (self.theta is None or self.phi is None):
            raise ValueError('gg needs --theta and --phi')
        if self.op == 'subfunction-oracle':
            if self.i is None or len(self.i) != self.k or self.k < 1:
                raise ValueError('subfunction-oracle needs -k >= 1 and an --i of k bits')
            check_bits(self.i, self.k)
        return self


class SampleConfig(BaseModel):
    n: int = Field(ge=3)
    k: int = Field(ge=1)
    p: int = Field(ge=1)
    target: str
    shots: int = Field(default=1000, ge=1)
    seed: int = 0

    @model_validator(mode='after')
    def _check(self) -> 'SampleConfig':
        _check_target(self.target, self.n)
        if self.p + self.k >= self.n:
            raise ValueError(f'p + k must be smaller than n (n={self.n}, k={self.k}, p={self.p})')
        return self


def read_config_file(path: str) -> dict:
    """Keys of a JSON config file; a saved run record contributes its `config` object."""
    if not os.path.exists(path) or not path.endswith('.json'):
        raise ValueError(f'Config file {path} does not exist or is not a json file')
    with open(path) as fh:
        data = json.load(fh)
    if not isinstance(data, dict):
        raise ValueError(f'Config file {path} must hold a JSON object')
    if isinstance(data.get('config'), dict):
        return data['config']
    return data


def load_config(model: type[ConfigModel], flags: dict, path: str | None = None) -> ConfigModel:
    """Flags that were given override the file; pydantic aggregates every validation error."""
    merged = read_config_file(path) if path else {}
    merged.update({key: value for key, value in flags.items() if value is not None})
    return model.model_validate(merged)
