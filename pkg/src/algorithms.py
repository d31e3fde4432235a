"""Search procedures driven over the dense simulators.

Success probabilities are exact (computed from amplitudes). Measurements are drawn with a
seeded generator, and a probability-1 outcome is returned without sampling.
"""

import logging
from dataclasses import dataclass

import numpy as np

from src.exceptions import WidthMismatchError
from src.models import IdgsPlan, LongParams
from src.planner import exact_partial_plan, grk_params, long_params
from src.simulation.gates import GateSequence
from src.simulation.noise import NoiseSpec, noisy_distribution
from src.simulation.operators import (
    SearchOperator,
    SearchProgram,
    apply_repeated,
    generalized_grover,
    grover,
    local_grover,
    long_iterate,
    search_program,
)
from src.simulation.oracle import MarkedOracle
from src.simulation.state import (
    PureState,
    bitstring,
    draw_outcome,
    marginal_prefix,
    prefix_distribution,
    uniform_state,
)

logger = logging.getLogger(__name__)


@dataclass
class StageResult:
    measured: str
    success_prob: float
    final_state: PureState | None = None


def _scored(f: MarkedOracle, state: PureState, width: int, seed: int) -> StageResult:
    """Measure the first `width` qubits; score against the target's prefix, or the draw itself."""
    dist = prefix_distribution(state, width)
    measured = draw_outcome(dist, seed)
    reference = measured if f.is_empty else f.target[:width]
    return StageResult(measured=measured, success_prob=dist.prob(reference), final_state=state)


def long_operator(f: MarkedOracle, params: LongParams | None = None) -> SearchOperator:
    if params is None:
        params = long_params(f.m)
    return long_iterate(f, params.omega)


def run_long(f: MarkedOracle, seed: int = 0) -> StageResult:
    """Phase-matched Grover: J + 1 applications of L on the uniform superposition."""
    params = long_params(f.m)
    state = apply_repeated(uniform_state(f.m), long_operator(f, params), params.iterations)
    return _scored(f, state, f.m, seed)


def run_grk(f: MarkedOracle, q: int, seed: int = 0) -> StageResult:
    """Partial search: G^{j1}, G1^{j2}, then one G; measures the first q qubits."""
    params = grk_params(f.m, q)
    state = uniform_state(f.m)
    state = apply_repeated(state, grover(f), params.j1)
    state = apply_repeated(state, local_grover(f, q), params.j2)
    state = apply_repeated(state, grover(f), 1)
    return _scored(f, state, q, seed)


def stage1_operators(f_i: MarkedOracle, plan: IdgsPlan) -> list[tuple[SearchOperator, int]]:
    """G2 × p1, G3 × p2, G4(θ, φ) × 1."""
    if f_i.m != plan.width:
        raise WidthMismatchError(f'Plan is for a {plan.width}-qubit register, oracle has {f_i.m} bits')
    return [
        (grover(f_i, kind='G2'), plan.p1),
        (local_grover(f_i, plan.p, kind='G3'), plan.p2),
        (generalized_grover(f_i, plan.theta, plan.phi, kind='G4'), 1),
    ]


def stage1_trace(f_i: MarkedOracle, plan: IdgsPlan) -> list[PureState]:
    """States after each of the three stage-1 steps."""
    state = uniform_state(f_i.m)
    trace = []
    for op, times in stage1_operators(f_i, plan):
        state = apply_repeated(state, op, times)
        trace.append(state)
    return trace


def run_exact_partial(f: MarkedOracle, q: int, seed: int = 0) -> StageResult:
    """Exact partial search on a single register: the first q bits with certainty."""
    plan = exact_partial_plan(f.m, q)
    return _scored(f, stage1_trace(f, plan)[-1], q, seed)


def idgs_stage1(f_i: MarkedOracle, p: int, seed: int = 0, plan: IdgsPlan | None = None) -> StageResult:
    """Stage 1 on one node: certain target prefix if f_i is marked, a uniform prefix otherwise."""
    if plan is None:
        plan = exact_partial_plan(f_i.m, p)
    return _scored(f_i, stage1_trace(f_i, plan)[-1], p, seed)


def brute_force_stage2(f: MarkedOracle, seed: int = 0) -> StageResult:
    """Classical scan of the remaining bits; an empty oracle yields a uniform random draw."""
    for index in range(1 << f.m):
        bits = bitstring(index, f.m)
        if f.eval(bits):
            return StageResult(measured=bits, success_prob=1.0)
    rng = np.random.default_rng(seed)
    return StageResult(measured=bitstring(int(rng.integers(1 << f.m)), f.m), success_prob=2.0**-f.m)


def idgs_stage2(f_restricted: MarkedOracle, seed: int = 0, brute_force: bool = False) -> StageResult:
    if brute_force:
        return brute_force_stage2(f_restricted, seed)
    return run_long(f_restricted, seed)


def stage1_program(f_i: MarkedOracle, plan: IdgsPlan) -> SearchProgram:
    return search_program(f_i.m, stage1_operators(f_i, plan))


def long_program(f: MarkedOracle) -> SearchProgram:
    params = long_params(f.m)
    return search_program(f.m, [(long_operator(f, params), params.iterations)])


def stage1_circuit(f_i: MarkedOracle, plan: IdgsPlan) -> GateSequence:
    return stage1_program(f_i, plan).gates()


def long_circuit(f: MarkedOracle) -> GateSequence:
    return long_program(f).gates()


def _noisy_scored(f: MarkedOracle, circuit: SearchProgram, width: int, noise: NoiseSpec, seed: int) -> StageResult:
    sim_seed, draw_seed = np.random.SeedSequence(seed).generate_state(2)
    dist = marginal_prefix(noisy_distribution(circuit, noise, int(sim_seed)), width)
    measured = draw_outcome(dist, int(draw_seed))
    reference = measured if f.is_empty else f.target[:width]
    return StageResult(measured=measured, success_prob=dist.prob(reference))


def idgs_stage1_noisy(f_i: MarkedOracle, plan: IdgsPlan, noise: NoiseSpec, seed: int = 0) -> StageResult:
    """Stage 1 with the compiled circuit evolved under noise; the prefix is drawn from the noisy marginal."""
    return _noisy_scored(f_i, stage1_program(f_i, plan), plan.p, noise, seed)


def idgs_stage2_noisy(f_restricted: MarkedOracle, noise: NoiseSpec, seed: int = 0) -> StageResult:
    return _noisy_scored(f_restricted, long_program(f_restricted), f_restricted.m, noise, seed)
