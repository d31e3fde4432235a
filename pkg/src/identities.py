"""Numerical identity suite behind `verify-identities`.

Each check evaluates one closed-form claim over a grid and reports its worst residual.
"""

import logging
import math
from typing import Callable

import numpy as np

from src.algorithms import stage1_operators, stage1_trace
from src.config import Config
from src.exceptions import ParameterError
from src.models import IdentityCheck, IdgsPlan
from src.planner import (
    cancellation_residual,
    exact_partial_plan,
    grk_block_state,
    grk_identity_residual,
    grk_params,
    is_feasible,
    phase_system_residual,
    solve_phases,
    stage1_coefficients,
    stage_ratio,
)
from src.simulation.operators import apply_repeated, generalized_grover, grover, local_grover
from src.simulation.oracle import marked_oracle
from src.simulation.state import prefix_distribution, uniform_state

logger = logging.getLogger(__name__)

_CFG = Config.default()

PhaseSolver = Callable[..., tuple[float, float]]


def _feasible_cases(max_n: int = 14, ks=(0, 1, 2)):
    """(n, k, p, coefficients) for every plan with a non-trivial final phase step."""
    for n in range(3, max_n + 1):
        for k in ks:
            for p in range(1, n - k):
                try:
                    c = stage1_coefficients(n - k, p)
                    solve_phases(c.E, c.F, c.a_t, n - k)
                except ParameterError:
                    continue
                if abs(c.F) > 1e-12:
                    yield n, k, p, c


def _check(name: str, residuals: list[float], tolerance: float, note: str = '') -> IdentityCheck:
    worst = max(residuals) if residuals else 0.0
    passed = bool(residuals) and all(math.isfinite(r) for r in residuals) and worst < tolerance
    logger.debug('%s: worst residual %.3g over %d cases', name, worst, len(residuals))
    return IdentityCheck(name=name, passed=passed, max_residual=worst, tolerance=tolerance, cases=len(residuals), note=note)


def check_grk_tangent() -> IdentityCheck:
    residuals = [grk_identity_residual(q) for q in range(2, 13)]
    return _check(
        'partial-search tangent identity', residuals, 1e-12,
        note='q=1 skipped: it uses the limiting values alpha_1 = pi/(2 sqrt 2), beta_1 = pi/4',
    )


def check_phase_consistency(phase_solver: PhaseSolver = solve_phases) -> IdentityCheck:
    residuals = []
    for n, k, p, c in _feasible_cases():
        theta, phi = phase_solver(c.E, c.F, c.a_t, n - k)
        residuals.append(phase_system_residual(c.E, c.F, c.a_t, n - k, theta, phi))
    return _check('final-phase consistency', residuals, 1e-10)


def check_cancellation(phase_solver: PhaseSolver = solve_phases) -> IdentityCheck:
    residuals = []
    for n, k, p, c in _feasible_cases():
        theta, phi = phase_solver(c.E, c.F, c.a_t, n - k)
        residuals.append(cancellation_residual(c.E, c.F, c.a_t, n - k, theta, phi))
    return _check('non-target cancellation', residuals, 1e-10)


def check_partial_search_residual(n: int = 20, q: int = 2) -> IdentityCheck:
    params = grk_params(n, q)
    block = grk_block_state(n, q, params.j1, params.j2)
    return _check(
        'partial-search block cancellation', [block.residual], 1e-2,
        note=f'asymptotic: rounded j1={params.j1}, j2={params.j2} at n={n}, q={q}',
    )


def check_stage_ratio() -> IdentityCheck:
    grid = np.unique(np.round(np.logspace(4, 20, 60, base=2.0)))
    values = [stage_ratio(float(x)) for x in grid]
    drops = [max(0.0, a - b) for a, b in zip(values, values[1:])]
    floor_gap = max(0.0, (0.699 - 1e-3) - values[0])
    return _check(
        'stage ratio increasing', drops + [floor_gap], 1e-15,
        note=f'minimum at x=16: {values[0]:.6f}',
    )


def _block_closed_form(plan: IdgsPlan, target_index: int) -> tuple[np.ndarray, np.ndarray]:
    """Expected amplitudes after G2^{p1} and after G3^{p2}."""
    size = 2**plan.width
    block = 2 ** (plan.width - plan.p)
    turn = (2 * plan.p1 + 1) * plan.theta1
    first = np.full(size, math.cos(turn) / math.sqrt(size - 1))
    first[target_index] = math.sin(turn)
    second = np.full(size, plan.F)
    start = (target_index // block) * block
    second[start:start + block] = plan.a_nt / math.sqrt(block - 1)
    second[target_index] = plan.a_t
    return first, second


def check_stage_states(max_n: int = 10) -> IdentityCheck:
    residuals = []
    for n in range(3, max_n + 1):
        for q in range(1, n - 1):
            try:
                plan = exact_partial_plan(n, q)
            except ParameterError:
                continue
            for target_index in {0, (2**n) // 3, 2**n - 1}:
                f = marked_oracle(n, format(target_index, f'0{n}b'))
                after_g2, after_g3, _ = stage1_trace(f, plan)
                first, second = _block_closed_form(plan, target_index)
                residuals.append(float(np.max(np.abs(after_g2.amplitudes - first))))
                residuals.append(float(np.max(np.abs(after_g3.amplitudes - second))))
    return _check('stage-1 closed-form states', residuals, _CFG.fidelity_tol)


def check_grk_closed_form(n: int = 8, q: int = 2) -> IdentityCheck:
    params = grk_params(n, q)
    block = grk_block_state(n, q, params.j1, params.j2)
    residuals = []
    for target_index in (0, 37, 2**n - 1):
        f = marked_oracle(n, format(target_index, f'0{n}b'))
        state = apply_repeated(uniform_state(n), grover(f), params.j1)
        state = apply_repeated(state, local_grover(f, q), params.j2)
        size, width = 2**n, 2 ** (n - q)
        expected = np.full(size, block.c)
        start = (target_index // width) * width
        expected[start:start + width] = block.b_t / math.sqrt(width - 1)
        expected[target_index] = block.g_t
        residuals.append(float(np.max(np.abs(state.amplitudes - expected))))
    return _check('partial-search closed-form state', residuals, _CFG.fidelity_tol)


def check_exact_prefix(phase_solver: PhaseSolver = solve_phases, max_n: int = 8) -> IdentityCheck:
    """Target-prefix probability after the final generalized step, with phases from `phase_solver`."""
    residuals = []
    for n, k, p, c in _feasible_cases(max_n, ks=(0,)):
        plan = exact_partial_plan(n, p)
        theta, phi = phase_solver(c.E, c.F, c.a_t, n)
        f = marked_oracle(n, format((2**n) // 3, f'0{n}b'))
        steps = stage1_operators(f, plan)[:2] + [(generalized_grover(f, theta, phi, kind='G4'), 1)]
        state = uniform_state(n)
        for op, times in steps:
            state = apply_repeated(state, op, times)
        residuals.append(abs(1.0 - prefix_distribution(state, p).prob(f.target[:p])))
    return _check('certain target prefix', residuals, _CFG.certainty_tol)


def verify_identities(phase_solver: PhaseSolver = solve_phases) -> list[IdentityCheck]:
    """Run every check; `phase_solver` replaces the final-phase solver where phases are used."""
    return [
        check_grk_tangent(),
        check_phase_consistency(phase_solver),
        check_cancellation(phase_solver),
        check_exact_prefix(phase_solver),
        check_stage_states(),
        check_grk_closed_form(),
        check_partial_search_residual(),
        check_stage_ratio(),
    ]
