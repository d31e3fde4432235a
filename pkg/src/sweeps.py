"""Noise sweeps: success of the two-stage search at the target node against phase-matched Grover."""

import logging
import math

from src.algorithms import long_program, stage1_program
from src.models import SweepRow
from src.planner import idgs_plan
from src.simulation.noise import NoiseSpec, NoisyEstimate, combined_success, prefix_predicate, run_noisy
from src.simulation.oracle import marked_oracle, restrict_prefix, subfunction, target_subfunction_id

logger = logging.getLogger(__name__)

AMPLITUDE_DAMPING_GRID = (0.001, 0.005, 0.007, 0.010, 0.020, 0.030, 0.040, 0.050)
PHASE_DAMPING_GRID = (0.001, 0.002, 0.003, 0.005, 0.007)


def idgs_noise_point(
    n: int, k: int, p: int, target: str, spec: NoiseSpec, shots: int | None = None, seed: int = 0
) -> tuple[NoisyEstimate, NoisyEstimate]:
    """(stage-1, stage-2) success at the node holding the target.

    Stage 1 succeeds when the measured prefix is the target's; stage 2 is scored on the
    oracle restricted to that prefix.
    """
    f = marked_oracle(n, target)
    plan = idgs_plan(n, k, p)
    f_i = subfunction(f, target_subfunction_id(f, k))
    prefix = f_i.target[:p]
    first = run_noisy(stage1_program(f_i, plan), spec, prefix_predicate(prefix, f_i.m), shots, seed)
    f_rest = restrict_prefix(f_i, prefix)
    second = run_noisy(long_program(f_rest), spec, f_rest, shots, seed + 1)
    return first, second


def long_noise_point(n: int, target: str, spec: NoiseSpec, shots: int | None = None, seed: int = 0) -> NoisyEstimate:
    f = marked_oracle(n, target)
    return run_noisy(long_program(f), spec, f, shots, seed)


def noise_sweep(
    n: int,
    k: int,
    p: int,
    target: str,
    base: NoiseSpec,
    grid,
    algorithms=('idgs', 'long'),
    shots: int | None = None,
    seed: int = 0,
) -> list[SweepRow]:
    """One row per (gamma, algorithm), in grid order."""
    rows = []
    for gamma in grid:
        spec = base.with_gamma(gamma)
        logger.info('Sweep point %s gamma=%g', spec.channel, gamma)
        if 'idgs' in algorithms:
            first, second = idgs_noise_point(n, k, p, target, spec, shots, seed)
            success = combined_success(first.success_rate, second.success_rate)
            stderr = math.hypot(second.success_rate * first.stderr, first.success_rate * second.stderr)
            rows.append(
                SweepRow(
                    gamma=gamma,
                    algorithm='idgs',
                    backend=first.backend if first.backend == second.backend else f'{first.backend}+{second.backend}',
                    p1_bar=first.success_rate,
                    p2_bar=second.success_rate,
                    success=success,
                    stderr=stderr,
                )
            )
        if 'long' in algorithms:
            est = long_noise_point(n, target, spec, shots, seed)
            rows.append(SweepRow(gamma=gamma, algorithm='long', backend=est.backend, success=est.success_rate, stderr=est.stderr))
    return rows
