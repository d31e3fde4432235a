"""Closed-form circuit depth and query accounting.

The depth of a multi-controlled U(θ) is the deepest of its CNOT, T and H layers. The oracle
wraps it in one X layer on each side and the diffusion in an H and an X layer on each side.
"""

import logging
import math

from src.exceptions import UnsupportedSizeError
from src.models import ComparisonRow, DepthReport, DepthTheoremCheck, GateCosts
from src.planner import long_floor_iterations, long_params, query_gap_constant, stage1_coefficients

logger = logging.getLogger(__name__)

MIN_COST_WIDTH = 7
ORACLE_WRAP_DEPTH = 2
DIFFUSION_WRAP_DEPTH = 4


def _cost_formulas(n: int) -> GateCosts:
    t_depth = 8 * n - 11 if (n - 1) % 2 else 8 * n - 14
    return GateCosts(
        n=n,
        cnot_cost=12 * n - 36,
        cnot_depth=8 * n - 8,
        t_cost=16 * n - 64,
        t_depth=t_depth,
        h_cost=8 * n - 40,
        h_depth=4 * n - 15,
    )


def mcu_costs(n: int) -> GateCosts:
    if n < MIN_COST_WIDTH:
        raise UnsupportedSizeError(f'Gate cost formulas need n >= {MIN_COST_WIDTH}, got {n}')
    return _cost_formulas(n)


def mcu_depth(n: int) -> int:
    """Depth of the n-qubit multi-controlled gate; below the formula range the formula value is used."""
    costs = mcu_costs(n) if n >= MIN_COST_WIDTH else _cost_formulas(n)
    return costs.depth


def iterate_depth(width: int, diffusion_width: int | None = None) -> int:
    """Depth of one oracle (full width) plus diffusion (on `diffusion_width` qubits)."""
    diffusion_width = width if diffusion_width is None else diffusion_width
    return mcu_depth(width) + ORACLE_WRAP_DEPTH + mcu_depth(diffusion_width) + DIFFUSION_WRAP_DEPTH


def grover_baseline(n: int) -> tuple[int, int]:
    """(iterations, depth) of textbook Grover on n qubits."""
    iterations = long_floor_iterations(n)
    return iterations, iterate_depth(n) * iterations


def depth_report(n: int, k: int, p: int) -> DepthReport:
    width = n - k
    coeffs = stage1_coefficients(width, p)
    stage2 = long_params(width - p)

    d_g2 = iterate_depth(width)
    d_g3 = iterate_depth(width, width - p)
    d_g4 = d_g2
    d_l = iterate_depth(width - p)
    stage1_total = coeffs.p1 * d_g2 + coeffs.p2 * d_g3 + d_g4
    stage2_total = stage2.iterations * d_l
    grover_iterations, baseline = grover_baseline(n)

    warnings = []
    if width - p < MIN_COST_WIDTH:
        warnings.append(
            f'registers below {MIN_COST_WIDTH} qubits (here {width} and {width - p}) are outside the '
            'validity range of the gate cost formulas; depths are formula values'
        )
    literal = math.floor(math.pi / 4 * math.sqrt(2**n))
    notes = [
        f'Grover baseline uses floor((pi/2 - lambda)/(2 lambda)) = {grover_iterations} iterations '
        f'(floor(pi/4 * sqrt(2^n)) would give {literal})',
        'overall depth is the stage-1 total, the deeper of the two stages',
    ]

    stage1_queries = coeffs.p1 + coeffs.p2 + 1
    node_queries = stage1_queries + stage2.iterations
    report = DepthReport(
        n=n, k=k, p=p,
        d_g2=d_g2, d_g3=d_g3, d_g4=d_g4, d_l=d_l,
        p1=coeffs.p1, p2=coeffs.p2,
        stage2_iterations=stage2.iterations,
        stage1_total=stage1_total,
        stage2_total=stage2_total,
        overall=stage1_total,
        grover_iterations=grover_iterations,
        grover_baseline=baseline,
        saving=baseline - stage1_total,
        stage1_queries=stage1_queries,
        stage2_queries=stage2.iterations,
        node_queries=node_queries,
        total_queries=2**k * node_queries,
        total_queries_formula=math.pi / 4 * math.sqrt(2 ** (n + k)) + 0.45 * math.sqrt(2 ** (n - p + k)) + 2,
        query_gap_constant=query_gap_constant(p),
        warnings=warnings,
        notes=notes,
    )
    for warning in warnings:
        logger.warning(warning)
    return report


def check_depth_theorem(n: int, k: int, p: int) -> DepthTheoremCheck:
    """Stage 1 is deeper than stage 2 whenever p >= 4 and n - p - k >= 7."""
    width = n - k
    coeffs = stage1_coefficients(width, p)
    d_g2 = iterate_depth(width)
    d_g3 = iterate_depth(width, width - p)
    d_l = iterate_depth(width - p)
    stage1 = coeffs.p1 * d_g2 + coeffs.p2 * d_g3 + d_g2
    stage2 = (long_floor_iterations(width - p) + 1) * d_l
    met = p >= 4 and width - p >= MIN_COST_WIDTH
    note = '' if met else f'hypotheses p >= 4 and n - p - k >= 7 not met (p={p}, n-p-k={width - p}); result is informational'
    return DepthTheoremCheck(
        n=n, k=k, p=p,
        hypotheses_met=met,
        holds=stage1 > stage2,
        stage1_depth=stage1,
        stage2_depth=stage2,
        note=note,
    )


def comparison_table(n: int, k: int, p: int) -> list[ComparisonRow]:
    """Qubits, exactness, depth and total queries of the search variants on n bits."""
    grover_iterations, grover_depth = grover_baseline(n)
    long = long_params(n)
    split_iterations, split_depth = grover_baseline(n - k)
    idgs = depth_report(n, k, p)
    return [
        ComparisonRow(algorithm='grover', qubits=n, exact=False, circuit_depth=grover_depth,
                      total_queries=grover_iterations),
        ComparisonRow(algorithm='long', qubits=n, exact=True, circuit_depth=iterate_depth(n) * long.iterations,
                      total_queries=long.iterations),
        ComparisonRow(algorithm='distributed-grover', qubits=n - k, exact=False, circuit_depth=split_depth,
                      total_queries=2**k * split_iterations),
        ComparisonRow(algorithm='idgs', qubits=n - k, exact=True, circuit_depth=idgs.overall,
                      total_queries=idgs.total_queries),
    ]
