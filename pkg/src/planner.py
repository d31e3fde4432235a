"""Iteration counts, rotation angles and the exact-phase solution for every search variant.

All functions are pure. Rounding of iteration counts is half away from zero.
"""

import logging
import math
from typing import NamedTuple

import numpy as np

from src.exceptions import InfeasiblePlanError, NumericDomainError, ParameterError
from src.models import GrkParams, IdgsPlan, LongParams

logger = logging.getLogger(__name__)

_DOMAIN_SLACK = 1e-12


def round_half_away(value: float) -> int:
    return int(math.copysign(math.floor(abs(value) + 0.5), value))


def _clamped_cos(value: float, name: str) -> float:
    if abs(value) > 1.0 + _DOMAIN_SLACK:
        raise NumericDomainError(f'cos({name}) = {value!r} is outside [-1, 1]')
    return max(-1.0, min(1.0, value))


def long_params(m: int) -> LongParams:
    """Smallest J whose phase-matched angle exists; J + 1 iterations find the target with certainty."""
    if m < 1:
        raise ParameterError(f'Register width must be >= 1, got {m}')
    lam = math.asin(2 ** (-m / 2))
    J = max(0, math.ceil(math.pi / (4 * lam) - 1.5 - 1e-9))
    while math.sin(math.pi / (4 * J + 6)) / math.sin(lam) > 1.0 + _DOMAIN_SLACK:
        J += 1
    ratio = min(1.0, math.sin(math.pi / (4 * J + 6)) / math.sin(lam))
    omega = 2 * math.asin(ratio)
    return LongParams(m=m, J=J, iterations=J + 1, omega=omega, lam=lam)


def long_floor_iterations(m: int) -> int:
    """⌊(π/2 − λ)/(2λ)⌋, the textbook count used by the depth baselines."""
    lam = math.asin(2 ** (-m / 2))
    return math.floor((math.pi / 2 - lam) / (2 * lam))


def partial_search_angles(q: int) -> tuple[float, float]:
    """(α_q, β_q) for a q-bit block split; q = 1 takes the limiting values."""
    if q < 1:
        raise ParameterError(f'Block width must be >= 1, got {q}')
    if q == 1:
        return math.pi / (2 * math.sqrt(2)), math.pi / 4
    blocks = 2**q
    alpha = math.sqrt(blocks) / 2 * math.atan2(math.sqrt(3 * blocks - 4), blocks - 2)
    beta = math.asin(math.sqrt(blocks / (4 * (blocks - 1))))
    return alpha, beta


def query_gap_constant(p: int) -> float:
    """γ_p − η_p, the constant saved per √(2^{n−p−k}) by the two-step amplification."""
    gamma, eta = partial_search_angles(p)
    return gamma - eta


def grk_params(n: int, q: int) -> GrkParams:
    if not 1 <= q < n:
        raise ParameterError(f'Partial search needs 1 <= q < n, got q={q}, n={n}')
    alpha, beta = partial_search_angles(q)
    j1 = round_half_away(math.pi / 4 * math.sqrt(2**n) - alpha * math.sqrt(2 ** (n - q)))
    j2 = round_half_away(beta * math.sqrt(2 ** (n - q)))
    if j1 < 0:
        raise ParameterError(f'Database of {n} bits is too small for a {q}-bit split (j1 = {j1})')
    return GrkParams(n=n, q=q, alpha_q=alpha, beta_q=beta, j1=j1, j2=j2, lambda_prime=math.asin(2 ** (-(n - q) / 2)))


def grk_identity_residual(q: int) -> float:
    """|tan(2α_q/√2^q) − 2√2^q sin2β_q / (2^q − 4 sin²β_q)|; q >= 2."""
    if q < 2:
        raise ParameterError('The tangent identity is singular at q = 1')
    alpha, beta = partial_search_angles(q)
    root = math.sqrt(2**q)
    lhs = math.tan(2 * alpha / root)
    rhs = 2 * root * math.sin(2 * beta) / (2**q - 4 * math.sin(beta) ** 2)
    return abs(lhs - rhs)


class Stage1Coefficients(NamedTuple):
    width: int
    p: int
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


def stage1_coefficients(width: int, p: int) -> Stage1Coefficients:
    """Amplitude coefficients of the two reflection steps on a width-qubit register.

    After G2^{p1} G3^{p2} the target holds a_t, every other element of the target block
    holds a_nt/√(M−1), and every element outside the block holds F (M = 2^{width−p}).
    """
    if not 1 <= p < width:
        raise ParameterError(f'Need 1 <= p < width, got p={p}, width={width}')
    n_total = 2**width
    block = 2 ** (width - p)
    gamma, eta = partial_search_angles(p)
    p1 = round_half_away(math.pi / 4 * math.sqrt(n_total) - gamma * math.sqrt(block))
    p2 = round_half_away(eta * math.sqrt(block))
    if p1 < 0:
        raise ParameterError(f'Register of {width} qubits is too small for p={p} (p1 = {p1})')
    theta1 = math.asin(1 / math.sqrt(n_total))
    theta_prime = math.asin(1 / math.sqrt(block))
    turn = (2 * p1 + 1) * theta1
    local = 2 * p2 * theta_prime
    spread = math.sqrt(block - 1) * math.cos(turn) / math.sqrt(n_total - 1)
    a_t = math.sin(turn) * math.cos(local) + spread * math.sin(local)
    a_nt = -math.sin(turn) * math.sin(local) + spread * math.cos(local)
    F = math.cos(turn) / math.sqrt(n_total - 1)
    E = math.sqrt(block - 1) * a_nt + (n_total - block) * F
    return Stage1Coefficients(width, p, p1, p2, theta1, theta_prime, gamma, eta, a_t, a_nt, E, F)


def is_feasible(E: float, F: float, a_t: float, width: int) -> bool:
    return (E - 2 ** (width - 1) * F) ** 2 <= a_t**2 + _DOMAIN_SLACK


def solve_phases(E: float, F: float, a_t: float, width: int, mirrored: bool = False) -> tuple[float, float]:
    """(θ, φ) making the last generalized iterate cancel every non-target amplitude.

    The positive branch has θ in (0, π]; sign(sin φ) follows sign(a_t·F) so that a_t·sin φ
    and F·sin θ agree. `mirrored` returns (−θ, −φ).
    """
    if abs(a_t) < 1e-15:
        raise ParameterError('a_t = 0 leaves the phase system undetermined')
    if not is_feasible(E, F, a_t, width):
        raise InfeasiblePlanError(width=width, p=None, E=E, F=F, a_t=a_t)
    size = 2**width
    denominator = E**2 - size * E * F - a_t**2
    if abs(denominator) < 1e-300:
        raise NumericDomainError('The cos(θ) denominator vanishes')
    cos_theta = _clamped_cos((size**2 * F**2 / 2 - size * E * F + E**2 - a_t**2) / denominator, 'theta')
    cos_phi = _clamped_cos((size * F / 2 - E) / a_t, 'phi')
    theta = math.acos(cos_theta)
    phi = math.acos(cos_phi)
    if a_t * F < 0:
        phi = -phi
    if mirrored:
        theta, phi = -theta, -phi
    return theta, phi


def phase_system_residual(E: float, F: float, a_t: float, width: int, theta: float, phi: float) -> float:
    """Largest defect of the cos/sin consistency pair the phases must satisfy."""
    size = 2**width
    half = theta / 2
    cos_defect = abs(math.cos(phi + half) + E * math.cos(half) / a_t)
    if math.sin(half) == 0.0:
        return math.inf
    sin_rhs = ((math.cos(theta) - 1) * E + size * F) / (2 * a_t * math.sin(half))
    sin_defect = abs(math.sin(phi + half) - sin_rhs)
    return max(cos_defect, sin_defect)


def cancellation_residual(E: float, F: float, a_t: float, width: int, theta: float, phi: float) -> float:
    """|(1 − e^{iθ})(a_t e^{iφ} + E)/2^width − F|: the non-target amplitude after the last step."""
    value = (1 - np.exp(1j * theta)) * (a_t * np.exp(1j * phi) + E) / 2**width - F
    return float(abs(value))


def _build_plan(n: int, k: int, p: int, mirrored: bool) -> IdgsPlan:
    width = n - k
    c = stage1_coefficients(width, p)
    if not is_feasible(c.E, c.F, c.a_t, width):
        raise InfeasiblePlanError(width=width, p=p, E=c.E, F=c.F, a_t=c.a_t)
    theta, phi = solve_phases(c.E, c.F, c.a_t, width, mirrored=mirrored)
    plan = IdgsPlan(
        n=n, k=k, p=p, width=width,
        p1=c.p1, p2=c.p2,
        theta1=c.theta1, theta_prime=c.theta_prime,
        gamma_p=c.gamma_p, eta_p=c.eta_p,
        a_t=c.a_t, a_nt=c.a_nt, E=c.E, F=c.F,
        theta=theta, phi=phi, mirrored=mirrored,
        stage2=long_params(width - p),
    )
    logger.debug('Plan (n=%d, k=%d, p=%d): p1=%d p2=%d theta=%.6f phi=%.6f', n, k, p, plan.p1, plan.p2, theta, phi)
    return plan


def idgs_plan(n: int, k: int, p: int, mirrored: bool = False) -> IdgsPlan:
    if k < 1 or p < 1 or p + k >= n:
        raise ParameterError(f'Need 1 <= k, 1 <= p and p + k < n, got n={n}, k={k}, p={p}')
    return _build_plan(n, k, p, mirrored)


def exact_partial_plan(n: int, q: int, mirrored: bool = False) -> IdgsPlan:
    """Single-register exact partial search: the two-stage plan with no distributed bits."""
    if not 1 <= q < n:
        raise ParameterError(f'Exact partial search needs 1 <= q < n, got q={q}, n={n}')
    return _build_plan(n, 0, q, mirrored)


def feasibility_scan(n_values, k_values) -> list[dict]:
    """Every (n, k, p) in range with its feasibility; k = 0 rows are the single-register search."""
    rows = []
    for n in n_values:
        for k in k_values:
            for p in range(1, n - k):
                try:
                    c = stage1_coefficients(n - k, p)
                except ParameterError:
                    rows.append({'n': n, 'k': k, 'p': p, 'feasible': False, 'reason': 'p1 < 0'})
                    continue
                feasible = is_feasible(c.E, c.F, c.a_t, n - k)
                reason = '' if feasible else f'(E - 2^(w-1)F)^2 = {(c.E - 2 ** (n - k - 1) * c.F) ** 2:.6g} > a_t^2 = {c.a_t**2:.6g}'
                rows.append({'n': n, 'k': k, 'p': p, 'feasible': feasible, 'reason': reason})
    return rows


def stage_ratio(x: float) -> float:
    """Lower bound on the stage-1 to stage-2 query ratio per √(2^{n−p−k}) with x = 2^p."""
    if x <= 2:
        raise ParameterError(f'x must exceed 2, got {x}')
    return (
        math.pi / 4
        + math.asin(math.sqrt(x) / math.sqrt(4 * (x - 1))) / math.sqrt(x)
        - 0.5 * math.atan(math.sqrt(3 * x - 4) / (x - 2))
    )


class GrkBlockState(NamedTuple):
    g_t: float
    b_t: float
    c: float
    residual: float


def grk_block_state(n: int, q: int, j1: int, j2: int) -> GrkBlockState:
    """Closed-form amplitudes of G1^{j2} G^{j1} |φ_n> and the non-target residual after one more G.

    g_t is the target amplitude, b_t the norm of the rest of the target block, c the amplitude
    of every element outside the block. `residual` is the total non-target norm left by the
    final G.
    """
    if not 1 <= q < n:
        raise ParameterError(f'Need 1 <= q < n, got q={q}, n={n}')
    size = 2**n
    block = 2 ** (n - q)
    lam = math.asin(2 ** (-n / 2))
    lam_prime = math.asin(2 ** (-(n - q) / 2))
    turn = (2 * j1 + 1) * lam
    local = 2 * j2 * lam_prime
    spread = math.sqrt(block - 1) / math.sqrt(size - 1) * math.cos(turn)
    g_t = math.sin(turn) * math.cos(local) + spread * math.sin(local)
    b_t = -math.sin(turn) * math.sin(local) + spread * math.cos(local)
    c = math.cos(turn) / math.sqrt(size - 1)
    mean = (-g_t + b_t * math.sqrt(block - 1) + (size - block) * c) / size
    outside = 2 * mean - c
    residual = abs(outside) * math.sqrt(size - block)
    return GrkBlockState(g_t=g_t, b_t=b_t, c=c, residual=residual)
