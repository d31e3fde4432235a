"""Tests for iteration counts, angles and the final-phase solution."""

import math

import numpy as np
import pytest

from src.exceptions import InfeasiblePlanError, ParameterError
from src.planner import (
    cancellation_residual,
    exact_partial_plan,
    feasibility_scan,
    grk_block_state,
    grk_identity_residual,
    grk_params,
    idgs_plan,
    long_params,
    partial_search_angles,
    phase_system_residual,
    query_gap_constant,
    round_half_away,
    solve_phases,
    stage1_coefficients,
    stage_ratio,
)


class TestLongParams:
    """Phase-matched Grover iteration count and angle."""

    def test_two_qubits(self):
        params = long_params(2)
        assert params.J == 0
        assert params.iterations == 1
        assert abs(params.omega - math.pi) < 1e-9

    def test_five_qubits(self):
        params = long_params(5)
        assert params.J == 3
        assert abs(params.omega - 2.7648) < 1e-4

    def test_four_qubits(self):
        assert long_params(4).J == 2

    def test_one_qubit(self):
        params = long_params(1)
        assert params.J == 0
        assert abs(params.omega - math.pi / 2) < 1e-12

    def test_empty_register_rejected(self):
        with pytest.raises(ParameterError):
            long_params(0)


class TestPartialSearch:
    """Block-split angles and the partial-search counts."""

    def test_q2_angles(self):
        alpha, beta = partial_search_angles(2)
        assert abs(alpha - 0.9553) < 1e-4
        assert abs(beta - 0.6155) < 1e-4

    def test_q1_limits(self):
        alpha, beta = partial_search_angles(1)
        assert abs(alpha - math.pi / (2 * math.sqrt(2))) < 1e-15
        assert abs(beta - math.pi / 4) < 1e-15

    def test_tangent_identity(self):
        for q in range(2, 13):
            assert grk_identity_residual(q) < 1e-12, q

    def test_tangent_identity_singular_at_one(self):
        with pytest.raises(ParameterError):
            grk_identity_residual(1)

    def test_grk_bounds(self):
        with pytest.raises(ParameterError):
            grk_params(4, 4)
        assert grk_params(12, 2).j1 > 0

    def test_block_cancellation_at_twenty_bits(self):
        """Non-target residual outside the block vanishes asymptotically."""
        params = grk_params(20, 2)
        assert grk_block_state(20, 2, params.j1, params.j2).residual < 1e-2

    def test_gap_constant(self):
        assert abs(query_gap_constant(2) - 0.34) < 0.01
        for p in range(2, 12):
            assert 0.33 < query_gap_constant(p) < 0.35


class TestIdgsPlan:
    """Derived plans for concrete (n, k, p)."""

    def test_five_one_two(self):
        plan = idgs_plan(5, 1, 2)
        assert (plan.p1, plan.p2) == (1, 1)
        assert plan.a_t == pytest.approx(0.625, abs=1e-12)
        assert abs(plan.a_nt + 0.43301) < 1e-5
        assert plan.E == pytest.approx(1.5, abs=1e-12)
        assert plan.F == pytest.approx(0.1875, abs=1e-12)
        assert plan.theta == pytest.approx(2.3520, abs=1e-3)
        assert abs(plan.phi - math.pi / 2) < 1e-9
        assert plan.stage2.J == 0
        assert plan.stage2_width == 2

    def test_twelve_one_three(self):
        plan = idgs_plan(12, 1, 3)
        assert (plan.p1, plan.p2) == (21, 9)
        assert plan.theta == pytest.approx(3.0962, abs=1e-3)
        assert plan.phi == pytest.approx(0.5911, abs=1e-3)
        assert plan.stage2.iterations == 13

    def test_normalization(self):
        for n, k, p in [(5, 1, 2), (12, 1, 3)]:
            assert abs(idgs_plan(n, k, p).normalization() - 1.0) < 1e-12

    def test_infeasible_configuration(self):
        """n=4, k=1, p=2 has no real phase solution."""
        with pytest.raises(InfeasiblePlanError) as info:
            idgs_plan(4, 1, 2)
        err = info.value
        assert (err.width, err.p) == (3, 2)
        assert (err.E - 4 * err.F) ** 2 > err.a_t**2
        assert 'E=' in str(err) and 'F=' in str(err) and 'a_t=' in str(err)

    def test_parameter_ranges(self):
        with pytest.raises(ParameterError):
            idgs_plan(5, 0, 2)
        with pytest.raises(ParameterError):
            idgs_plan(5, 2, 3)
        with pytest.raises(ParameterError):
            exact_partial_plan(4, 4)

    def test_mirrored_branch(self):
        plan = idgs_plan(5, 1, 2)
        mirror = idgs_plan(5, 1, 2, mirrored=True)
        assert abs(mirror.theta + plan.theta) < 1e-15
        assert abs(mirror.phi + plan.phi) < 1e-15

    def test_phase_residuals_vanish(self):
        """Both branches satisfy the phase system and cancel the non-target amplitude."""
        checked = 0
        for n in range(4, 13):
            for k in (0, 1, 2):
                for p in range(1, n - k):
                    try:
                        c = stage1_coefficients(n - k, p)
                        solve_phases(c.E, c.F, c.a_t, n - k)
                    except ParameterError:
                        continue
                    for mirrored in (False, True):
                        theta, phi = solve_phases(c.E, c.F, c.a_t, n - k, mirrored=mirrored)
                        assert cancellation_residual(c.E, c.F, c.a_t, n - k, theta, phi) < 1e-10, (n, k, p)
                        if abs(c.F) > 1e-12:
                            assert phase_system_residual(c.E, c.F, c.a_t, n - k, theta, phi) < 1e-10, (n, k, p)
                    checked += 1
        assert checked > 20

    def test_query_count_close_to_closed_form(self):
        """p1 + p2 + 1 tracks π/4·√2^(n-k) - 0.34·√2^(n-p-k) + 1 up to rounding."""
        for n in range(6, 15):
            for k in (1, 2):
                for p in range(2, n - k):
                    if n - p - k > 8:
                        continue
                    c = stage1_coefficients(n - k, p)
                    closed = math.pi / 4 * math.sqrt(2 ** (n - k)) - 0.34 * math.sqrt(2 ** (n - p - k)) + 1
                    assert abs(c.p1 + c.p2 + 1 - closed) <= 1.5, (n, k, p)

    def test_feasibility_scan_lists_infeasible_rows(self):
        rows = feasibility_scan(range(4, 7), [1])
        row = next(r for r in rows if (r['n'], r['k'], r['p']) == (4, 1, 2))
        assert not row['feasible']
        assert row['reason']
        assert any(r['feasible'] for r in rows)


class TestHelpers:
    def test_round_half_away(self):
        assert round_half_away(2.5) == 3
        assert round_half_away(-2.5) == -3
        assert round_half_away(0.49) == 0

    def test_stage_ratio_increasing(self):
        xs = np.logspace(4, 20, 40, base=2.0)
        values = [stage_ratio(float(x)) for x in xs]
        assert values[0] >= 0.698
        assert all(b >= a for a, b in zip(values, values[1:]))

    def test_stage_ratio_domain(self):
        with pytest.raises(ParameterError):
            stage_ratio(2)
