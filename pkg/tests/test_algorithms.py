"""Tests for the search procedures on the dense simulator."""

import numpy as np
import pytest

from src.algorithms import (
    brute_force_stage2,
    idgs_stage1,
    idgs_stage1_noisy,
    idgs_stage2,
    idgs_stage2_noisy,
    run_exact_partial,
    run_grk,
    run_long,
    stage1_operators,
    stage1_trace,
)
from src.exceptions import InfeasiblePlanError, ParameterError, WidthMismatchError
from src.planner import exact_partial_plan, idgs_plan
from src.simulation.noise import NoiseSpec
from src.simulation.oracle import (
    SubfunctionId,
    empty_oracle,
    marked_oracle,
    restrict_prefix,
    subfunction,
)
from src.simulation.state import bitstring, prefix_distribution


def _feasible(n, k, p):
    try:
        return idgs_plan(n, k, p)
    except (InfeasiblePlanError, ParameterError):
        return None


class TestLongSearch:
    """Phase-matched Grover finds the target with certainty."""

    def test_five_bit_target(self, five_bit_oracle):
        result = run_long(five_bit_oracle)
        assert result.measured == '01100'
        assert abs(result.success_prob - 1.0) < 1e-9

    @pytest.mark.parametrize('m', range(1, 9))
    def test_exact_for_every_width(self, m):
        target = ('1011001' * 2)[:m]
        result = run_long(marked_oracle(m, target))
        assert result.measured == target
        assert abs(result.success_prob - 1.0) < 1e-9

    def test_empty_oracle_leaves_uniform_state(self):
        result = run_long(empty_oracle(3))
        assert np.allclose(result.final_state.probabilities(), 1 / 8)


class TestPartialSearch:
    """Asymptotic and exact partial search on one register."""

    @pytest.mark.parametrize('target', ['010011100101', '111111111111'])
    def test_grk_twelve_bits(self, target):
        result = run_grk(marked_oracle(12, target), q=2)
        assert result.measured == target[:2]
        assert result.success_prob >= 0.99

    def test_grk_rejects_full_split(self):
        with pytest.raises(ParameterError):
            run_grk(marked_oracle(4, '0101'), q=4)

    def test_exact_partial_every_target(self):
        """n=6, q=2: the target block is found with certainty for all 64 targets."""
        for index in range(64):
            target = bitstring(index, 6)
            result = run_exact_partial(marked_oracle(6, target), 2)
            assert result.measured == target[:2]
            assert abs(result.success_prob - 1.0) < 1e-9, target

    def test_exact_partial_clears_other_blocks(self):
        """n=10, q=3: the mass outside the target block is numerically zero."""
        f = marked_oracle(10, '1010011101')
        state = run_exact_partial(f, 3).final_state
        probs = state.probabilities().reshape(8, 128)
        outside = probs.sum() - probs[int('101', 2)].sum()
        assert outside < 1e-18


class TestStageOne:
    """The per-node first stage."""

    def test_marked_subfunction(self, five_bit_oracle):
        f_0 = subfunction(five_bit_oracle, SubfunctionId(k=1, i='0'))
        result = idgs_stage1(f_0, 2, plan=idgs_plan(5, 1, 2))
        assert result.measured == '01'
        assert abs(result.success_prob - 1.0) < 1e-9

    def test_empty_subfunction_gives_uniform_prefix(self, five_bit_oracle):
        f_1 = subfunction(five_bit_oracle, SubfunctionId(k=1, i='1'))
        result = idgs_stage1(f_1, 2, plan=idgs_plan(5, 1, 2))
        assert np.allclose(prefix_distribution(result.final_state, 2).probs, 0.25, atol=1e-12)

    def test_default_plan_matches_explicit_plan(self, five_bit_oracle):
        f_0 = subfunction(five_bit_oracle, SubfunctionId(k=1, i='0'))
        implicit = idgs_stage1(f_0, 2)
        explicit = idgs_stage1(f_0, 2, plan=idgs_plan(5, 1, 2))
        assert abs(implicit.final_state.fidelity(explicit.final_state) - 1.0) < 1e-12

    def test_trace_has_three_steps(self, five_bit_oracle):
        f_0 = subfunction(five_bit_oracle, SubfunctionId(k=1, i='0'))
        trace = stage1_trace(f_0, idgs_plan(5, 1, 2))
        assert len(trace) == 3
        assert abs(trace[1].probability_of('0110') - 0.625**2) < 1e-12

    def test_plan_width_must_match(self, five_bit_oracle):
        with pytest.raises(WidthMismatchError):
            stage1_operators(five_bit_oracle, idgs_plan(5, 1, 2))

    def test_twelve_bit_node(self, twelve_bit_oracle):
        """Node i=1 of 111000001111 recovers the prefix 111 and then the suffix 00000111."""
        plan = idgs_plan(12, 1, 3)
        f_1 = subfunction(twelve_bit_oracle, SubfunctionId(k=1, i='1'))
        first = idgs_stage1(f_1, 3, plan=plan)
        assert first.measured == '111'
        assert abs(first.success_prob - 1.0) < 1e-9
        second = idgs_stage2(restrict_prefix(f_1, first.measured))
        assert second.measured == '00000111'
        assert abs(second.success_prob - 1.0) < 1e-9

    def test_exact_over_feasible_grid(self):
        """Target node prefix and suffix are certain for n in 4..10 and k in {1, 2}."""
        checked = 0
        for n in range(4, 11):
            for k in (1, 2):
                for p in range(1, n - k):
                    plan = _feasible(n, k, p)
                    if plan is None:
                        continue
                    for index in (0, (2**n) // 3, 2**n - 1):
                        target = bitstring(index, n)
                        f = marked_oracle(n, target)
                        f_i = subfunction(f, SubfunctionId(k=k, i=target[n - k:]))
                        first = idgs_stage1(f_i, p, plan=plan)
                        assert first.measured == target[:p], (n, k, p, target)
                        assert abs(first.success_prob - 1.0) < 1e-9, (n, k, p, target)
                        second = idgs_stage2(restrict_prefix(f_i, first.measured))
                        assert first.measured + second.measured == target[: n - k]
                        checked += 1
        assert checked > 0

    def test_non_target_nodes_uniform_over_feasible_grid(self):
        """Every node without the target measures each prefix with probability 2^-p."""
        checked = 0
        for n in range(4, 11):
            for k in (1, 2):
                for p in range(1, n - k):
                    plan = _feasible(n, k, p)
                    if plan is None:
                        continue
                    target = bitstring((2**n) // 3, n)
                    f = marked_oracle(n, target)
                    for node in range(1 << k):
                        i = bitstring(node, k)
                        if i == target[n - k:]:
                            continue
                        f_i = subfunction(f, SubfunctionId(k=k, i=i))
                        assert f_i.is_empty
                        probs = prefix_distribution(idgs_stage1(f_i, p, plan=plan).final_state, p).probs
                        np.testing.assert_allclose(probs, 2.0**-p, atol=1e-9, err_msg=str((n, k, p, i)))
                        checked += 1
        assert checked > 0


class TestStageTwo:
    def test_restricted_oracle(self, five_bit_oracle):
        f_0 = subfunction(five_bit_oracle, SubfunctionId(k=1, i='0'))
        result = idgs_stage2(restrict_prefix(f_0, '01'))
        assert result.measured == '10'
        assert abs(result.success_prob - 1.0) < 1e-9

    def test_brute_force_tail(self):
        assert brute_force_stage2(marked_oracle(3, '110')).measured == '110'
        empty = brute_force_stage2(empty_oracle(3), seed=4)
        assert len(empty.measured) == 3
        assert empty.success_prob == 1 / 8
        assert idgs_stage2(marked_oracle(3, '011'), brute_force=True).measured == '011'


class TestNoisyStages:
    """Compiled stages evolved under a channel."""

    def test_zero_noise_equals_noiseless(self, five_bit_oracle):
        f_0 = subfunction(five_bit_oracle, SubfunctionId(k=1, i='0'))
        spec = NoiseSpec(channel='amplitude_damping', gamma=0.0)
        first = idgs_stage1_noisy(f_0, idgs_plan(5, 1, 2), spec)
        assert first.measured == '01'
        assert abs(first.success_prob - 1.0) < 1e-9
        second = idgs_stage2_noisy(restrict_prefix(f_0, '01'), spec)
        assert second.measured == '10'
        assert abs(second.success_prob - 1.0) < 1e-9

    def test_damping_lowers_success(self, five_bit_oracle):
        f_0 = subfunction(five_bit_oracle, SubfunctionId(k=1, i='0'))
        spec = NoiseSpec(channel='amplitude_damping', gamma=0.02)
        first = idgs_stage1_noisy(f_0, exact_partial_plan(4, 2), spec, seed=3)
        assert 0.0 < first.success_prob < 1.0
