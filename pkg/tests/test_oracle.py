"""The independent verification engines the rest of the suite leans on."""

from __future__ import annotations

import pytest

from lfpsolve import (
    AlgebraicRoot,
    NoFiniteLfp,
    detect_divergence,
    detect_zero_variables,
    rat,
    system_of,
    univariate_quadratic_lfp,
    value_iterate,
    zero_set_oracle,
)

from conftest import random_with_zero_variables, univariate

CRITICAL = univariate("1/2", 0, "1/2")


class TestValueIteration:
    def test_critical_prefix(self):
        assert value_iterate(CRITICAL, 1) == [rat(1, 2)]
        assert value_iterate(CRITICAL, 2) == [rat(5, 8)]
        assert value_iterate(CRITICAL, 3) == [rat(89, 128)]

    def test_constant_is_stationary(self):
        sys = univariate(0, 0, "1")
        assert value_iterate(sys, 1) == [rat(1)]
        assert value_iterate(sys, 7) == [rat(1)]

    def test_unbounded_growth_without_lfp(self):
        sys = univariate(0, "1", "1")  # x = x + 1
        for k in (0, 1, 5, 9):
            assert value_iterate(sys, k) == [rat(k)]

    def test_monotone_in_k(self, rng):
        for _ in range(20):
            sys = random_with_zero_variables(rng, rng.randint(1, 5))
            previous = value_iterate(sys, 0)
            for k in range(1, 8):
                current = value_iterate(sys, k)
                assert all(a <= b for a, b in zip(previous, current))
                previous = current

    def test_rejects_negative_steps(self):
        with pytest.raises(ValueError):
            value_iterate(CRITICAL, -1)


class TestZeroSetOracle:
    def test_starved_product(self):
        sys = system_of(
            ["x1", "x2"],
            [("1", {"x1": 1, "x2": 1})],
            [("1/2", {"x2": 1}), ("1/2", {})],
        )
        assert zero_set_oracle(sys) == frozenset({0})

    def test_all_constant(self):
        sys = system_of(["a", "b"], [("1", {})], [("2/3", {})])
        assert zero_set_oracle(sys) == frozenset()

    def test_cross_module_agreement(self, rng):
        for _ in range(80):
            sys = random_with_zero_variables(rng, rng.randint(1, 5))
            assert zero_set_oracle(sys) == detect_zero_variables(sys)


class TestDivergenceProbe:
    def test_catches_squaring_growth(self):
        sys = univariate("1", 0, "1")  # x = x^2 + 1
        assert detect_divergence(sys, 4500, max_steps=48)

    def test_bounded_system_never_flagged(self):
        assert not detect_divergence(CRITICAL, 0, max_steps=48)

    def test_budget_limits_slow_growth(self):
        sys = univariate(0, "1", "1")  # x = x + 1 grows one unit per step
        assert not detect_divergence(sys, 10**6, max_steps=30)
        assert detect_divergence(sys, 4, max_steps=30)


class TestUnivariateQuadratic:
    def test_critical_lfp_is_one(self):
        assert univariate_quadratic_lfp("1/2", 0, "1/2") == rat(1)

    def test_gambler_lfp(self):
        assert univariate_quadratic_lfp("2/3", 0, "1/3") == rat(1, 2)
        assert univariate_quadratic_lfp("1/3", 0, "2/3") == rat(1)

    def test_negative_discriminant(self):
        with pytest.raises(NoFiniteLfp):
            univariate_quadratic_lfp("1", 0, "1")

    def test_linear_fallback(self):
        assert univariate_quadratic_lfp(0, "1/2", "1/4") == rat(1, 2)
        with pytest.raises(NoFiniteLfp):
            univariate_quadratic_lfp(0, "1", "1")
        with pytest.raises(NoFiniteLfp):
            univariate_quadratic_lfp(0, "2", "1/8")
        assert univariate_quadratic_lfp(0, "2", 0) == rat(0)

    def test_zero_constant_root_is_zero(self):
        assert univariate_quadratic_lfp("1/2", "1/4", 0) == rat(0)

    def test_irrational_root_comparisons(self):
        root = univariate_quadratic_lfp("1/2", 0, "1/4")
        # x^2/2 - x + 1/4 = 0 -> x = 1 - sqrt(1/2), irrational
        assert isinstance(root, AlgebraicRoot)
        assert root.compare(rat(0)) > 0
        assert root.compare(rat(1)) < 0
        assert root.compare(rat(29, 100)) > 0  # 1 - sqrt(1/2) = 0.2928932...
        assert root.compare(rat(2929, 10000)) < 0
        lo, hi = root.enclosure(bits=100)
        assert lo < hi
        assert hi - lo <= rat(1, 2**99)
        assert abs(float(root) - 0.2928932188) < 1e-9

    def test_value_iteration_approaches_root_from_below(self):
        root = univariate_quadratic_lfp("1/2", 0, "1/4")
        sys = univariate("1/2", 0, "1/4")
        gaps = []
        for k in (2, 5, 8, 11):
            value = value_iterate(sys, k)[0]
            assert root.compare(value) > 0
            lo, _ = root.enclosure(bits=80)
            gaps.append(lo - value)
        assert all(a > b for a, b in zip(gaps, gaps[1:]))

    def test_input_validation(self):
        with pytest.raises(ValueError):
            univariate_quadratic_lfp("-1", 0, "1")
