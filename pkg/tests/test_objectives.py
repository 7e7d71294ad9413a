import numpy as np
import pytest
from numpy.testing import assert_allclose

from tensorscape.objectives import (
    DenseTarget,
    TensorProblem,
    closed_form_f1,
    eval_dense,
    eval_f1,
    eval_finf,
    eval_fp,
    eval_hp,
    eval_lp,
    grad_fp,
    in_closed_form_region,
    subgrad_dense,
    subgrad_f1,
    tuple_products,
)

import oracles

PROB_2 = TensorProblem(np.array([1.0, -0.75]), 2)
PROB_11 = TensorProblem(np.array([1.0, 1.0]), 2)


class TestTensorProblem:
    def test_budget_guard(self):
        with pytest.raises(ValueError, match="budget"):
            TensorProblem(np.ones(10), 8)
        # n**d = 10**7 is exactly at the default budget
        TensorProblem(np.ones(10), 7)

    def test_validation(self):
        with pytest.raises(ValueError):
            TensorProblem(np.array([1.0, np.nan]), 2)
        with pytest.raises(ValueError):
            TensorProblem(np.array([1.0]), 0)
        with pytest.raises(ValueError):
            TensorProblem(np.array([[1.0]]), 2)

    def test_dimension_mismatch(self):
        with pytest.raises(ValueError):
            eval_f1(PROB_2, np.zeros(3))
        with pytest.raises(ValueError):
            eval_finf(PROB_2, np.zeros(1))


class TestF1:
    def test_zero_at_truth(self):
        assert eval_f1(PROB_2, PROB_2.y) == 0.0

    def test_at_origin(self):
        # |0-1| + 2*|0+0.75| + |0-0.5625|
        assert eval_f1(PROB_2, np.zeros(2)) == 3.0625

    def test_sign_symmetry_even_order(self):
        assert eval_f1(PROB_2, -PROB_2.y) == 0.0

    def test_matches_enumeration(self):
        rng = np.random.default_rng(0)
        for n, d in [(2, 2), (3, 3), (4, 2), (2, 4)]:
            y, _ = oracles.random_instance(rng, n, d)
            prob = TensorProblem(y, d)
            x = rng.uniform(-2, 2, n)
            assert_allclose(eval_f1(prob, x), oracles.brute_f1(y, d, x), rtol=1e-12)

    def test_batch_matches_pointwise(self):
        rng = np.random.default_rng(1)
        pts = rng.uniform(-2, 2, (40, 2))
        batched = eval_f1(PROB_2, pts)
        assert batched.shape == (40,)
        for k in range(40):
            assert batched[k] == eval_f1(PROB_2, pts[k])


class TestFp:
    def test_at_origin_p2(self):
        assert eval_fp(PROB_2, np.zeros(2), 2) == 2.44140625

    def test_zero_at_truth_any_p(self):
        for p in (1.5, 2.0, 3.0, 7.5):
            assert eval_fp(PROB_2, PROB_2.y, p) == 0.0

    def test_unit_residuals(self):
        # residuals {0, 1, 1, 1} so every power sum agrees with the L1 sum
        x = np.array([1.0, 0.0])
        assert eval_fp(PROB_11, x, 2) == 3.0
        assert eval_fp(PROB_11, x, 3.7) == eval_f1(PROB_11, x)

    def test_rejects_p_at_most_one(self):
        for p in (1.0, 0.5, -2.0):
            with pytest.raises(ValueError):
                eval_fp(PROB_2, np.zeros(2), p)
            with pytest.raises(ValueError):
                grad_fp(PROB_2, np.zeros(2), p)

    def test_continuous_in_p(self):
        x = np.array([0.3, -1.2])
        vals = [eval_fp(PROB_2, x, p) for p in (1.5, 1.5 + 1e-9)]
        assert abs(vals[0] - vals[1]) < 1e-7


class TestFinfHp:
    def test_examples(self):
        assert eval_finf(PROB_2, PROB_2.y) == 0.0
        assert eval_finf(PROB_2, np.zeros(2)) == 1.0

    def test_max_below_sum(self):
        rng = np.random.default_rng(2)
        for _ in range(50):
            x = rng.uniform(-2, 2, 2)
            assert eval_finf(PROB_2, x) <= eval_f1(PROB_2, x) + 1e-15

    def test_hp_is_power_of_fp(self):
        x = np.array([1.0, 0.0])
        assert_allclose(eval_hp(PROB_11, x, 2), np.sqrt(3.0), rtol=1e-15)
        assert eval_hp(PROB_11, PROB_11.y, 5) == 0.0

    def test_hp_approaches_max(self):
        v64 = eval_hp(PROB_2, np.zeros(2), 64)
        vinf = eval_finf(PROB_2, np.zeros(2))
        assert abs(v64 - vinf) / vinf < 0.02

    def test_lp_dispatch(self):
        x = np.array([0.4, 0.9])
        assert eval_lp(PROB_2, x, 1.0) == eval_f1(PROB_2, x)
        assert eval_lp(PROB_2, x, 2.0) == eval_fp(PROB_2, x, 2.0)
        assert eval_lp(PROB_2, x, np.inf) == eval_finf(PROB_2, x)


class TestGradients:
    def test_zero_at_truth(self):
        assert_allclose(grad_fp(PROB_11, PROB_11.y, 2), np.zeros(2), atol=0)

    def test_finite_difference_example(self):
        x = np.array([1.0, 0.0])
        g = grad_fp(PROB_11, x, 2)
        fd = oracles.central_difference(lambda z: eval_fp(PROB_11, z, 2), x)
        assert_allclose(g, fd, rtol=1e-6)

    def test_odd_gradient_for_even_order(self):
        rng = np.random.default_rng(3)
        for _ in range(20):
            x = rng.uniform(-2, 2, 2)
            assert_allclose(grad_fp(PROB_2, -x, 2), -grad_fp(PROB_2, x, 2), rtol=0, atol=0)

    @pytest.mark.parametrize("p", [2.0, 3.0, 1.5])
    def test_finite_difference_sweep(self, p):
        rng = np.random.default_rng(4)
        for _ in range(50):
            n, d = int(rng.integers(2, 4)), int(rng.integers(1, 4))
            y, _ = oracles.random_instance(rng, n, d)
            prob = TensorProblem(y, d)
            x = oracles.safe_point(prob, rng)
            g = grad_fp(prob, x, p)
            fd = oracles.central_difference(lambda z: eval_fp(prob, z, p), x)
            assert_allclose(g, fd, rtol=1e-5, atol=1e-8)

    def test_zero_residual_convention_small_p(self):
        # x = y makes every residual zero; the |r|**(p-2) r terms must not blow up
        g = grad_fp(PROB_2, PROB_2.y, 1.5)
        assert_allclose(g, np.zeros(2), atol=0)


class TestSubgradF1:
    def test_zero_at_truth(self):
        assert_allclose(subgrad_f1(PROB_2, PROB_2.y), np.zeros(2), atol=0)

    def test_balanced_point(self):
        assert_allclose(subgrad_f1(PROB_11, np.array([0.5, -0.5])), np.zeros(2), atol=0)

    def test_matches_finite_differences_off_kinks(self):
        rng = np.random.default_rng(5)
        for _ in range(20):
            y, d = oracles.random_instance(rng, 3, 2)
            prob = TensorProblem(y, d)
            x = oracles.safe_point(prob, rng)
            fd = oracles.central_difference(lambda z: eval_f1(prob, z), x)
            assert_allclose(subgrad_f1(prob, x), fd, rtol=1e-5, atol=1e-7)


class TestDense:
    def test_noiseless_zero(self):
        y = np.array([0.5, -1.0, 2.0])
        target = DenseTarget(np.outer(y, y))
        assert eval_dense(target, y, "l1") == 0.0
        assert eval_dense(target, y, "l2") == 0.0

    def test_single_entry(self):
        target = DenseTarget(np.array([[2.0]]))
        assert eval_dense(target, np.array([1.0]), "l1") == 1.0
        assert eval_dense(target, np.array([1.0]), "l2") == 1.0

    def test_l2_equals_order_two_power_sum(self):
        rng = np.random.default_rng(6)
        y = rng.normal(size=4)
        prob = TensorProblem(y, 2)
        target = DenseTarget(np.outer(y, y))
        for _ in range(10):
            x = rng.normal(size=4)
            assert_allclose(eval_dense(target, x, "l2"), eval_fp(prob, x, 2), rtol=1e-12)

    def test_subgrad_zero_at_exact_fit(self):
        y = np.array([1.0, 2.0])
        target = DenseTarget(np.outer(y, y))
        assert_allclose(subgrad_dense(target, y, "l1"), np.zeros(2), atol=0)

    def test_subgrad_l2_finite_differences(self):
        rng = np.random.default_rng(7)
        b = rng.normal(size=(3, 3))
        target = DenseTarget(b)
        x = rng.normal(size=3)
        fd = oracles.central_difference(lambda z: eval_dense(target, z, "l2"), x)
        assert_allclose(subgrad_dense(target, x, "l2"), fd, rtol=1e-6, atol=1e-6)

    def test_subgrad_l1_finite_differences_off_kinks(self):
        rng = np.random.default_rng(8)
        b = rng.normal(size=(3, 3))
        target = DenseTarget(b)
        for _ in range(20):
            x = rng.normal(size=3)
            r = np.outer(x, x) - b
            if np.abs(r).min() < 1e-2:
                continue
            fd = oracles.central_difference(lambda z: eval_dense(target, z, "l1"), x)
            assert_allclose(subgrad_dense(target, x, "l1"), fd, rtol=1e-5, atol=1e-7)

    def test_mask_bounds(self):
        with pytest.raises(ValueError):
            DenseTarget(np.eye(2), noise_mask=frozenset({(2, 0)}))


class TestRegionMembership:
    def test_examples(self):
        assert in_closed_form_region(PROB_11, np.array([0.5, -0.5])) is True
        assert in_closed_form_region(PROB_11, PROB_11.y) is True
        assert in_closed_form_region(PROB_11, np.array([2.0, 0.0])) is False

    def test_rejects_zero_truth_entries(self):
        prob = TensorProblem(np.array([1.0, 0.0]), 2)
        with pytest.raises(ValueError):
            in_closed_form_region(prob, np.ones(2))

    def test_agrees_with_enumeration(self):
        rng = np.random.default_rng(9)
        for _ in range(300):
            n, d = int(rng.integers(1, 5)), int(rng.integers(1, 5))
            y, _ = oracles.random_instance(rng, n, d)
            x = rng.uniform(-2, 2, n)
            prob = TensorProblem(y, d)
            assert in_closed_form_region(prob, x) == oracles.brute_in_region(y, d, x)


class TestClosedForm:
    def test_examples(self):
        assert closed_form_f1(PROB_11, np.array([0.5, -0.5])) == 4.0
        assert closed_form_f1(PROB_11, PROB_11.y) == 0.0
        assert_allclose(closed_form_f1(PROB_2, np.zeros(2)), 3.0625, rtol=0)

    def test_rejects_outside_region(self):
        with pytest.raises(ValueError):
            closed_form_f1(PROB_11, np.array([2.0, 0.0]))

    @pytest.mark.parametrize("n", [2, 3, 4])
    @pytest.mark.parametrize("d", [2, 3])
    def test_identity_on_region(self, n, d):
        rng = np.random.default_rng(100 * n + d)
        y, _ = oracles.random_instance(rng, n, d)
        prob = TensorProblem(y, d)
        # ratio draws in [-1, 1] always land inside the region
        ratios = rng.uniform(-1, 1, (1000, n))
        pts = ratios * y
        cf = closed_form_f1(prob, pts)
        direct = eval_f1(prob, pts)
        assert_allclose(cf, direct, rtol=1e-9, atol=1e-12)


class TestInvariants:
    def test_nonnegativity(self):
        rng = np.random.default_rng(10)
        for _ in range(50):
            n, d = int(rng.integers(1, 4)), int(rng.integers(1, 4))
            y = rng.normal(size=n)
            prob = TensorProblem(y, d)
            x = rng.uniform(-3, 3, n)
            assert eval_f1(prob, x) >= 0
            assert eval_fp(prob, x, 2.5) >= 0
            assert eval_finf(prob, x) >= 0

    @pytest.mark.parametrize("d", [2, 3])
    def test_zero_set(self, d):
        rng = np.random.default_rng(11 + d)
        y, _ = oracles.random_instance(rng, 3, d)
        prob = TensorProblem(y, d)
        assert eval_f1(prob, y) == 0.0
        if d % 2 == 0:
            assert eval_f1(prob, -y) == 0.0
        else:
            assert eval_f1(prob, -y) > 0.0
        pts = rng.uniform(-2, 2, (1000, 3))
        keep = np.linalg.norm(pts - y, axis=1) > 1e-6
        if d % 2 == 0:
            keep &= np.linalg.norm(pts + y, axis=1) > 1e-6
        assert np.all(eval_f1(prob, pts[keep]) > 0)

    def test_even_order_symmetry(self):
        rng = np.random.default_rng(12)
        pts = rng.uniform(-2, 2, (100, 2))
        for f in (
            lambda z: eval_f1(PROB_2, z),
            lambda z: eval_fp(PROB_2, z, 2.5),
            lambda z: eval_finf(PROB_2, z),
        ):
            a, b = f(pts), f(-pts)
            assert_allclose(a, b, rtol=1e-12)

    def test_tuple_products_order(self):
        # odometer order: last index varies fastest
        x = np.array([2.0, 3.0])
        assert_allclose(tuple_products(x, 2), [4.0, 6.0, 6.0, 9.0])
        assert_allclose(tuple_products(x, 0), [1.0])
