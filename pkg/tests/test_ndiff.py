import math

import numpy as np
import pytest

from latent_shift_lab.core.errors import ConfigError, DomainError, ShapeError
from latent_shift_lab.models import AdamState
from latent_shift_lab.ndiff import (
    OP_KINDS,
    Adam,
    Tensor,
    adam_step,
    apply,
    backward,
    grad_check,
    numerical_gradient,
    op_gradchecks,
)


# =============================================================================
# Forward values
# =============================================================================

class TestForward:
    def test_matmul_and_bias_broadcast(self):
        a = Tensor([[1.0, 2.0], [3.0, 4.0]])
        w = Tensor([[1.0], [1.0]])
        out = apply("add", [apply("matmul", [a, w]), Tensor([[0.5]])])
        np.testing.assert_array_equal(out.data, [[3.5], [7.5]])

    def test_matmul_matches_explicit_loops(self, rng):
        a, b = rng.normal(size=(4, 5)), rng.normal(size=(5, 3))
        expected = np.zeros((4, 3))
        for i in range(4):
            for j in range(3):
                for k in range(5):
                    expected[i, j] += a[i, k] * b[k, j]
        np.testing.assert_allclose(apply("matmul", [Tensor(a), Tensor(b)]).data, expected, rtol=0, atol=1e-12)

    def test_softmax_rows_sum_to_one(self, rng):
        s = apply("softmax_rows", [Tensor(rng.normal(size=(4, 6)) * 30)])
        np.testing.assert_allclose(s.data.sum(axis=1), 1.0, atol=1e-12)

    def test_log_softmax_matches_log_of_softmax(self, rng):
        x = Tensor(rng.normal(size=(3, 5)))
        np.testing.assert_allclose(
            apply("log_softmax_rows", [x]).data, np.log(apply("softmax_rows", [x]).data), atol=1e-12
        )

    def test_reductions_keep_rank(self):
        x = Tensor(np.arange(6.0).reshape(2, 3))
        assert apply("sum", [x]).shape == (1,)
        assert apply("sum", [x], axis=0).shape == (1, 3)
        np.testing.assert_array_equal(apply("mean", [x], axis=1).data, [[1.0], [4.0]])

    def test_slice_and_concat(self):
        x = Tensor(np.arange(8.0).reshape(2, 4))
        left = apply("slice_cols", [x], start=0, stop=1)
        right = apply("slice_cols", [x], start=1, stop=4)
        np.testing.assert_array_equal(apply("concat_cols", [left, right]).data, x.data)

    def test_operator_sugar_routes_through_apply(self):
        a = Tensor([2.0, 3.0])
        out = (a * 2.0 - 1.0) / 2.0
        np.testing.assert_array_equal(out.data, [1.5, 2.5])
        assert out._op == "div"


# =============================================================================
# Errors
# =============================================================================

class TestErrors:
    def test_matmul_shape_error_names_op_and_shapes(self):
        with pytest.raises(ShapeError) as info:
            apply("matmul", [Tensor(np.ones((2, 3))), Tensor(np.ones((2, 3)))])
        assert "matmul" in str(info.value)
        assert "(2, 3)" in str(info.value)

    def test_non_broadcastable_add(self):
        with pytest.raises(ShapeError):
            apply("add", [Tensor(np.ones((2, 3))), Tensor(np.ones((2, 4)))])

    def test_log_of_non_positive(self):
        with pytest.raises(DomainError):
            apply("log", [Tensor([1.0, 0.0])])

    def test_division_by_zero(self):
        with pytest.raises(DomainError):
            apply("div", [Tensor([1.0]), Tensor([0.0])])

    def test_unknown_op(self):
        with pytest.raises(DomainError):
            apply("sigmoid", [Tensor([1.0])])

    def test_backward_needs_scalar(self):
        x = Tensor(np.ones((2, 2)), requires_grad=True)
        with pytest.raises(ShapeError):
            backward(apply("square", [x]))

    def test_rank_three_rejected(self):
        with pytest.raises(ShapeError):
            Tensor(np.ones((2, 2, 2)))


# =============================================================================
# Backward pass
# =============================================================================

class TestBackward:
    def test_square_sum_gradient(self):
        x = Tensor([1.0, -2.0, 3.0], requires_grad=True)
        grads = backward(apply("sum", [apply("square", [x])]))
        np.testing.assert_array_equal(grads[x], [2.0, -4.0, 6.0])
        np.testing.assert_array_equal(x.grad, [2.0, -4.0, 6.0])

    def test_bias_gradient_is_unbroadcast(self, rng):
        h = Tensor(rng.normal(size=(5, 3)))
        b = Tensor(np.zeros((1, 3)), requires_grad=True)
        grads = backward(apply("sum", [apply("add", [h, b])]))
        np.testing.assert_array_equal(grads[b], np.full((1, 3), 5.0))

    def test_shared_node_accumulates(self):
        x = Tensor([3.0], requires_grad=True)
        y = apply("mul", [x, x])
        grads = backward(apply("add", [y, x]))
        np.testing.assert_array_equal(grads[x], [7.0])

    def test_leaf_grads_accumulate_across_passes(self):
        x = Tensor([1.0], requires_grad=True)
        backward(apply("mul", [x, 2.0]))
        backward(apply("mul", [x, 3.0]))
        np.testing.assert_array_equal(x.grad, [5.0])

    def test_unreachable_params_get_zeros(self):
        x = Tensor([1.0], requires_grad=True)
        unused = Tensor(np.ones((2, 2)), requires_grad=True)
        grads = backward(apply("mul", [x, 2.0]), params=[x, unused])
        np.testing.assert_array_equal(grads[unused], np.zeros((2, 2)))

    def test_clip_blocks_gradient_outside_bounds(self):
        x = Tensor([-10.0, 0.0, 10.0], requires_grad=True)
        grads = backward(apply("sum", [apply("clip", [x], lo=-8.0, hi=8.0)]))
        np.testing.assert_array_equal(grads[x], [0.0, 1.0, 0.0])

    def test_gradient_of_a_sum_is_the_sum_of_gradients(self, rng):
        w_data, x = rng.normal(size=(4, 3)), rng.normal(size=(6, 4))

        def first(w):
            return apply("sum", [apply("tanh", [apply("matmul", [Tensor(x), w])])])

        def second(w):
            return apply("mean", [apply("square", [apply("matmul", [Tensor(x), w])])])

        def grad_of(loss):
            w = Tensor(w_data, requires_grad=True)
            return backward(loss(w), [w])[w]

        combined = grad_of(lambda w: apply("add", [first(w), second(w)]))
        np.testing.assert_allclose(combined, grad_of(first) + grad_of(second), rtol=0, atol=1e-12)

    def test_backward_is_bitwise_deterministic(self, rng):
        w_data = rng.normal(size=(4, 3))
        x = rng.normal(size=(6, 4))

        def run():
            w = Tensor(w_data, requires_grad=True)
            h = apply("tanh", [apply("matmul", [Tensor(x), w])])
            return backward(apply("mean", [apply("softmax_rows", [h])]), [w])[w]

        assert np.array_equal(run(), run())


# =============================================================================
# Gradient checking
# =============================================================================

class TestGradCheck:
    def test_every_op_kind_passes(self):
        errors = op_gradchecks(seed=0)
        assert set(errors) == set(OP_KINDS)
        for kind, err in errors.items():
            assert err < 1e-4, kind

    def test_every_op_kind_passes_on_fifty_random_points(self):
        for seed in range(50):
            for kind, err in op_gradchecks(seed=seed).items():
                assert err < 1e-4, (kind, seed)

    def test_composite_function(self, rng):
        def f(ts):
            a, b = ts
            h = apply("leaky_relu", [apply("matmul", [a, b])])
            return apply("sum", [apply("exp", [apply("mul", [h, 0.1])])])

        assert grad_check(f, [rng.normal(size=(3, 4)), rng.normal(size=(4, 2))]) < 1e-4

    def test_numerical_gradient_of_quadratic(self):
        grads = numerical_gradient(lambda ts: apply("sum", [apply("square", ts)]), [np.array([1.0, 2.0])])
        np.testing.assert_allclose(grads[0], [2.0, 4.0], rtol=1e-8)

    @pytest.mark.parametrize("eps", [0.0, -1e-5, 0.1])
    def test_eps_outside_range(self, eps):
        with pytest.raises(ConfigError):
            grad_check(lambda ts: apply("sum", ts), [np.ones(2)], eps=eps)


# =============================================================================
# Adam
# =============================================================================

class TestAdam:
    def test_first_step_moves_by_learning_rate(self):
        params = [np.array([1.0, -1.0])]
        grads = [np.array([0.5, -2.0])]
        new, state = adam_step(params, grads, AdamState.fresh(params), lr=0.1)
        np.testing.assert_allclose(new[0], [0.9, -0.9], atol=1e-6)
        assert state.step_count == 1

    def test_pure_update_leaves_inputs(self):
        params = [np.array([1.0])]
        state = AdamState.fresh(params)
        adam_step(params, [np.array([1.0])], state)
        assert params[0][0] == 1.0
        assert state.step_count == 0

    def test_non_positive_learning_rate(self):
        params = [np.zeros(1)]
        with pytest.raises(ConfigError):
            adam_step(params, [np.zeros(1)], AdamState.fresh(params), lr=0.0)

    def test_two_steps_follow_the_recurrence(self):
        x = Tensor([1.0], requires_grad=True)
        optimizer = Adam([x], lr=0.1)
        for _ in range(2):
            optimizer.zero_grad()
            backward(apply("sum", [apply("square", [x])]))
            optimizer.step()

        b1, b2, eps, lr = 0.9, 0.999, 1e-8, 0.1
        theta, m, v = 1.0, 0.0, 0.0
        for t in (1, 2):
            g = 2.0 * theta
            m = b1 * m + (1.0 - b1) * g
            v = b2 * v + (1.0 - b2) * g * g
            theta = theta - lr * (m / (1.0 - b1 ** t)) / (math.sqrt(v / (1.0 - b2 ** t)) + eps)
        assert abs(x.data[0] - theta) < 1e-12

    def test_zero_gradient_leaves_parameters(self, rng):
        params = [rng.normal(size=(2, 3)), rng.normal(size=4)]
        new, state = adam_step(params, [np.zeros((2, 3)), np.zeros(4)], AdamState.fresh(params), lr=0.1)
        for before, after in zip(params, new):
            np.testing.assert_array_equal(before, after)
        assert state.step_count == 1

    def test_minimizes_quadratic(self):
        x = Tensor([3.0, -2.0], requires_grad=True)
        optimizer = Adam([x], lr=0.1)
        for _ in range(500):
            optimizer.zero_grad()
            backward(apply("sum", [apply("square", [x])]))
            optimizer.step()
        np.testing.assert_allclose(x.data, 0.0, atol=5e-2)
