"""Finite-difference checks for every differentiable op and both full graphs.

All graphs run in float64 with h=1e-4 central differences; the pass bar
is relative error below 1e-4.
"""

import numpy as np
import pytest

from aeforge import ops
from aeforge.autodiff import Tensor, backward, no_grad
from aeforge.errors import ValidationError
from aeforge.models import Autoencoder, Detector
from oracles import central_diff, central_diff_sampled, rel_err

SEEDS = list(range(20))
H = 1e-4
TOL = 1e-4


def _check(build_loss, tensors):
    loss = build_loss()
    for t in tensors:
        t.zero_grad()
    backward(loss)
    for t in tensors:
        def value():
            with no_grad():
                return float(build_loss().data)
        num = central_diff(value, t.data, h=H)
        assert rel_err(t.grad, num) < TOL


def _proj(rng, shape):
    return rng.standard_normal(shape)


@pytest.mark.parametrize("seed", SEEDS)
def test_conv2d_grad(seed):
    rng = np.random.default_rng(seed)
    x = Tensor(rng.standard_normal((2, 3, 6, 6)), requires_grad=True)
    w = Tensor(rng.standard_normal((4, 3, 3, 3)), requires_grad=True)
    b = Tensor(rng.standard_normal(4), requires_grad=True)
    stride = 1 + seed % 2
    side = (6 + 2 - 3) // stride + 1
    target = _proj(rng, (2, 4, side, side))

    def loss():
        return ops.mse(ops.conv2d(x, w, b, stride=stride, padding=1), target)

    _check(loss, [x, w, b])


@pytest.mark.parametrize("seed", SEEDS)
def test_upsample_grad(seed):
    rng = np.random.default_rng(seed)
    x = Tensor(rng.standard_normal((2, 3, 4, 5)), requires_grad=True)
    p = _proj(rng, (2, 3, 8, 10))

    def loss():
        return ops.mse(ops.upsample_nearest2x(x), p)

    _check(loss, [x])


def test_upsample_backward_of_ones_is_four():
    x = Tensor(np.random.default_rng(0).standard_normal((1, 1, 2, 2)), requires_grad=True)
    out = ops.upsample_nearest2x(x)
    backward(ops.tsum(out))
    assert np.array_equal(x.grad, np.full((1, 1, 2, 2), 4.0))


@pytest.mark.parametrize("seed", SEEDS)
def test_activation_grads(seed):
    rng = np.random.default_rng(seed)
    base = rng.standard_normal((3, 7))
    base = base + 0.2 * np.sign(base)  # keep away from the relu kink
    p = _proj(rng, (3, 7))
    for fn in (ops.relu, ops.silu, ops.sigmoid):
        x = Tensor(base.copy(), requires_grad=True)

        def loss():
            return ops.mse(fn(x), p)

        _check(loss, [x])


@pytest.mark.parametrize("seed", SEEDS)
def test_pool_and_linear_grads(seed):
    rng = np.random.default_rng(seed)
    x = Tensor(rng.standard_normal((2, 5, 3, 4)), requires_grad=True)
    w = Tensor(rng.standard_normal((3, 5)), requires_grad=True)
    b = Tensor(rng.standard_normal(3), requires_grad=True)
    p = _proj(rng, (2, 3))

    def loss():
        return ops.mse(ops.linear(ops.global_avg_pool(x), w, b), p)

    _check(loss, [x, w, b])


@pytest.mark.parametrize("seed", SEEDS)
def test_bce_grad(seed):
    rng = np.random.default_rng(seed)
    z = Tensor(rng.standard_normal(9) * 3, requires_grad=True)
    labels = (rng.random(9) < 0.5).astype(np.float64)

    def loss():
        return ops.bce_with_logits(z, labels)

    _check(loss, [z])


@pytest.mark.parametrize("seed", SEEDS)
def test_mse_grad(seed):
    rng = np.random.default_rng(seed)
    a = Tensor(rng.standard_normal((4, 6)), requires_grad=True)
    t = Tensor(rng.standard_normal((4, 6)), requires_grad=True)

    def loss():
        return ops.mse(a, t)

    _check(loss, [a, t])


def test_backward_of_sum_is_ones():
    x = Tensor(np.arange(12, dtype=np.float64).reshape(3, 4), requires_grad=True)
    backward(ops.tsum(x))
    assert np.array_equal(x.grad, np.ones((3, 4)))


def test_mse_against_zero_gives_2v():
    v = 1.7
    x = Tensor(np.array([v]), requires_grad=True)
    backward(ops.mse(x, np.array([0.0])))
    assert abs(x.grad[0] - 2 * v) < 1e-12


def test_backward_rejects_non_scalar():
    x = Tensor(np.ones(3), requires_grad=True)
    y = ops.relu(x)
    with pytest.raises(ValidationError):
        backward(y)


def _to_float64(model):
    for p in model.param_list():
        p.data = p.data.astype(np.float64)


def _check_model_params(model, build_loss, rng, per_param=10):
    loss = build_loss()
    for p in model.param_list():
        p.zero_grad()
    backward(loss)
    for p in model.param_list():
        k = min(per_param, p.data.size)
        idx = rng.choice(p.data.size, size=k, replace=False)

        def value():
            with no_grad():
                return float(build_loss().data)

        num = central_diff_sampled(value, p.data, idx, h=H)
        assert rel_err(p.grad.reshape(-1)[idx], num) < TOL, p.name


@pytest.mark.parametrize("seed", [0, 1, 2])
def test_full_detector_graph(seed):
    rng = np.random.default_rng(seed)
    det = Detector(crop_size=16, seed=seed)
    _to_float64(det)
    x = rng.uniform(0.0, 1.0, (2, 3, 16, 16))
    labels = np.array([0.0, 1.0])

    def loss():
        return ops.bce_with_logits(det.logits(x), labels)

    _check_model_params(det, loss, rng)


@pytest.mark.parametrize("seed", [0, 1, 2])
def test_full_autoencoder_graph(seed):
    rng = np.random.default_rng(seed)
    ae = Autoencoder(seed=seed)
    _to_float64(ae)
    x = rng.uniform(0.0, 1.0, (1, 3, 16, 16))

    def loss():
        return ops.mse(ae.forward(Tensor(x)), x)

    _check_model_params(ae, loss, rng)
