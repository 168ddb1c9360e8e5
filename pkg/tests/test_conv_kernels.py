"""Convolution kernels against the nested-loop oracle, on both backends."""

import numpy as np
import pytest

from aeforge import _numpy_kernels
from oracles import conv2d_reference

try:
    from aeforge import _numba_kernels
    BACKENDS = [("numpy", _numpy_kernels), ("numba", _numba_kernels)]
except ImportError:
    BACKENDS = [("numpy", _numpy_kernels)]


def _random_config(rng):
    kh = int(rng.integers(1, 4))
    kw = int(rng.integers(1, 4))
    stride = int(rng.integers(1, 4))
    pad = int(rng.integers(0, 3))
    n = int(rng.integers(1, 3))
    cin = int(rng.integers(1, 5))
    cout = int(rng.integers(1, 5))
    h = int(rng.integers(max(1, kh - 2 * pad), 10))
    w = int(rng.integers(max(1, kw - 2 * pad), 10))
    # keep the kernel inside the padded input
    h = max(h, kh - 2 * pad)
    w = max(w, kw - 2 * pad)
    x = rng.standard_normal((n, cin, h, w))
    wt = rng.standard_normal((cout, cin, kh, kw))
    b = rng.standard_normal(cout)
    return x, wt, b, stride, pad


@pytest.mark.parametrize("name,kernels", BACKENDS)
def test_forward_matches_nested_loop_50_configs(name, kernels):
    rng = np.random.default_rng(1234)
    for _ in range(50):
        x, w, b, stride, pad = _random_config(rng)
        ref = conv2d_reference(x, w, b, stride, pad)
        got = kernels.conv2d_forward(x, w, b, stride, pad)
        assert got.shape == ref.shape
        assert np.max(np.abs(got - ref)) <= 1e-6


@pytest.mark.parametrize("name,kernels", BACKENDS)
def test_identity_1x1_kernel(name, kernels):
    rng = np.random.default_rng(0)
    x = rng.standard_normal((2, 1, 5, 7))
    w = np.ones((1, 1, 1, 1))
    b = np.zeros(1)
    out = kernels.conv2d_forward(x, w, b, 1, 0)
    assert np.array_equal(out, x)


@pytest.mark.parametrize("name,kernels", BACKENDS)
def test_all_ones_3x3_sums_to_nine(name, kernels):
    x = np.ones((1, 1, 3, 3))
    w = np.ones((1, 1, 3, 3))
    b = np.zeros(1)
    out = kernels.conv2d_forward(x, w, b, 1, 0)
    assert out.shape == (1, 1, 1, 1)
    assert out[0, 0, 0, 0] == 9.0


@pytest.mark.parametrize("name,kernels", BACKENDS)
def test_gradients_match_reference_via_transpose_trick(name, kernels):
    # grad wrt input of conv(x, w) with upstream g equals the analytic
    # adjoint; cross-check both grads against the loop oracle applied to
    # perturbed forwards (dot-product test).
    rng = np.random.default_rng(7)
    for _ in range(10):
        x, w, b, stride, pad = _random_config(rng)
        out = kernels.conv2d_forward(x, w, b, stride, pad)
        g = rng.standard_normal(out.shape)
        gx = kernels.conv2d_grad_input(g, w, x.shape, stride, pad)
        gw = kernels.conv2d_grad_weight(g, x, w.shape, stride, pad)
        # <g, conv(dx, w)> == <gx, dx> and <g, conv(x, dw)> == <gw, dw>
        dx = rng.standard_normal(x.shape)
        dw = rng.standard_normal(w.shape)
        zero_b = np.zeros_like(b)
        lhs_x = np.sum(g * conv2d_reference(dx, w, zero_b, stride, pad))
        lhs_w = np.sum(g * conv2d_reference(x, dw, zero_b, stride, pad))
        assert abs(lhs_x - np.sum(gx * dx)) <= 1e-8 * max(1.0, abs(lhs_x))
        assert abs(lhs_w - np.sum(gw * dw)) <= 1e-8 * max(1.0, abs(lhs_w))


def test_backends_agree_on_float32_training_shapes():
    if len(BACKENDS) < 2:
        pytest.skip("numba backend unavailable")
    rng = np.random.default_rng(3)
    shapes = [
        ((4, 3, 16, 16), (8, 3, 3, 3), 2, 1),
        ((2, 8, 8, 8), (4, 8, 3, 3), 1, 1),
        ((2, 8, 8, 8), (3, 8, 1, 1), 1, 0),
    ]
    for xs, ws, stride, pad in shapes:
        x = rng.standard_normal(xs).astype(np.float32)
        w = rng.standard_normal(ws).astype(np.float32)
        b = rng.standard_normal(ws[0]).astype(np.float32)
        a = _numpy_kernels.conv2d_forward(x, w, b, stride, pad)
        c = _numba_kernels.conv2d_forward(x, w, b, stride, pad)
        assert np.allclose(a, c, atol=1e-4, rtol=1e-4)
