"""Differentiable operations: layers, activations, losses.

All functions take and return Tensors and participate in the autodiff
graph. Convolutions dispatch to the selected kernel backend; everything
else is plain vectorized numpy.
"""

from __future__ import annotations

import numpy as np

from . import backend
from .autodiff import Tensor, make_node
from .errors import ValidationError


def _stable_sigmoid(z: np.ndarray) -> np.ndarray:
    out = np.empty_like(z)
    pos = z >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-z[pos]))
    ez = np.exp(z[~pos])
    out[~pos] = ez / (1.0 + ez)
    return out


def conv2d(x: Tensor, w: Tensor, b: Tensor, stride: int = 1, padding: int = 0) -> Tensor:
    """Cross-correlation of NCHW input with OIHW weights plus bias."""
    if x.data.ndim != 4 or w.data.ndim != 4:
        raise ValidationError("conv2d expects 4-d input and weight")
    n, cin, h, wd = x.data.shape
    cout, wcin, kh, kw = w.data.shape
    if wcin != cin:
        raise ValidationError(f"conv2d channel mismatch: input {cin}, weight {wcin}")
    if b.data.shape != (cout,):
        raise ValidationError(f"conv2d bias must have shape ({cout},)")
    if stride < 1 or padding < 0:
        raise ValidationError("conv2d needs stride >= 1 and padding >= 0")
    if h + 2 * padding < kh or wd + 2 * padding < kw:
        raise ValidationError(
            f"conv2d kernel {kh}x{kw} does not fit padded input {h + 2 * padding}x{wd + 2 * padding}"
        )

    out = backend.conv2d_forward(x.data, w.data, b.data, stride, padding)
    x_shape, w_shape = x.data.shape, w.data.shape
    xd, wd_ = x.data, w.data
    return make_node(out, (
        (x, lambda g: backend.conv2d_grad_input(g, wd_, x_shape, stride, padding)),
        (w, lambda g: backend.conv2d_grad_weight(g, xd, w_shape, stride, padding)),
        (b, lambda g: g.sum(axis=(0, 2, 3))),
    ))


def upsample_nearest2x(x: Tensor) -> Tensor:
    """Replicate each pixel into a 2x2 block."""
    n, c, h, w = x.data.shape
    out = np.broadcast_to(
        x.data[:, :, :, None, :, None], (n, c, h, 2, w, 2)
    ).reshape(n, c, 2 * h, 2 * w).copy()

    def vjp(g):
        return g.reshape(n, c, h, 2, w, 2).sum(axis=(3, 5))

    return make_node(out, ((x, vjp),))


def relu(x: Tensor) -> Tensor:
    mask = x.data > 0
    return make_node(x.data * mask, ((x, lambda g: g * mask),))


def silu(x: Tensor) -> Tensor:
    s = _stable_sigmoid(x.data)
    xd = x.data
    return make_node(xd * s, ((x, lambda g: g * (s * (1.0 + xd * (1.0 - s)))),))


def sigmoid(x: Tensor) -> Tensor:
    s = _stable_sigmoid(x.data)
    return make_node(s, ((x, lambda g: g * s * (1.0 - s)),))


def global_avg_pool(x: Tensor) -> Tensor:
    """NCHW -> NC mean over the spatial grid."""
    n, c, h, w = x.data.shape
    out = x.data.mean(axis=(2, 3))

    def vjp(g):
        return np.broadcast_to(g[:, :, None, None] / (h * w), (n, c, h, w)).copy()

    return make_node(out, ((x, vjp),))


def linear(x: Tensor, w: Tensor, b: Tensor) -> Tensor:
    """x (N,Cin) @ w (Cout,Cin)^T + b."""
    if x.data.ndim != 2 or w.data.ndim != 2 or x.data.shape[1] != w.data.shape[1]:
        raise ValidationError(
            f"linear shape mismatch: x {x.data.shape}, w {w.data.shape}"
        )
    out = x.data @ w.data.T + b.data
    xd, wd = x.data, w.data
    return make_node(out, (
        (x, lambda g: g @ wd),
        (w, lambda g: g.T @ xd),
        (b, lambda g: g.sum(axis=0)),
    ))


def bce_with_logits(logits: Tensor, labels) -> Tensor:
    """Mean binary cross-entropy, computed in the log-sum-exp form."""
    y = labels.data if isinstance(labels, Tensor) else np.asarray(labels)
    y = y.astype(logits.data.dtype)
    if y.shape != logits.data.shape:
        raise ValidationError(
            f"bce label shape {y.shape} != logit shape {logits.data.shape}"
        )
    if not np.all((y == 0) | (y == 1)):
        raise ValidationError("bce labels must be 0 or 1")
    z = logits.data
    loss = np.maximum(z, 0) - z * y + np.log1p(np.exp(-np.abs(z)))
    out = np.asarray(loss.mean(), dtype=z.dtype)
    n = z.size

    def vjp(g):
        return g * (_stable_sigmoid(z) - y) / n

    node = make_node(out, ((logits, vjp),))
    node.assert_finite("bce loss")
    return node


def mse(pred: Tensor, target) -> Tensor:
    """Mean squared difference."""
    t = target if isinstance(target, Tensor) else Tensor(np.asarray(target))
    if t.data.shape != pred.data.shape:
        raise ValidationError(
            f"mse shape mismatch: pred {pred.data.shape}, target {t.data.shape}"
        )
    diff = pred.data - t.data
    out = np.asarray((diff * diff).mean(), dtype=pred.data.dtype)
    n = diff.size
    node = make_node(out, (
        (pred, lambda g: g * 2.0 * diff / n),
        (t, lambda g: g * (-2.0) * diff / n),
    ))
    node.assert_finite("mse loss")
    return node


def tsum(x: Tensor) -> Tensor:
    """Sum of all elements (scalar)."""
    shape = x.data.shape
    out = np.asarray(x.data.sum(), dtype=x.data.dtype)
    return make_node(out, ((x, lambda g: np.broadcast_to(g, shape).copy()),))
