"""Reverse-mode autodiff on numpy arrays.

A Tensor wraps a float32/float64 ndarray plus an optional gradient.
Operations (see ops.py) record their parents and vector-Jacobian
products on the output tensor; backward() replays them in reverse
topological order. Training runs in float32; gradient checks build
float64 graphs through the same code path.
"""

from __future__ import annotations

import contextlib

import numpy as np

from .errors import ValidationError

_grad_enabled = True


@contextlib.contextmanager
def no_grad():
    """Disable graph recording (inference fast path)."""
    global _grad_enabled
    prev = _grad_enabled
    _grad_enabled = False
    try:
        yield
    finally:
        _grad_enabled = prev


def grad_enabled() -> bool:
    return _grad_enabled


class Tensor:
    __slots__ = ("data", "grad", "requires_grad", "_entries")

    def __init__(self, data, requires_grad: bool = False):
        arr = np.asarray(data)
        if arr.dtype not in (np.float32, np.float64):
            arr = arr.astype(np.float32)
        self.data = arr
        self.grad = None
        self.requires_grad = requires_grad
        # (parent, vjp) pairs; empty for leaves
        self._entries = ()

    @property
    def shape(self):
        return self.data.shape

    @property
    def dtype(self):
        return self.data.dtype

    def item(self) -> float:
        return float(self.data)

    def zero_grad(self) -> None:
        self.grad = np.zeros_like(self.data)

    def assert_finite(self, what: str = "tensor") -> None:
        if not np.all(np.isfinite(self.data)):
            raise ValidationError(f"non-finite values in {what}")

    def __repr__(self):
        return f"Tensor(shape={self.data.shape}, dtype={self.data.dtype}, requires_grad={self.requires_grad})"


class Parameter(Tensor):
    """Trainable leaf tensor with a model-unique name path."""

    __slots__ = ("name",)

    def __init__(self, data, name: str):
        super().__init__(data, requires_grad=True)
        self.name = name

    def __repr__(self):
        return f"Parameter({self.name!r}, shape={self.data.shape})"


def make_node(data, entries) -> Tensor:
    """Wrap an op result, recording (parent, vjp) edges when grads are on."""
    out = Tensor(data)
    if _grad_enabled:
        live = tuple((p, vjp) for p, vjp in entries if p.requires_grad)
        if live:
            out.requires_grad = True
            out._entries = live
    return out


def backward(loss: Tensor) -> None:
    """Accumulate dloss/dparam into .grad for every reachable leaf.

    The loss must be scalar and finite. Leaves keep any pre-existing
    .grad and have the new gradient added, so zero the parameters
    between steps.
    """
    if loss.data.size != 1:
        raise ValidationError(
            f"backward needs a scalar loss, got shape {loss.data.shape}"
        )
    if not np.all(np.isfinite(loss.data)):
        raise ValidationError("backward called on a non-finite loss")

    topo: list[Tensor] = []
    seen = set()
    stack: list[tuple[Tensor, bool]] = [(loss, False)]
    while stack:
        node, expanded = stack.pop()
        if expanded:
            topo.append(node)
            continue
        if id(node) in seen:
            continue
        seen.add(id(node))
        stack.append((node, True))
        for parent, _ in node._entries:
            if id(parent) not in seen:
                stack.append((parent, False))

    grads: dict[int, np.ndarray] = {id(loss): np.ones_like(loss.data)}
    for node in reversed(topo):
        g = grads.pop(id(node), None)
        if g is None:
            continue
        if node._entries:
            for parent, vjp in node._entries:
                contrib = vjp(g)
                acc = grads.get(id(parent))
                if acc is None:
                    grads[id(parent)] = contrib
                else:
                    acc += contrib
        elif node.requires_grad:
            if node.grad is None:
                node.grad = g.copy()
            else:
                node.grad += g
