"""AdamW with decoupled weight decay, plus the warmup/cosine LR schedule."""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field

import numpy as np

from .autodiff import Parameter
from .errors import ValidationError

log = logging.getLogger(__name__)


@dataclass
class LrSchedule:
    warmup_steps: int
    total_steps: int
    peak_lr: float

    def __post_init__(self):
        if not (0 < self.warmup_steps < self.total_steps):
            raise ValidationError(
                f"need 0 < warmup_steps < total_steps, got {self.warmup_steps}/{self.total_steps}"
            )
        if self.peak_lr <= 0:
            raise ValidationError("peak_lr must be positive")


def lr_at_step(schedule: LrSchedule, step: int) -> float:
    """Linear warmup from 0 to peak, then cosine decay to 0."""
    if step < 0:
        raise ValidationError(f"negative step {step}")
    if step > schedule.total_steps:
        log.warning("lr_at_step: step %d past total %d, clamping to 0",
                    step, schedule.total_steps)
        return 0.0
    if step < schedule.warmup_steps:
        return schedule.peak_lr * step / schedule.warmup_steps
    frac = (step - schedule.warmup_steps) / (schedule.total_steps - schedule.warmup_steps)
    return schedule.peak_lr * 0.5 * (1.0 + math.cos(math.pi * frac))


@dataclass
class OptimizerState:
    """Per-parameter first/second moments plus AdamW hyperparameters."""

    weight_decay: float = 0.05
    beta1: float = 0.9
    beta2: float = 0.999
    eps: float = 1e-8
    step_count: int = 0
    m: dict = field(default_factory=dict)
    v: dict = field(default_factory=dict)


def adamw_step(params: list[Parameter], state: OptimizerState, lr: float) -> None:
    """One decoupled-weight-decay Adam update, in place.

    Weight decay multiplies parameters by (1 - lr*wd) before the
    bias-corrected moment update is subtracted.
    """
    state.step_count += 1
    t = state.step_count
    bc1 = 1.0 - state.beta1 ** t
    bc2 = 1.0 - state.beta2 ** t
    for p in params:
        if p.grad is None:
            raise ValidationError(f"adamw_step: parameter {p.name!r} has no gradient")
        g = p.grad
        if not np.all(np.isfinite(g)):
            raise ValidationError(f"adamw_step: non-finite gradient for {p.name!r}")
        m = state.m.get(p.name)
        if m is None:
            m = state.m[p.name] = np.zeros_like(p.data)
            state.v[p.name] = np.zeros_like(p.data)
        v = state.v[p.name]
        m *= state.beta1
        m += (1.0 - state.beta1) * g
        v *= state.beta2
        v += (1.0 - state.beta2) * (g * g)
        if state.weight_decay:
            p.data *= 1.0 - lr * state.weight_decay
        p.data -= lr * (m / bc1) / (np.sqrt(v / bc2) + state.eps)


def zero_grads(params: list[Parameter]) -> None:
    for p in params:
        p.zero_grad()
