import math

import numpy as np
import pytest

from aeforge.autodiff import Parameter
from aeforge.errors import ValidationError
from aeforge.optim import LrSchedule, OptimizerState, adamw_step, lr_at_step
from oracles import adamw_scalar_reference


def _param(value, name="p"):
    return Parameter(np.array([value], dtype=np.float64), name)


def test_decay_only_when_gradient_is_zero():
    p = _param(1.0)
    p.grad = np.zeros(1)
    state = OptimizerState(weight_decay=0.05)
    adamw_step([p], state, lr=0.1)
    assert abs(p.data[0] - 0.995) < 1e-12
    assert np.all(state.m["p"] == 0) and np.all(state.v["p"] == 0)


def test_single_step_constant_gradient_hand_computed():
    # fresh state, g=1, wd=0: bias-corrected update is g/(sqrt(g^2)+eps)
    p = _param(3.0)
    p.grad = np.ones(1)
    state = OptimizerState(weight_decay=0.0)
    adamw_step([p], state, lr=0.01)
    expected = 3.0 - 0.01 * (1.0 / (1.0 + 1e-8))
    assert abs(p.data[0] - expected) < 1e-14


def test_two_steps_match_scalar_reference():
    grads = [0.7, -1.3]
    lrs = [0.05, 0.03]
    p = _param(0.4)
    state = OptimizerState(weight_decay=0.05)
    for g, lr in zip(grads, lrs):
        p.grad = np.array([g])
        adamw_step([p], state, lr)
    ref = adamw_scalar_reference(0.4, grads, lrs, wd=0.05)
    assert abs(p.data[0] - ref) < 1e-10
    assert state.step_count == 2


def test_missing_gradient_raises():
    p = _param(1.0)
    with pytest.raises(ValidationError):
        adamw_step([p], OptimizerState(), lr=0.1)


def test_non_finite_gradient_raises():
    p = _param(1.0)
    p.grad = np.array([np.nan])
    with pytest.raises(ValidationError):
        adamw_step([p], OptimizerState(), lr=0.1)


def test_quadratic_loss_decreases_monotonically_after_moment_warmup():
    # minimize (theta-2)^2 with wd=0
    p = _param(10.0)
    state = OptimizerState(weight_decay=0.0)
    losses = []
    for _ in range(40):
        losses.append((p.data[0] - 2.0) ** 2)
        p.grad = 2.0 * (p.data - 2.0)
        adamw_step([p], state, lr=0.05)
    losses.append((p.data[0] - 2.0) ** 2)
    for a, b in zip(losses[3:], losses[4:]):
        assert b < a


def test_lr_schedule_shape():
    s = LrSchedule(warmup_steps=100, total_steps=400, peak_lr=2e-3)
    assert lr_at_step(s, 0) == 0.0
    assert lr_at_step(s, 100) == pytest.approx(2e-3)
    assert lr_at_step(s, 50) == pytest.approx(1e-3)
    assert lr_at_step(s, 250) == pytest.approx(1e-3)  # cos(pi/2) midpoint
    assert lr_at_step(s, 400) == pytest.approx(0.0, abs=1e-18)


def test_lr_schedule_continuous_at_warmup():
    s = LrSchedule(warmup_steps=137, total_steps=1000, peak_lr=7e-4)
    before = lr_at_step(s, 136)
    at = lr_at_step(s, 137)
    after = lr_at_step(s, 138)
    assert abs(at - s.peak_lr) < 1e-15
    assert at - before < s.peak_lr / 100
    assert at - after < s.peak_lr * (math.pi / (2 * 863)) ** 1  # small first decay step


def test_lr_schedule_clamps_past_total_with_warning(caplog):
    s = LrSchedule(warmup_steps=10, total_steps=20, peak_lr=1.0)
    with caplog.at_level("WARNING"):
        assert lr_at_step(s, 25) == 0.0
    assert any("clamping" in r.message for r in caplog.records)


def test_lr_schedule_validation():
    with pytest.raises(ValidationError):
        LrSchedule(warmup_steps=0, total_steps=10, peak_lr=1.0)
    with pytest.raises(ValidationError):
        LrSchedule(warmup_steps=10, total_steps=10, peak_lr=1.0)
    with pytest.raises(ValidationError):
        LrSchedule(warmup_steps=1, total_steps=10, peak_lr=0.0)
