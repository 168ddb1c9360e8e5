"""Training loops for the autoencoder and the detector.

Single-threaded gradient computation with seeded shuffling: a fixed
TrainConfig reproduces checkpoints bit for bit on the same build and
backend. Best-validation weights are what gets returned.
"""

from __future__ import annotations

import csv
import json
import logging
import math
from dataclasses import dataclass, field

import numpy as np

from . import ops
from .autodiff import Tensor, backward, no_grad
from .errors import ValidationError
from .models import Autoencoder, Detector
from .optim import LrSchedule, OptimizerState, adamw_step, lr_at_step, zero_grads

log = logging.getLogger(__name__)


@dataclass
class TrainConfig:
    epochs: int = 10
    batch_size: int = 32
    peak_lr: float = 1e-3
    weight_decay: float = 0.05
    warmup_steps: int = 200
    seed: int = 0
    val_frac: float = 0.1

    def __post_init__(self):
        if self.epochs < 1 or self.batch_size < 1:
            raise ValidationError("epochs and batch_size must be >= 1")
        if not 0 < self.val_frac < 1:
            raise ValidationError("val_frac must be in (0,1)")


@dataclass
class TrainHistory:
    step_losses: list[float] = field(default_factory=list)
    lrs: list[float] = field(default_factory=list)
    epoch_train_loss: list[float] = field(default_factory=list)
    epoch_val_loss: list[float] = field(default_factory=list)
    epoch_val_acc: list[float] = field(default_factory=list)
    best_epoch: int = -1

    def save(self, csv_path, summary_path) -> None:
        with open(csv_path, "w", newline="") as f:
            writer = csv.writer(f)
            writer.writerow(["step", "lr", "loss"])
            for i, (lr, loss) in enumerate(zip(self.lrs, self.step_losses), start=1):
                writer.writerow([i, f"{lr:.8g}", f"{loss:.8g}"])
        summary = {
            "epoch_train_loss": self.epoch_train_loss,
            "epoch_val_loss": self.epoch_val_loss,
            "epoch_val_acc": self.epoch_val_acc,
            "best_epoch": self.best_epoch,
            "steps": len(self.step_losses),
        }
        with open(summary_path, "w") as f:
            json.dump(summary, f, indent=2, sort_keys=True)
            f.write("\n")


def _split_indices(n: int, val_frac: float, rng: np.random.Generator):
    perm = rng.permutation(n)
    n_val = max(1, int(round(n * val_frac)))
    if n_val >= n:
        raise ValidationError(f"dataset of {n} too small for validation split")
    return perm[n_val:], perm[:n_val]


def _schedule(config: TrainConfig, steps_per_epoch: int) -> LrSchedule:
    total = config.epochs * steps_per_epoch
    if config.warmup_steps >= total:
        raise ValidationError(
            f"warmup_steps {config.warmup_steps} must be < total steps {total}"
        )
    return LrSchedule(config.warmup_steps, total, config.peak_lr)


def train_autoencoder(
    images01: np.ndarray, config: TrainConfig,
    latent_channels: int = 4, activation: str = "silu", init_seed: int = 0,
) -> tuple[Autoencoder, TrainHistory]:
    """Fit the autoencoder on (N,3,S,S) float32 images in [0,1] with MSE."""
    if images01.ndim != 4 or images01.shape[0] == 0:
        raise ValidationError("train_autoencoder needs a nonempty (N,3,S,S) array")
    if images01.shape[2] % Autoencoder.DOWNSAMPLE or images01.shape[3] % Autoencoder.DOWNSAMPLE:
        raise ValidationError("image dims must be divisible by the downsample factor")

    rng = np.random.default_rng(config.seed)
    train_idx, val_idx = _split_indices(images01.shape[0], config.val_frac, rng)
    x_val = images01[val_idx]
    steps_per_epoch = math.ceil(train_idx.size / config.batch_size)
    sched = _schedule(config, steps_per_epoch)

    model = Autoencoder(latent_channels=latent_channels, activation=activation,
                        seed=init_seed)
    params = model.param_list()
    state = OptimizerState(weight_decay=config.weight_decay)
    hist = TrainHistory()

    def val_loss() -> float:
        total, count = 0.0, 0
        with no_grad():
            for i0 in range(0, x_val.shape[0], config.batch_size):
                xb = x_val[i0:i0 + config.batch_size]
                loss = ops.mse(model.forward(Tensor(xb)), Tensor(xb))
                total += loss.item() * xb.shape[0]
                count += xb.shape[0]
        return total / count

    best = None
    step = 0
    for epoch in range(config.epochs):
        order = rng.permutation(train_idx)
        epoch_losses = []
        for i0 in range(0, order.size, config.batch_size):
            xb = images01[order[i0:i0 + config.batch_size]]
            xt = Tensor(xb)
            loss = ops.mse(model.forward(xt), xt)
            zero_grads(params)
            backward(loss)
            step += 1
            lr = lr_at_step(sched, step)
            adamw_step(params, state, lr)
            hist.step_losses.append(loss.item())
            hist.lrs.append(lr)
            epoch_losses.append(loss.item())
        hist.epoch_train_loss.append(float(np.mean(epoch_losses)))
        vl = val_loss()
        hist.epoch_val_loss.append(vl)
        if best is None or vl < best[0]:
            best = (vl, epoch, {k: p.data.copy() for k, p in model.params.items()})
        log.info("ae epoch %d: train %.5f val %.5f", epoch + 1,
                 hist.epoch_train_loss[-1], vl)

    hist.best_epoch = best[1]
    model.load_arrays(best[2])
    return model, hist


def train_detector(
    crops01: np.ndarray, labels: np.ndarray, config: TrainConfig,
    norm_mean, norm_std, init_seed: int = 0,
) -> tuple[Detector, TrainHistory]:
    """Fit the binary detector with BCE; label 1 = reconstructed."""
    if crops01.ndim != 4 or crops01.shape[0] == 0:
        raise ValidationError("train_detector needs a nonempty (N,3,S,S) array")
    labels = np.asarray(labels, dtype=np.float32)
    if labels.shape != (crops01.shape[0],):
        raise ValidationError("labels must be one per crop")
    if not np.all((labels == 0) | (labels == 1)):
        raise ValidationError("labels must be 0 or 1")
    if labels.min() == labels.max():
        raise ValidationError("detector training needs both classes present")

    rng = np.random.default_rng(config.seed)
    train_idx, val_idx = _split_indices(crops01.shape[0], config.val_frac, rng)
    steps_per_epoch = math.ceil(train_idx.size / config.batch_size)
    sched = _schedule(config, steps_per_epoch)

    model = Detector(crop_size=crops01.shape[2], seed=init_seed,
                     norm_mean=norm_mean, norm_std=norm_std)
    params = model.param_list()
    state = OptimizerState(weight_decay=config.weight_decay)
    hist = TrainHistory()

    def validate() -> tuple[float, float]:
        total, correct = 0.0, 0
        with no_grad():
            for i0 in range(0, val_idx.size, config.batch_size):
                idx = val_idx[i0:i0 + config.batch_size]
                logits = model.logits(crops01[idx])
                loss = ops.bce_with_logits(logits, labels[idx])
                total += loss.item() * idx.size
                correct += int(np.sum((logits.data > 0) == (labels[idx] == 1)))
        return total / val_idx.size, correct / val_idx.size

    best = None
    step = 0
    for epoch in range(config.epochs):
        order = rng.permutation(train_idx)
        epoch_losses = []
        for i0 in range(0, order.size, config.batch_size):
            idx = order[i0:i0 + config.batch_size]
            logits = model.logits(crops01[idx])
            loss = ops.bce_with_logits(logits, labels[idx])
            zero_grads(params)
            backward(loss)
            step += 1
            lr = lr_at_step(sched, step)
            adamw_step(params, state, lr)
            hist.step_losses.append(loss.item())
            hist.lrs.append(lr)
            epoch_losses.append(loss.item())
        hist.epoch_train_loss.append(float(np.mean(epoch_losses)))
        vl, acc = validate()
        hist.epoch_val_loss.append(vl)
        hist.epoch_val_acc.append(acc)
        if best is None or (acc, -vl) > (best[0], -best[1]):
            best = (acc, vl, epoch, {k: p.data.copy() for k, p in model.params.items()})
        log.info("detector epoch %d: train %.4f val %.4f acc %.4f",
                 epoch + 1, hist.epoch_train_loss[-1], vl, acc)

    hist.best_epoch = best[2]
    model.load_arrays(best[3])
    return model, hist


def evaluate_split(model: Detector, crops01: np.ndarray, labels: np.ndarray,
                   batch_size: int = 64) -> dict:
    """Per-class precision/recall/F1 at the 0.5 crop-level decision."""
    labels = np.asarray(labels)
    preds = np.empty(labels.shape[0], dtype=np.int64)
    with no_grad():
        for i0 in range(0, labels.shape[0], batch_size):
            logits = model.logits(crops01[i0:i0 + batch_size])
            preds[i0:i0 + logits.data.shape[0]] = (logits.data > 0).astype(np.int64)

    from .metrics import ConfusionCounts, metrics

    out = {}
    for cls_name, cls in (("original", 0), ("reconstructed", 1)):
        tp = int(np.sum((preds == cls) & (labels == cls)))
        fp = int(np.sum((preds == cls) & (labels != cls)))
        fn = int(np.sum((preds != cls) & (labels == cls)))
        tn = int(np.sum((preds != cls) & (labels != cls)))
        m = metrics(ConfusionCounts(tp=tp, fp=fp, fn=fn, tn=tn))
        out[cls_name] = {k: m[k] for k in ("precision", "recall", "f1")}
    out["accuracy"] = float(np.mean(preds == labels))
    return out
