"""Run profiles: the reproducible desk scale and the paper-shape scale.

`desk` runs the whole pipeline in minutes on a CPU. `paper-shape` keeps
the published hyperparameters (256px crops, 5e-6 peak LR, 5000 warmup
steps); it is runnable but there is no expectation of matching
published numbers without the original data. Buckets whose smallest
sampled side would undercut the crop size are omitted from paper-shape.
"""

from __future__ import annotations

import copy
import json
from pathlib import Path

from .errors import ValidationError

DESK = {
    "profile": "desk",
    "seed": 7,
    "crop_size": 32,
    "scenes": {"count": 2000, "size": 64},
    "ae": {
        "epochs": 5, "batch_size": 32, "peak_lr": 1e-3, "weight_decay": 0.05,
        "warmup_steps": 100, "val_frac": 0.1,
        "latent_channels": 4, "activation": "silu",
    },
    "holdout_aes": [
        {"id": "holdout-b", "latent_channels": 8, "activation": "silu",
         "epochs": 3, "warmup_steps": 40},
        {"id": "holdout-c", "latent_channels": 4, "activation": "relu",
         "epochs": 3, "warmup_steps": 40},
    ],
    "corpus": {
        "count": 2000,
        "buckets": [[64, 96], [96, 128], [128, 192], [192, 256]],
        "weights": [4, 3, 2, 1],
        "train_frac": 0.75,
    },
    "holdout": {
        "originals_count": 240, "high_res_count": 80, "per_ae_count": 160,
        "small_count": 60, "small_size": 40,
        "buckets": [[64, 96], [96, 128]], "weights": [3, 1],
        "high_res_bucket": [192, 256],
    },
    "detector": {
        "epochs": 10, "batch_size": 32, "peak_lr": 1e-3, "weight_decay": 0.05,
        "warmup_steps": 200, "val_frac": 0.1,
    },
    "calibration": {"fpr_target": 0.001},
    "robustness": {"jpeg_qualities": [90, 80], "resize_scales": [0.75, 0.5]},
    "artifacts": {"card_size": 128, "jpeg_qualities": [100, 95, 75, 50]},
}

PAPER_SHAPE = {
    "profile": "paper-shape",
    "seed": 7,
    "crop_size": 256,
    "scenes": {"count": 2000, "size": 256},
    "ae": {
        "epochs": 10, "batch_size": 32, "peak_lr": 5e-6, "weight_decay": 0.05,
        "warmup_steps": 5000, "val_frac": 0.1,
        "latent_channels": 4, "activation": "silu",
    },
    "holdout_aes": [
        {"id": "holdout-b", "latent_channels": 8, "activation": "silu",
         "epochs": 10, "warmup_steps": 5000},
        {"id": "holdout-c", "latent_channels": 4, "activation": "relu",
         "epochs": 10, "warmup_steps": 5000},
    ],
    "corpus": {
        "count": 2000,
        "buckets": [[400, 500], [600, 700], [800, 900], [900, 1000]],
        "weights": [4, 3, 2, 1],
        "train_frac": 0.75,
    },
    "holdout": {
        "originals_count": 240, "high_res_count": 80, "per_ae_count": 160,
        "small_count": 60, "small_size": 256,
        "buckets": [[400, 500], [600, 700]], "weights": [3, 1],
        "high_res_bucket": [2500, 3000],
    },
    "detector": {
        "epochs": 10, "batch_size": 32, "peak_lr": 5e-6, "weight_decay": 0.05,
        "warmup_steps": 5000, "val_frac": 0.1,
    },
    "calibration": {"fpr_target": 0.001},
    "robustness": {"jpeg_qualities": [90, 80], "resize_scales": [0.75, 0.5]},
    "artifacts": {"card_size": 512, "jpeg_qualities": [100, 95, 75, 50]},
}

PROFILES = {"desk": DESK, "paper-shape": PAPER_SHAPE}


def _deep_merge(base: dict, override: dict) -> dict:
    out = copy.deepcopy(base)
    for key, value in override.items():
        if isinstance(value, dict) and isinstance(out.get(key), dict):
            out[key] = _deep_merge(out[key], value)
        else:
            out[key] = copy.deepcopy(value)
    return out


def load_run_config(profile: str = "desk", config_file=None,
                    overrides: dict | None = None) -> dict:
    """Profile defaults, overlaid by a JSON config file, then CLI overrides."""
    if profile not in PROFILES:
        raise ValidationError(f"unknown profile {profile!r}; have {sorted(PROFILES)}")
    cfg = copy.deepcopy(PROFILES[profile])
    if config_file is not None:
        try:
            user = json.loads(Path(config_file).read_text())
        except json.JSONDecodeError as exc:
            raise ValidationError(f"{config_file}: invalid JSON: {exc}") from exc
        if not isinstance(user, dict):
            raise ValidationError(f"{config_file}: config must be a JSON object")
        cfg = _deep_merge(cfg, user)
    if overrides:
        cfg = _deep_merge(cfg, {k: v for k, v in overrides.items() if v is not None})
    return cfg
