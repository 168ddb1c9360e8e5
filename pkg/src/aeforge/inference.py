"""Crop-sampled inference and threshold calibration.

An image verdict averages detector probabilities over `tries` random
crops and compares strictly against the threshold: 1 means not
original. Per-image crop seeds derive from (global seed, relative
path), so batch evaluation order and parallelism cannot change results.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field

import numpy as np

from .crops import CropSpec, crop_corners
from .errors import ValidationError
from .image import ImageRGB8
from .models import Detector, detector_prob
from .resize import resize_bilinear
from .seeds import stable_seed

log = logging.getLogger(__name__)

BATCH_TRIES = 10  # the "10 tries" protocol


@dataclass(frozen=True)
class DecisionConfig:
    tries: int = 10
    threshold: float = 0.5
    crop_size: int = 32
    seed: int = 0
    upscale_small: bool = False

    def __post_init__(self):
        if self.tries < 1:
            raise ValidationError(f"tries must be >= 1, got {self.tries}")
        if not 0 < self.threshold < 1:
            raise ValidationError(f"threshold must be in (0,1), got {self.threshold}")


@dataclass
class Verdict:
    decision: int
    aggregate: float
    probs: list[float]
    corners: list[tuple[int, int]]
    upscaled: bool = False

    def to_json_dict(self) -> dict:
        return {
            "decision": self.decision,
            "aggregate": self.aggregate,
            "crops": [
                {"x": x, "y": y, "prob": p}
                for (x, y), p in zip(self.corners, self.probs)
            ],
            "upscaled": self.upscaled,
        }


def derive_seed(global_seed: int, path: str) -> int:
    """Stable 63-bit per-image seed from the manifest-relative path."""
    return stable_seed(global_seed, path)


def _score_crops(image: ImageRGB8, scorer, size: int, count: int, seed: int):
    corners = crop_corners(image.width, image.height, CropSpec(size, count, seed))
    batch = np.empty((count, 3, size, size), dtype=np.float32)
    for i, (x, y) in enumerate(corners):
        crop = image.pixels[y:y + size, x:x + size]
        batch[i] = crop.astype(np.float32).transpose(2, 0, 1) / 255.0
    if isinstance(scorer, Detector):
        probs = detector_prob(scorer, batch)
    else:
        probs = np.asarray(scorer(batch), dtype=np.float64)
    return corners, [float(p) for p in probs]


def decide(image: ImageRGB8, scorer, config: DecisionConfig) -> Verdict:
    """Score `tries` seeded crops and compare their mean against t.

    `scorer` is a Detector or any callable mapping a (N,3,s,s) [0,1]
    batch to per-crop probabilities.
    """
    upscaled = False
    if min(image.width, image.height) < config.crop_size:
        if not config.upscale_small:
            raise ValidationError(
                f"image {image.width}x{image.height} smaller than crop size "
                f"{config.crop_size} (enable upscale_small to resize up)"
            )
        scale = config.crop_size / min(image.width, image.height)
        image = resize_bilinear(image, scale)
        upscaled = True

    corners, probs = _score_crops(image, scorer, config.crop_size,
                                  config.tries, config.seed)
    aggregate = float(np.mean(probs))
    return Verdict(
        decision=int(aggregate > config.threshold),
        aggregate=aggregate,
        probs=probs,
        corners=corners,
        upscaled=upscaled,
    )


@dataclass
class CalibrationResult:
    threshold: float
    fpr: float
    recall: float
    fpr_target: float


def calibrate_threshold(
    val_scores_original, val_scores_reconstructed, fpr_target: float,
) -> CalibrationResult:
    """Smallest candidate threshold whose validation FPR meets the target.

    Candidates are every distinct observed score plus the midpoints
    between consecutive ones; decisions are strict (score > t). FPR is
    non-increasing in t, so the first qualifying candidate maximizes
    recall subject to the constraint.
    """
    orig = np.asarray(val_scores_original, dtype=np.float64)
    recon = np.asarray(val_scores_reconstructed, dtype=np.float64)
    if orig.size == 0 or recon.size == 0:
        raise ValidationError("calibration needs scores from both classes")

    distinct = np.unique(np.concatenate([orig, recon]))
    candidates = np.unique(np.concatenate([distinct, (distinct[:-1] + distinct[1:]) / 2]))

    if fpr_target < 0:
        t = float(distinct[-1])
        log.warning("fpr_target %g < 0 is unattainable; using max score %g",
                    fpr_target, t)
        return CalibrationResult(t, float(np.mean(orig > t)),
                                 float(np.mean(recon > t)), fpr_target)

    for t in candidates:
        fpr = float(np.mean(orig > t))
        if fpr <= fpr_target:
            return CalibrationResult(float(t), fpr, float(np.mean(recon > t)),
                                     fpr_target)
    raise AssertionError("unreachable: max score always has FPR 0")


@dataclass
class SourceResult:
    label: str  # "original" or "reconstructed"
    n: int = 0
    decisions_1try: list[int] = field(default_factory=list)
    decisions_10tries: list[int] = field(default_factory=list)
    scores_1try: list[float] = field(default_factory=list)
    scores_10tries: list[float] = field(default_factory=list)

    def rate(self, mode: str) -> float:
        dec = self.decisions_1try if mode == "1try" else self.decisions_10tries
        return float(np.mean(dec)) if dec else float("nan")


def batch_decide(entries, root, scorer, config: DecisionConfig) -> tuple[dict, list]:
    """Per-source decision table in both 1-try and 10-tries modes.

    The 10 crops per image are drawn once from the path-derived seed;
    1-try scores the first of them. Returns ({source: SourceResult},
    per-item errors).
    """
    from .image import load_ppm

    results: dict[str, SourceResult] = {}
    errors = []
    for entry in entries:
        source = entry["source"]
        res = results.get(source)
        if res is None:
            res = results[source] = SourceResult(label=entry["label"])
        try:
            image = load_ppm(root / entry["path"])
            seed = derive_seed(config.seed, entry["path"])
            _, probs = _score_crops(image, scorer, config.crop_size,
                                    BATCH_TRIES, seed)
        except Exception as exc:  # per-item failure, run continues
            errors.append({"path": entry["path"], "error": str(exc)})
            log.warning("batch_decide: %s failed: %s", entry["path"], exc)
            continue
        agg10 = float(np.mean(probs))
        res.n += 1
        res.scores_1try.append(probs[0])
        res.scores_10tries.append(agg10)
        res.decisions_1try.append(int(probs[0] > config.threshold))
        res.decisions_10tries.append(int(agg10 > config.threshold))
    return results, errors
