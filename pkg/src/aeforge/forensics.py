"""Robustness sweeps and the test-card artifact analysis."""

from __future__ import annotations

import logging
from pathlib import Path

import numpy as np

from .colorstats import bw_fraction, color_randomize, unique_colors
from .errors import ValidationError
from .image import ImageRGB8, load_ppm, save_ppm
from .inference import BATCH_TRIES, DecisionConfig, _score_crops, derive_seed
from .jpegdct import jpeg_degrade
from .models import Autoencoder, ae_reconstruct
from .resize import resize_bilinear, scaled_dim
from .seeds import stable_seed

log = logging.getLogger(__name__)


def transform_list(jpeg_qualities=(90, 80), resize_scales=(0.75, 0.5)):
    transforms = [("none", ("none", None))]
    for q in jpeg_qualities:
        transforms.append((f"jpeg{q}", ("jpeg", int(q))))
    for s in resize_scales:
        transforms.append((f"resize{round(s * 100)}", ("resize", float(s))))
    return transforms


def _apply(image: ImageRGB8, op) -> ImageRGB8:
    kind, arg = op
    if kind == "none":
        return image
    if kind == "jpeg":
        return jpeg_degrade(image, arg)
    return resize_bilinear(image, arg)


def robustness_sweep(entries, root, scorer, config: DecisionConfig,
                     jpeg_qualities=(90, 80), resize_scales=(0.75, 0.5)) -> dict:
    """Per (source, transform) decision rates in 10-tries mode.

    Transforms apply to the full image before crop sampling. A resize
    cell is skipped with a recorded reason when any image of the source
    would fall below the crop size.
    """
    root = Path(root)
    transforms = transform_list(jpeg_qualities, resize_scales)

    by_source: dict[str, list] = {}
    errors = []
    for entry in entries:
        try:
            image = load_ppm(root / entry["path"])
        except Exception as exc:
            errors.append({"path": entry["path"], "error": str(exc)})
            continue
        by_source.setdefault(entry["source"], []).append((entry, image))

    grid: dict[str, dict] = {}
    for source, items in by_source.items():
        label = items[0][0]["label"]
        cells = {}
        for tname, op in transforms:
            if op[0] == "resize":
                too_small = [
                    e["path"] for e, img in items
                    if scaled_dim(img.width, op[1]) < config.crop_size
                    or scaled_dim(img.height, op[1]) < config.crop_size
                ]
                if too_small:
                    reason = (
                        f"resize {round(op[1] * 100)}% drops {len(too_small)} of "
                        f"{len(items)} images below crop size {config.crop_size}"
                    )
                    cells[tname] = {"skipped": reason, "tries10": None, "try1": None}
                    log.info("robustness: skipping %s/%s: %s", source, tname, reason)
                    continue
            dec1, dec10 = [], []
            for entry, image in items:
                transformed = _apply(image, op)
                seed = derive_seed(config.seed, entry["path"])
                _, probs = _score_crops(transformed, scorer, config.crop_size,
                                        BATCH_TRIES, seed)
                dec1.append(int(probs[0] > config.threshold))
                dec10.append(int(np.mean(probs) > config.threshold))
            cells[tname] = {
                "skipped": None,
                "try1": float(np.mean(dec1)),
                "tries10": float(np.mean(dec10)),
            }
        grid[source] = {
            "label": label,
            "metric": "fpr" if label == "original" else "tpr",
            "n": len(items),
            "cells": cells,
        }
    return {"grid": grid, "errors": errors}


def artifact_report(card: ImageRGB8, autoencoders: list[tuple[str, Autoencoder]],
                    jpeg_qualities=(100, 95, 75, 50), viz_dir=None,
                    viz_seed: int = 0) -> dict:
    """Unique-color and B/W-pixel table for the two-color test card.

    Rows: the card itself, JPEG degradations of it, and each
    autoencoder's reconstruction. Non-JPEG rows also get JPEG-85 and
    resize-50% columns; JPEG rows stay untransformed since they are the
    artifact baseline. Color-randomized visualizations of every row
    image go to viz_dir as PPM when given.
    """
    if unique_colors(card) != 2:
        raise ValidationError("artifact analysis expects the 2-color test card")

    def cols(img: ImageRGB8) -> dict:
        return {"unique_colors": unique_colors(img), "bw_fraction": bw_fraction(img)}

    row_images: list[tuple[str, ImageRGB8, bool]] = [("original", card, True)]
    for q in jpeg_qualities:
        row_images.append((f"jpeg{q}", jpeg_degrade(card, q), False))
    for ae_id, ae in autoencoders:
        row_images.append((ae_id, ae_reconstruct(ae, card), True))

    rows = []
    for name, img, transforms in row_images:
        row = {"row": name, "default": cols(img)}
        if transforms:
            row["jpeg85"] = cols(jpeg_degrade(img, 85))
            row["resize50"] = cols(resize_bilinear(img, 0.5))
        else:
            row["jpeg85"] = None
            row["resize50"] = None
        rows.append(row)
        if viz_dir is not None:
            viz = color_randomize(img, stable_seed(viz_seed, "viz", name))
            save_ppm(viz, Path(viz_dir) / f"viz_{name}.ppm")
    return {"rows": rows}
