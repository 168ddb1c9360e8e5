"""Corpus assembly: paired original/reconstructed crops and holdout sets.

Everything is a pure function of (config, seed, checkpoints): reruns
produce byte-identical trees. Manifests are newline-delimited JSON with
a schema header line; image paths are relative to the manifest's
directory. Original crops are always written to disk before the
autoencoder ever sees them.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .crops import CropSpec, random_crops
from .errors import FormatError, ValidationError
from .image import ImageRGB8, load_ppm, save_ppm
from .models import Autoencoder, ae_reconstruct
from .scenes import (
    DESK_BUCKETS, TEXTURES, ResolutionBucket, SceneSpec, generate_scene,
    sample_resolution,
)
from .seeds import stable_seed

CORPUS_SCHEMA = "aeforge-corpus/1"


def _dump(record: dict) -> str:
    return json.dumps(record, sort_keys=True, separators=(",", ":"))


def write_manifest(path, records: list[dict]) -> None:
    lines = [_dump({"schema": CORPUS_SCHEMA})]
    lines += [_dump(r) for r in records]
    Path(path).write_text("\n".join(lines) + "\n")


def read_manifest(path) -> list[dict]:
    lines = Path(path).read_text().splitlines()
    if not lines:
        raise FormatError(f"{path}: empty manifest")
    header = json.loads(lines[0])
    if header.get("schema") != CORPUS_SCHEMA:
        raise FormatError(
            f"{path}: manifest schema {header.get('schema')!r} != {CORPUS_SCHEMA!r}"
        )
    return [json.loads(line) for line in lines[1:] if line]


def _buckets(raw) -> list[ResolutionBucket]:
    return [b if isinstance(b, ResolutionBucket) else ResolutionBucket(*b) for b in raw]


def _scene_for(rng, buckets, weights, spec_seed, snap8: bool, min_side: int = 0):
    width, height = sample_resolution(buckets, weights, rng)
    if snap8:
        width = max(min_side, (width // 8) * 8)
        height = max(min_side, (height // 8) * 8)
    texture = TEXTURES[int(rng.integers(0, len(TEXTURES)))]
    shapes = int(rng.integers(3, 9))
    spec = SceneSpec(seed=spec_seed, width=width, height=height,
                     palette_size=6, shape_count=shapes, texture=texture)
    return generate_scene(spec), spec


@dataclass
class CorpusConfig:
    count: int = 2000
    crop_size: int = 32
    seed: int = 0
    buckets: tuple = DESK_BUCKETS[:4]
    weights: tuple = (4, 3, 2, 1)
    train_frac: float = 0.75

    def __post_init__(self):
        if self.count < 1:
            raise ValidationError("corpus count must be >= 1")
        if self.crop_size % Autoencoder.DOWNSAMPLE:
            raise ValidationError(
                f"crop size {self.crop_size} not divisible by AE downsample factor "
                f"{Autoencoder.DOWNSAMPLE}"
            )
        for b in _buckets(self.buckets):
            if b.min_side * 3 // 4 < self.crop_size:
                raise ValidationError(
                    f"bucket {b.label} can produce sides below crop size {self.crop_size}"
                )


def ae_source_id(ae: Autoencoder) -> str:
    if ae.checkpoint_hash:
        return f"ae-{ae.checkpoint_hash[:8]}"
    return "ae-mem"


def build_corpus(out_dir, ae: Autoencoder, config: CorpusConfig) -> Path:
    """Paired original/reconstructed crop corpus with a 75/25 pair split."""
    out = Path(out_dir)
    for split in ("train", "test"):
        for label in ("original", "reconstructed"):
            (out / split / label).mkdir(parents=True, exist_ok=True)

    buckets = _buckets(config.buckets)
    rng = np.random.default_rng(stable_seed(config.seed, "corpus"))
    n_train = int(round(config.count * config.train_frac))
    split_order = np.random.default_rng(
        stable_seed(config.seed, "split")).permutation(config.count)
    split_of = {}
    for rank, idx in enumerate(split_order):
        split_of[int(idx)] = "train" if rank < n_train else "test"

    source = ae_source_id(ae)
    records = []
    train_pixel_sums = np.zeros(3)
    train_pixel_sqsums = np.zeros(3)
    train_pixel_count = 0
    for i in range(config.count):
        scene, spec = _scene_for(rng, buckets, config.weights,
                                 stable_seed(config.seed, "scene", i), snap8=False)
        bucket_label = next(
            b.label for b in buckets
            if b.min_side <= spec.width <= b.max_side
        )
        crop = random_crops(
            scene, CropSpec(config.crop_size, 1, stable_seed(config.seed, "crop", i))
        )[0]
        split = split_of[i]
        opath = f"{split}/original/{i:05d}.ppm"
        save_ppm(crop, out / opath)  # written before the AE touches it
        recon = ae_reconstruct(ae, crop)
        rpath = f"{split}/reconstructed/{i:05d}.ppm"
        save_ppm(recon, out / rpath)
        records.append({"path": opath, "label": "original", "source": "original",
                        "bucket": bucket_label, "seed": spec.seed, "split": split})
        records.append({"path": rpath, "label": "reconstructed", "source": source,
                        "bucket": bucket_label, "seed": spec.seed, "split": split,
                        "origin": opath})
        if split == "train":
            for img in (crop, recon):
                x = img.pixels.astype(np.float64) / 255.0
                train_pixel_sums += x.sum(axis=(0, 1))
                train_pixel_sqsums += (x * x).sum(axis=(0, 1))
                train_pixel_count += x.shape[0] * x.shape[1]

    mean = train_pixel_sums / train_pixel_count
    var = train_pixel_sqsums / train_pixel_count - mean ** 2
    std = np.maximum(np.sqrt(np.maximum(var, 0)), 1e-3)
    stats = {"mean": [float(v) for v in mean], "std": [float(v) for v in std],
             "pixels": train_pixel_count, "source_ae": source}
    (out / "stats.json").write_text(json.dumps(stats, sort_keys=True, indent=2) + "\n")

    manifest = out / "manifest.ndjson"
    write_manifest(manifest, records)
    return manifest


@dataclass
class HoldoutConfig:
    crop_size: int = 32
    seed: int = 0
    originals_count: int = 240
    high_res_count: int = 80
    per_ae_count: int = 160
    small_count: int = 60
    small_size: int = 40
    buckets: tuple = DESK_BUCKETS[:2]
    weights: tuple = (3, 1)
    high_res_bucket: tuple = DESK_BUCKETS[3]

    def __post_init__(self):
        if self.small_size % 8:
            raise ValidationError("small_size must be divisible by 8")


def build_holdout_corpus(out_dir, holdout_aes: list[tuple[str, Autoencoder]],
                         config: HoldoutConfig) -> Path:
    """Evaluation-only sources: fresh originals, a high-res original set,
    reconstructions through each holdout autoencoder, and a small-image
    source that falls below crop size under resizing.

    Scene sides are snapped down to multiples of 8 (minimum 64) so full
    scenes survive both reconstruction and the 50% resize protocol.
    """
    if not holdout_aes:
        raise ValidationError("need at least one holdout autoencoder")
    out = Path(out_dir)
    buckets = _buckets(config.buckets)
    records = []

    def gen(stream: str, j: int, bucket_list, weight_list, snap: bool = True,
            fixed: int | None = None):
        seed = stable_seed(config.seed, stream, j)
        if fixed is not None:
            spec = SceneSpec(seed=seed, width=fixed, height=fixed,
                             palette_size=6, shape_count=5, texture=TEXTURES[j % 4])
            return generate_scene(spec), spec
        rng = np.random.default_rng(stable_seed(config.seed, stream, "dims", j))
        return _scene_for(rng, bucket_list, weight_list, seed, snap8=snap, min_side=64)

    def emit(source: str, label: str, j: int, image: ImageRGB8, seed: int):
        rel = f"{source}/{j:05d}.ppm"
        (out / source).mkdir(parents=True, exist_ok=True)
        save_ppm(image, out / rel)
        records.append({"path": rel, "label": label, "source": source,
                        "bucket": f"{image.width}x{image.height}", "seed": seed,
                        "split": "test"})

    for j in range(config.originals_count):
        scene, spec = gen("orig", j, buckets, config.weights)
        emit("original", "original", j, scene, spec.seed)

    hr_bucket = [ResolutionBucket(*config.high_res_bucket)]
    for j in range(config.high_res_count):
        scene, spec = gen("highres", j, hr_bucket, (1,))
        emit("high_res_imgs", "original", j, scene, spec.seed)

    for ae_id, ae in holdout_aes:
        for j in range(config.per_ae_count):
            scene, spec = gen(ae_id, j, buckets, config.weights)
            emit(ae_id, "reconstructed", j, ae_reconstruct(ae, scene), spec.seed)

    small_ae = holdout_aes[0][1]
    for j in range(config.small_count):
        scene, spec = gen("small", j, None, None, fixed=config.small_size)
        emit("small-scenes", "reconstructed", j, ae_reconstruct(small_ae, scene),
             spec.seed)

    manifest = out / "manifest.ndjson"
    write_manifest(manifest, records)
    return manifest


def load_crop_split(corpus_dir, split: str):
    """(crops01 float32 NCHW, labels, records) for one manifest split."""
    corpus_dir = Path(corpus_dir)
    records = [r for r in read_manifest(corpus_dir / "manifest.ndjson")
               if r["split"] == split]
    if not records:
        raise ValidationError(f"no records in split {split!r}")
    imgs, labels = [], []
    for r in records:
        img = load_ppm(corpus_dir / r["path"])
        imgs.append(img.pixels.astype(np.float32).transpose(2, 0, 1) / 255.0)
        labels.append(0 if r["label"] == "original" else 1)
    return np.stack(imgs), np.asarray(labels, dtype=np.float32), records


def load_stats(corpus_dir) -> tuple[np.ndarray, np.ndarray]:
    stats = json.loads((Path(corpus_dir) / "stats.json").read_text())
    return np.asarray(stats["mean"]), np.asarray(stats["std"])
