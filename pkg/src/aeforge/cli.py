"""Pipeline orchestration CLI.

Stages write their outputs under a workspace directory plus a stage
manifest recording input hashes and the seed, so any artifact can be
replayed from its RunConfig. Logs go to stderr; stdout carries only
data (infer verdicts, calibration values, diffs).
"""

from __future__ import annotations

import argparse
import csv
import hashlib
import json
import logging
import sys
import time
from pathlib import Path

import numpy as np

from . import __version__
from .backend import BACKEND
from .checkpoint import load_checkpoint
from .corpus import (
    CorpusConfig, HoldoutConfig, build_corpus, build_holdout_corpus,
    load_crop_split, load_stats, read_manifest,
)
from .errors import AeforgeError, FormatError, ValidationError
from .forensics import artifact_report, robustness_sweep
from .image import ImageRGB8, load_ppm, save_ppm
from .inference import (
    CalibrationResult, DecisionConfig, batch_decide, calibrate_threshold, decide,
)
from .jpegdct import LUMA_BASE, CHROMA_BASE, quant_tables
from .metrics import roc_auc, tpr_at_fpr
from .models import Autoencoder, Detector, detector_prob
from .profiles import load_run_config
from .report import SCHEMA, load_report, serialize_report, compare_reports
from .scenes import TEXTURES, SceneSpec, generate_scene, generate_test_card
from .seeds import stable_seed
from .train import TrainConfig, evaluate_split, train_autoencoder, train_detector
from .corpus import write_manifest

log = logging.getLogger("aeforge")


class Workspace:
    def __init__(self, root):
        self.root = Path(root)

    @property
    def scenes_dir(self): return self.root / "scenes"
    @property
    def ckpt_dir(self): return self.root / "checkpoints"
    @property
    def corpus_dir(self): return self.root / "corpus"
    @property
    def holdout_dir(self): return self.root / "holdout"
    @property
    def report_dir(self): return self.root / "reports"
    @property
    def stage_dir(self): return self.root / "stages"
    @property
    def calibration_path(self): return self.root / "calibration.json"

    def ae_ckpt(self, which: str) -> Path:
        return self.ckpt_dir / f"ae-{which}.aefg"

    @property
    def detector_ckpt(self) -> Path:
        return self.ckpt_dir / "detector.aefg"

    def require(self, path: Path, producer: str) -> Path:
        if not path.exists():
            raise ValidationError(
                f"{path} not found; run `aeforge {producer}` first"
            )
        return path


def _sha256(path: Path) -> str:
    return hashlib.sha256(path.read_bytes()).hexdigest()


def _write_stage_manifest(ws: Workspace, stage: str, cfg: dict,
                          inputs: dict, outputs: list, t0: float) -> None:
    ws.stage_dir.mkdir(parents=True, exist_ok=True)
    record = {
        "stage": stage,
        "seed": cfg["seed"],
        "profile": cfg["profile"],
        "backend": BACKEND,
        "version": __version__,
        "duration_s": round(time.perf_counter() - t0, 3),
        "inputs": {k: {"path": str(p.relative_to(ws.root)), "sha256": _sha256(p)}
                   for k, p in inputs.items()},
        "outputs": [str(Path(o).relative_to(ws.root)) for o in outputs],
    }
    path = ws.stage_dir / f"{stage}.stage.json"
    path.write_text(json.dumps(record, indent=2, sort_keys=True) + "\n")


def _train_config(section: dict, seed: int, **overrides) -> TrainConfig:
    merged = {
        "epochs": section["epochs"], "batch_size": section["batch_size"],
        "peak_lr": section["peak_lr"], "weight_decay": section["weight_decay"],
        "warmup_steps": section["warmup_steps"], "val_frac": section["val_frac"],
        "seed": seed,
    }
    merged.update(overrides)
    return TrainConfig(**merged)


def _fmt(value) -> str:
    if value is None:
        return "NA"
    if isinstance(value, float):
        return f"{value:.6g}"
    return str(value)


def _write_csv(path: Path, header: list, rows: list) -> None:
    with open(path, "w", newline="") as f:
        writer = csv.writer(f)
        writer.writerow(header)
        for row in rows:
            writer.writerow([_fmt(v) for v in row])


# ---------------------------------------------------------------- stages

def cmd_gen_data(cfg: dict, ws: Workspace, args) -> int:
    t0 = time.perf_counter()
    size, count = cfg["scenes"]["size"], cfg["scenes"]["count"]
    out = ws.scenes_dir
    out.mkdir(parents=True, exist_ok=True)
    rng = np.random.default_rng(stable_seed(cfg["seed"], "ae-scenes"))
    records = []
    for i in range(count):
        texture = TEXTURES[int(rng.integers(0, len(TEXTURES)))]
        shapes = int(rng.integers(3, 9))
        spec = SceneSpec(seed=stable_seed(cfg["seed"], "ae-scene", i),
                         width=size, height=size, palette_size=6,
                         shape_count=shapes, texture=texture)
        rel = f"{i:05d}.ppm"
        save_ppm(generate_scene(spec), out / rel)
        records.append({"path": rel, "label": "original", "source": "scenes",
                        "bucket": f"{size}x{size}", "seed": spec.seed,
                        "split": "train"})
    manifest = out / "manifest.ndjson"
    write_manifest(manifest, records)
    log.info("gen-data: %d scenes of %dx%d", count, size, size)
    _write_stage_manifest(ws, "gen-data", cfg, {}, [manifest], t0)
    return 0


def _load_scenes(ws: Workspace) -> np.ndarray:
    manifest = ws.require(ws.scenes_dir / "manifest.ndjson", "gen-data")
    records = read_manifest(manifest)
    imgs = [load_ppm(ws.scenes_dir / r["path"]).pixels for r in records]
    arr = np.stack(imgs).astype(np.float32).transpose(0, 3, 1, 2) / 255.0
    return arr


def cmd_train_ae(cfg: dict, ws: Workspace, args) -> int:
    t0 = time.perf_counter()
    which = args.which
    section = dict(cfg["ae"])
    if which != "main":
        entry = next((h for h in cfg["holdout_aes"] if h["id"] == which), None)
        if entry is None:
            raise ValidationError(
                f"unknown autoencoder {which!r}; profile defines "
                f"{['main'] + [h['id'] for h in cfg['holdout_aes']]}"
            )
        section.update(entry)
    images = _load_scenes(ws)
    tc = _train_config(
        section, seed=stable_seed(cfg["seed"], "train-ae", which),
        epochs=section["epochs"], warmup_steps=section["warmup_steps"],
    )
    model, hist = train_autoencoder(
        images, tc,
        latent_channels=section["latent_channels"],
        activation=section["activation"],
        init_seed=stable_seed(cfg["seed"], "init", which),
    )
    ws.ckpt_dir.mkdir(parents=True, exist_ok=True)
    ckpt = ws.ae_ckpt(which)
    model.save(ckpt)
    hist.save(ws.ckpt_dir / f"ae-{which}.history.csv",
              ws.ckpt_dir / f"ae-{which}.summary.json")
    log.info("train-ae[%s]: val loss %.5f (best epoch %d) -> %s",
             which, hist.epoch_val_loss[hist.best_epoch], hist.best_epoch + 1, ckpt)
    _write_stage_manifest(
        ws, f"train-ae-{which}", cfg,
        {"scenes": ws.scenes_dir / "manifest.ndjson"}, [ckpt], t0)
    return 0


def _load_holdout_aes(cfg: dict, ws: Workspace) -> list[tuple[str, Autoencoder]]:
    out = []
    for entry in cfg["holdout_aes"]:
        ckpt = ws.require(ws.ae_ckpt(entry["id"]),
                          f"train-ae --which {entry['id']}")
        ae = Autoencoder.load(ckpt)
        out.append((f"{entry['id']}-{ae.checkpoint_hash[:8]}", ae))
    return out


def cmd_build_corpus(cfg: dict, ws: Workspace, args) -> int:
    t0 = time.perf_counter()
    main_ae = Autoencoder.load(ws.require(ws.ae_ckpt("main"), "train-ae --which main"))
    ccfg = CorpusConfig(
        count=cfg["corpus"]["count"], crop_size=cfg["crop_size"], seed=cfg["seed"],
        buckets=tuple(tuple(b) for b in cfg["corpus"]["buckets"]),
        weights=tuple(cfg["corpus"]["weights"]),
        train_frac=cfg["corpus"]["train_frac"],
    )
    manifest = build_corpus(ws.corpus_dir, main_ae, ccfg)
    log.info("build-corpus: %s", manifest)

    holdouts = _load_holdout_aes(cfg, ws)
    h = cfg["holdout"]
    hcfg = HoldoutConfig(
        crop_size=cfg["crop_size"], seed=cfg["seed"],
        originals_count=h["originals_count"], high_res_count=h["high_res_count"],
        per_ae_count=h["per_ae_count"], small_count=h["small_count"],
        small_size=h["small_size"],
        buckets=tuple(tuple(b) for b in h["buckets"]),
        weights=tuple(h["weights"]),
        high_res_bucket=tuple(h["high_res_bucket"]),
    )
    hmanifest = build_holdout_corpus(ws.holdout_dir, holdouts, hcfg)
    log.info("build-corpus: %s", hmanifest)
    inputs = {"ae-main": ws.ae_ckpt("main")}
    for entry in cfg["holdout_aes"]:
        inputs[entry["id"]] = ws.ae_ckpt(entry["id"])
    _write_stage_manifest(ws, "build-corpus", cfg, inputs,
                          [manifest, hmanifest], t0)
    return 0


def cmd_train_detector(cfg: dict, ws: Workspace, args) -> int:
    t0 = time.perf_counter()
    manifest = ws.require(ws.corpus_dir / "manifest.ndjson", "build-corpus")
    crops, labels, _ = load_crop_split(ws.corpus_dir, "train")
    mean, std = load_stats(ws.corpus_dir)
    tc = _train_config(cfg["detector"], seed=stable_seed(cfg["seed"], "train-detector"))
    model, hist = train_detector(
        crops, labels, tc, norm_mean=mean, norm_std=std,
        init_seed=stable_seed(cfg["seed"], "init", "detector"),
    )
    ws.ckpt_dir.mkdir(parents=True, exist_ok=True)
    model.save(ws.detector_ckpt)
    hist.save(ws.ckpt_dir / "detector.history.csv",
              ws.ckpt_dir / "detector.summary.json")
    log.info("train-detector: val acc %.4f (best epoch %d) -> %s",
             hist.epoch_val_acc[hist.best_epoch], hist.best_epoch + 1,
             ws.detector_ckpt)
    _write_stage_manifest(ws, "train-detector", cfg,
                          {"corpus": manifest}, [ws.detector_ckpt], t0)
    return 0


def _validation_scores(cfg: dict, ws: Workspace, model: Detector):
    """Detector probabilities on the training-time validation crops."""
    crops, labels, _ = load_crop_split(ws.corpus_dir, "train")
    tc = _train_config(cfg["detector"], seed=stable_seed(cfg["seed"], "train-detector"))
    rng = np.random.default_rng(tc.seed)
    perm = rng.permutation(crops.shape[0])
    n_val = max(1, int(round(crops.shape[0] * tc.val_frac)))
    val_idx = perm[:n_val]
    probs = np.empty(val_idx.size)
    for i0 in range(0, val_idx.size, 128):
        idx = val_idx[i0:i0 + 128]
        probs[i0:i0 + idx.size] = detector_prob(model, crops[idx])
    val_labels = labels[val_idx]
    return probs[val_labels == 0], probs[val_labels == 1]


def cmd_calibrate(cfg: dict, ws: Workspace, args) -> int:
    t0 = time.perf_counter()
    detector = Detector.load(ws.require(ws.detector_ckpt, "train-detector"))
    ws.require(ws.corpus_dir / "manifest.ndjson", "build-corpus")
    fpr_target = args.fpr_target if args.fpr_target is not None \
        else cfg["calibration"]["fpr_target"]
    scores_orig, scores_recon = _validation_scores(cfg, ws, detector)
    result = calibrate_threshold(scores_orig, scores_recon, fpr_target)
    payload = {
        "threshold": result.threshold, "fpr": result.fpr, "recall": result.recall,
        "fpr_target": result.fpr_target,
        "n_original": int(scores_orig.size), "n_reconstructed": int(scores_recon.size),
        "detector_hash": detector.checkpoint_hash,
    }
    ws.calibration_path.write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n")
    print(f"threshold={result.threshold:.6g} fpr={result.fpr:.6g} "
          f"recall={result.recall:.6g}")
    _write_stage_manifest(ws, "calibrate", cfg,
                          {"detector": ws.detector_ckpt},
                          [ws.calibration_path], t0)
    return 0


def _load_calibration(ws: Workspace, override: float | None) -> float:
    if override is not None:
        return override
    path = ws.require(ws.calibration_path, "calibrate")
    return json.loads(path.read_text())["threshold"]


def _decision_config(cfg: dict, threshold: float) -> DecisionConfig:
    return DecisionConfig(tries=10, threshold=threshold,
                          crop_size=cfg["crop_size"], seed=cfg["seed"])


def _report_config(cfg: dict, detector: Detector, threshold: float) -> dict:
    return {
        "profile": cfg["profile"], "seed": cfg["seed"],
        "crop_size": cfg["crop_size"], "threshold": threshold,
        "backend": BACKEND, "resize_filter": "bilinear-half-pixel-center",
        "detector_hash": detector.checkpoint_hash,
    }


def cmd_eval(cfg: dict, ws: Workspace, args) -> int:
    t0 = time.perf_counter()
    detector = Detector.load(ws.require(ws.detector_ckpt, "train-detector"))
    threshold = _load_calibration(ws, args.threshold)
    hmanifest = ws.require(ws.holdout_dir / "manifest.ndjson", "build-corpus")

    test_crops, test_labels, _ = load_crop_split(ws.corpus_dir, "test")
    crop_level = evaluate_split(detector, test_crops, test_labels)

    entries = read_manifest(hmanifest)
    dc = _decision_config(cfg, threshold)
    results, errors = batch_decide(entries, ws.holdout_dir, detector, dc)

    sources = {}
    pos10, neg10 = [], []
    for source, res in results.items():
        sources[source] = {
            "label": res.label, "metric": "fpr" if res.label == "original" else "tpr",
            "n": res.n, "try1": res.rate("1try"), "tries10": res.rate("10tries"),
        }
        (pos10 if res.label == "reconstructed" else neg10).extend(res.scores_10tries)
    curve, auc = roc_auc(pos10, neg10)
    cap = cfg["calibration"]["fpr_target"]
    roc_block = {
        "auc": auc, "fpr_cap": cap,
        "tpr_at_fpr_cap": tpr_at_fpr(pos10, neg10, cap),
        "n_pos": len(pos10), "n_neg": len(neg10), "points": len(curve),
    }

    report = {
        "schema": SCHEMA, "kind": "eval",
        "config": _report_config(cfg, detector, threshold),
        "crop_level": crop_level,
        "sources": sources,
        "roc": roc_block,
        "errors": errors,
    }
    ws.report_dir.mkdir(parents=True, exist_ok=True)
    rpath = ws.report_dir / "eval.report.json"
    serialize_report(report, rpath)
    _write_csv(ws.report_dir / "sources.csv",
               ["source", "label", "metric", "n", "try1", "tries10"],
               [[s, v["label"], v["metric"], v["n"], v["try1"], v["tries10"]]
                for s, v in sources.items()])
    _write_csv(ws.report_dir / "roc.csv", ["threshold", "fpr", "tpr"],
               [[t, f, tp] for f, tp, t in curve])
    log.info("eval: auc %.4f tpr@%.3f%%fpr %.4f -> %s",
             auc, cap * 100, roc_block["tpr_at_fpr_cap"], rpath)
    _write_stage_manifest(ws, "eval", cfg,
                          {"detector": ws.detector_ckpt, "holdout": hmanifest},
                          [rpath], t0)
    return 0


def cmd_robustness(cfg: dict, ws: Workspace, args) -> int:
    t0 = time.perf_counter()
    detector = Detector.load(ws.require(ws.detector_ckpt, "train-detector"))
    threshold = _load_calibration(ws, args.threshold)
    hmanifest = ws.require(ws.holdout_dir / "manifest.ndjson", "build-corpus")
    entries = read_manifest(hmanifest)
    dc = _decision_config(cfg, threshold)
    sweep = robustness_sweep(
        entries, ws.holdout_dir, detector, dc,
        jpeg_qualities=tuple(cfg["robustness"]["jpeg_qualities"]),
        resize_scales=tuple(cfg["robustness"]["resize_scales"]),
    )
    report = {
        "schema": SCHEMA, "kind": "robustness",
        "config": _report_config(cfg, detector, threshold),
        "grid": sweep["grid"],
        "errors": sweep["errors"],
    }
    ws.report_dir.mkdir(parents=True, exist_ok=True)
    rpath = ws.report_dir / "robustness.report.json"
    serialize_report(report, rpath)
    rows = []
    for source, info in sweep["grid"].items():
        for tname, cell in info["cells"].items():
            rows.append([source, info["label"], info["metric"], info["n"], tname,
                         cell["try1"], cell["tries10"], cell["skipped"] or ""])
    _write_csv(ws.report_dir / "grid.csv",
               ["source", "label", "metric", "n", "transform", "try1", "tries10",
                "skipped"], rows)
    log.info("robustness -> %s", rpath)
    _write_stage_manifest(ws, "robustness", cfg,
                          {"detector": ws.detector_ckpt, "holdout": hmanifest},
                          [rpath], t0)
    return 0


def cmd_artifacts(cfg: dict, ws: Workspace, args) -> int:
    t0 = time.perf_counter()
    main_ae = Autoencoder.load(ws.require(ws.ae_ckpt("main"), "train-ae --which main"))
    aes = [(f"ae-main-{main_ae.checkpoint_hash[:8]}", main_ae)]
    aes += _load_holdout_aes(cfg, ws)
    size = cfg["artifacts"]["card_size"]
    card = generate_test_card(stable_seed(cfg["seed"], "card"), size, size)
    viz_dir = ws.report_dir / "viz"
    viz_dir.mkdir(parents=True, exist_ok=True)
    if args.dump_tables:
        _print_tables(None)
    table = artifact_report(
        card, aes, jpeg_qualities=tuple(cfg["artifacts"]["jpeg_qualities"]),
        viz_dir=viz_dir, viz_seed=stable_seed(cfg["seed"], "viz"),
    )
    report = {
        "schema": SCHEMA, "kind": "artifacts",
        "config": {"profile": cfg["profile"], "seed": cfg["seed"],
                   "card_size": size, "backend": BACKEND,
                   "ae_hashes": {aid: ae.checkpoint_hash for aid, ae in aes}},
        "rows": table["rows"],
    }
    ws.report_dir.mkdir(parents=True, exist_ok=True)
    rpath = ws.report_dir / "artifacts.report.json"
    serialize_report(report, rpath)
    rows = []
    for row in table["rows"]:
        flat = [row["row"], row["default"]["unique_colors"], row["default"]["bw_fraction"]]
        for key in ("jpeg85", "resize50"):
            cell = row[key]
            flat += [None, None] if cell is None else [cell["unique_colors"], cell["bw_fraction"]]
        rows.append(flat)
    _write_csv(ws.report_dir / "artifacts.csv",
               ["row", "unique_default", "bw_default", "unique_jpeg85", "bw_jpeg85",
                "unique_resize50", "bw_resize50"], rows)
    log.info("artifacts -> %s", rpath)
    inputs = {"ae-main": ws.ae_ckpt("main")}
    for entry in cfg["holdout_aes"]:
        inputs[entry["id"]] = ws.ae_ckpt(entry["id"])
    _write_stage_manifest(ws, "artifacts", cfg, inputs, [rpath], t0)
    return 0


# ------------------------------------------------------------- utilities

def cmd_infer(cfg: dict, ws: Workspace, args) -> int:
    detector = Detector.load(args.model)
    image = load_ppm(args.image)
    dc = DecisionConfig(tries=args.tries, threshold=args.threshold,
                        crop_size=detector.crop_size, seed=args.seed,
                        upscale_small=args.upscale_small)
    verdict = decide(image, detector, dc)
    if args.json:
        print(json.dumps(verdict.to_json_dict(), sort_keys=True))
    else:
        print(f"decision={verdict.decision} aggregate={verdict.aggregate:.6g} "
              f"tries={args.tries} threshold={args.threshold}")
    return 0


def cmd_report_diff(cfg: dict, ws: Workspace, args) -> int:
    a = load_report(args.report_a)
    b = load_report(args.report_b)
    diffs = compare_reports(a, b, args.tolerance)
    for d in diffs:
        print(json.dumps(d, sort_keys=True))
    if diffs:
        log.info("report-diff: %d difference(s)", len(diffs))
        return 1
    log.info("report-diff: reports match within tolerance %g", args.tolerance)
    return 0


def cmd_model_info(cfg: dict, ws: Workspace, args) -> int:
    arrays = load_checkpoint(args.model)
    kind = int(arrays["meta.model"][0]) if "meta.model" in arrays else -1
    if kind == 0:
        model = Autoencoder.load(args.model)
        print(f"kind: autoencoder")
        print(f"latent_channels: {model.latent_channels}")
        print(f"activation: {model.activation}")
        print(f"encoder_channels: {model.enc_channels}")
        print(f"downsample_factor: {model.DOWNSAMPLE}")
        print(f"parameters: {model.param_count()}")
        print(f"sha256: {model.checkpoint_hash}")
    elif kind == 1:
        model = Detector.load(args.model)
        print(f"kind: detector")
        print(f"crop_size: {model.crop_size}")
        print(f"channels: {model.CHANNELS}")
        print(f"norm_mean: {[round(float(v), 6) for v in model.norm_mean]}")
        print(f"norm_std: {[round(float(v), 6) for v in model.norm_std]}")
        print(f"parameters: {model.param_count()}")
        print(f"sha256: {model.checkpoint_hash}")
    else:
        raise FormatError(f"{args.model}: unknown model kind")
    return 0


def _print_tables(quality: int | None) -> None:
    def show(name, table):
        print(name)
        for row in table:
            print(" ".join(f"{int(v):4d}" for v in row))
    show("luma_base", LUMA_BASE)
    show("chroma_base", CHROMA_BASE)
    if quality is not None:
        t = quant_tables(quality)
        show(f"luma_q{quality}", t.luma)
        show(f"chroma_q{quality}", t.chroma)


def cmd_dump_tables(cfg: dict, ws: Workspace, args) -> int:
    _print_tables(args.quality)
    return 0


# ----------------------------------------------------------------- main

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="aeforge",
        description="Autoencoder-artifact detection pipeline for latent-diffusion images",
    )
    parser.add_argument("--workspace", default=".", help="pipeline output directory")
    parser.add_argument("--profile", default="desk", choices=["desk", "paper-shape"])
    parser.add_argument("--config", default=None, help="JSON config overriding the profile")
    parser.add_argument("--seed", type=int, default=None, help="override the global seed")
    parser.add_argument("--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    sub.add_parser("gen-data", help="generate autoencoder training scenes")

    p = sub.add_parser("train-ae", help="train the surrogate or a holdout autoencoder")
    p.add_argument("--which", default="main",
                   help="main or a holdout id from the profile")

    sub.add_parser("build-corpus", help="paired crop corpus plus holdout eval set")
    sub.add_parser("train-detector", help="train the binary crop detector")

    p = sub.add_parser("calibrate", help="pick the decision threshold at an FPR target")
    p.add_argument("--fpr-target", type=float, default=None)

    p = sub.add_parser("eval", help="decision table, ROC/AUC and TPR@FPR")
    p.add_argument("--threshold", type=float, default=None)

    p = sub.add_parser("robustness", help="JPEG/resize robustness sweep")
    p.add_argument("--threshold", type=float, default=None)

    p = sub.add_parser("artifacts", help="test-card artifact analysis")
    p.add_argument("--dump-tables", action="store_true",
                   help="also print the JPEG quantization base tables")

    p = sub.add_parser("infer", help="score one PPM image")
    p.add_argument("--model", required=True)
    p.add_argument("--image", required=True)
    p.add_argument("--tries", type=int, choices=[1, 10], default=10)
    p.add_argument("--threshold", type=float, default=0.5)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--json", action="store_true")
    p.add_argument("--upscale-small", action="store_true")

    p = sub.add_parser("report-diff", help="compare two reports")
    p.add_argument("report_a")
    p.add_argument("report_b")
    p.add_argument("--tolerance", type=float, default=0.0)

    p = sub.add_parser("model-info", help="print checkpoint architecture and hash")
    p.add_argument("--model", required=True)

    p = sub.add_parser("dump-tables", help="print JPEG quantization tables")
    p.add_argument("--quality", type=int, default=None)

    return parser


_COMMANDS = {
    "gen-data": cmd_gen_data,
    "train-ae": cmd_train_ae,
    "build-corpus": cmd_build_corpus,
    "train-detector": cmd_train_detector,
    "calibrate": cmd_calibrate,
    "eval": cmd_eval,
    "robustness": cmd_robustness,
    "artifacts": cmd_artifacts,
    "infer": cmd_infer,
    "report-diff": cmd_report_diff,
    "model-info": cmd_model_info,
    "dump-tables": cmd_dump_tables,
}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(
        stream=sys.stderr,
        level=logging.DEBUG if args.verbose else logging.INFO,
        format="%(levelname)s %(name)s: %(message)s",
    )
    try:
        cfg = load_run_config(args.profile, args.config,
                              {"seed": args.seed} if args.seed is not None else None)
        ws = Workspace(args.workspace)
        return _COMMANDS[args.command](cfg, ws, args)
    except ValidationError as exc:
        log.error("%s", exc)
        return 1
    except (FormatError, OSError) as exc:
        log.error("%s", exc)
        return 2
    except AeforgeError as exc:
        log.error("%s", exc)
        return 1


if __name__ == "__main__":
    sys.exit(main())
