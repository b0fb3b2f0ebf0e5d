"""Experiment harness: overlap and noise sweeps over a cube corpus."""

from __future__ import annotations

import csv
import logging
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import replace
from pathlib import Path

import numpy as np

from .ap import ApConfig, ap_reconstruct
from .bicubic import bicubic_resize
from .cube import read_cube
from .dataset import read_manifest
from .field import circular_pupil
from .geometry import make_grid
from .metrics import EvalRecord, psnr, ssim

__all__ = [
    "EVAL_HEADER",
    "DEFAULT_OVERLAPS",
    "DEFAULT_NOISE_STDS",
    "reconstruct_cube",
    "bicubic_baseline",
    "run_overlap_sweep",
    "run_noise_sweep",
    "write_records",
    "read_records",
    "summarize_records",
]

log = logging.getLogger(__name__)

EVAL_HEADER = ["source", "method", "overlap", "noise_std", "ordering", "psnr_db", "ssim", "runtime_s"]
DEFAULT_OVERLAPS = (0.0, 0.18, 0.40, 0.65)
DEFAULT_NOISE_STDS = (0.0, 1e-4, 2e-4, 3e-4)
DEFAULT_METHODS = ("AP", "AP-R", "baseline-bicubic")


def _grid_from_meta(meta, high_res_side):
    n_side = int(round(len(meta.permutation) ** 0.5))
    return make_grid(n_side, meta.pupil_radius, high_res_side, spacing=meta.spacing)


def reconstruct_cube(cube, cfg=ApConfig(), high_res_side=128, antialiased=False):
    """Un-shuffle, de-normalize and AP-reconstruct one raw cube."""
    canonical = cube.unshuffled()
    stack = canonical.denormalized()
    grid = _grid_from_meta(cube.meta, high_res_side)
    pupil = circular_pupil(cube.side, cube.meta.pupil_radius, antialiased=antialiased)
    return ap_reconstruct(stack, grid, pupil, cfg)


def bicubic_baseline(cube, high_res_side=128):
    """Bicubic upsampling of the center-LED amplitude, the no-physics baseline."""
    canonical = cube.unshuffled()
    amp = np.sqrt(canonical.denormalized()[0])
    return np.clip(bicubic_resize(amp, high_res_side, high_res_side), 0.0, 1.0)


def _load_ground_truth(row, cube):
    gt_path = Path(row["cube_path"]).parent / cube.meta.ground_truth
    return read_cube(gt_path).data[0].astype(np.float64)


def _score(source, method, overlap, noise_std, ordering, reference, image, runtime):
    image = np.clip(image, 0.0, 1.0)
    return EvalRecord(
        source=source,
        method=method,
        overlap=float(overlap),
        noise_std=float(noise_std),
        ordering=ordering,
        psnr_db=psnr(reference, image),
        ssim=ssim(reference, image),
        runtime_s=runtime,
    )


def _find_prediction(predictions_dir, cube_path):
    if predictions_dir is None:
        return None
    candidate = Path(predictions_dir) / (Path(cube_path).stem + ".pred.fpc")
    return candidate if candidate.exists() else None


def _evaluate_row(row, methods, cfg, predictions_dir):
    try:
        cube = read_cube(row["cube_path"])
        reference = _load_ground_truth(row, cube)
    except OSError as exc:
        log.warning("skipping %s: %s", row["cube_path"], exc)
        return []
    records = []
    for method in methods:
        t0 = time.perf_counter()
        if method == "AP":
            result = reconstruct_cube(cube, cfg)
            image = np.abs(result.field)
            ordering = cfg.ordering
        elif method == "AP-R":
            result = reconstruct_cube(cube, replace(cfg, misassociation_seed=row["seed"]))
            image = np.abs(result.field)
            ordering = "misassociated"
        elif method == "baseline-bicubic":
            image = bicubic_baseline(cube)
            ordering = "n/a"
        elif method in ("FPNET", "FPNET-R"):
            pred = _find_prediction(predictions_dir, row["cube_path"])
            if pred is None:
                continue
            image = read_cube(pred).data[0].astype(np.float64)
            ordering = "shuffled" if method == "FPNET-R" else "canonical"
        else:
            raise ValueError(f"unknown method {method!r}")
        records.append(_score(
            row["source"], method, row["overlap"], row["noise_std"],
            ordering, reference, image, time.perf_counter() - t0,
        ))
    return records


def _evaluate_rows(rows, methods, cfg, predictions_dir, jobs=1):
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            chunks = pool.map(
                _evaluate_row, rows,
                [methods] * len(rows), [cfg] * len(rows), [predictions_dir] * len(rows),
            )
            return [rec for chunk in chunks for rec in chunk]
    return [rec for row in rows for rec in _evaluate_row(row, methods, cfg, predictions_dir)]


def run_overlap_sweep(manifest_path, methods=DEFAULT_METHODS, overlaps=DEFAULT_OVERLAPS,
                      cfg=ApConfig(), predictions_dir=None, jobs=1):
    """Score every noise-free cube whose overlap setting is in ``overlaps``."""
    rows = [r for r in read_manifest(manifest_path)
            if r["noise_std"] == 0 and any(abs(r["overlap"] - o) < 1e-9 for o in overlaps)]
    return _evaluate_rows(rows, methods, cfg, predictions_dir, jobs)


def run_noise_sweep(manifest_path, methods=DEFAULT_METHODS, stds=DEFAULT_NOISE_STDS,
                    overlap=0.65, cfg=ApConfig(), predictions_dir=None, jobs=1):
    """Score every cube at the fixed overlap whose noise std is in ``stds``."""
    rows = [r for r in read_manifest(manifest_path)
            if abs(r["overlap"] - overlap) < 1e-9
            and any(abs(r["noise_std"] - s) < 1e-12 for s in stds)]
    return _evaluate_rows(rows, methods, cfg, predictions_dir, jobs)


def write_records(records, path):
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(EVAL_HEADER)
        for r in records:
            writer.writerow([
                r.source, r.method, f"{r.overlap:g}", f"{r.noise_std:g}",
                r.ordering, f"{r.psnr_db:.6f}", f"{r.ssim:.8f}", f"{r.runtime_s:.4f}",
            ])


def read_records(path):
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        return [EvalRecord(
            source=row["source"],
            method=row["method"],
            overlap=float(row["overlap"]),
            noise_std=float(row["noise_std"]),
            ordering=row["ordering"],
            psnr_db=float(row["psnr_db"]),
            ssim=float(row["ssim"]),
            runtime_s=float(row["runtime_s"]),
        ) for row in reader]


def summarize_records(records, path):
    """Per (method, overlap, noise_std) mean/std summary CSV."""
    cells = {}
    for r in records:
        cells.setdefault((r.method, r.overlap, r.noise_std), []).append(r)
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["method", "overlap", "noise_std", "n",
                         "psnr_mean", "psnr_std", "ssim_mean", "ssim_std"])
        for (method, overlap, noise_std), rs in sorted(cells.items()):
            ps = np.array([r.psnr_db for r in rs])
            ss = np.array([r.ssim for r in rs])
            writer.writerow([
                method, f"{overlap:g}", f"{noise_std:g}", len(rs),
                f"{ps.mean():.6f}", f"{ps.std():.6f}",
                f"{ss.mean():.8f}", f"{ss.std():.8f}",
            ])
