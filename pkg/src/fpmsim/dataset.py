"""Dataset construction: ground-truth prep, cube assembly, corpus building."""

from __future__ import annotations

import csv
import logging
from concurrent.futures import ProcessPoolExecutor

import numpy as np

from .bicubic import bicubic_resize
from .cube import CubeMeta, IntensityCube, crc64, write_cube
from .errors import CubeFormatError, FieldError
from .forward import NoiseSpec, simulate_stack

__all__ = [
    "GROUND_TRUTH_SIDE",
    "prepare_ground_truth",
    "build_cube",
    "upsample_cube",
    "ground_truth_cube",
    "extract_tiles",
    "build_corpus",
    "read_manifest",
    "MANIFEST_HEADER",
]

log = logging.getLogger(__name__)

GROUND_TRUTH_SIDE = 128
UPSAMPLED_SIDE = 128

MANIFEST_HEADER = ["cube_path", "source", "overlap", "noise_std", "seed", "checksum"]


def prepare_ground_truth(image, side=GROUND_TRUTH_SIDE):
    """Center-crop to side x side, rescale to [0, 1], return a zero-phase field."""
    img = np.asarray(image, dtype=np.float64)
    if img.ndim != 2:
        raise FieldError(f"ground-truth image must be 2D grayscale, got shape {img.shape}")
    h, w = img.shape
    if h < side or w < side:
        raise FieldError(f"ground-truth image {h}x{w} smaller than {side}x{side}")
    y0, x0 = (h - side) // 2, (w - side) // 2
    img = img[y0:y0 + side, x0:x0 + side]
    peak = img.max()
    if peak > 1.0:
        img = img / peak
    return img.astype(np.complex128)


def build_cube(obj, grid, pupil, noise=NoiseSpec(), shuffle_seed=0, source_id="", ground_truth=""):
    """Simulate, normalize channel-wise to [0, 1] and shuffle into a cube.

    ``shuffle_seed = 0`` is the identity sentinel: channels stay in canonical
    spiral order.  Normalization constants (per-channel maxima) and the
    permutation are recorded in the metadata so both are invertible.
    """
    stack = simulate_stack(obj, grid, pupil, noise)
    consts = stack.max(axis=(1, 2))
    consts[consts == 0] = 1.0
    normalized = (stack / consts[:, None, None]).astype(np.float32)

    n = grid.n_led
    if shuffle_seed == 0:
        permutation = np.arange(n)
    else:
        permutation = np.random.default_rng(shuffle_seed).permutation(n)
    data = np.ascontiguousarray(normalized[permutation])

    meta = CubeMeta(
        spacing=grid.spacing,
        pupil_radius=grid.pupil_radius,
        overlap_achieved=grid.achieved_overlap(),
        noise_std=noise.std,
        shuffle_seed=int(shuffle_seed),
        permutation=tuple(int(p) for p in permutation),
        norm_constants=tuple(float(c) for c in consts),
        source_id=source_id,
        ground_truth=ground_truth,
    )
    return IntensityCube(side=pupil.size, channels=n, data=data, meta=meta)


def upsample_cube(cube, side=UPSAMPLED_SIDE):
    """Bicubic-resample every channel to side x side and clamp to [0, 1]."""
    if cube.upsampled:
        raise CubeFormatError("cube is already upsampled")
    channels = np.empty((cube.channels, side, side), dtype=np.float32)
    for c in range(cube.channels):
        channels[c] = np.clip(bicubic_resize(cube.data[c], side, side), 0.0, 1.0)
    return IntensityCube(
        side=side, channels=cube.channels, data=channels, meta=cube.meta, upsampled=True
    )


def ground_truth_cube(obj, source_id=""):
    """Package a prepared ground-truth amplitude as a single-channel cube."""
    amp = np.abs(np.asarray(obj)).astype(np.float32)[None]
    meta = CubeMeta(
        spacing=0.0,
        pupil_radius=1.0,
        overlap_achieved=1.0,
        noise_std=0.0,
        shuffle_seed=0,
        permutation=(0,),
        norm_constants=(1.0,),
        source_id=source_id,
    )
    return IntensityCube(side=amp.shape[1], channels=1, data=amp, meta=meta, upsampled=True)


def extract_tiles(image, side=GROUND_TRUTH_SIDE, stride=None):
    """Yield (row, col, tile) for every full side x side tile at the given stride."""
    img = np.asarray(image, dtype=np.float64)
    stride = side if stride is None else stride
    for y0 in range(0, img.shape[0] - side + 1, stride):
        for x0 in range(0, img.shape[1] - side + 1, stride):
            yield y0, x0, img[y0:y0 + side, x0:x0 + side]


def _cube_job(args):
    (tile, source, overlap, noise_std, seed, out_dir, pupil_size, pupil_radius,
     n_side, antialiased, upsampled, crop_stride) = args
    from .field import circular_pupil
    from .geometry import make_grid

    obj = prepare_ground_truth(tile)
    grid = make_grid(
        n_side, pupil_radius, GROUND_TRUTH_SIDE, overlap=overlap, low_res_side=pupil_size
    )
    pupil = circular_pupil(pupil_size, pupil_radius, antialiased=antialiased)

    gt_path = out_dir / f"{source}.gt.fpc"
    if not gt_path.exists():
        write_cube(ground_truth_cube(obj, source_id=source), gt_path)

    cube = build_cube(
        obj, grid, pupil,
        noise=NoiseSpec(std=noise_std, seed=seed),
        shuffle_seed=seed,
        source_id=source,
        ground_truth=gt_path.name,
    )
    if upsampled:
        cube = upsample_cube(cube)
    name = f"{source}_ov{int(round(overlap * 100)):02d}_ns{noise_std:g}_s{seed}.fpc"
    path = out_dir / name
    write_cube(cube, path)
    checksum = crc64(np.ascontiguousarray(cube.data, dtype="<f4").tobytes())
    return [name, source, f"{overlap:g}", f"{noise_std:g}", str(seed), f"{checksum:016x}"]


def build_corpus(images, sweep, out_dir, n_side=5, pupil_radius=12, pupil_size=32,
                 antialiased=False, base_seed=1, crop_stride=None, upsampled=False, jobs=1):
    """Build one cube per (image tile, sweep setting) and write a manifest CSV.

    ``images`` yields (source_id, 2D array) pairs; ``sweep`` is a list of
    (overlap, noise_std) settings.  Unusable images are skipped with a logged
    warning and recorded in the manifest as a row with an empty cube_path.
    Deterministic given ``base_seed``: per-cube seeds are assigned in
    enumeration order.  Returns the manifest path.
    """
    from pathlib import Path

    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    jobs = max(1, jobs)

    tasks, skipped = [], []
    counter = 0
    for source, image in images:
        try:
            img = np.asarray(image, dtype=np.float64)
            tiles = list(extract_tiles(img, stride=crop_stride))
            if not tiles:
                raise FieldError(f"image {source} smaller than {GROUND_TRUTH_SIDE} pixels")
        except Exception as exc:
            log.warning("skipping image %s: %s", source, exc)
            skipped.append(["", source, "", "", "", "skipped"])
            continue
        for y0, x0, tile in tiles:
            tile_id = source if len(tiles) == 1 else f"{source}_y{y0}_x{x0}"
            for overlap, noise_std in sweep:
                counter += 1
                seed = base_seed * 1_000_003 + counter
                tasks.append((tile, tile_id, overlap, noise_std, seed, out_dir,
                              pupil_size, pupil_radius, n_side, antialiased,
                              upsampled, crop_stride))

    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            rows = list(pool.map(_cube_job, tasks))
    else:
        rows = [_cube_job(t) for t in tasks]

    manifest = out_dir / "manifest.csv"
    with open(manifest, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(MANIFEST_HEADER)
        writer.writerows(rows + skipped)
    return manifest


def read_manifest(path):
    """Parse a corpus manifest into a list of row dicts (skipped rows excluded)."""
    from pathlib import Path

    path = Path(path)
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames != MANIFEST_HEADER:
            raise CubeFormatError(f"unexpected manifest header {reader.fieldnames}")
        rows = []
        for row in reader:
            if not row["cube_path"]:
                continue
            rows.append({
                "cube_path": path.parent / row["cube_path"],
                "source": row["source"],
                "overlap": float(row["overlap"]),
                "noise_std": float(row["noise_std"]),
                "seed": int(row["seed"]),
                "checksum": row["checksum"],
            })
    return rows
