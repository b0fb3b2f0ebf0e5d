"""Command-line entry point: simulate, gen-dataset, reconstruct, evaluate.

Exit codes: 0 ok, 2 usage, 3 I/O, 4 geometry/validation, 5 numerical failure.
"""

from __future__ import annotations

import argparse
import csv
import os
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .ap import ApConfig
from .cube import read_cube, write_cube
from .dataset import build_corpus, build_cube, ground_truth_cube, prepare_ground_truth
from .errors import CubeFormatError, FieldError, GeometryError, NumericalError
from .field import circular_pupil
from .forward import NoiseSpec
from .geometry import make_grid
from .imageio import iter_image_dir, load_grayscale, write_pgm16
from .sweeps import (
    DEFAULT_METHODS,
    DEFAULT_NOISE_STDS,
    DEFAULT_OVERLAPS,
    reconstruct_cube,
    run_noise_sweep,
    run_overlap_sweep,
    summarize_records,
    write_records,
)

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_IO = 3
EXIT_GEOMETRY = 4
EXIT_NUMERICAL = 5

OUT_DIR_ENV = "FPMSIM_OUT_DIR"


def _out_dir(args):
    base = args.out if getattr(args, "out", None) else os.environ.get(OUT_DIR_ENV, ".")
    path = Path(base)
    path.mkdir(parents=True, exist_ok=True)
    return path


def _add_grid_args(parser):
    group = parser.add_mutually_exclusive_group()
    group.add_argument("--overlap", type=float, help="target disk-overlap ratio in [0, 1)")
    group.add_argument("--spacing", type=float, help="grid spacing in frequency bins")
    parser.add_argument("--pupil-radius", type=float, default=12.0)
    parser.add_argument("--n-side", type=int, default=5)
    parser.add_argument("--low-res", type=int, default=32, help="low-resolution patch side")
    parser.add_argument("--high-res", type=int, default=128, help="high-resolution object side")
    parser.add_argument("--antialiased", action="store_true",
                        help="use the 1-pixel-ramp pupil edge instead of a hard disk")


def _add_ap_args(parser):
    parser.add_argument("--iterations", type=int, default=50)
    parser.add_argument("--tolerance", type=float, default=1e-6)
    parser.add_argument("--ordering", choices=("spiral", "raster", "random"), default="spiral")
    parser.add_argument("--order-seed", type=int, default=0)
    parser.add_argument("--init", choices=("upsampled_center", "random"), default="upsampled_center")
    parser.add_argument("--init-seed", type=int, default=0)
    parser.add_argument("--misassociation-seed", type=int, default=None)


def _ap_config(args):
    return ApConfig(
        max_iterations=args.iterations,
        ordering=args.ordering,
        order_seed=args.order_seed,
        init=args.init,
        init_seed=args.init_seed,
        tolerance=args.tolerance,
        misassociation_seed=args.misassociation_seed,
    )


def _grid(args):
    if args.overlap is None and args.spacing is None:
        overlap, spacing = 0.65, None
    else:
        overlap, spacing = args.overlap, args.spacing
    return make_grid(
        args.n_side, args.pupil_radius, args.high_res,
        overlap=overlap, spacing=spacing, low_res_side=args.low_res,
    )


def cmd_simulate(args):
    obj = prepare_ground_truth(load_grayscale(args.image), side=args.high_res)
    grid = _grid(args)
    pupil = circular_pupil(args.low_res, args.pupil_radius, antialiased=args.antialiased)
    out_dir = _out_dir(args)
    source = Path(args.image).stem

    gt_path = out_dir / f"{source}.gt.fpc"
    write_cube(ground_truth_cube(obj, source_id=source), gt_path)
    cube = build_cube(
        obj, grid, pupil,
        noise=NoiseSpec(std=args.noise_std, seed=args.noise_seed),
        shuffle_seed=0,
        source_id=source,
        ground_truth=gt_path.name,
    )
    cube_path = out_dir / f"{source}.fpc"
    write_cube(cube, cube_path)
    print(f"wrote {cube_path}")
    print(f"achieved overlap ratio: {grid.achieved_overlap():.4f}")
    return EXIT_OK


def cmd_gen_dataset(args):
    overlaps = [float(v) for v in args.overlaps.split(",")]
    stds = [float(v) for v in args.noise_stds.split(",")]
    sweep = [(o, s) for o in overlaps for s in stds]
    manifest = build_corpus(
        iter_image_dir(args.images), sweep, _out_dir(args),
        n_side=args.n_side, pupil_radius=args.pupil_radius, pupil_size=args.low_res,
        antialiased=args.antialiased, base_seed=args.seed,
        crop_stride=args.crop_stride, upsampled=args.upsampled, jobs=args.jobs,
    )
    print(f"wrote {manifest}")
    return EXIT_OK


def cmd_reconstruct(args):
    cube = read_cube(args.cube)
    cfg = _ap_config(args)
    result = reconstruct_cube(cube, cfg, high_res_side=args.high_res,
                              antialiased=args.antialiased)
    amplitude = np.clip(np.abs(result.field), 0.0, 1.0)

    out_dir = _out_dir(args)
    stem = Path(args.cube).stem
    recon_cube = ground_truth_cube(amplitude.astype(np.complex128),
                                   source_id=cube.meta.source_id)
    write_cube(recon_cube, out_dir / f"{stem}.recon.fpc")
    write_pgm16(amplitude, out_dir / f"{stem}.recon.pgm")
    with open(out_dir / f"{stem}.residuals.csv", "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["sweep", "residual"])
        for i, r in enumerate(result.residual_history):
            writer.writerow([i + 1, f"{r:.10e}"])
    print(f"wrote {out_dir / (stem + '.recon.fpc')} ({result.iterations_run} sweeps, "
          f"final residual {result.residual_history[-1]:.3e})")
    return EXIT_OK


def cmd_evaluate(args):
    methods = tuple(args.methods.split(","))
    cfg = _ap_config(args)
    if args.sweep == "overlap":
        overlaps = [float(v) for v in args.overlaps.split(",")]
        records = run_overlap_sweep(args.manifest, methods, overlaps, cfg,
                                    predictions_dir=args.predictions, jobs=args.jobs)
    else:
        stds = [float(v) for v in args.noise_stds.split(",")]
        records = run_noise_sweep(args.manifest, methods, stds, overlap=args.at_overlap,
                                  cfg=cfg, predictions_dir=args.predictions, jobs=args.jobs)
    out_dir = _out_dir(args)
    out_csv = out_dir / f"{args.sweep}_sweep.csv"
    write_records(records, out_csv)
    if args.summary:
        summarize_records(records, out_dir / f"{args.sweep}_summary.csv")
    print(f"wrote {out_csv} ({len(records)} records)")
    return EXIT_OK


def build_parser():
    parser = argparse.ArgumentParser(
        prog="fpmsim",
        description="Fourier ptychography simulation, reconstruction and evaluation",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("simulate", help="forward-simulate one image into an .fpc cube")
    p.add_argument("image", help="grayscale PNG/PGM input, at least high-res sized")
    p.add_argument("--out", help=f"output directory (default ${OUT_DIR_ENV} or .)")
    _add_grid_args(p)
    p.add_argument("--noise-std", type=float, default=0.0)
    p.add_argument("--noise-seed", type=int, default=0)
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("gen-dataset", help="build a cube corpus from an image directory")
    p.add_argument("images", help="directory of grayscale PNG/PGM images")
    p.add_argument("--out", help="output directory")
    _add_grid_args(p)
    p.add_argument("--overlaps", default="0,0.18,0.4,0.65")
    p.add_argument("--noise-stds", default="0")
    p.add_argument("--seed", type=int, default=1)
    p.add_argument("--crop-stride", type=int, default=None)
    p.add_argument("--upsampled", action="store_true",
                   help="store bicubic-upsampled 128x128 channels")
    p.add_argument("--jobs", type=int, default=1)
    p.set_defaults(func=cmd_gen_dataset)

    p = sub.add_parser("reconstruct", help="AP-reconstruct a cube")
    p.add_argument("cube", help=".fpc cube file")
    p.add_argument("--out", help="output directory")
    p.add_argument("--high-res", type=int, default=128)
    p.add_argument("--antialiased", action="store_true")
    _add_ap_args(p)
    p.set_defaults(func=cmd_reconstruct)

    p = sub.add_parser("evaluate", help="run an overlap or noise sweep over a corpus")
    p.add_argument("manifest", help="corpus manifest CSV")
    p.add_argument("--out", help="output directory")
    p.add_argument("--sweep", choices=("overlap", "noise"), default="overlap")
    p.add_argument("--methods", default=",".join(DEFAULT_METHODS))
    p.add_argument("--overlaps", default=",".join(f"{o:g}" for o in DEFAULT_OVERLAPS))
    p.add_argument("--noise-stds", default=",".join(f"{s:g}" for s in DEFAULT_NOISE_STDS))
    p.add_argument("--at-overlap", type=float, default=0.65,
                   help="fixed overlap for the noise sweep")
    p.add_argument("--predictions", default=None,
                   help="directory of FPNET prediction .fpc files")
    p.add_argument("--summary", action="store_true", help="also write a mean/std summary CSV")
    p.add_argument("--jobs", type=int, default=1)
    _add_ap_args(p)
    p.set_defaults(func=cmd_evaluate)
    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (GeometryError, FieldError, CubeFormatError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_GEOMETRY
    except NumericalError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except OSError as exc:
        print(f"I/O error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
