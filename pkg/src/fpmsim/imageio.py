"""Grayscale image reading (PNG/PGM) and 16-bit PGM writing."""

from __future__ import annotations

from pathlib import Path

import numpy as np
from PIL import Image

from .errors import FieldError

__all__ = ["load_grayscale", "iter_image_dir", "write_pgm16"]

SUPPORTED_SUFFIXES = (".png", ".pgm")


def load_grayscale(path):
    """Load an 8/16-bit grayscale PNG or PGM as a float array in [0, 1]."""
    path = Path(path)
    if path.suffix.lower() not in SUPPORTED_SUFFIXES:
        raise FieldError(f"unsupported image format {path.suffix!r} (PNG/PGM only)")
    with Image.open(path) as img:
        if img.mode not in ("L", "I", "I;16", "I;16B"):
            raise FieldError(f"{path.name}: expected grayscale image, got mode {img.mode!r}")
        arr = np.asarray(img, dtype=np.float64)
    peak = 65535.0 if arr.max() > 255 else 255.0
    return arr / peak


def iter_image_dir(directory):
    """Yield (source_id, array) for every supported image in a directory."""
    directory = Path(directory)
    for path in sorted(directory.iterdir()):
        if path.suffix.lower() in SUPPORTED_SUFFIXES:
            yield path.stem, load_grayscale(path)


def write_pgm16(image, path):
    """Write a [0, 1] float image as a 16-bit binary PGM (big-endian per spec)."""
    arr = np.clip(np.asarray(image, dtype=np.float64), 0.0, 1.0)
    pixels = np.round(arr * 65535.0).astype(">u2")
    with open(path, "wb") as fh:
        fh.write(f"P5\n{arr.shape[1]} {arr.shape[0]}\n65535\n".encode("ascii"))
        fh.write(pixels.tobytes())
