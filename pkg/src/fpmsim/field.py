"""Complex fields, centered unitary DFTs and the circular pupil.

Conventions used throughout the toolkit:

* a field is a 2D complex128 array indexed [row, col];
* a spectrum is a 2D complex128 array with the zero-frequency bin at
  (height // 2, width // 2);
* both transforms are orthonormal, so Parseval holds with unit constant;
* frequency-bin coordinates are always *centered*, i.e. offsets relative
  to the zero-frequency bin.
"""

from __future__ import annotations

from dataclasses import dataclass, field as dc_field

import numpy as np
from numpy.fft import fft2, fftshift, ifft2, ifftshift

from .errors import FieldError

__all__ = [
    "Pupil",
    "circular_pupil",
    "validate_field",
    "forward_dft",
    "inverse_dft",
    "crop_spectrum",
    "embed_spectrum",
]


def validate_field(data, name="field"):
    """Return ``data`` as a validated 2D complex128 array.

    Rejects empty or non-2D arrays and any non-finite value; the error
    message names the first offending pixel.
    """
    arr = np.asarray(data, dtype=np.complex128)
    if arr.ndim != 2 or arr.shape[0] < 1 or arr.shape[1] < 1:
        raise FieldError(f"{name} must be a non-empty 2D array, got shape {arr.shape}")
    bad = ~np.isfinite(arr.real) | ~np.isfinite(arr.imag)
    if bad.any():
        y, x = np.argwhere(bad)[0]
        raise FieldError(f"{name} contains a non-finite value at pixel ({y}, {x}): {arr[y, x]}")
    return arr


def forward_dft(field):
    """Centered orthonormal 2D DFT: zero frequency ends up at the array center."""
    arr = validate_field(field, "field")
    return fftshift(fft2(ifftshift(arr), norm="ortho"))


def inverse_dft(spectrum):
    """Exact inverse of :func:`forward_dft`."""
    arr = validate_field(spectrum, "spectrum")
    return fftshift(ifft2(ifftshift(arr), norm="ortho"))


def _window_origin(spectrum_shape, center, size):
    h, w = spectrum_shape
    cy, cx = int(center[0]), int(center[1])
    y0 = h // 2 + cy - size // 2
    x0 = w // 2 + cx - size // 2
    if y0 < 0 or x0 < 0 or y0 + size > h or x0 + size > w:
        raise FieldError(
            f"{size}x{size} window centered at offset ({cy}, {cx}) falls outside "
            f"the {h}x{w} spectrum (rows {y0}:{y0 + size}, cols {x0}:{x0 + size})"
        )
    return y0, x0


def crop_spectrum(spectrum, center, size):
    """Extract the size x size window of ``spectrum`` centered at the given
    centered-bin offset.

    The result is scaled by size / source_size so that a full-pupil crop of a
    band-limited field preserves mean intensity after :func:`inverse_dft`.
    Out-of-bounds windows are rejected; there is no implicit zero padding.
    """
    arr = validate_field(spectrum, "spectrum")
    if arr.shape[0] != arr.shape[1]:
        raise FieldError(f"crop_spectrum expects a square spectrum, got {arr.shape}")
    y0, x0 = _window_origin(arr.shape, center, size)
    scale = size / arr.shape[0]
    return arr[y0:y0 + size, x0:x0 + size] * scale


def embed_spectrum(patch, target, center, mask):
    """Write a pupil-supported patch back into a full spectrum.

    Bins where ``mask > 0`` are replaced by patch / scale (the inverse of the
    :func:`crop_spectrum` scaling, so crop-then-embed is the identity on the
    mask support); bins where ``mask == 0`` are left untouched.  Returns a new
    spectrum; ``target`` is not modified.
    """
    patch_arr = validate_field(patch, "patch")
    target_arr = validate_field(target, "target")
    if target_arr.shape[0] != target_arr.shape[1]:
        raise FieldError(f"embed_spectrum expects a square target, got {target_arr.shape}")
    size = patch_arr.shape[0]
    if patch_arr.shape != (size, size) or np.shape(mask) != (size, size):
        raise FieldError(
            f"patch {patch_arr.shape} and mask {np.shape(mask)} must both be {size}x{size}"
        )
    y0, x0 = _window_origin(target_arr.shape, center, size)
    scale = size / target_arr.shape[0]
    out = target_arr.copy()
    window = out[y0:y0 + size, x0:x0 + size]
    out[y0:y0 + size, x0:x0 + size] = np.where(np.asarray(mask) > 0, patch_arr / scale, window)
    return out


@dataclass(frozen=True)
class Pupil:
    """Circular low-pass mask on a square frequency support.

    ``mask`` values lie in [0, 1]: 1 strictly inside the disk, 0 strictly
    outside, and (in antialiased mode) a 1-pixel linear ramp across the rim.
    """

    size: int
    radius: float
    antialiased: bool
    mask: np.ndarray = dc_field(repr=False)

    def __post_init__(self):
        if not 0 < self.radius <= self.size / 2:
            raise FieldError(f"pupil radius must be in (0, {self.size / 2}], got {self.radius}")
        if self.mask.shape != (self.size, self.size):
            raise FieldError(f"pupil mask shape {self.mask.shape} != ({self.size}, {self.size})")
        self.mask.setflags(write=False)

    @property
    def support(self):
        """Boolean array: True where the mask is nonzero."""
        return self.mask > 0


def circular_pupil(size, radius, antialiased=False):
    """Build a circular pupil of the given bin radius on a size x size support.

    With ``antialiased=True`` the rim is a 1-pixel linear ramp
    (mask = clip(radius + 0.5 - distance, 0, 1)); the default is a hard
    binary disk (distance <= radius), which is what the simulation and
    reconstruction pipeline uses.
    """
    yy, xx = np.indices((size, size))
    dist = np.hypot(yy - size // 2, xx - size // 2)
    if antialiased:
        mask = np.clip(radius + 0.5 - dist, 0.0, 1.0)
    else:
        mask = (dist <= radius).astype(np.float64)
    return Pupil(size=size, radius=float(radius), antialiased=antialiased, mask=mask)
