"""Coherent forward model: object -> low-resolution intensity stack."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import FieldError, GeometryError
from .field import crop_spectrum, forward_dft, inverse_dft, validate_field

__all__ = ["NoiseSpec", "simulate_intensity", "simulate_stack"]


@dataclass(frozen=True)
class NoiseSpec:
    """Additive Gaussian intensity noise: std is relative to the clean stack maximum."""

    std: float = 0.0
    seed: int = 0

    def __post_init__(self):
        if self.std < 0:
            raise GeometryError(f"noise std must be nonnegative, got {self.std}")


def _check_object(obj, grid, pupil):
    arr = validate_field(obj, "object")
    if arr.shape[0] != arr.shape[1]:
        raise FieldError(f"object must be square, got {arr.shape}")
    if arr.shape[0] != grid.high_res_side:
        raise FieldError(f"object side {arr.shape[0]} != grid high_res_side {grid.high_res_side}")
    if arr.shape[0] % pupil.size != 0:
        raise FieldError(f"object side {arr.shape[0]} not divisible by pupil size {pupil.size}")
    return arr


def simulate_intensity(obj, grid, led, pupil):
    """Squared modulus of the pupil-filtered, demodulated object field for one LED.

    I = |F^-1(mask * crop(F(object), k_led, pupil.size))|^2
    """
    arr = _check_object(obj, grid, pupil)
    if not 0 <= led < grid.n_led:
        raise GeometryError(f"led index {led} out of range for {grid.n_led} LEDs")
    spectrum = forward_dft(arr)
    patch = crop_spectrum(spectrum, grid.centers[led], pupil.size)
    g = inverse_dft(pupil.mask * patch)
    return np.abs(g) ** 2


def _noise_rng(seed, led):
    # counter-based generator keyed on (seed, led): per-LED streams are
    # reproducible and independent of generation order
    return np.random.Generator(np.random.Philox(key=[seed & 0xFFFFFFFFFFFFFFFF, led]))


def simulate_stack(obj, grid, pupil, noise=NoiseSpec()):
    """Simulate all N_LED intensity images in canonical spiral order.

    Noise is Gaussian (mean 0, std = noise.std relative to the clean stack
    maximum), drawn per LED from a deterministic counter-based generator and
    clamped at zero.  With std = 0 the output equals the per-LED
    :func:`simulate_intensity` results exactly.
    """
    arr = _check_object(obj, grid, pupil)
    spectrum = forward_dft(arr)
    stack = np.empty((grid.n_led, pupil.size, pupil.size), dtype=np.float64)
    for n, center in enumerate(grid.centers):
        patch = crop_spectrum(spectrum, center, pupil.size)
        g = inverse_dft(pupil.mask * patch)
        stack[n] = np.abs(g) ** 2
    if noise.std > 0:
        scale = noise.std * stack.max()
        for n in range(grid.n_led):
            rng = _noise_rng(noise.seed, n)
            stack[n] = np.maximum(stack[n] + scale * rng.standard_normal(stack[n].shape), 0.0)
    return stack
