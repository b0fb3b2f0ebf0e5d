"""Alternating-projection reconstruction of a high-resolution complex field."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .bicubic import bicubic_resize
from .errors import FieldError, NumericalError
from .field import crop_spectrum, embed_spectrum, forward_dft, inverse_dft

__all__ = ["ApConfig", "ApResult", "ap_reconstruct", "data_residual"]

ORDERINGS = ("spiral", "raster", "random")
INITS = ("upsampled_center", "random")


@dataclass(frozen=True)
class ApConfig:
    """Reconstruction options.

    ``ordering`` permutes the per-sweep LED visitation order only; the
    image-to-wavevector association stays correct.  ``misassociation_seed``
    additionally permutes that association itself (the degraded "random
    sequence" regime).
    """

    max_iterations: int = 50
    ordering: str = "spiral"
    order_seed: int = 0
    init: str = "upsampled_center"
    init_seed: int = 0
    tolerance: float = 1e-6
    epsilon: float = 1e-12
    misassociation_seed: Optional[int] = None

    def __post_init__(self):
        if self.max_iterations < 1:
            raise ValueError(f"max_iterations must be >= 1, got {self.max_iterations}")
        if self.tolerance < 0:
            raise ValueError(f"tolerance must be nonnegative, got {self.tolerance}")
        if self.epsilon <= 0:
            raise ValueError(f"epsilon must be positive, got {self.epsilon}")
        if self.ordering not in ORDERINGS:
            raise ValueError(f"ordering must be one of {ORDERINGS}, got {self.ordering!r}")
        if self.init not in INITS:
            raise ValueError(f"init must be one of {INITS}, got {self.init!r}")


@dataclass(frozen=True)
class ApResult:
    field: np.ndarray
    iterations_run: int
    residual_history: tuple


def visitation_order(grid, cfg):
    """Per-sweep visitation order over canonical LED indices (a permutation)."""
    n = grid.n_led
    if cfg.ordering == "spiral":
        return list(range(n))
    if cfg.ordering == "raster":
        return sorted(range(n), key=lambda i: grid.centers[i])
    rng = np.random.default_rng(cfg.order_seed)
    return list(rng.permutation(n))


def _check_stack(stack, grid, pupil):
    arr = np.asarray(stack, dtype=np.float64)
    if arr.shape != (grid.n_led, pupil.size, pupil.size):
        raise FieldError(
            f"stack shape {arr.shape} != ({grid.n_led}, {pupil.size}, {pupil.size})"
        )
    if arr.size and not np.isfinite(arr).all():
        raise FieldError("stack contains non-finite intensities")
    return arr


def _initial_field(stack, cfg, side):
    if cfg.init == "upsampled_center" and len(stack):
        return bicubic_resize(np.sqrt(stack[0]), side, side).astype(np.complex128)
    if cfg.init == "random":
        rng = np.random.default_rng(cfg.init_seed)
        amp = rng.random((side, side))
        phase = rng.random((side, side))
        return amp * np.exp(2j * np.pi * phase)
    return np.zeros((side, side), dtype=np.complex128)


def data_residual(stack, grid, pupil, spectrum_estimate):
    """Relative amplitude mismatch sum_n sum_p (sqrt(I_n) - |g_n|)^2 / sum I."""
    arr = _check_stack(stack, grid, pupil)
    total_i = arr.sum()
    if total_i == 0:
        return 0.0
    num = 0.0
    for n, center in enumerate(grid.centers):
        patch = crop_spectrum(spectrum_estimate, center, pupil.size)
        g = inverse_dft(pupil.mask * patch)
        num += np.sum((np.sqrt(arr[n]) - np.abs(g)) ** 2)
    return float(num / total_i)


def ap_reconstruct(stack, grid, pupil, cfg=ApConfig()):
    """Run alternating-projection sweeps and return the recovered field.

    Each visited LED n applies: estimate the low-res field through the pupil,
    replace its modulus with the measured sqrt(I_n) (epsilon-guarded), and
    write the updated patch back into the full spectrum on the pupil support.
    Sweeps stop at ``max_iterations`` or when the relative spectrum change
    between sweeps drops below ``tolerance``.
    """
    arr = _check_stack(stack, grid, pupil)
    side = grid.high_res_side
    spectrum = forward_dft(_initial_field(arr, cfg, side))

    assoc = np.arange(grid.n_led)
    if cfg.misassociation_seed is not None:
        assoc = np.random.default_rng(cfg.misassociation_seed).permutation(grid.n_led)
    order = visitation_order(grid, cfg)
    measured_amp = np.sqrt(arr)

    residuals = []
    iterations = 0
    for sweep in range(cfg.max_iterations):
        prev = spectrum
        for n in order:
            patch = crop_spectrum(spectrum, grid.centers[n], pupil.size)
            g = inverse_dft(pupil.mask * patch)
            g = g * (measured_amp[assoc[n]] / np.maximum(np.abs(g), cfg.epsilon))
            spectrum = embed_spectrum(
                forward_dft(g), spectrum, grid.centers[n], pupil.mask
            )
        iterations = sweep + 1
        if not np.isfinite(spectrum).all():
            raise NumericalError(f"non-finite spectrum after sweep {sweep}")
        residuals.append(data_residual(arr[assoc], grid, pupil, spectrum))
        prev_norm = np.linalg.norm(prev)
        change = np.linalg.norm(spectrum - prev) / prev_norm if prev_norm else 0.0
        if change < cfg.tolerance:
            break

    return ApResult(
        field=inverse_dft(spectrum),
        iterations_run=iterations,
        residual_history=tuple(residuals),
    )
