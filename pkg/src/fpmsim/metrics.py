"""Reference-based image quality metrics on [0, 1] grayscale images."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import FieldError

__all__ = ["PSNR_CAP_DB", "psnr", "ssim", "EvalRecord"]

PSNR_CAP_DB = 99.0

_SSIM_WINDOW = 11
_SSIM_SIGMA = 1.5
_K1, _K2 = 0.01, 0.03


def _as_pair(reference, test):
    ref = np.asarray(reference, dtype=np.float64)
    tst = np.asarray(test, dtype=np.float64)
    if ref.shape != tst.shape or ref.ndim != 2:
        raise FieldError(f"metric inputs must be equal-shape 2D arrays, got {ref.shape} vs {tst.shape}")
    return ref, tst


def psnr(reference, test):
    """Peak signal-to-noise ratio in dB for data range 1.0, capped at 99 dB."""
    ref, tst = _as_pair(reference, test)
    mse = np.mean((ref - tst) ** 2)
    if mse == 0:
        return PSNR_CAP_DB
    return min(PSNR_CAP_DB, float(10.0 * np.log10(1.0 / mse)))


def _gaussian_window(size=_SSIM_WINDOW, sigma=_SSIM_SIGMA):
    offsets = np.arange(size) - (size - 1) / 2.0
    g = np.exp(-(offsets ** 2) / (2.0 * sigma ** 2))
    w = np.outer(g, g)
    return w / w.sum()


def _windowed_mean(img, window):
    # 'valid' windowed weighted means via a sliding-window view; images here
    # are small (<= 128 px), so the dense view is cheap
    view = np.lib.stride_tricks.sliding_window_view(img, window.shape)
    return np.einsum("ijkl,kl->ij", view, window)


def ssim(reference, test):
    """Mean local SSIM: 11x11 Gaussian window (sigma 1.5), K1=0.01, K2=0.03, L=1."""
    ref, tst = _as_pair(reference, test)
    if min(ref.shape) < _SSIM_WINDOW:
        raise FieldError(f"ssim needs side >= {_SSIM_WINDOW}, got {ref.shape}")
    window = _gaussian_window()
    c1 = (_K1 * 1.0) ** 2
    c2 = (_K2 * 1.0) ** 2

    mu_r = _windowed_mean(ref, window)
    mu_t = _windowed_mean(tst, window)
    var_r = _windowed_mean(ref * ref, window) - mu_r ** 2
    var_t = _windowed_mean(tst * tst, window) - mu_t ** 2
    cov = _windowed_mean(ref * tst, window) - mu_r * mu_t

    num = (2 * mu_r * mu_t + c1) * (2 * cov + c2)
    den = (mu_r ** 2 + mu_t ** 2 + c1) * (var_r + var_t + c2)
    return float(np.mean(num / den))


@dataclass(frozen=True)
class EvalRecord:
    """One reconstruction scored against its ground truth."""

    source: str
    method: str
    overlap: float
    noise_std: float
    ordering: str
    psnr_db: float
    ssim: float
    runtime_s: float

    def __post_init__(self):
        if self.ssim > 1.0 + 1e-12:
            raise FieldError(f"ssim {self.ssim} > 1")
        if self.psnr_db < 0:
            raise FieldError(f"psnr {self.psnr_db} < 0")
