"""Separable bicubic resampling (Keys kernel, a = -0.5, half-pixel centers)."""

from __future__ import annotations

import numpy as np

__all__ = ["cubic_kernel", "bicubic_resize"]

_A = -0.5


def cubic_kernel(x):
    """Keys cubic convolution kernel with a = -0.5, vectorized over x."""
    x = np.abs(np.asarray(x, dtype=np.float64))
    out = np.zeros_like(x)
    inner = x <= 1
    outer = (x > 1) & (x < 2)
    out[inner] = (_A + 2) * x[inner] ** 3 - (_A + 3) * x[inner] ** 2 + 1
    out[outer] = _A * x[outer] ** 3 - 5 * _A * x[outer] ** 2 + 8 * _A * x[outer] - 4 * _A
    return out


def _weight_matrix(n_out, n_in):
    # output pixel centers map to input coordinates via half-pixel alignment
    src = (np.arange(n_out) + 0.5) * (n_in / n_out) - 0.5
    base = np.floor(src).astype(int)
    w = np.zeros((n_out, n_in))
    for tap in range(-1, 3):
        idx = base + tap
        weight = cubic_kernel(src - idx)
        idx = np.clip(idx, 0, n_in - 1)  # replicate edges
        np.add.at(w, (np.arange(n_out), idx), weight)
    return w


def bicubic_resize(image, out_h, out_w):
    """Resize a 2D array with separable bicubic interpolation.

    Edges are handled by sample replication; no clamping is applied to the
    values (callers clamp if their data has a bounded range).
    """
    img = np.asarray(image, dtype=np.float64)
    if img.ndim != 2:
        raise ValueError(f"expected a 2D image, got shape {img.shape}")
    wy = _weight_matrix(out_h, img.shape[0])
    wx = _weight_matrix(out_w, img.shape[1])
    return wy @ img @ wx.T
