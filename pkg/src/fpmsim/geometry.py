"""Illumination-grid geometry: wave vectors, disk-overlap math, LED layout."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import GeometryError

__all__ = [
    "PhysicalConfig",
    "IlluminationGrid",
    "angle_to_wavevector",
    "wavevector_to_bins",
    "overlap_ratio",
    "spacing_for_overlap",
    "make_grid",
]


@dataclass(frozen=True)
class PhysicalConfig:
    """Physical illumination parameters: wavelength, per-LED tilt angles, FOV.

    ``angles`` holds (theta_x, theta_y) in radians per LED; ``field_of_view``
    is the side length of the imaged region (same length unit as the
    wavelength), which sets the frequency resolution 1/FOV per bin.
    """

    wavelength: float
    angles: tuple
    field_of_view: float

    def __post_init__(self):
        if self.wavelength <= 0:
            raise GeometryError(f"wavelength must be positive, got {self.wavelength}")
        if self.field_of_view <= 0:
            raise GeometryError(f"field_of_view must be positive, got {self.field_of_view}")


def angle_to_wavevector(cfg, led_index):
    """Continuous wave vector (kx, ky) in cycles/length for one LED tilt."""
    if not 0 <= led_index < len(cfg.angles):
        raise GeometryError(f"led_index {led_index} out of range for {len(cfg.angles)} angles")
    tx, ty = cfg.angles[led_index]
    sx, sy = math.sin(tx), math.sin(ty)
    if abs(sx) > 1 or abs(sy) > 1:
        raise GeometryError(f"|sin(theta)| > 1 for LED {led_index}: ({sx}, {sy})")
    return (sx / cfg.wavelength, sy / cfg.wavelength)


def wavevector_to_bins(k, field_of_view):
    """Round a continuous wave vector to centered frequency bins (resolution 1/FOV)."""
    return (round(k[0] * field_of_view), round(k[1] * field_of_view))


def overlap_ratio(spacing, pupil_radius):
    """Fractional intersection area of two equal disks at center distance ``spacing``.

    Closed form: (2/pi) * (acos(u) - u*sqrt(1 - u^2)) with u = d / 2r,
    clamped to 0 for d >= 2r.
    """
    if pupil_radius <= 0:
        raise GeometryError(f"pupil_radius must be positive, got {pupil_radius}")
    if spacing < 0:
        raise GeometryError(f"spacing must be nonnegative, got {spacing}")
    u = spacing / (2.0 * pupil_radius)
    if u >= 1.0:
        return 0.0
    return (2.0 / math.pi) * (math.acos(u) - u * math.sqrt(1.0 - u * u))


def spacing_for_overlap(target, pupil_radius):
    """Invert :func:`overlap_ratio` by bisection, accurate to 1e-9 in ratio."""
    if not 0 <= target < 1:
        raise GeometryError(f"overlap target must be in [0, 1), got {target}")
    if target == 0:
        return 2.0 * pupil_radius
    lo, hi = 0.0, 2.0 * pupil_radius  # ratio is strictly decreasing on (0, 2r)
    while hi - lo > 1e-13 * pupil_radius:
        mid = 0.5 * (lo + hi)
        if overlap_ratio(mid, pupil_radius) > target:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def _spiral_sorted(centers):
    # outward spiral: non-decreasing distance from the spectrum center,
    # angle as deterministic tie-break
    return sorted(centers, key=lambda c: (c[0] * c[0] + c[1] * c[1], math.atan2(c[0], c[1])))


@dataclass(frozen=True)
class IlluminationGrid:
    """Square LED grid in centered-bin coordinates, spiral-ordered.

    ``centers[0]`` is the center LED; subsequent entries are sorted by
    distance from the spectrum center.  ``spacing`` is the real-valued bin
    pitch before per-center integer rounding.
    """

    n_side: int
    spacing: float
    pupil_radius: float
    high_res_side: int
    centers: tuple

    @property
    def n_led(self):
        return self.n_side * self.n_side

    def achieved_overlap(self):
        """Mean disk-overlap ratio over adjacent (rounded) center pairs."""
        by_pos = {}
        half = (self.n_side - 1) / 2.0
        for cy, cx in self.centers:
            i = round(cy / self.spacing + half) if self.spacing else 0
            j = round(cx / self.spacing + half) if self.spacing else 0
            by_pos[(i, j)] = (cy, cx)
        ratios = []
        for (i, j), (cy, cx) in by_pos.items():
            for di, dj in ((0, 1), (1, 0)):
                nb = by_pos.get((i + di, j + dj))
                if nb is not None:
                    d = math.hypot(nb[0] - cy, nb[1] - cx)
                    ratios.append(overlap_ratio(d, self.pupil_radius))
        if not ratios:
            return 1.0
        return float(np.mean(ratios))


def make_grid(n_side, pupil_radius, high_res_side, overlap=None, spacing=None, low_res_side=None):
    """Build a validated n_side x n_side illumination grid.

    Exactly one of ``overlap`` (disk-area ratio in [0, 1)) or ``spacing``
    (bins) must be given.  Rejects any geometry whose pupil disks or crop
    windows would fall outside the high-res spectrum.
    """
    if (overlap is None) == (spacing is None):
        raise GeometryError("specify exactly one of overlap or spacing")
    if n_side < 1:
        raise GeometryError(f"n_side must be >= 1, got {n_side}")
    if spacing is None:
        spacing = spacing_for_overlap(overlap, pupil_radius)
    if spacing < 0:
        raise GeometryError(f"spacing must be nonnegative, got {spacing}")

    half = (n_side - 1) / 2.0
    centers = []
    for i in range(n_side):
        for j in range(n_side):
            centers.append((round((i - half) * spacing), round((j - half) * spacing)))
    centers = _spiral_sorted(centers)

    lo = -(high_res_side // 2)
    hi = high_res_side - 1 - high_res_side // 2
    half_win = None if low_res_side is None else low_res_side // 2
    for cy, cx in centers:
        for c in (cy, cx):
            if c - pupil_radius < lo or c + pupil_radius > hi:
                raise GeometryError(
                    f"pupil disk at center offset ({cy}, {cx}) with radius {pupil_radius} "
                    f"exceeds the {high_res_side}x{high_res_side} spectrum "
                    f"(extent {abs(c) + pupil_radius:g} > {hi})"
                )
        if half_win is not None:
            y0 = high_res_side // 2 + cy - half_win
            x0 = high_res_side // 2 + cx - half_win
            if y0 < 0 or x0 < 0 or y0 + low_res_side > high_res_side or x0 + low_res_side > high_res_side:
                raise GeometryError(
                    f"{low_res_side}x{low_res_side} crop window at offset ({cy}, {cx}) "
                    f"exceeds the {high_res_side}x{high_res_side} spectrum"
                )

    return IlluminationGrid(
        n_side=n_side,
        spacing=float(spacing),
        pupil_radius=float(pupil_radius),
        high_res_side=high_res_side,
        centers=tuple(centers),
    )
