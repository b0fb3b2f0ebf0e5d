import numpy as np
import pytest

from fpmsim import bicubic_resize
from fpmsim.bicubic import cubic_kernel


class TestCubicKernel:
    def test_anchor_values(self):
        assert cubic_kernel(0.0) == 1.0
        assert cubic_kernel(1.0) == 0.0
        assert cubic_kernel(2.0) == 0.0
        assert cubic_kernel(2.5) == 0.0

    def test_half_sample_values(self):
        # a = -0.5: k(0.5) = 1.5/8 - 2.5/4 + 1 = 0.5625, k(1.5) = -0.0625
        assert cubic_kernel(0.5) == pytest.approx(0.5625)
        assert cubic_kernel(1.5) == pytest.approx(-0.0625)

    def test_even_symmetry(self):
        xs = np.linspace(-2, 2, 41)
        assert cubic_kernel(xs) == pytest.approx(cubic_kernel(-xs))

    def test_partition_of_unity(self):
        # integer-spaced taps of the Keys kernel sum to 1 for any phase
        for phase in np.linspace(0, 1, 11):
            taps = cubic_kernel(phase - np.arange(-1, 3))
            assert taps.sum() == pytest.approx(1.0, abs=1e-12)


class TestBicubicResize:
    def test_identity_resize(self, rng):
        img = rng.random((16, 16))
        assert bicubic_resize(img, 16, 16) == pytest.approx(img, abs=1e-12)

    def test_constant_preserved(self):
        img = np.full((8, 8), 0.37)
        out = bicubic_resize(img, 32, 32)
        assert out == pytest.approx(np.full((32, 32), 0.37), abs=1e-12)

    def test_linear_ramp_preserved_in_interior(self):
        # cubic convolution reproduces degree-1 polynomials away from the
        # replicated edges
        img = np.outer(np.ones(16), np.arange(16, dtype=np.float64))
        out = bicubic_resize(img, 16, 32)
        src = (np.arange(32) + 0.5) * 0.5 - 0.5
        interior = (src >= 1) & (src <= 14)
        assert out[8, interior] == pytest.approx(src[interior], abs=1e-12)

    def test_upsample_downsample_near_identity(self, rng):
        # smooth content survives a 4x round trip closely
        x = np.linspace(0, 2 * np.pi, 32)
        img = 0.5 + 0.4 * np.outer(np.sin(x), np.cos(x))
        back = bicubic_resize(bicubic_resize(img, 128, 128), 32, 32)
        assert np.abs(back - img).max() < 5e-3

    def test_non_square_output(self, rng):
        out = bicubic_resize(rng.random((10, 20)), 15, 7)
        assert out.shape == (15, 7)

    def test_rejects_non_2d(self):
        with pytest.raises(ValueError):
            bicubic_resize(np.zeros(8), 4, 4)

    def test_overshoot_possible_but_bounded(self):
        # a step edge produces the classic cubic over/undershoot; callers that
        # need [0, 1] data are expected to clamp
        img = np.zeros((8, 8))
        img[:, 4:] = 1.0
        out = bicubic_resize(img, 8, 32)
        assert out.max() > 1.0
        assert out.min() < 0.0
        assert out.max() < 1.1 and out.min() > -0.1
