import numpy as np
import pytest

from fpmsim import (
    FieldError,
    circular_pupil,
    crop_spectrum,
    embed_spectrum,
    forward_dft,
    inverse_dft,
)


class TestForwardDft:
    def test_constant_field_is_dc_only(self):
        spec = forward_dft(np.ones((4, 4), dtype=complex))
        assert spec[2, 2] == pytest.approx(4.0)
        off_dc = spec.copy()
        off_dc[2, 2] = 0
        assert np.abs(off_dc).max() < 1e-13

    def test_delta_has_flat_spectrum(self):
        field = np.zeros((8, 8), dtype=complex)
        field[0, 0] = 1.0
        spec = forward_dft(field)
        assert np.abs(spec) == pytest.approx(np.full((8, 8), 1 / 8), abs=1e-14)

    def test_parseval(self, rng):
        field = rng.standard_normal((8, 8)) + 1j * rng.standard_normal((8, 8))
        e_field = np.sum(np.abs(field) ** 2)
        e_spec = np.sum(np.abs(forward_dft(field)) ** 2)
        assert abs(e_field - e_spec) <= 1e-12 * e_field

    def test_linearity(self, rng):
        f = rng.standard_normal((16, 16)) + 1j * rng.standard_normal((16, 16))
        g = rng.standard_normal((16, 16)) + 1j * rng.standard_normal((16, 16))
        a, b = 2.5 - 1j, -0.75 + 3j
        lhs = forward_dft(a * f + b * g)
        rhs = a * forward_dft(f) + b * forward_dft(g)
        assert np.abs(lhs - rhs).max() <= 1e-12 * np.abs(rhs).max()

    def test_rejects_non_finite_with_pixel_location(self):
        field = np.ones((4, 4), dtype=complex)
        field[1, 3] = np.nan
        with pytest.raises(FieldError, match=r"\(1, 3\)"):
            forward_dft(field)

    def test_rejects_non_2d(self):
        with pytest.raises(FieldError):
            forward_dft(np.ones(4, dtype=complex))


class TestInverseDft:
    def test_round_trip(self, rng):
        field = rng.standard_normal((16, 16)) + 1j * rng.standard_normal((16, 16))
        assert np.abs(inverse_dft(forward_dft(field)) - field).max() < 1e-12

    def test_center_bin_only_gives_constant(self):
        spec = np.zeros((4, 4), dtype=complex)
        spec[2, 2] = 4.0
        assert inverse_dft(spec) == pytest.approx(np.ones((4, 4)), abs=1e-14)

    def test_parseval_preserved(self, rng):
        spec = rng.standard_normal((16, 16)) + 1j * rng.standard_normal((16, 16))
        e_spec = np.sum(np.abs(spec) ** 2)
        e_field = np.sum(np.abs(inverse_dft(spec)) ** 2)
        assert abs(e_field - e_spec) <= 1e-12 * e_spec


class TestCropSpectrum:
    def test_full_size_crop_is_identity(self, rng):
        spec = rng.standard_normal((8, 8)) + 1j * rng.standard_normal((8, 8))
        assert np.array_equal(crop_spectrum(spec, (0, 0), 8), spec)

    def test_constant_field_crop_chain(self):
        # DC bin of a constant-1 128x128 field is 128 (orthonormal scaling);
        # the 32/128 crop scale turns it into 32, whose 32x32 inverse is
        # constant 1 again
        spec = forward_dft(np.ones((128, 128), dtype=complex))
        patch = crop_spectrum(spec, (0, 0), 32)
        assert patch[16, 16] == pytest.approx(32.0)
        assert inverse_dft(patch) == pytest.approx(np.ones((32, 32)), abs=1e-12)

    def test_offset_center_bin(self, rng):
        spec = rng.standard_normal((32, 32)) + 1j * rng.standard_normal((32, 32))
        patch = crop_spectrum(spec, (3, -5), 8)
        assert patch[4, 4] == pytest.approx(spec[16 + 3, 16 - 5] * (8 / 32))

    def test_out_of_bounds_rejected(self, rng):
        spec = rng.standard_normal((32, 32)).astype(complex)
        with pytest.raises(FieldError, match="outside"):
            crop_spectrum(spec, (14, 0), 8)


class TestEmbedSpectrum:
    def test_crop_embed_round_trip_on_support(self, rng):
        spec = rng.standard_normal((64, 64)) + 1j * rng.standard_normal((64, 64))
        pupil = circular_pupil(16, 6, antialiased=True)
        patch = crop_spectrum(spec, (5, -3), 16) * pupil.mask
        out = embed_spectrum(patch, spec, (5, -3), pupil.mask)
        window = out[32 + 5 - 8:32 + 5 + 8, 32 - 3 - 8:32 - 3 + 8]
        source = spec[32 + 5 - 8:32 + 5 + 8, 32 - 3 - 8:32 - 3 + 8]
        # rim bins carry the fractional mask weight, so the identity holds on
        # the fully transmitting interior
        full = pupil.mask == 1.0
        assert np.abs((window - source)[full]).max() < 1e-12 * np.abs(source).max()

    def test_embed_into_zero_spectrum_touches_only_support(self, rng):
        target = np.zeros((64, 64), dtype=complex)
        pupil = circular_pupil(16, 6)
        patch = (rng.standard_normal((16, 16)) + 1j * rng.standard_normal((16, 16))) * pupil.mask
        out = embed_spectrum(patch, target, (0, 0), pupil.mask)
        window = out[24:40, 24:40]
        assert np.all(window[~pupil.support] == 0)
        outside = out.copy()
        outside[24:40, 24:40] = 0
        assert np.all(outside == 0)

    def test_embed_then_crop_recovers_patch(self, rng):
        target = rng.standard_normal((64, 64)) + 1j * rng.standard_normal((64, 64))
        pupil = circular_pupil(16, 6)
        patch = (rng.standard_normal((16, 16)) + 1j * rng.standard_normal((16, 16))) * pupil.mask
        out = embed_spectrum(patch, target, (7, 2), pupil.mask)
        back = crop_spectrum(out, (7, 2), 16)
        assert np.abs((back - patch)[pupil.support]).max() < 1e-12

    def test_full_ones_mask_restores_window_bitwise(self, rng):
        # 32/128 is a power-of-two ratio, so the crop and embed scale factors
        # cancel exactly
        spec = rng.standard_normal((128, 128)) + 1j * rng.standard_normal((128, 128))
        patch = crop_spectrum(spec, (10, -20), 32)
        out = embed_spectrum(patch, spec, (10, -20), np.ones((32, 32)))
        assert np.array_equal(out, spec)

    def test_shape_mismatch_rejected(self, rng):
        spec = rng.standard_normal((32, 32)).astype(complex)
        with pytest.raises(FieldError):
            embed_spectrum(np.ones((8, 8), dtype=complex), spec, (0, 0), np.ones((4, 4)))


class TestPupil:
    def test_radially_symmetric(self):
        pupil = circular_pupil(33, 10.3, antialiased=True)
        c = 33 // 2
        for dy in range(0, 12):
            for dx in range(0, 12):
                base = pupil.mask[c + dy, c + dx]
                for sy, sx in ((1, -1), (-1, 1), (-1, -1)):
                    assert pupil.mask[c + sy * dy, c + sx * dx] == base
                assert pupil.mask[c + dx, c + dy] == base  # transpose symmetry

    def test_antialiased_ramp_values(self):
        pupil = circular_pupil(32, 10, antialiased=True)
        c = 16
        dist = np.hypot(*(np.indices((32, 32)) - c))
        assert np.all(pupil.mask[dist < 9.5] == 1.0)
        assert np.all(pupil.mask[dist > 10.5] == 0.0)
        ramp = (dist >= 9.5) & (dist <= 10.5)
        assert pupil.mask[ramp] == pytest.approx(10 + 0.5 - dist[ramp])

    def test_hard_mode_is_binary(self):
        pupil = circular_pupil(32, 12)
        assert set(np.unique(pupil.mask)) == {0.0, 1.0}

    def test_double_masking_idempotent_on_hard_bins(self, rng):
        pupil = circular_pupil(32, 10, antialiased=True)
        spec = rng.standard_normal((32, 32)) + 1j * rng.standard_normal((32, 32))
        once, twice = pupil.mask * spec, pupil.mask * pupil.mask * spec
        hard = (pupil.mask == 0) | (pupil.mask == 1)
        assert np.array_equal(once[hard], twice[hard])

    def test_radius_bounds(self):
        with pytest.raises(FieldError):
            circular_pupil(32, 0)
        with pytest.raises(FieldError):
            circular_pupil(32, 17)
