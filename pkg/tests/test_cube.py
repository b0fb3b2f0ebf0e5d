import struct

import numpy as np
import pytest

from fpmsim import CubeFormatError, CubeMeta, IntensityCube, read_cube, write_cube
from fpmsim.cube import MAGIC, crc64


def make_meta(channels=4, **overrides):
    kwargs = dict(
        spacing=7.5,
        pupil_radius=12.0,
        overlap_achieved=0.65,
        noise_std=0.0,
        shuffle_seed=0,
        permutation=tuple(range(channels)),
        norm_constants=tuple(1.0 for _ in range(channels)),
        source_id="unit",
        ground_truth="unit.gt.fpc",
    )
    kwargs.update(overrides)
    return CubeMeta(**kwargs)


def make_cube(rng, channels=4, side=8, **meta_overrides):
    data = rng.random((channels, side, side)).astype(np.float32)
    return IntensityCube(side=side, channels=channels, data=data,
                         meta=make_meta(channels, **meta_overrides))


class TestCrc64:
    def test_check_value(self):
        # standard CRC-64/XZ check value
        assert crc64(b"123456789") == 0x995DC9BBDF1939FA

    def test_empty_input(self):
        assert crc64(b"") == 0

    def test_sensitive_to_single_bit(self):
        base = crc64(b"\x00" * 64)
        flipped = crc64(b"\x00" * 63 + b"\x01")
        assert base != flipped


class TestCubeMeta:
    def test_json_round_trip(self):
        meta = make_meta(3, permutation=(2, 0, 1), norm_constants=(0.5, 1.0, 2.0))
        assert CubeMeta.from_json(meta.to_json()) == meta

    def test_rejects_bad_overlap(self):
        with pytest.raises(CubeFormatError):
            make_meta(overlap_achieved=1.5)

    def test_rejects_bad_permutation(self):
        with pytest.raises(CubeFormatError):
            make_meta(4, permutation=(0, 1, 1, 3))

    def test_rejects_unknown_json_fields(self):
        with pytest.raises(CubeFormatError):
            CubeMeta.from_json('{"bogus": 1}')


class TestIntensityCube:
    def test_shape_validated(self, rng):
        with pytest.raises(CubeFormatError):
            IntensityCube(side=8, channels=4, data=rng.random((4, 8, 7)).astype(np.float32),
                          meta=make_meta(4))

    def test_permutation_length_validated(self, rng):
        with pytest.raises(CubeFormatError):
            IntensityCube(side=8, channels=4, data=rng.random((4, 8, 8)).astype(np.float32),
                          meta=make_meta(3))

    def test_data_is_read_only(self, rng):
        cube = make_cube(rng)
        with pytest.raises(ValueError):
            cube.data[0, 0, 0] = 1.0

    def test_unshuffled_inverts_permutation(self, rng):
        data = rng.random((4, 8, 8)).astype(np.float32)
        perm = (2, 0, 3, 1)  # slot i holds canonical channel perm[i]
        cube = IntensityCube(side=8, channels=4, data=data,
                             meta=make_meta(4, permutation=perm, shuffle_seed=5))
        canonical = cube.unshuffled()
        assert canonical.meta.permutation == (0, 1, 2, 3)
        for slot, led in enumerate(perm):
            assert np.array_equal(canonical.data[led], data[slot])

    def test_denormalized_restores_scale(self, rng):
        consts = (0.25, 2.0, 1.0, 8.0)
        cube = make_cube(rng, norm_constants=consts)
        restored = cube.denormalized()
        assert restored.dtype == np.float64
        for c, k in enumerate(consts):
            assert restored[c] == pytest.approx(cube.data[c].astype(np.float64) * k)


class TestCubeFile:
    def test_round_trip_bitwise(self, rng, tmp_path):
        cube = make_cube(rng, channels=5, side=16,
                         permutation=(3, 1, 4, 0, 2), shuffle_seed=9,
                         norm_constants=(0.1, 0.2, 0.3, 0.4, 0.5))
        path = tmp_path / "roundtrip.fpc"
        write_cube(cube, path)
        loaded = read_cube(path)
        assert loaded.side == cube.side and loaded.channels == cube.channels
        assert loaded.meta == cube.meta
        assert loaded.upsampled == cube.upsampled
        assert np.array_equal(loaded.data, cube.data)

    def test_write_is_deterministic(self, rng, tmp_path):
        cube = make_cube(rng)
        p1, p2 = tmp_path / "a.fpc", tmp_path / "b.fpc"
        write_cube(cube, p1)
        write_cube(cube, p2)
        assert p1.read_bytes() == p2.read_bytes()

    def test_upsampled_flag_round_trip(self, rng, tmp_path):
        data = rng.random((2, 16, 16)).astype(np.float32)
        cube = IntensityCube(side=16, channels=2, data=data,
                             meta=make_meta(2), upsampled=True)
        path = tmp_path / "up.fpc"
        write_cube(cube, path)
        assert read_cube(path).upsampled is True

    def test_bad_magic(self, rng, tmp_path):
        path = tmp_path / "bad.fpc"
        write_cube(make_cube(rng), path)
        raw = bytearray(path.read_bytes())
        raw[:8] = b"NOTACUBE"
        path.write_bytes(bytes(raw))
        with pytest.raises(CubeFormatError, match="magic"):
            read_cube(path)

    def test_bad_version(self, rng, tmp_path):
        path = tmp_path / "bad.fpc"
        write_cube(make_cube(rng), path)
        raw = bytearray(path.read_bytes())
        raw[8:12] = struct.pack("<I", 99)
        path.write_bytes(bytes(raw))
        with pytest.raises(CubeFormatError, match="version"):
            read_cube(path)

    def test_truncated_payload(self, rng, tmp_path):
        path = tmp_path / "bad.fpc"
        write_cube(make_cube(rng), path)
        path.write_bytes(path.read_bytes()[:-40])
        with pytest.raises(CubeFormatError, match="truncated"):
            read_cube(path)

    def test_corrupted_payload_fails_checksum(self, rng, tmp_path):
        path = tmp_path / "bad.fpc"
        write_cube(make_cube(rng), path)
        raw = bytearray(path.read_bytes())
        raw[-20] ^= 0xFF  # inside the payload, ahead of the trailing crc
        path.write_bytes(bytes(raw))
        with pytest.raises(CubeFormatError, match="checksum"):
            read_cube(path)

    def test_magic_constant(self):
        assert MAGIC == b"FPCUBE1\0"
        assert len(MAGIC) == 8
