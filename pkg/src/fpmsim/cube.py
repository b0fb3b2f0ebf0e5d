"""The .fpc intensity-cube container: in-memory type and binary file format.

File layout (little-endian):

* magic ``FPCUBE1\\0`` (8 bytes)
* u32 version (= 1), u32 side, u32 channels, u32 flags (bit 0: upsampled)
* u64 metadata byte length, then that many bytes of UTF-8 JSON metadata
* float32 payload, channel-major, row-major within each channel
* u64 CRC-64 (ECMA-182) of the payload bytes
"""

from __future__ import annotations

import json
import struct
from dataclasses import asdict, dataclass, field as dc_field, replace

import numpy as np

from .errors import CubeFormatError

__all__ = ["CubeMeta", "IntensityCube", "write_cube", "read_cube", "crc64"]

MAGIC = b"FPCUBE1\0"
VERSION = 1
FLAG_UPSAMPLED = 1

_CRC64_POLY = 0xC96C5795D7870F42  # ECMA-182, reflected


def _crc64_table():
    table = []
    for byte in range(256):
        crc = byte
        for _ in range(8):
            crc = (crc >> 1) ^ _CRC64_POLY if crc & 1 else crc >> 1
        table.append(crc)
    return table


_TABLE = _crc64_table()


def crc64(data):
    """CRC-64/XZ of a bytes-like object."""
    crc = 0xFFFFFFFFFFFFFFFF
    for byte in bytes(data):
        crc = _TABLE[(crc ^ byte) & 0xFF] ^ (crc >> 8)
    return crc ^ 0xFFFFFFFFFFFFFFFF


@dataclass(frozen=True)
class CubeMeta:
    """Provenance needed to invert a cube back to physical intensities."""

    spacing: float
    pupil_radius: float
    overlap_achieved: float
    noise_std: float
    shuffle_seed: int
    permutation: tuple
    norm_constants: tuple
    source_id: str
    ground_truth: str = ""

    def __post_init__(self):
        if not 0 <= self.overlap_achieved <= 1:
            raise CubeFormatError(
                f"overlap_achieved must be in [0, 1], got {self.overlap_achieved}"
            )
        perm = tuple(int(p) for p in self.permutation)
        if sorted(perm) != list(range(len(perm))):
            raise CubeFormatError(f"invalid channel permutation {perm}")
        object.__setattr__(self, "permutation", perm)
        object.__setattr__(self, "norm_constants", tuple(float(c) for c in self.norm_constants))

    def to_json(self):
        return json.dumps(asdict(self), sort_keys=True)

    @classmethod
    def from_json(cls, text):
        try:
            raw = json.loads(text)
            return cls(**raw)
        except (TypeError, ValueError) as exc:
            raise CubeFormatError(f"invalid cube metadata: {exc}") from exc


@dataclass(frozen=True)
class IntensityCube:
    """Stack of per-LED intensity channels in [0, 1], channel-major.

    ``meta.permutation`` maps channel slot -> canonical LED index;
    ``meta.norm_constants`` are the per-channel pre-normalization maxima.
    """

    side: int
    channels: int
    data: np.ndarray = dc_field(repr=False)
    meta: CubeMeta = dc_field(repr=True)
    upsampled: bool = False

    def __post_init__(self):
        if self.data.shape != (self.channels, self.side, self.side):
            raise CubeFormatError(
                f"cube data shape {self.data.shape} != ({self.channels}, {self.side}, {self.side})"
            )
        if self.data.dtype != np.float32:
            object.__setattr__(self, "data", self.data.astype(np.float32))
        if len(self.meta.permutation) != self.channels:
            raise CubeFormatError(
                f"permutation length {len(self.meta.permutation)} != channels {self.channels}"
            )
        self.data.setflags(write=False)

    def unshuffled(self):
        """Channels reordered back to canonical LED order."""
        inverse = np.argsort(np.asarray(self.meta.permutation))
        data = np.ascontiguousarray(self.data[inverse])
        meta = replace(self.meta, permutation=tuple(range(self.channels)))
        return IntensityCube(self.side, self.channels, data, meta, self.upsampled)

    def denormalized(self):
        """Float64 intensities with the per-channel normalization undone."""
        consts = np.asarray(self.meta.norm_constants, dtype=np.float64)
        return self.data.astype(np.float64) * consts[:, None, None]


def write_cube(cube, path):
    meta_bytes = cube.meta.to_json().encode("utf-8")
    payload = np.ascontiguousarray(cube.data, dtype="<f4").tobytes()
    flags = FLAG_UPSAMPLED if cube.upsampled else 0
    with open(path, "wb") as fh:
        fh.write(MAGIC)
        fh.write(struct.pack("<IIII", VERSION, cube.side, cube.channels, flags))
        fh.write(struct.pack("<Q", len(meta_bytes)))
        fh.write(meta_bytes)
        fh.write(payload)
        fh.write(struct.pack("<Q", crc64(payload)))


def _read_exact(fh, n, what):
    data = fh.read(n)
    if len(data) != n:
        raise CubeFormatError(f"truncated cube file: expected {n} bytes of {what}, got {len(data)}")
    return data


def read_cube(path):
    with open(path, "rb") as fh:
        magic = _read_exact(fh, len(MAGIC), "magic")
        if magic != MAGIC:
            raise CubeFormatError(f"bad magic {magic!r}, expected {MAGIC!r}")
        version, side, channels, flags = struct.unpack("<IIII", _read_exact(fh, 16, "header"))
        if version != VERSION:
            raise CubeFormatError(f"unsupported cube version {version}, expected {VERSION}")
        (meta_len,) = struct.unpack("<Q", _read_exact(fh, 8, "metadata length"))
        meta = CubeMeta.from_json(_read_exact(fh, meta_len, "metadata").decode("utf-8"))
        payload = _read_exact(fh, 4 * channels * side * side, "payload")
        (stored_crc,) = struct.unpack("<Q", _read_exact(fh, 8, "checksum"))
        actual_crc = crc64(payload)
        if stored_crc != actual_crc:
            raise CubeFormatError(
                f"payload checksum mismatch: stored {stored_crc:#018x}, computed {actual_crc:#018x}"
            )
        data = np.frombuffer(payload, dtype="<f4").reshape(channels, side, side).copy()
        return IntensityCube(
            side=side,
            channels=channels,
            data=data,
            meta=meta,
            upsampled=bool(flags & FLAG_UPSAMPLED),
        )
