/**
 * The .fpc intensity-cube container, mirroring the Python toolkit's format.
 *
 * Layout (little-endian): magic "FPCUBE1\0"; u32 version/side/channels/flags
 * (bit 0 = upsampled); u64 metadata length; UTF-8 JSON metadata; float32
 * channel-major payload; trailing u64 CRC-64/XZ of the payload bytes.
 */

import * as fs from "node:fs";
import * as path from "node:path";

export const MAGIC = "FPCUBE1\0";
export const VERSION = 1;
export const FLAG_UPSAMPLED = 1;

export interface CubeMeta {
  spacing: number;
  pupil_radius: number;
  overlap_achieved: number;
  noise_std: number;
  shuffle_seed: number;
  permutation: number[];
  norm_constants: number[];
  source_id: string;
  ground_truth: string;
}

export interface IntensityCube {
  side: number;
  channels: number;
  /** channel-major, row-major within each channel */
  data: Float32Array;
  meta: CubeMeta;
  upsampled: boolean;
}

export class CubeFormatError extends Error {}

const CRC64_POLY = 0xc96c5795d7870f42n;
const MASK64 = 0xffffffffffffffffn;

const CRC64_TABLE: bigint[] = (() => {
  const table: bigint[] = [];
  for (let byte = 0; byte < 256; byte++) {
    let crc = BigInt(byte);
    for (let i = 0; i < 8; i++) {
      crc = crc & 1n ? (crc >> 1n) ^ CRC64_POLY : crc >> 1n;
    }
    table.push(crc);
  }
  return table;
})();

/** CRC-64/XZ of a byte buffer. */
export function crc64(data: Uint8Array): bigint {
  let crc = MASK64;
  for (const byte of data) {
    crc = CRC64_TABLE[Number((crc ^ BigInt(byte)) & 0xffn)] ^ (crc >> 8n);
  }
  return (crc ^ MASK64) & MASK64;
}

function validateMeta(raw: unknown): CubeMeta {
  const meta = raw as CubeMeta;
  const fields = [
    "spacing", "pupil_radius", "overlap_achieved", "noise_std",
    "shuffle_seed", "permutation", "norm_constants", "source_id", "ground_truth",
  ];
  for (const f of fields) {
    if (!(f in (meta as object))) {
      throw new CubeFormatError(`cube metadata missing field "${f}"`);
    }
  }
  const perm = [...meta.permutation].sort((a, b) => a - b);
  if (!perm.every((p, i) => p === i)) {
    throw new CubeFormatError(`invalid channel permutation [${meta.permutation}]`);
  }
  return meta;
}

export function readCube(filePath: string): IntensityCube {
  const buf = fs.readFileSync(filePath);
  let off = 0;
  const need = (n: number, what: string) => {
    if (off + n > buf.length) {
      throw new CubeFormatError(
        `truncated cube file: expected ${n} bytes of ${what} at offset ${off}`
      );
    }
  };

  need(8, "magic");
  const magic = buf.toString("latin1", 0, 8);
  off = 8;
  if (magic !== MAGIC) {
    throw new CubeFormatError(`bad magic ${JSON.stringify(magic)}`);
  }
  need(16, "header");
  const version = buf.readUInt32LE(off);
  const side = buf.readUInt32LE(off + 4);
  const channels = buf.readUInt32LE(off + 8);
  const flags = buf.readUInt32LE(off + 12);
  off += 16;
  if (version !== VERSION) {
    throw new CubeFormatError(`unsupported cube version ${version}, expected ${VERSION}`);
  }
  need(8, "metadata length");
  const metaLen = Number(buf.readBigUInt64LE(off));
  off += 8;
  need(metaLen, "metadata");
  const meta = validateMeta(JSON.parse(buf.toString("utf-8", off, off + metaLen)));
  off += metaLen;
  if (meta.permutation.length !== channels) {
    throw new CubeFormatError(
      `permutation length ${meta.permutation.length} != channels ${channels}`
    );
  }

  const payloadLen = 4 * channels * side * side;
  need(payloadLen, "payload");
  const payload = buf.subarray(off, off + payloadLen);
  off += payloadLen;
  need(8, "checksum");
  const stored = buf.readBigUInt64LE(off);
  const actual = crc64(payload);
  if (stored !== actual) {
    throw new CubeFormatError(
      `payload checksum mismatch: stored 0x${stored.toString(16)}, computed 0x${actual.toString(16)}`
    );
  }

  // copy to an aligned Float32Array (Buffer slices may be unaligned)
  const data = new Float32Array(
    payload.buffer.slice(payload.byteOffset, payload.byteOffset + payloadLen)
  );
  return { side, channels, data, meta, upsampled: (flags & FLAG_UPSAMPLED) !== 0 };
}

export function writeCube(cube: IntensityCube, filePath: string): void {
  const expected = cube.channels * cube.side * cube.side;
  if (cube.data.length !== expected) {
    throw new CubeFormatError(
      `cube data length ${cube.data.length} != ${expected}`
    );
  }
  validateMeta(cube.meta);
  const metaBytes = Buffer.from(JSON.stringify(sortKeys(cube.meta)), "utf-8");
  const payload = Buffer.from(cube.data.buffer, cube.data.byteOffset, expected * 4);

  const header = Buffer.alloc(8 + 16 + 8);
  header.write(MAGIC, 0, "latin1");
  header.writeUInt32LE(VERSION, 8);
  header.writeUInt32LE(cube.side, 12);
  header.writeUInt32LE(cube.channels, 16);
  header.writeUInt32LE(cube.upsampled ? FLAG_UPSAMPLED : 0, 20);
  header.writeBigUInt64LE(BigInt(metaBytes.length), 24);

  const crc = Buffer.alloc(8);
  crc.writeBigUInt64LE(crc64(payload));
  fs.writeFileSync(filePath, Buffer.concat([header, metaBytes, payload, crc]));
}

function sortKeys(meta: CubeMeta): Record<string, unknown> {
  const out: Record<string, unknown> = {};
  for (const key of Object.keys(meta).sort()) {
    out[key] = (meta as unknown as Record<string, unknown>)[key];
  }
  return out;
}

/** Channels reordered back to canonical LED order. */
export function unshuffled(cube: IntensityCube): IntensityCube {
  const n = cube.channels;
  const plane = cube.side * cube.side;
  const data = new Float32Array(cube.data.length);
  for (let slot = 0; slot < n; slot++) {
    const led = cube.meta.permutation[slot];
    data.set(cube.data.subarray(slot * plane, (slot + 1) * plane), led * plane);
  }
  return {
    ...cube,
    data,
    meta: { ...cube.meta, permutation: Array.from({ length: n }, (_, i) => i) },
  };
}

export interface ManifestRow {
  cubePath: string;
  source: string;
  overlap: number;
  noiseStd: number;
  seed: number;
  checksum: string;
}

export const MANIFEST_HEADER = "cube_path,source,overlap,noise_std,seed,checksum";

/** Parse a corpus manifest CSV; rows with an empty cube_path are skipped. */
export function readManifest(manifestPath: string): ManifestRow[] {
  const text = fs.readFileSync(manifestPath, "utf-8");
  const lines = text.split(/\r?\n/).filter((l) => l.length > 0);
  if (lines[0] !== MANIFEST_HEADER) {
    throw new CubeFormatError(`unexpected manifest header "${lines[0]}"`);
  }
  const dir = path.dirname(manifestPath);
  const rows: ManifestRow[] = [];
  for (const line of lines.slice(1)) {
    const [cubePath, source, overlap, noiseStd, seed, checksum] = line.split(",");
    if (!cubePath) continue;
    rows.push({
      cubePath: path.join(dir, cubePath),
      source,
      overlap: parseFloat(overlap),
      noiseStd: parseFloat(noiseStd),
      seed: parseInt(seed, 10),
      checksum,
    });
  }
  return rows;
}
