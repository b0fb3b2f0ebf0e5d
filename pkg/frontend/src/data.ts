/**
 * Dataset plumbing: manifest rows -> training tensors.
 *
 * Inputs are upsampled cubes exactly as stored (normalized [0, 1] channels,
 * possibly shuffled; the network is trained to be order-agnostic). Targets
 * are the single-channel ground-truth amplitude cubes named in the metadata.
 */

import * as path from "node:path";

import * as tf from "@tensorflow/tfjs";

import { CubeFormatError, IntensityCube, ManifestRow, readCube } from "./fpc.js";

export interface Example {
  /** H x W x C input */
  input: tf.Tensor3D;
  /** H x W x 1 target */
  target: tf.Tensor3D;
  source: string;
}

export function requireUpsampled(cube: IntensityCube, name: string): void {
  if (!cube.upsampled) {
    throw new CubeFormatError(
      `${name} is a raw ${cube.side}x${cube.side} cube; run upsample_cube ` +
        "(or gen-dataset --upsampled) to produce the 128x128 form first"
    );
  }
}

export function cubeToInput(cube: IntensityCube): tf.Tensor3D {
  // stored channel-major; the network wants HWC
  const chw = tf.tensor3d(cube.data, [cube.channels, cube.side, cube.side]);
  const hwc = chw.transpose([1, 2, 0]) as tf.Tensor3D;
  chw.dispose();
  return hwc;
}

export function loadExample(row: ManifestRow): Example {
  const cube = readCube(row.cubePath);
  requireUpsampled(cube, path.basename(row.cubePath));
  const gtPath = path.join(path.dirname(row.cubePath), cube.meta.ground_truth);
  const gt = readCube(gtPath);
  if (gt.channels !== 1 || gt.side !== cube.side) {
    throw new CubeFormatError(
      `ground truth ${cube.meta.ground_truth} is ${gt.channels}x${gt.side}x${gt.side}, ` +
        `expected 1x${cube.side}x${cube.side}`
    );
  }
  return {
    input: cubeToInput(cube),
    target: tf.tensor3d(gt.data, [gt.side, gt.side, 1]),
    source: row.source,
  };
}

/** Deterministic PRNG (mulberry32) so data order is reproducible per seed. */
export function seededRandom(seed: number): () => number {
  let state = seed >>> 0;
  return () => {
    state = (state + 0x6d2b79f5) >>> 0;
    let t = state;
    t = Math.imul(t ^ (t >>> 15), t | 1);
    t ^= t + Math.imul(t ^ (t >>> 7), t | 61);
    return ((t ^ (t >>> 14)) >>> 0) / 4294967296;
  };
}

export function shuffledIndices(n: number, rand: () => number): number[] {
  const idx = Array.from({ length: n }, (_, i) => i);
  for (let i = n - 1; i > 0; i--) {
    const j = Math.floor(rand() * (i + 1));
    [idx[i], idx[j]] = [idx[j], idx[i]];
  }
  return idx;
}
