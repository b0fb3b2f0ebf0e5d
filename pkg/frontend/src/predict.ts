/**
 * Stateless prediction: one upsampled cube in, one clamped single-channel
 * .fpc prediction out, scoreable by the evaluation harness.
 */

import * as fs from "node:fs";
import * as path from "node:path";

import * as tf from "@tensorflow/tfjs";

import { cubeToInput, requireUpsampled } from "./data.js";
import { IntensityCube, readCube, writeCube } from "./fpc.js";

export function predictCube(model: tf.LayersModel, cube: IntensityCube): Float32Array {
  return tf.tidy(() => {
    const input = cubeToInput(cube).expandDims(0);
    const out = model.predict(input) as tf.Tensor;
    const clamped = tf.clipByValue(out, 0, 1);
    return clamped.dataSync() as Float32Array;
  });
}

export function predictFile(
  model: tf.LayersModel,
  cubePath: string,
  outDir: string
): string {
  const cube = readCube(cubePath);
  requireUpsampled(cube, path.basename(cubePath));

  const data = predictCube(model, cube);
  const prediction: IntensityCube = {
    side: cube.side,
    channels: 1,
    data: new Float32Array(data),
    meta: {
      spacing: 0,
      pupil_radius: 1,
      overlap_achieved: 1,
      noise_std: 0,
      shuffle_seed: 0,
      permutation: [0],
      norm_constants: [1],
      source_id: cube.meta.source_id,
      ground_truth: cube.meta.ground_truth,
    },
    upsampled: true,
  };
  fs.mkdirSync(outDir, { recursive: true });
  const stem = path.basename(cubePath).replace(/\.fpc$/, "");
  const outPath = path.join(outDir, `${stem}.pred.fpc`);
  writeCube(prediction, outPath);
  return outPath;
}
