/**
 * MAE training loop over a cube corpus, with a CSV training log
 * (iteration,mae,val_psnr) and periodic checkpoints.
 */

import * as fs from "node:fs";
import * as path from "node:path";

import * as tf from "@tensorflow/tfjs";

import { saveModel } from "./checkpoint.js";
import { Example, loadExample, seededRandom, shuffledIndices } from "./data.js";
import { readManifest } from "./fpc.js";

export interface TrainConfig {
  learningRate: number;
  batchSize: number;
  patchSize: number;
  iterations: number;
  loss: "mae";
  manifestPath: string;
  checkpointDir: string;
  seed: number;
  /** fraction of cubes held out for the validation PSNR log */
  valFraction: number;
  logEvery: number;
}

export const DEFAULT_TRAIN: Omit<TrainConfig, "manifestPath" | "checkpointDir"> = {
  learningRate: 1e-4,
  batchSize: 32,
  patchSize: 128,
  iterations: 300_000,
  loss: "mae",
  seed: 1,
  valFraction: 0.1,
  logEvery: 100,
};

export function validateConfig(cfg: TrainConfig): void {
  const positive: Array<[string, number]> = [
    ["learningRate", cfg.learningRate],
    ["batchSize", cfg.batchSize],
    ["patchSize", cfg.patchSize],
    ["iterations", cfg.iterations],
  ];
  for (const [name, value] of positive) {
    if (!(value > 0)) throw new Error(`${name} must be positive, got ${value}`);
  }
  if (cfg.loss !== "mae") throw new Error(`loss is fixed to "mae", got "${cfg.loss}"`);
}

export function mae(pred: tf.Tensor, target: tf.Tensor): tf.Scalar {
  return tf.mean(tf.abs(tf.sub(pred, target)));
}

export function psnrDb(pred: tf.Tensor, target: tf.Tensor): number {
  const mse = tf.mean(tf.square(tf.sub(tf.clipByValue(pred, 0, 1), target))).dataSync()[0];
  if (mse === 0) return 99;
  return Math.min(99, 10 * Math.log10(1 / mse));
}

export interface TrainResult {
  /** mae per logged iteration, first entry is iteration 1 */
  losses: number[];
  logPath: string;
}

export async function train(model: tf.LayersModel, cfg: TrainConfig): Promise<TrainResult> {
  validateConfig(cfg);
  const rows = readManifest(cfg.manifestPath);
  if (rows.length === 0) throw new Error(`manifest ${cfg.manifestPath} has no cubes`);

  // shape problems should surface before the loop starts
  const examples: Example[] = rows.map(loadExample);
  const [h, w, c] = model.inputs[0].shape.slice(1) as number[];
  for (const [i, ex] of examples.entries()) {
    const [eh, ew, ec] = ex.input.shape;
    if (eh !== h || ew !== w || ec !== c) {
      throw new Error(
        `cube ${rows[i].cubePath} has shape ${eh}x${ew}x${ec}, model expects ${h}x${w}x${c}`
      );
    }
  }

  const rand = seededRandom(cfg.seed);
  const order = shuffledIndices(examples.length, rand);
  const nVal = Math.min(
    examples.length - 1,
    Math.max(examples.length > 1 ? 1 : 0, Math.floor(examples.length * cfg.valFraction))
  );
  const valIdx = order.slice(0, nVal);
  const trainIdx = order.slice(nVal);

  const optimizer = tf.train.adam(cfg.learningRate);
  fs.mkdirSync(cfg.checkpointDir, { recursive: true });
  const logPath = path.join(cfg.checkpointDir, "training_log.csv");
  fs.writeFileSync(logPath, "iteration,mae,val_psnr\n");

  const losses: number[] = [];
  let cursor = 0;
  let epochOrder = shuffledIndices(trainIdx.length, rand);

  for (let iter = 1; iter <= cfg.iterations; iter++) {
    const batch: Example[] = [];
    for (let b = 0; b < Math.min(cfg.batchSize, trainIdx.length); b++) {
      if (cursor === epochOrder.length) {
        epochOrder = shuffledIndices(trainIdx.length, rand);
        cursor = 0;
      }
      batch.push(examples[trainIdx[epochOrder[cursor++]]]);
    }

    const loss = tf.tidy(() => {
      const inputs = tf.stack(batch.map((ex) => ex.input));
      const targets = tf.stack(batch.map((ex) => ex.target));
      const value = optimizer.minimize(
        () => mae(model.apply(inputs, { training: true }) as tf.Tensor, targets),
        true
      ) as tf.Scalar;
      return value.dataSync()[0];
    });
    losses.push(loss);

    if (iter % cfg.logEvery === 0 || iter === cfg.iterations) {
      const valPsnr = valIdx.length
        ? valIdx
            .map((i) =>
              tf.tidy(() =>
                psnrDb(
                  model.predict(examples[i].input.expandDims(0)) as tf.Tensor,
                  examples[i].target
                )
              )
            )
            .reduce((a, b) => a + b, 0) / valIdx.length
        : NaN;
      fs.appendFileSync(logPath, `${iter},${loss.toExponential(6)},${valPsnr.toFixed(4)}\n`);
      await saveModel(model, cfg.checkpointDir);
    }
  }

  await saveModel(model, cfg.checkpointDir);
  optimizer.dispose();
  for (const ex of examples) {
    ex.input.dispose();
    ex.target.dispose();
  }
  return { losses, logPath };
}
