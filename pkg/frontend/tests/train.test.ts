import * as fs from "node:fs";
import * as os from "node:os";
import * as path from "node:path";

import * as tf from "@tensorflow/tfjs";
import { afterAll, describe, expect, it } from "vitest";

import { loadModel } from "../src/checkpoint.js";
import { IntensityCube, MANIFEST_HEADER, readCube, writeCube } from "../src/fpc.js";
import { buildMiniature } from "../src/model.js";
import { predictFile } from "../src/predict.js";
import { DEFAULT_TRAIN, train, TrainConfig, validateConfig } from "../src/train.js";

const tmp = fs.mkdtempSync(path.join(os.tmpdir(), "fpnet-train-"));
afterAll(() => fs.rmSync(tmp, { recursive: true, force: true }));

const SIDE = 16;
const CHANNELS = 2;

/** A tiny synthetic corpus the miniature network can memorize. */
function makeCorpus(dir: string, nCubes: number): string {
  fs.mkdirSync(dir, { recursive: true });
  const lines = [MANIFEST_HEADER];
  for (let n = 0; n < nCubes; n++) {
    const gtData = new Float32Array(SIDE * SIDE);
    for (let i = 0; i < gtData.length; i++) {
      gtData[i] = 0.5 + 0.4 * Math.sin((i + 7 * n) / 9);
    }
    const cubeData = new Float32Array(CHANNELS * SIDE * SIDE);
    for (let c = 0; c < CHANNELS; c++) {
      for (let i = 0; i < gtData.length; i++) {
        // channels are blurred/attenuated views of the target
        cubeData[c * gtData.length + i] = Math.max(
          0,
          gtData[i] * (0.6 + 0.2 * c) + 0.05 * Math.sin(i / 3 + c)
        );
      }
    }
    const meta = {
      spacing: 1,
      pupil_radius: 1,
      overlap_achieved: 0.65,
      noise_std: 0,
      shuffle_seed: 0,
      permutation: Array.from({ length: CHANNELS }, (_, i) => i),
      norm_constants: Array.from({ length: CHANNELS }, () => 1),
      source_id: `toy${n}`,
      ground_truth: `toy${n}.gt.fpc`,
    };
    const cube: IntensityCube = {
      side: SIDE, channels: CHANNELS, data: cubeData, meta, upsampled: true,
    };
    const gt: IntensityCube = {
      side: SIDE,
      channels: 1,
      data: gtData,
      meta: { ...meta, permutation: [0], norm_constants: [1], ground_truth: "" },
      upsampled: true,
    };
    writeCube(cube, path.join(dir, `toy${n}_ov65_ns0_s${n}.fpc`));
    writeCube(gt, path.join(dir, `toy${n}.gt.fpc`));
    lines.push(`toy${n}_ov65_ns0_s${n}.fpc,toy${n},0.65,0,${n},0`);
  }
  const manifest = path.join(dir, "manifest.csv");
  fs.writeFileSync(manifest, lines.join("\n") + "\n");
  return manifest;
}

function toyConfig(manifest: string, ckpt: string, over: Partial<TrainConfig> = {}): TrainConfig {
  return {
    ...DEFAULT_TRAIN,
    iterations: 60,
    batchSize: 4,
    patchSize: SIDE,
    learningRate: 3e-3,
    logEvery: 20,
    valFraction: 0.2,
    manifestPath: manifest,
    checkpointDir: ckpt,
    ...over,
  };
}

describe("validateConfig", () => {
  it("rejects non-positive values and non-MAE losses", () => {
    const cfg = toyConfig("m.csv", "ckpt");
    expect(() => validateConfig({ ...cfg, iterations: 0 })).toThrow(/iterations/);
    expect(() => validateConfig({ ...cfg, learningRate: -1 })).toThrow(/learningRate/);
    expect(() => validateConfig({ ...cfg, loss: "mse" as "mae" })).toThrow(/mae/);
  });
});

describe("train", () => {
  it("overfits a toy corpus: loss drops well below its start and stays <= 1", async () => {
    const manifest = makeCorpus(path.join(tmp, "corpus"), 5);
    const model = buildMiniature(SIDE, CHANNELS, 2, 4, 3);
    const result = await train(model, toyConfig(manifest, path.join(tmp, "ckpt")));

    expect(result.losses[0]).toBeLessThanOrEqual(1.0); // MAE bound on [0,1] data
    const first = result.losses[0];
    const last = result.losses[result.losses.length - 1];
    expect(last).toBeLessThan(first / 3);

    const log = fs.readFileSync(result.logPath, "utf-8").trim().split("\n");
    expect(log[0]).toBe("iteration,mae,val_psnr");
    expect(log.length).toBe(4); // iterations 20, 40, 60
    model.dispose();
  }, 120_000);

  it("is deterministic: identical seeds give identical loss at iteration 10", async () => {
    const manifest = makeCorpus(path.join(tmp, "corpus_det"), 4);
    const run = async (seed: number, dir: string) => {
      const model = buildMiniature(SIDE, CHANNELS, 2, 4, seed);
      const result = await train(
        model,
        toyConfig(manifest, path.join(tmp, dir), { iterations: 10, seed })
      );
      model.dispose();
      return result.losses[9];
    };
    const a = await run(5, "det_a");
    const b = await run(5, "det_b");
    const c = await run(6, "det_c");
    expect(Math.abs(a - b)).toBeLessThan(1e-6);
    expect(a).not.toBe(c);
  }, 120_000);

  it("rejects shape mismatches before training starts", async () => {
    const manifest = makeCorpus(path.join(tmp, "corpus_bad"), 2);
    const model = buildMiniature(SIDE, CHANNELS + 1, 2, 4, 3); // wrong channel count
    await expect(train(model, toyConfig(manifest, path.join(tmp, "ckpt_bad"))))
      .rejects.toThrow(/shape/);
    model.dispose();
  });

  it("rejects raw (non-upsampled) cubes with a pointer to upsample_cube", async () => {
    const dir = path.join(tmp, "corpus_raw");
    const manifest = makeCorpus(dir, 1);
    const raw = readCube(path.join(dir, "toy0_ov65_ns0_s0.fpc"));
    writeCube({ ...raw, upsampled: false }, path.join(dir, "toy0_ov65_ns0_s0.fpc"));
    const model = buildMiniature(SIDE, CHANNELS, 2, 4, 3);
    await expect(train(model, toyConfig(manifest, path.join(tmp, "ckpt_raw"))))
      .rejects.toThrow(/upsample_cube/);
    model.dispose();
  });
});

describe("checkpoint and predict", () => {
  it("round-trips a trained model and writes a clamped .pred.fpc", async () => {
    const dir = path.join(tmp, "corpus_pred");
    const manifest = makeCorpus(dir, 3);
    const model = buildMiniature(SIDE, CHANNELS, 2, 4, 3);
    const ckpt = path.join(tmp, "ckpt_pred");
    await train(model, toyConfig(manifest, ckpt, { iterations: 30 }));

    const restored = await loadModel(ckpt);
    const cubePath = path.join(dir, "toy1_ov65_ns0_s1.fpc");
    const outPath = predictFile(restored, cubePath, tmp);
    expect(path.basename(outPath)).toBe("toy1_ov65_ns0_s1.pred.fpc");

    const pred = readCube(outPath);
    expect(pred.channels).toBe(1);
    expect(pred.side).toBe(SIDE);
    expect(pred.upsampled).toBe(true);
    expect(pred.meta.source_id).toBe("toy1");
    expect(pred.data.every((v) => v >= 0 && v <= 1 && Number.isFinite(v))).toBe(true);

    // restored model agrees with the in-memory one
    const direct = predictFile(model, cubePath, path.join(tmp, "direct"));
    expect(Array.from(readCube(direct).data)).toEqual(Array.from(pred.data));
    model.dispose();
    restored.dispose();
  }, 120_000);

  it("refuses to predict on a raw cube", async () => {
    const dir = path.join(tmp, "corpus_pred_raw");
    makeCorpus(dir, 1);
    const raw = readCube(path.join(dir, "toy0_ov65_ns0_s0.fpc"));
    const rawPath = path.join(dir, "raw.fpc");
    writeCube({ ...raw, upsampled: false }, rawPath);
    const model = buildMiniature(SIDE, CHANNELS, 2, 4, 3);
    expect(() => predictFile(model, rawPath, tmp)).toThrow(/upsample_cube/);
    model.dispose();
  });
});
