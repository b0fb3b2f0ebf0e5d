#!/usr/bin/env node
/** Command-line entry point: train a model on a cube corpus, or predict. */

import * as fs from "node:fs";

import yargs from "yargs";
import { hideBin } from "yargs/helpers";

import { loadModel } from "./checkpoint.js";
import { readManifest } from "./fpc.js";
import { buildFpnet, DEFAULT_ARCHITECTURE } from "./model.js";
import { predictFile } from "./predict.js";
import { DEFAULT_TRAIN, train } from "./train.js";

async function main(): Promise<void> {
  await yargs(hideBin(process.argv))
    .command(
      "train",
      "train FPNET on an upsampled cube corpus",
      (y) =>
        y
          .option("manifest", { type: "string", demandOption: true })
          .option("checkpoint-dir", { type: "string", demandOption: true })
          .option("iterations", { type: "number", default: 10_000 })
          .option("batch-size", { type: "number", default: DEFAULT_TRAIN.batchSize })
          .option("learning-rate", { type: "number", default: DEFAULT_TRAIN.learningRate })
          .option("seed", { type: "number", default: DEFAULT_TRAIN.seed })
          .option("val-fraction", { type: "number", default: DEFAULT_TRAIN.valFraction })
          .option("log-every", { type: "number", default: DEFAULT_TRAIN.logEvery }),
      async (argv) => {
        const model = buildFpnet({ ...DEFAULT_ARCHITECTURE, seed: argv.seed });
        const result = await train(model, {
          ...DEFAULT_TRAIN,
          iterations: argv.iterations,
          batchSize: argv["batch-size"],
          learningRate: argv["learning-rate"],
          seed: argv.seed,
          valFraction: argv["val-fraction"],
          logEvery: argv["log-every"],
          manifestPath: argv.manifest,
          checkpointDir: argv["checkpoint-dir"],
        });
        const last = result.losses[result.losses.length - 1];
        console.log(`trained ${argv.iterations} iterations, final mae ${last.toExponential(3)}`);
        console.log(`checkpoint + ${result.logPath}`);
      }
    )
    .command(
      "predict",
      "write .pred.fpc files for cubes (one path or a whole manifest)",
      (y) =>
        y
          .option("checkpoint-dir", { type: "string", demandOption: true })
          .option("out", { type: "string", demandOption: true })
          .option("cube", { type: "string" })
          .option("manifest", { type: "string" }),
      async (argv) => {
        const model = await loadModel(argv["checkpoint-dir"]);
        fs.mkdirSync(argv.out, { recursive: true });
        const cubes = argv.cube
          ? [argv.cube]
          : readManifest(argv.manifest as string).map((r) => r.cubePath);
        for (const cube of cubes) {
          console.log(`wrote ${predictFile(model, cube, argv.out)}`);
        }
      }
    )
    .demandCommand(1)
    .strict()
    .parse();
}

main().catch((err) => {
  console.error(err instanceof Error ? err.message : err);
  process.exit(1);
});
