/**
 * FPNET: a U-Net that maps an upsampled intensity cube (H x W x C) to a
 * single-channel reconstruction.
 *
 * Block structure: a first 3x3 conv, then per contracting level two 3x3
 * convs (ReLU) followed by a 3x3 stride-2 down-conv; a two-conv bottleneck;
 * per expansive level a 2x2 up-conv, concatenation with the matching
 * contracting features and two 3x3 convs; a final 1x1 conv to one channel.
 * The default 4-level network audits to exactly 28 convolutional layers.
 */

import * as tf from "@tensorflow/tfjs";

export interface FpnetArchitecture {
  inputSize: number;
  inputChannels: number;
  levels: number;
  baseWidth: number;
  /** initializer seed so construction is reproducible */
  seed: number;
}

export const DEFAULT_ARCHITECTURE: FpnetArchitecture = {
  inputSize: 128,
  inputChannels: 25,
  levels: 4,
  baseWidth: 64,
  seed: 1,
};

export const REQUIRED_CONV_LAYERS = 28;

/**
 * Convolutional layers implied by the block structure: the first 3x3, three
 * per contracting level (two convs + down-conv), two bottleneck convs, three
 * per expansive level (up-conv + two convs) and the final 1x1.
 */
export function auditConvLayers(levels: number): number {
  return 1 + 3 * levels + 2 + 3 * levels + 1;
}

export class ArchitectureError extends Error {}

function convCounter() {
  let count = 0;
  let seedStep = 0;
  return {
    conv(seedBase: number, args: {
      filters: number;
      kernelSize: number;
      strides?: number;
      activation?: "relu" | "linear";
    }) {
      count++;
      seedStep++;
      return tf.layers.conv2d({
        filters: args.filters,
        kernelSize: args.kernelSize,
        strides: args.strides ?? 1,
        padding: "same",
        activation: args.activation ?? "relu",
        kernelInitializer: tf.initializers.heNormal({ seed: seedBase + seedStep }),
        biasInitializer: "zeros",
      });
    },
    upConv(seedBase: number, filters: number) {
      count++;
      seedStep++;
      return tf.layers.conv2dTranspose({
        filters,
        kernelSize: 2,
        strides: 2,
        padding: "same",
        activation: "relu",
        kernelInitializer: tf.initializers.heNormal({ seed: seedBase + seedStep }),
        biasInitializer: "zeros",
      });
    },
    get count() {
      return count;
    },
  };
}

function buildUnet(arch: FpnetArchitecture): { model: tf.LayersModel; convLayers: number } {
  const layers = convCounter();
  const seed = arch.seed * 1000;

  const input = tf.input({
    shape: [arch.inputSize, arch.inputSize, arch.inputChannels],
  });
  let x = layers.conv(seed, { filters: arch.baseWidth, kernelSize: 3 })
    .apply(input) as tf.SymbolicTensor;

  const skips: tf.SymbolicTensor[] = [];
  let width = arch.baseWidth;
  for (let level = 0; level < arch.levels; level++) {
    x = layers.conv(seed, { filters: width, kernelSize: 3 }).apply(x) as tf.SymbolicTensor;
    x = layers.conv(seed, { filters: width, kernelSize: 3 }).apply(x) as tf.SymbolicTensor;
    skips.push(x);
    width *= 2;
    x = layers.conv(seed, { filters: width, kernelSize: 3, strides: 2 })
      .apply(x) as tf.SymbolicTensor;
  }

  x = layers.conv(seed, { filters: width, kernelSize: 3 }).apply(x) as tf.SymbolicTensor;
  x = layers.conv(seed, { filters: width, kernelSize: 3 }).apply(x) as tf.SymbolicTensor;

  for (let level = arch.levels - 1; level >= 0; level--) {
    width = Math.floor(width / 2);
    x = layers.upConv(seed, width).apply(x) as tf.SymbolicTensor;
    x = tf.layers.concatenate().apply([x, skips[level]]) as tf.SymbolicTensor;
    x = layers.conv(seed, { filters: width, kernelSize: 3 }).apply(x) as tf.SymbolicTensor;
    x = layers.conv(seed, { filters: width, kernelSize: 3 }).apply(x) as tf.SymbolicTensor;
  }

  const output = layers.conv(seed, { filters: 1, kernelSize: 1, activation: "linear" })
    .apply(x) as tf.SymbolicTensor;

  return {
    model: tf.model({ inputs: input, outputs: output }),
    convLayers: layers.count,
  };
}

/** Count the convolutional layers of a constructed model. */
export function countConvLayers(model: tf.LayersModel): number {
  return model.layers.filter(
    (l) => l.getClassName() === "Conv2D" || l.getClassName() === "Conv2DTranspose"
  ).length;
}

/**
 * Build the FPNET model; rejects any architecture whose conv-layer audit
 * differs from the required 28.
 */
export function buildFpnet(arch: FpnetArchitecture = DEFAULT_ARCHITECTURE): tf.LayersModel {
  const expected = auditConvLayers(arch.levels);
  if (expected !== REQUIRED_CONV_LAYERS) {
    throw new ArchitectureError(
      `architecture audits to ${expected} convolutional layers, ` +
        `expected ${REQUIRED_CONV_LAYERS} (use ${(REQUIRED_CONV_LAYERS - 4) / 6} levels)`
    );
  }
  const { model, convLayers } = buildUnet(arch);
  if (convLayers !== REQUIRED_CONV_LAYERS) {
    throw new ArchitectureError(
      `constructed model has ${convLayers} convolutional layers, expected ${REQUIRED_CONV_LAYERS}`
    );
  }
  return model;
}

/**
 * A small network with the same block structure, for gradient checks and
 * fast training smoke tests. No 28-layer audit is applied.
 */
export function buildMiniature(
  inputSize = 16,
  inputChannels = 2,
  levels = 2,
  baseWidth = 4,
  seed = 1
): tf.LayersModel {
  return buildUnet({ inputSize, inputChannels, levels, baseWidth, seed }).model;
}
