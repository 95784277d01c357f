/**
 * A small deterministic CNN classifier used to drive attribution export.
 * Weights are initialized from a seeded stream, so the same config always
 * yields the same model; temperature scaling calibrates the probabilities
 * consumed by perturbation-based explainers.
 */

import * as tf from '@tensorflow/tfjs';
import { SplitMix64 } from './rng.js';

export interface ModelConfig {
  seed: number;
  inputSize: number;
  temperature: number;
  /** Conv layer whose activations feed activation-based attributions; required. */
  gradcamLayer: string;
}

export class TinyClassifier {
  readonly config: ModelConfig;
  readonly model: tf.LayersModel;
  private readonly symbolicByLayer = new Map<string, tf.SymbolicTensor>();
  private readonly layerOrder: tf.layers.Layer[] = [];

  constructor(config: ModelConfig) {
    if (!config.gradcamLayer) {
      throw new Error('model config must name gradcamLayer explicitly');
    }
    if (!(config.temperature > 0)) {
      throw new Error('temperature must be > 0');
    }
    this.config = config;
    const input = tf.input({ shape: [config.inputSize, config.inputSize, 3] });
    const layers = [
      tf.layers.conv2d({ filters: 8, kernelSize: 3, padding: 'same', activation: 'relu', name: 'conv_a' }),
      tf.layers.maxPooling2d({ poolSize: 2, name: 'pool_a' }),
      tf.layers.conv2d({ filters: 16, kernelSize: 3, padding: 'same', activation: 'relu', name: 'conv_b' }),
      tf.layers.maxPooling2d({ poolSize: 2, name: 'pool_b' }),
      tf.layers.flatten({ name: 'flatten' }),
      tf.layers.dense({ units: 2, name: 'head' }),
    ];
    let node: tf.SymbolicTensor = input;
    for (const layer of layers) {
      node = layer.apply(node) as tf.SymbolicTensor;
      this.symbolicByLayer.set(layer.name, node);
      this.layerOrder.push(layer);
    }
    this.model = tf.model({ inputs: input, outputs: node });
    this.seedWeights(config.seed);
    if (!this.symbolicByLayer.has(config.gradcamLayer)) {
      throw new Error(`unknown gradcamLayer ${JSON.stringify(config.gradcamLayer)}`);
    }
  }

  private seedWeights(seed: number): void {
    const rng = new SplitMix64(seed);
    const seeded = this.model.getWeights().map((weight) => {
      const fanIn = weight.shape.slice(0, -1).reduce((a, b) => a * (b ?? 1), 1);
      const scale = Math.sqrt(2 / Math.max(fanIn, 1));
      const data = new Float32Array(weight.size);
      for (let i = 0; i < data.length; i++) data[i] = rng.normal() * scale;
      return tf.tensor(data, weight.shape);
    });
    this.model.setWeights(seeded);
    seeded.forEach((t) => t.dispose());
  }

  /** Raw class logits, shape [batch, 2]. */
  logits(x: tf.Tensor4D): tf.Tensor2D {
    return this.model.apply(x) as tf.Tensor2D;
  }

  /** Temperature-scaled softmax probabilities, shape [batch, 2]. */
  probabilities(x: tf.Tensor4D): tf.Tensor2D {
    return tf.tidy(() => tf.softmax(tf.div(this.logits(x), this.config.temperature)) as tf.Tensor2D);
  }

  /** Per-sample gradients of the target-class logit w.r.t. the input batch. */
  inputGradients(x: tf.Tensor4D, targetClass: number): tf.Tensor4D {
    const gradFn = tf.grad((inp: tf.Tensor) =>
      tf.sum(tf.gather(this.model.apply(inp) as tf.Tensor2D, [targetClass], 1)),
    );
    return tf.tidy(() => gradFn(x) as tf.Tensor4D);
  }

  /** Activations of a named layer plus per-sample gradients of the
   * target-class logit w.r.t. those activations. */
  layerActivationsAndGradients(
    x: tf.Tensor4D,
    layerName: string,
    targetClass: number,
  ): { activations: tf.Tensor4D; gradients: tf.Tensor4D } {
    const symbolic = this.symbolicByLayer.get(layerName);
    if (!symbolic) throw new Error(`unknown layer ${JSON.stringify(layerName)}`);
    const featureModel = tf.model({ inputs: this.model.inputs, outputs: symbolic });

    // rebuild the head functionally on a fresh input so layers stay shared
    const idx = this.layerOrder.findIndex((l) => l.name === layerName);
    const headInput = tf.input({ shape: symbolic.shape.slice(1) as number[] });
    let node: tf.SymbolicTensor = headInput;
    for (const layer of this.layerOrder.slice(idx + 1)) {
      node = layer.apply(node) as tf.SymbolicTensor;
    }
    const headModel = tf.model({ inputs: headInput, outputs: node });

    const activations = tf.tidy(() => featureModel.apply(x) as tf.Tensor4D);
    const gradFn = tf.grad((act: tf.Tensor) =>
      tf.sum(tf.gather(headModel.apply(act) as tf.Tensor2D, [targetClass], 1)),
    );
    const gradients = tf.tidy(() => gradFn(activations) as tf.Tensor4D);
    return { activations, gradients };
  }
}
