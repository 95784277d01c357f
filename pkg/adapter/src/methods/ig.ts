/**
 * Integrated-gradients family. All variants accumulate grad . delta along a
 * path from a baseline to the input and return the channel-summed, signed
 * per-pixel attribution (raw values; normalization happens downstream).
 */

import * as tf from '@tensorflow/tfjs';
import type { TinyClassifier } from '../model.js';
import { SplitMix64 } from '../rng.js';
import { gaussianBlur, sumChannels } from './common.js';

export interface IgOptions {
  steps: number; // path resolution
  batchSize: number; // interpolated inputs evaluated per forward/backward pass
}

function batchedGradients(
  clf: TinyClassifier,
  inputs: Float32Array[],
  size: number,
  targetClass: number,
  batchSize: number,
): Float32Array[] {
  const grads: Float32Array[] = [];
  for (let start = 0; start < inputs.length; start += batchSize) {
    const chunk = inputs.slice(start, start + batchSize);
    const stacked = tf.tensor4d(
      concatFloat(chunk),
      [chunk.length, size, size, 3],
    );
    const g = clf.inputGradients(stacked, targetClass);
    const data = g.dataSync() as Float32Array;
    const per = size * size * 3;
    for (let i = 0; i < chunk.length; i++) {
      grads.push(data.slice(i * per, (i + 1) * per));
    }
    stacked.dispose();
    g.dispose();
  }
  return grads;
}

function concatFloat(parts: Float32Array[]): Float32Array {
  const out = new Float32Array(parts.reduce((n, p) => n + p.length, 0));
  let pos = 0;
  for (const p of parts) {
    out.set(p, pos);
    pos += p.length;
  }
  return out;
}

/** Vanilla integrated gradients: straight path from a zero baseline,
 * midpoint Riemann sum over `steps` interpolations. */
export function vanillaIg(
  clf: TinyClassifier,
  image: Float32Array,
  size: number,
  targetClass: number,
  { steps, batchSize }: IgOptions,
): Float32Array {
  const inputs: Float32Array[] = [];
  for (let k = 0; k < steps; k++) {
    const alpha = (k + 0.5) / steps;
    const x = new Float32Array(image.length);
    for (let i = 0; i < image.length; i++) x[i] = alpha * image[i];
    inputs.push(x);
  }
  const grads = batchedGradients(clf, inputs, size, targetClass, batchSize);
  const attribution = new Float32Array(image.length);
  for (const g of grads) {
    for (let i = 0; i < image.length; i++) attribution[i] += g[i];
  }
  for (let i = 0; i < image.length; i++) {
    attribution[i] = (attribution[i] / steps) * image[i]; // (x - 0) * avg grad
  }
  return sumChannels(attribution, size);
}

/** SmoothGrad over integrated gradients: average IG across seeded noisy
 * copies of the input. */
export function smoothgradIg(
  clf: TinyClassifier,
  image: Float32Array,
  size: number,
  targetClass: number,
  opts: IgOptions & { samples: number; noiseStd: number; seed: number },
): Float32Array {
  const rng = new SplitMix64(opts.seed);
  const out = new Float32Array(size * size);
  for (let s = 0; s < opts.samples; s++) {
    const noisy = new Float32Array(image.length);
    for (let i = 0; i < image.length; i++) {
      noisy[i] = image[i] + opts.noiseStd * rng.normal();
    }
    const heat = vanillaIg(clf, noisy, size, targetClass, opts);
    for (let i = 0; i < out.length; i++) out[i] += heat[i];
  }
  for (let i = 0; i < out.length; i++) out[i] /= opts.samples;
  return out;
}

/** Blur-path integrated gradients: the path runs from a heavily blurred
 * image to the original, integrating grad . (x_{k+1} - x_k). */
export function blurIg(
  clf: TinyClassifier,
  image: Float32Array,
  size: number,
  targetClass: number,
  opts: IgOptions & { maxSigma: number },
): Float32Array {
  const path: Float32Array[] = [];
  for (let k = 0; k <= opts.steps; k++) {
    const sigma = opts.maxSigma * (1 - k / opts.steps);
    path.push(sigma === 0 ? image.slice() : gaussianBlur(image, size, sigma));
  }
  const grads = batchedGradients(clf, path.slice(0, opts.steps), size, targetClass, opts.batchSize);
  const attribution = new Float32Array(image.length);
  for (let k = 0; k < opts.steps; k++) {
    const g = grads[k];
    const a = path[k];
    const b = path[k + 1];
    for (let i = 0; i < image.length; i++) attribution[i] += g[i] * (b[i] - a[i]);
  }
  return sumChannels(attribution, size);
}

/** Guided integrated gradients: an adaptive path that, at every step,
 * closes the remaining gap only along the coordinates with the smallest
 * gradient magnitude (a `fraction` of what is still open). */
export function guidedIg(
  clf: TinyClassifier,
  image: Float32Array,
  size: number,
  targetClass: number,
  opts: { steps: number; fraction: number; maxDist: number },
): Float32Array {
  const current = new Float32Array(image.length); // zero baseline
  const attribution = new Float32Array(image.length);
  const totalL1 = image.reduce((acc, v) => acc + Math.abs(v), 0);

  for (let k = 0; k < opts.steps; k++) {
    const tensor = tf.tensor4d(current, [1, size, size, 3]);
    const gradTensor = clf.inputGradients(tensor, targetClass);
    const g = gradTensor.dataSync() as Float32Array;
    tensor.dispose();
    gradTensor.dispose();

    const open: number[] = [];
    let openL1 = 0;
    for (let i = 0; i < image.length; i++) {
      const gap = Math.abs(image[i] - current[i]);
      if (gap > 0) {
        open.push(i);
        openL1 += gap;
      }
    }
    if (!open.length) break;
    // budget: close down to the scheduled remaining distance
    const target = totalL1 * (1 - (k + 1) / opts.steps);
    let budget = Math.min(openL1 - target, openL1 * opts.maxDist);
    if (budget <= 0) continue;
    open.sort((a, b) => Math.abs(g[a]) - Math.abs(g[b]));
    const limit = Math.max(1, Math.floor(open.length * opts.fraction));
    for (let j = 0; j < open.length && budget > 0; j++) {
      const i = open[j];
      if (j >= limit && budget < openL1 * 1e-9) break;
      const gap = image[i] - current[i];
      const step = Math.sign(gap) * Math.min(Math.abs(gap), budget);
      attribution[i] += g[i] * step;
      current[i] += step;
      budget -= Math.abs(step);
    }
  }
  return sumChannels(attribution, size);
}
