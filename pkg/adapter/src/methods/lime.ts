/**
 * Perturbation-based attribution over grid superpixels: seeded binary
 * on/off perturbations, temperature-scaled model probabilities, and a
 * distance-kernel-weighted ridge regression whose coefficients become the
 * per-segment attribution.
 */

import * as tf from '@tensorflow/tfjs';
import type { TinyClassifier } from '../model.js';
import { SplitMix64 } from '../rng.js';
import { gridSegments } from './common.js';

export interface LimeOptions {
  segmentSize: number;
  perturbations: number;
  kernelWidth: number;
  ridgeAlpha: number;
  batchSize: number;
  seed: number;
}

/** Solve (A + alpha*I) x = b for a small symmetric system in place. */
function solveRidge(a: Float64Array, b: Float64Array, n: number, alpha: number): Float64Array {
  const m = new Float64Array(n * (n + 1));
  for (let r = 0; r < n; r++) {
    for (let c = 0; c < n; c++) m[r * (n + 1) + c] = a[r * n + c] + (r === c ? alpha : 0);
    m[r * (n + 1) + n] = b[r];
  }
  for (let col = 0; col < n; col++) {
    let pivot = col;
    for (let r = col + 1; r < n; r++) {
      if (Math.abs(m[r * (n + 1) + col]) > Math.abs(m[pivot * (n + 1) + col])) pivot = r;
    }
    if (pivot !== col) {
      for (let c = col; c <= n; c++) {
        const tmp = m[col * (n + 1) + c];
        m[col * (n + 1) + c] = m[pivot * (n + 1) + c];
        m[pivot * (n + 1) + c] = tmp;
      }
    }
    const diag = m[col * (n + 1) + col];
    if (diag === 0) continue; // ridge term keeps this from happening in practice
    for (let r = 0; r < n; r++) {
      if (r === col) continue;
      const factor = m[r * (n + 1) + col] / diag;
      for (let c = col; c <= n; c++) m[r * (n + 1) + c] -= factor * m[col * (n + 1) + c];
    }
  }
  const x = new Float64Array(n);
  for (let r = 0; r < n; r++) x[r] = m[r * (n + 1) + n] / m[r * (n + 1) + r];
  return x;
}

export function lime(
  clf: TinyClassifier,
  image: Float32Array,
  size: number,
  targetClass: number,
  opts: LimeOptions,
): Float32Array {
  const { labels, count } = gridSegments(size, opts.segmentSize);
  const rng = new SplitMix64(opts.seed);

  // baseline: mean color, the usual "feature off" replacement
  const mean = [0, 0, 0];
  for (let i = 0; i < size * size; i++) {
    for (let c = 0; c < 3; c++) mean[c] += image[3 * i + c];
  }
  for (let c = 0; c < 3; c++) mean[c] /= size * size;

  const masks: Uint8Array[] = [];
  for (let p = 0; p < opts.perturbations; p++) {
    const z = new Uint8Array(count);
    for (let s = 0; s < count; s++) z[s] = rng.uniform() < 0.5 ? 1 : 0;
    masks.push(z);
  }

  // batched temperature-scaled probabilities of the target class
  const y = new Float64Array(opts.perturbations);
  const pixelCount = size * size * 3;
  for (let start = 0; start < opts.perturbations; start += opts.batchSize) {
    const chunk = masks.slice(start, start + opts.batchSize);
    const batch = new Float32Array(chunk.length * pixelCount);
    chunk.forEach((z, row) => {
      const base = row * pixelCount;
      for (let i = 0; i < size * size; i++) {
        const on = z[labels[i]];
        for (let c = 0; c < 3; c++) {
          batch[base + 3 * i + c] = on ? image[3 * i + c] : mean[c];
        }
      }
    });
    const tensor = tf.tensor4d(batch, [chunk.length, size, size, 3]);
    const probs = clf.probabilities(tensor);
    const data = probs.dataSync() as Float32Array;
    for (let row = 0; row < chunk.length; row++) {
      y[start + row] = data[row * 2 + targetClass];
    }
    tensor.dispose();
    probs.dispose();
  }

  // exponential kernel on the fraction of disabled segments
  const weights = new Float64Array(opts.perturbations);
  for (let p = 0; p < opts.perturbations; p++) {
    let on = 0;
    for (let s = 0; s < count; s++) on += masks[p][s];
    const distance = 1 - on / count;
    weights[p] = Math.exp(-(distance * distance) / (opts.kernelWidth * opts.kernelWidth));
  }

  // weighted ridge on centered data (intercept absorbed by centering)
  const zMean = new Float64Array(count);
  let yMean = 0;
  let wTotal = 0;
  for (let p = 0; p < opts.perturbations; p++) {
    wTotal += weights[p];
    yMean += weights[p] * y[p];
    for (let s = 0; s < count; s++) zMean[s] += weights[p] * masks[p][s];
  }
  yMean /= wTotal;
  for (let s = 0; s < count; s++) zMean[s] /= wTotal;

  const gram = new Float64Array(count * count);
  const rhs = new Float64Array(count);
  for (let p = 0; p < opts.perturbations; p++) {
    const w = weights[p];
    const dy = y[p] - yMean;
    const dz = new Float64Array(count);
    for (let s = 0; s < count; s++) dz[s] = masks[p][s] - zMean[s];
    for (let r = 0; r < count; r++) {
      rhs[r] += w * dz[r] * dy;
      const wr = w * dz[r];
      for (let c = r; c < count; c++) gram[r * count + c] += wr * dz[c];
    }
  }
  for (let r = 0; r < count; r++) {
    for (let c = 0; c < r; c++) gram[r * count + c] = gram[c * count + r];
  }
  const beta = solveRidge(gram, rhs, count, opts.ridgeAlpha);

  const heat = new Float32Array(size * size);
  for (let i = 0; i < size * size; i++) heat[i] = beta[labels[i]];
  return heat;
}
