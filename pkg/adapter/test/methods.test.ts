import { describe, expect, it } from 'vitest';

import { TinyClassifier } from '../src/model.js';
import { resolveMethod } from '../src/methods/index.js';
import { resizeRgbToFloat } from '../src/resize.js';
import { blobImage, FAST_METHODS } from './helpers.js';

const SIZE = 24;
const clf = new TinyClassifier({ seed: 7, inputSize: SIZE, temperature: 2.28, gradcamLayer: 'conv_b' });
const image = resizeRgbToFloat(blobImage(48, 24, 24, 10, 3), SIZE);

describe('attribution methods', () => {
  for (const config of FAST_METHODS) {
    it(`${config.id} yields a finite, informative heatmap`, () => {
      const fn = resolveMethod(config);
      const heat = fn(clf, image, SIZE, 1);
      expect(heat.length).toBe(SIZE * SIZE);
      expect(Array.from(heat).every(Number.isFinite)).toBe(true);
      expect(new Set(heat).size).toBeGreaterThan(1); // not a constant map
    });

    it(`${config.id} is deterministic`, () => {
      const fn = resolveMethod(config);
      const a = fn(clf, image, SIZE, 1);
      const b = fn(clf, image, SIZE, 1);
      expect(Array.from(a)).toEqual(Array.from(b));
    });
  }

  it('model weights are reproducible from the seed', () => {
    const a = new TinyClassifier({ seed: 7, inputSize: SIZE, temperature: 2.28, gradcamLayer: 'conv_b' });
    const b = new TinyClassifier({ seed: 7, inputSize: SIZE, temperature: 2.28, gradcamLayer: 'conv_b' });
    const wa = a.model.getWeights().map((w) => Array.from(w.dataSync()));
    const wb = b.model.getWeights().map((w) => Array.from(w.dataSync()));
    expect(wa).toEqual(wb);
  });

  it('lime heatmaps are constant within superpixels', () => {
    const fn = resolveMethod({ id: 'lime', kind: 'lime', segmentSize: 6, perturbations: 50, seed: 42 });
    const heat = fn(clf, image, SIZE, 1);
    const blocks = SIZE / 6;
    expect(new Set(heat).size).toBeLessThanOrEqual(blocks * blocks);
  });

  it('gradcam requires a known layer', () => {
    expect(
      () =>
        new TinyClassifier({ seed: 1, inputSize: SIZE, temperature: 1, gradcamLayer: 'nonexistent' }),
    ).toThrow(/unknown gradcamLayer/);
  });

  it('gradcamLayer must be named explicitly', () => {
    expect(
      () => new TinyClassifier({ seed: 1, inputSize: SIZE, temperature: 1, gradcamLayer: '' }),
    ).toThrow(/gradcamLayer/);
  });

  it('unknown method kinds are rejected', () => {
    expect(() => resolveMethod({ id: 'x', kind: 'telepathy' })).toThrow(/unknown method kind/);
  });

  it('temperature scaling softens probabilities', () => {
    const soft = new TinyClassifier({ seed: 7, inputSize: SIZE, temperature: 10, gradcamLayer: 'conv_b' });
    const sharp = new TinyClassifier({ seed: 7, inputSize: SIZE, temperature: 0.1, gradcamLayer: 'conv_b' });
    const tensorSoft = soft.probabilities(toTensor(image));
    const tensorSharp = sharp.probabilities(toTensor(image));
    const pSoft = tensorSoft.dataSync()[1];
    const pSharp = tensorSharp.dataSync()[1];
    tensorSoft.dispose();
    tensorSharp.dispose();
    expect(Math.abs(pSoft - 0.5)).toBeLessThan(Math.abs(pSharp - 0.5) + 1e-9);
  });
});

import * as tf from '@tensorflow/tfjs';

function toTensor(img: Float32Array): tf.Tensor4D {
  return tf.tensor4d(img, [1, SIZE, SIZE, 3]);
}
