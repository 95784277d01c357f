/**
 * Activation-based attribution: gradients of the target logit w.r.t. a
 * named conv layer's activations, globally averaged into channel weights,
 * combined with the activations, ReLU-ed, and upsampled to input size.
 */

import type { TinyClassifier } from '../model.js';
import { toBatch, upsamplePlane } from './common.js';

export function gradcam(
  clf: TinyClassifier,
  image: Float32Array,
  size: number,
  targetClass: number,
  opts: { layer?: string } = {},
): Float32Array {
  const layer = opts.layer ?? clf.config.gradcamLayer;
  const input = toBatch(image, size);
  const { activations, gradients } = clf.layerActivationsAndGradients(input, layer, targetClass);
  const [, h, w, channels] = activations.shape;
  const act = activations.dataSync() as Float32Array;
  const grad = gradients.dataSync() as Float32Array;
  input.dispose();
  activations.dispose();
  gradients.dispose();

  // channel weights: global average pooling of the gradients
  const weights = new Float32Array(channels);
  for (let i = 0; i < h * w; i++) {
    for (let c = 0; c < channels; c++) {
      weights[c] += grad[i * channels + c];
    }
  }
  for (let c = 0; c < channels; c++) weights[c] /= h * w;

  const cam = new Float32Array(h * w);
  for (let i = 0; i < h * w; i++) {
    let v = 0;
    for (let c = 0; c < channels; c++) v += weights[c] * act[i * channels + c];
    cam[i] = Math.max(v, 0);
  }
  return upsamplePlane(cam, h, w, size);
}
