/** Method registry: config kinds -> attribution functions. */

import type { TinyClassifier } from '../model.js';
import { gradcam } from './gradcam.js';
import { blurIg, guidedIg, smoothgradIg, vanillaIg } from './ig.js';
import { lime } from './lime.js';
import { xraiLike } from './xrai.js';

export interface MethodConfig {
  id: string;
  kind: string;
  steps?: number;
  batchSize?: number;
  samples?: number;
  noiseStd?: number;
  maxSigma?: number;
  fraction?: number;
  maxDist?: number;
  layer?: string;
  segmentSize?: number;
  segmentSizes?: number[];
  perturbations?: number;
  kernelWidth?: number;
  ridgeAlpha?: number;
  seed?: number;
}

export type AttributionFn = (
  clf: TinyClassifier,
  image: Float32Array,
  size: number,
  targetClass: number,
) => Float32Array;

export function resolveMethod(config: MethodConfig): AttributionFn {
  const steps = config.steps ?? 25;
  const batchSize = config.batchSize ?? 20;
  switch (config.kind) {
    case 'vanilla_ig':
      return (clf, image, size, target) => vanillaIg(clf, image, size, target, { steps, batchSize });
    case 'smoothgrad_ig':
      return (clf, image, size, target) =>
        smoothgradIg(clf, image, size, target, {
          steps,
          batchSize,
          samples: config.samples ?? 8,
          noiseStd: config.noiseStd ?? 0.15,
          seed: config.seed ?? 0,
        });
    case 'blur_ig':
      return (clf, image, size, target) =>
        blurIg(clf, image, size, target, { steps, batchSize, maxSigma: config.maxSigma ?? 4 });
    case 'guided_ig':
      return (clf, image, size, target) =>
        guidedIg(clf, image, size, target, {
          steps,
          fraction: config.fraction ?? 0.5,
          maxDist: config.maxDist ?? 1.0,
        });
    case 'gradcam':
      return (clf, image, size, target) => gradcam(clf, image, size, target, { layer: config.layer });
    case 'lime':
      return (clf, image, size, target) =>
        lime(clf, image, size, target, {
          segmentSize: config.segmentSize ?? 8,
          perturbations: config.perturbations ?? 1000,
          kernelWidth: config.kernelWidth ?? 1.0,
          ridgeAlpha: config.ridgeAlpha ?? 10.0,
          batchSize: config.batchSize ?? 32,
          seed: config.seed ?? 42,
        });
    case 'xrai':
      return (clf, image, size, target) =>
        xraiLike(clf, image, size, target, { steps, batchSize, segmentSizes: config.segmentSizes ?? [4, 8] });
    default:
      throw new Error(`unknown method kind ${JSON.stringify(config.kind)}`);
  }
}
