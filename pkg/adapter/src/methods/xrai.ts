/**
 * Region-based attribution: integrated gradients aggregated into
 * attribution density per superpixel at several scales; each pixel takes
 * the best density among the regions covering it, so thresholding the map
 * grows the selected area in density order.
 */

import type { TinyClassifier } from '../model.js';
import { gridSegments } from './common.js';
import { vanillaIg, type IgOptions } from './ig.js';

export function xraiLike(
  clf: TinyClassifier,
  image: Float32Array,
  size: number,
  targetClass: number,
  opts: IgOptions & { segmentSizes: number[] },
): Float32Array {
  const ig = vanillaIg(clf, image, size, targetClass, opts);
  const heat = new Float32Array(size * size).fill(Number.NEGATIVE_INFINITY);
  for (const blockSize of opts.segmentSizes) {
    const { labels, count } = gridSegments(size, blockSize);
    const sums = new Float64Array(count);
    const areas = new Int32Array(count);
    for (let i = 0; i < ig.length; i++) {
      sums[labels[i]] += ig[i];
      areas[labels[i]] += 1;
    }
    for (let i = 0; i < ig.length; i++) {
      const density = sums[labels[i]] / areas[labels[i]];
      if (density > heat[i]) heat[i] = density;
    }
  }
  return heat;
}
