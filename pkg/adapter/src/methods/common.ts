/** Shared helpers for attribution methods. */

import * as tf from '@tensorflow/tfjs';

/** HWC float image -> [1, S, S, 3] tensor. */
export function toBatch(image: Float32Array, size: number): tf.Tensor4D {
  return tf.tensor4d(image, [1, size, size, 3]);
}

/** Sum a [S, S, 3] attribution over channels into a row-major heatmap. */
export function sumChannels(data: Float32Array, size: number): Float32Array {
  const out = new Float32Array(size * size);
  for (let i = 0; i < size * size; i++) {
    out[i] = data[3 * i] + data[3 * i + 1] + data[3 * i + 2];
  }
  return out;
}

/** Bilinear upsample of a single-channel float plane to size x size. */
export function upsamplePlane(src: Float32Array, srcH: number, srcW: number, size: number): Float32Array {
  const out = new Float32Array(size * size);
  const scaleY = srcH / size;
  const scaleX = srcW / size;
  for (let y = 0; y < size; y++) {
    const sy = Math.min(Math.max((y + 0.5) * scaleY - 0.5, 0), srcH - 1);
    const y0 = Math.floor(sy);
    const y1 = Math.min(y0 + 1, srcH - 1);
    const fy = sy - y0;
    for (let x = 0; x < size; x++) {
      const sx = Math.min(Math.max((x + 0.5) * scaleX - 0.5, 0), srcW - 1);
      const x0 = Math.floor(sx);
      const x1 = Math.min(x0 + 1, srcW - 1);
      const fx = sx - x0;
      out[y * size + x] =
        src[y0 * srcW + x0] * (1 - fy) * (1 - fx) +
        src[y0 * srcW + x1] * (1 - fy) * fx +
        src[y1 * srcW + x0] * fy * (1 - fx) +
        src[y1 * srcW + x1] * fy * fx;
    }
  }
  return out;
}

/** Grid-block superpixels: returns segment index per pixel and the count. */
export function gridSegments(size: number, blockSize: number): { labels: Int32Array; count: number } {
  const blocks = Math.ceil(size / blockSize);
  const labels = new Int32Array(size * size);
  for (let y = 0; y < size; y++) {
    for (let x = 0; x < size; x++) {
      labels[y * size + x] = Math.floor(y / blockSize) * blocks + Math.floor(x / blockSize);
    }
  }
  return { labels, count: blocks * blocks };
}

/** Separable Gaussian blur of an HWC float image (zero-padded edges renormalized). */
export function gaussianBlur(image: Float32Array, size: number, sigma: number): Float32Array {
  if (sigma <= 0) return image.slice();
  const radius = Math.max(1, Math.ceil(3 * sigma));
  const kernel = new Float32Array(2 * radius + 1);
  let total = 0;
  for (let i = -radius; i <= radius; i++) {
    kernel[i + radius] = Math.exp(-(i * i) / (2 * sigma * sigma));
    total += kernel[i + radius];
  }
  for (let i = 0; i < kernel.length; i++) kernel[i] /= total;

  const horizontal = new Float32Array(image.length);
  for (let y = 0; y < size; y++) {
    for (let x = 0; x < size; x++) {
      for (let c = 0; c < 3; c++) {
        let acc = 0;
        let weight = 0;
        for (let k = -radius; k <= radius; k++) {
          const xx = x + k;
          if (xx < 0 || xx >= size) continue;
          acc += kernel[k + radius] * image[(y * size + xx) * 3 + c];
          weight += kernel[k + radius];
        }
        horizontal[(y * size + x) * 3 + c] = acc / weight;
      }
    }
  }
  const out = new Float32Array(image.length);
  for (let y = 0; y < size; y++) {
    for (let x = 0; x < size; x++) {
      for (let c = 0; c < 3; c++) {
        let acc = 0;
        let weight = 0;
        for (let k = -radius; k <= radius; k++) {
          const yy = y + k;
          if (yy < 0 || yy >= size) continue;
          acc += kernel[k + radius] * horizontal[(yy * size + x) * 3 + c];
          weight += kernel[k + radius];
        }
        out[(y * size + x) * 3 + c] = acc / weight;
      }
    }
  }
  return out;
}
