/**
 * Bilinear resizing for images and masks, plus mask binarization.
 * Masks are resized in intensity space and then binarized with strict
 * "> threshold" (127 by default), mirroring the evaluation toolkit.
 */

import type { GrayImage, RgbImage } from './pnm.js';

export const MASK_THRESHOLD = 127;

function bilinearChannel(
  src: Uint8Array,
  srcH: number,
  srcW: number,
  dstH: number,
  dstW: number,
  channels: number,
  channel: number,
): Float32Array {
  const out = new Float32Array(dstH * dstW);
  const scaleY = srcH / dstH;
  const scaleX = srcW / dstW;
  for (let y = 0; y < dstH; y++) {
    // align centers, clamp to the source extent
    const sy = Math.min(Math.max((y + 0.5) * scaleY - 0.5, 0), srcH - 1);
    const y0 = Math.floor(sy);
    const y1 = Math.min(y0 + 1, srcH - 1);
    const fy = sy - y0;
    for (let x = 0; x < dstW; x++) {
      const sx = Math.min(Math.max((x + 0.5) * scaleX - 0.5, 0), srcW - 1);
      const x0 = Math.floor(sx);
      const x1 = Math.min(x0 + 1, srcW - 1);
      const fx = sx - x0;
      const p00 = src[(y0 * srcW + x0) * channels + channel];
      const p01 = src[(y0 * srcW + x1) * channels + channel];
      const p10 = src[(y1 * srcW + x0) * channels + channel];
      const p11 = src[(y1 * srcW + x1) * channels + channel];
      out[y * dstW + x] =
        p00 * (1 - fy) * (1 - fx) + p01 * (1 - fy) * fx + p10 * fy * (1 - fx) + p11 * fy * fx;
    }
  }
  return out;
}

/** Resize an RGB image to size x size, scaled to [0, 1] floats (HWC). */
export function resizeRgbToFloat(image: RgbImage, size: number): Float32Array {
  const out = new Float32Array(size * size * 3);
  for (let c = 0; c < 3; c++) {
    const plane = bilinearChannel(image.pixels, image.height, image.width, size, size, 3, c);
    for (let i = 0; i < plane.length; i++) {
      out[3 * i + c] = plane[i] / 255;
    }
  }
  return out;
}

/** Count of mask pixels strictly above the threshold, at source resolution. */
export function positivePixels(mask: GrayImage, threshold: number = MASK_THRESHOLD): number {
  let count = 0;
  for (let i = 0; i < mask.pixels.length; i++) {
    if (mask.pixels[i] > threshold) count++;
  }
  return count;
}

/** Bilinear-resize a grayscale mask and binarize to a {0, 255} PGM image. */
export function resizeMaskBinary(
  mask: GrayImage,
  size: number,
  threshold: number = MASK_THRESHOLD,
): GrayImage {
  const plane = bilinearChannel(mask.pixels, mask.height, mask.width, size, size, 1, 0);
  const pixels = new Uint8Array(size * size);
  for (let i = 0; i < plane.length; i++) {
    pixels[i] = plane[i] > threshold ? 255 : 0;
  }
  return { height: size, width: size, pixels };
}
