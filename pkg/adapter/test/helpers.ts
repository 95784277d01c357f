/** Shared fixtures: deterministic synthetic images and masks. */

import { mkdtempSync, writeFileSync } from 'node:fs';
import { tmpdir } from 'node:os';
import * as path from 'node:path';

import { encodePgm, encodePpm, type GrayImage, type RgbImage } from '../src/pnm.js';
import { SplitMix64 } from '../src/rng.js';

/** RGB image with a dark disk on a bright noisy background. */
export function blobImage(size: number, cx: number, cy: number, radius: number, seed: number): RgbImage {
  const rng = new SplitMix64(seed);
  const pixels = new Uint8Array(size * size * 3);
  for (let y = 0; y < size; y++) {
    for (let x = 0; x < size; x++) {
      const inside = (x - cx) ** 2 + (y - cy) ** 2 <= radius ** 2;
      const base = inside ? 60 : 190;
      for (let c = 0; c < 3; c++) {
        const jitter = Math.floor(rng.uniform() * 30);
        pixels[(y * size + x) * 3 + c] = Math.min(255, base + jitter);
      }
    }
  }
  return { height: size, width: size, pixels };
}

/** Grayscale mask of the same disk at a (possibly different) resolution. */
export function diskMask(size: number, cx: number, cy: number, radius: number): GrayImage {
  const pixels = new Uint8Array(size * size);
  for (let y = 0; y < size; y++) {
    for (let x = 0; x < size; x++) {
      pixels[y * size + x] = (x - cx) ** 2 + (y - cy) ** 2 <= radius ** 2 ? 255 : 0;
    }
  }
  return { height: size, width: size, pixels };
}

export interface JobFixture {
  dir: string;
  jobPath: string;
}

/** Write a tiny export job with n images (source 48px, masks 48px). */
export function writeJobFixture(nImages: number, methods: object[], modelSize = 24): JobFixture {
  const dir = mkdtempSync(path.join(tmpdir(), 'adapter-job-'));
  const images = [];
  for (let i = 0; i < nImages; i++) {
    const cx = 16 + 4 * i;
    const cy = 20 + 3 * i;
    const radius = 8 + i;
    writeFileSync(path.join(dir, `img${i}.ppm`), encodePpm(blobImage(48, cx, cy, radius, 100 + i)));
    writeFileSync(path.join(dir, `img${i}_mask.pgm`), encodePgm(diskMask(48, cx, cy, radius)));
    images.push({
      image_id: `img${i}`,
      image: `img${i}.ppm`,
      mask: `img${i}_mask.pgm`,
      class_label: 'lesion',
      target_class: 1,
    });
  }
  const job = {
    study_name: 'adapter-smoke',
    seed: 42,
    model: { seed: 7, inputSize: modelSize, temperature: 2.28, gradcamLayer: 'conv_b' },
    methods,
    images,
  };
  const jobPath = path.join(dir, 'job.json');
  writeFileSync(jobPath, JSON.stringify(job, null, 2));
  return { dir, jobPath };
}

export const FAST_METHODS = [
  { id: 'xrai', kind: 'xrai', steps: 6, batchSize: 8, segmentSizes: [4, 8] },
  { id: 'vanilla_ig', kind: 'vanilla_ig', steps: 6, batchSize: 8 },
  { id: 'blur_ig', kind: 'blur_ig', steps: 6, batchSize: 8, maxSigma: 3 },
  { id: 'smoothgrad_ig', kind: 'smoothgrad_ig', steps: 4, batchSize: 8, samples: 3, noiseStd: 0.1, seed: 5 },
  { id: 'guided_ig', kind: 'guided_ig', steps: 6, fraction: 0.5, maxDist: 1.0 },
  { id: 'gradcam', kind: 'gradcam' },
  { id: 'lime', kind: 'lime', segmentSize: 6, perturbations: 80, batchSize: 32, seed: 42 },
];
