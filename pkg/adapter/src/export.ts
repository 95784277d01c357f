/**
 * Export job runner: computes one attribution grid per (image, method),
 * resizes and binarizes masks, and writes the study tree the evaluation
 * toolkit consumes — AGRD grids, PGM masks, manifest.json.
 */

import { mkdirSync, readFileSync, writeFileSync } from 'node:fs';
import * as path from 'node:path';

import { encodeAgrd } from './agrd.js';
import { TinyClassifier, type ModelConfig } from './model.js';
import { resolveMethod, type MethodConfig } from './methods/index.js';
import { decodeImage, decodePgm, encodePgm } from './pnm.js';
import { positivePixels, resizeMaskBinary, resizeRgbToFloat } from './resize.js';

export interface ImageJob {
  image_id: string;
  image: string; // PPM/PGM path, relative to the job file
  mask: string; // PGM path at source resolution, relative to the job file
  class_label: string;
  target_class?: number;
}

export interface ExportJob {
  study_name: string;
  seed?: number;
  model: ModelConfig;
  methods: MethodConfig[];
  images: ImageJob[];
}

export interface ManifestImage {
  image_id: string;
  mask: string;
  original_positive_pixels: number;
  class_label: string;
  grids: Record<string, string>;
}

export interface Manifest {
  study_name: string;
  methods: string[];
  images: ManifestImage[];
  seed?: number;
}

export function loadJob(jobPath: string): { job: ExportJob; baseDir: string } {
  const job = JSON.parse(readFileSync(jobPath, 'utf-8')) as ExportJob;
  if (!job.study_name || !Array.isArray(job.methods) || !Array.isArray(job.images)) {
    throw new Error(`${jobPath}: job needs study_name, methods, images`);
  }
  const ids = job.methods.map((m) => m.id);
  if (new Set(ids).size !== ids.length) {
    throw new Error(`${jobPath}: duplicate method ids`);
  }
  const imageIds = job.images.map((i) => i.image_id);
  if (new Set(imageIds).size !== imageIds.length) {
    throw new Error(`${jobPath}: duplicate image ids`);
  }
  return { job, baseDir: path.dirname(path.resolve(jobPath)) };
}

/** Stable JSON with sorted keys, matching the evaluation toolkit's writer. */
export function canonicalJson(value: unknown, indent = 2): string {
  const sort = (v: unknown): unknown => {
    if (Array.isArray(v)) return v.map(sort);
    if (v && typeof v === 'object') {
      return Object.fromEntries(
        Object.keys(v as Record<string, unknown>)
          .sort()
          .map((k) => [k, sort((v as Record<string, unknown>)[k])]),
      );
    }
    return v;
  };
  return JSON.stringify(sort(value), null, indent);
}

export function runExport(job: ExportJob, baseDir: string, outDir: string): Manifest {
  const clf = new TinyClassifier(job.model);
  const size = job.model.inputSize;
  const fns = job.methods.map((m) => ({ id: m.id, fn: resolveMethod(m) }));

  mkdirSync(path.join(outDir, 'masks'), { recursive: true });
  for (const { id } of fns) {
    mkdirSync(path.join(outDir, 'grids', id), { recursive: true });
  }

  const images: ManifestImage[] = [];
  for (const entry of job.images) {
    const rgb = decodeImage(readFileSync(path.resolve(baseDir, entry.image)));
    const sourceMask = decodePgm(readFileSync(path.resolve(baseDir, entry.mask)));
    const originalPositive = positivePixels(sourceMask); // before any resizing
    const maskRel = `masks/${entry.image_id}.pgm`;
    writeFileSync(path.join(outDir, maskRel), encodePgm(resizeMaskBinary(sourceMask, size)));

    const floatImage = resizeRgbToFloat(rgb, size);
    const target = entry.target_class ?? 1;
    const grids: Record<string, string> = {};
    for (const { id, fn } of fns) {
      let heat: Float32Array;
      try {
        heat = fn(clf, floatImage, size, target);
      } catch (err) {
        throw new Error(`method ${id} failed on image ${entry.image_id}: ${String(err)}`);
      }
      const gridRel = `grids/${id}/${entry.image_id}.agrd`;
      writeFileSync(path.join(outDir, gridRel), encodeAgrd({ height: size, width: size, values: heat }));
      grids[id] = gridRel;
    }
    images.push({
      image_id: entry.image_id,
      mask: maskRel,
      original_positive_pixels: originalPositive,
      class_label: entry.class_label,
      grids,
    });
  }

  const manifest: Manifest = {
    study_name: job.study_name,
    methods: fns.map((f) => f.id),
    images,
    ...(job.seed !== undefined ? { seed: job.seed } : {}),
  };
  writeFileSync(path.join(outDir, 'manifest.json'), canonicalJson(manifest) + '\n');
  return manifest;
}
