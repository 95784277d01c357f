export { decodeAgrd, encodeAgrd, type Grid } from './agrd.js';
export { canonicalJson, loadJob, runExport } from './export.js';
export type { ExportJob, ImageJob, Manifest, ManifestImage } from './export.js';
export { TinyClassifier, type ModelConfig } from './model.js';
export { resolveMethod, type AttributionFn, type MethodConfig } from './methods/index.js';
export { decodeImage, decodePgm, decodePpm, encodePgm, encodePpm } from './pnm.js';
export type { GrayImage, RgbImage } from './pnm.js';
export { MASK_THRESHOLD, positivePixels, resizeMaskBinary, resizeRgbToFloat } from './resize.js';
export { deriveSeed, mix64, SplitMix64 } from './rng.js';
