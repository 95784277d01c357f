#!/usr/bin/env node
/** CLI: `attreval-adapter export <job.json> --out <dir>`. */

import { loadJob, runExport } from './export.js';

function usage(): void {
  console.error('usage: attreval-adapter export <job.json> --out <dir>');
}

export async function main(argv: string[]): Promise<number> {
  const [command, ...rest] = argv;
  if (command !== 'export') {
    usage();
    return 1;
  }
  const outIx = rest.indexOf('--out');
  if (rest.length < 1 || outIx < 0 || outIx + 1 >= rest.length) {
    usage();
    return 1;
  }
  const jobPath = rest[0];
  const outDir = rest[outIx + 1];
  try {
    const { job, baseDir } = loadJob(jobPath);
    const manifest = runExport(job, baseDir, outDir);
    console.log(
      `wrote ${manifest.images.length} images x ${manifest.methods.length} methods to ${outDir}`,
    );
    return 0;
  } catch (err) {
    console.error(`error: ${err instanceof Error ? err.message : String(err)}`);
    return 1;
  }
}

const isDirectRun = process.argv[1] && import.meta.url.endsWith(process.argv[1].split('/').pop()!);
if (isDirectRun) {
  main(process.argv.slice(2)).then((code) => {
    process.exitCode = code;
  });
}
