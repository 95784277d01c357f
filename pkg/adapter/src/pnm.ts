/**
 * Binary PNM readers/writers: PGM (P5, grayscale) and PPM (P6, RGB),
 * 8-bit only. Masks are written as {0, 255} PGM.
 */

export interface GrayImage {
  height: number;
  width: number;
  pixels: Uint8Array; // row-major intensities
}

export interface RgbImage {
  height: number;
  width: number;
  pixels: Uint8Array; // row-major, interleaved RGB
}

function parseHeader(buf: Buffer, magic: string): { width: number; height: number; offset: number } {
  if (buf.subarray(0, 2).toString('ascii') !== magic) {
    throw new Error(`not a ${magic} file`);
  }
  const tokens: number[] = [];
  let pos = 2;
  while (tokens.length < 3) {
    while (pos < buf.length && /\s/.test(String.fromCharCode(buf[pos]))) pos++;
    if (pos < buf.length && buf[pos] === 0x23) {
      // '#' comment runs to end of line
      while (pos < buf.length && buf[pos] !== 0x0a) pos++;
      continue;
    }
    const start = pos;
    while (pos < buf.length && !/\s/.test(String.fromCharCode(buf[pos]))) pos++;
    if (start === pos) throw new Error('truncated PNM header');
    tokens.push(Number.parseInt(buf.subarray(start, pos).toString('ascii'), 10));
  }
  const [width, height, maxval] = tokens;
  if (!Number.isInteger(width) || !Number.isInteger(height) || width < 1 || height < 1) {
    throw new Error('malformed PNM dimensions');
  }
  if (maxval > 255 || maxval < 1) {
    throw new Error(`only 8-bit PNM supported, got maxval ${maxval}`);
  }
  return { width, height, offset: pos + 1 };
}

export function decodePgm(buf: Buffer): GrayImage {
  const { width, height, offset } = parseHeader(buf, 'P5');
  const n = width * height;
  if (buf.length - offset !== n) {
    throw new Error(`expected ${n} pixels, found ${buf.length - offset}`);
  }
  return { height, width, pixels: new Uint8Array(buf.subarray(offset, offset + n)) };
}

export function decodePpm(buf: Buffer): RgbImage {
  const { width, height, offset } = parseHeader(buf, 'P6');
  const n = 3 * width * height;
  if (buf.length - offset !== n) {
    throw new Error(`expected ${n} bytes of RGB data, found ${buf.length - offset}`);
  }
  return { height, width, pixels: new Uint8Array(buf.subarray(offset, offset + n)) };
}

export function encodePgm(image: GrayImage): Buffer {
  const header = Buffer.from(`P5\n${image.width} ${image.height}\n255\n`, 'ascii');
  return Buffer.concat([header, Buffer.from(image.pixels)]);
}

export function encodePpm(image: RgbImage): Buffer {
  const header = Buffer.from(`P6\n${image.width} ${image.height}\n255\n`, 'ascii');
  return Buffer.concat([header, Buffer.from(image.pixels)]);
}

/** Decode P5 or P6 into RGB (grayscale is replicated across channels). */
export function decodeImage(buf: Buffer): RgbImage {
  const magic = buf.subarray(0, 2).toString('ascii');
  if (magic === 'P6') return decodePpm(buf);
  if (magic === 'P5') {
    const gray = decodePgm(buf);
    const pixels = new Uint8Array(3 * gray.width * gray.height);
    for (let i = 0; i < gray.pixels.length; i++) {
      pixels[3 * i] = pixels[3 * i + 1] = pixels[3 * i + 2] = gray.pixels[i];
    }
    return { height: gray.height, width: gray.width, pixels };
  }
  throw new Error(`unsupported image format ${JSON.stringify(magic)} (want P5 or P6)`);
}
