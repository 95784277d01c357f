/**
 * AGRD attribution-grid format: 13-byte header (magic "AGRD", version 1,
 * height and width as uint32 LE) followed by height*width float32 LE
 * values, row-major.
 */

const MAGIC = Buffer.from('AGRD', 'ascii');
const VERSION = 1;
const HEADER_SIZE = 13;

export interface Grid {
  height: number;
  width: number;
  values: Float32Array;
}

export function encodeAgrd(grid: Grid): Buffer {
  const { height, width, values } = grid;
  if (height < 1 || width < 1) {
    throw new Error(`grid dimensions must be >= 1, got ${height}x${width}`);
  }
  if (values.length !== height * width) {
    throw new Error(`expected ${height * width} values, got ${values.length}`);
  }
  for (let i = 0; i < values.length; i++) {
    if (!Number.isFinite(values[i])) {
      throw new Error(`non-finite value at index ${i}`);
    }
  }
  const buf = Buffer.alloc(HEADER_SIZE + 4 * values.length);
  MAGIC.copy(buf, 0);
  buf.writeUInt8(VERSION, 4);
  buf.writeUInt32LE(height, 5);
  buf.writeUInt32LE(width, 9);
  for (let i = 0; i < values.length; i++) {
    buf.writeFloatLE(values[i], HEADER_SIZE + 4 * i);
  }
  return buf;
}

export function decodeAgrd(buf: Buffer): Grid {
  if (buf.length < HEADER_SIZE) {
    throw new Error('file shorter than the 13-byte AGRD header');
  }
  if (!buf.subarray(0, 4).equals(MAGIC)) {
    throw new Error(`bad magic ${JSON.stringify(buf.subarray(0, 4).toString('latin1'))}`);
  }
  if (buf.readUInt8(4) !== VERSION) {
    throw new Error(`unsupported AGRD version ${buf.readUInt8(4)}`);
  }
  const height = buf.readUInt32LE(5);
  const width = buf.readUInt32LE(9);
  const expected = HEADER_SIZE + 4 * height * width;
  if (buf.length !== expected) {
    throw new Error(`expected ${expected} bytes, found ${buf.length}`);
  }
  const values = new Float32Array(height * width);
  for (let i = 0; i < values.length; i++) {
    values[i] = buf.readFloatLE(HEADER_SIZE + 4 * i);
    if (!Number.isFinite(values[i])) {
      throw new Error(`non-finite value at index ${i}`);
    }
  }
  return { height, width, values };
}
