/**
 * EMB1 binary embedding files.
 *
 * Layout: 4 ASCII magic bytes "EMB1", then row count and dimension count as
 * unsigned 32-bit little-endian integers, then rows * dims IEEE-754 32-bit
 * little-endian floats in row-major order.
 */
import * as fs from "node:fs";
import * as path from "node:path";

export const MAGIC = "EMB1";
export const HEADER_BYTES = 12;

export function encodeEmb1(rows: Float32Array[]): Buffer {
  if (rows.length === 0) {
    throw new Error("refusing to encode an empty embedding matrix");
  }
  const dims = rows[0].length;
  if (dims === 0) {
    throw new Error("embedding rows must have at least one dimension");
  }
  for (let i = 0; i < rows.length; i++) {
    if (rows[i].length !== dims) {
      throw new Error(
        `row ${i} has ${rows[i].length} dims, expected ${dims}`
      );
    }
    for (const value of rows[i]) {
      if (!Number.isFinite(value)) {
        throw new Error(`row ${i} contains a non-finite value`);
      }
    }
  }
  const buf = Buffer.allocUnsafe(HEADER_BYTES + rows.length * dims * 4);
  buf.write(MAGIC, 0, "ascii");
  buf.writeUInt32LE(rows.length, 4);
  buf.writeUInt32LE(dims, 8);
  let offset = HEADER_BYTES;
  for (const row of rows) {
    for (const value of row) {
      buf.writeFloatLE(value, offset);
      offset += 4;
    }
  }
  return buf;
}

export function decodeEmb1(buf: Buffer): Float32Array[] {
  if (buf.length < HEADER_BYTES) {
    throw new Error(`truncated header: ${buf.length} bytes`);
  }
  if (buf.toString("ascii", 0, 4) !== MAGIC) {
    throw new Error("bad magic bytes; not an EMB1 file");
  }
  const rows = buf.readUInt32LE(4);
  const dims = buf.readUInt32LE(8);
  const expected = HEADER_BYTES + rows * dims * 4;
  if (buf.length !== expected) {
    throw new Error(
      `payload size mismatch: ${buf.length} bytes, header implies ${expected}`
    );
  }
  const out: Float32Array[] = [];
  let offset = HEADER_BYTES;
  for (let i = 0; i < rows; i++) {
    const row = new Float32Array(dims);
    for (let j = 0; j < dims; j++) {
      row[j] = buf.readFloatLE(offset);
      offset += 4;
    }
    out.push(row);
  }
  return out;
}

/**
 * Write an EMB1 file atomically: the bytes land in a temp file in the same
 * directory and are renamed into place, so readers never see a partial file.
 */
export function writeEmb1(rows: Float32Array[], outputPath: string): void {
  const encoded = encodeEmb1(rows);
  const dir = path.dirname(path.resolve(outputPath));
  const tmp = path.join(
    dir,
    `.${path.basename(outputPath)}.tmp-${process.pid}`
  );
  fs.writeFileSync(tmp, encoded);
  fs.renameSync(tmp, outputPath);
}

export function readEmb1(inputPath: string): Float32Array[] {
  return decodeEmb1(fs.readFileSync(inputPath));
}
