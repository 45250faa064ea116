import * as fs from "node:fs";
import * as os from "node:os";
import * as path from "node:path";

import { describe, expect, it } from "vitest";

import { decodeEmb1, encodeEmb1, readEmb1, writeEmb1 } from "../src/emb1";

function tmpdir(): string {
  return fs.mkdtempSync(path.join(os.tmpdir(), "emb1-"));
}

describe("emb1 encoding", () => {
  it("produces the exact 20-byte layout for a 1x2 matrix", () => {
    const buf = encodeEmb1([new Float32Array([1, 0])]);
    expect(buf.length).toBe(20);
    const expected = Buffer.alloc(20);
    expected.write("EMB1", 0, "ascii");
    expected.writeUInt32LE(1, 4);
    expected.writeUInt32LE(2, 8);
    expected.writeFloatLE(1.0, 12);
    expected.writeFloatLE(0.0, 16);
    expect(buf.equals(expected)).toBe(true);
  });

  it("round-trips values exactly", () => {
    const rows = [
      new Float32Array([0.5, -1.25, 3e-7]),
      new Float32Array([1e10, 0, -0.000123]),
    ];
    const back = decodeEmb1(encodeEmb1(rows));
    expect(back.length).toBe(2);
    for (let i = 0; i < rows.length; i++) {
      expect(Array.from(back[i])).toEqual(Array.from(rows[i]));
    }
  });

  it("rejects empty, ragged, and non-finite matrices", () => {
    expect(() => encodeEmb1([])).toThrow(/empty/);
    expect(() =>
      encodeEmb1([new Float32Array([1]), new Float32Array([1, 2])])
    ).toThrow(/row 1/);
    expect(() => encodeEmb1([new Float32Array([NaN])])).toThrow(/non-finite/);
  });

  it("rejects corrupted files", () => {
    expect(() => decodeEmb1(Buffer.from("EMB"))).toThrow(/truncated/);
    const wrongMagic = encodeEmb1([new Float32Array([1])]);
    wrongMagic.write("XXXX", 0, "ascii");
    expect(() => decodeEmb1(wrongMagic)).toThrow(/magic/);
    const short = encodeEmb1([new Float32Array([1, 2])]).subarray(0, 16);
    expect(() => decodeEmb1(Buffer.from(short))).toThrow(/size mismatch/);
  });

  it("writes atomically and leaves no temp files behind", () => {
    const dir = tmpdir();
    const out = path.join(dir, "vectors.emb");
    writeEmb1([new Float32Array([1, 2, 3])], out);
    expect(fs.readdirSync(dir)).toEqual(["vectors.emb"]);
    const back = readEmb1(out);
    expect(Array.from(back[0])).toEqual([1, 2, 3]);
  });
});
