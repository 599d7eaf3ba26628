import * as fs from "node:fs";
import * as os from "node:os";
import * as path from "node:path";

import { afterEach, beforeEach, describe, expect, it } from "vitest";

import { Emb1Writer, HEADER_BYTES, indexPathFor, readEmb1 } from "../src/emb1.js";

let dir: string;

beforeEach(() => {
  dir = fs.mkdtempSync(path.join(os.tmpdir(), "emb1-"));
});

afterEach(() => {
  fs.rmSync(dir, { recursive: true, force: true });
});

function write(rows: number[][], dim: number, name = "out.emb1"): string {
  const p = path.join(dir, name);
  const writer = new Emb1Writer(p, dim);
  rows.forEach((row, i) => writer.writeRow(Float32Array.from(row), { docId: `d${i}`, chunkIndex: 0 }));
  writer.close();
  return p;
}

describe("Emb1Writer", () => {
  it("round-trips rows and index", () => {
    const p = write(
      [
        [1.5, -2.25, 0],
        [0.125, 3, -1],
      ],
      3
    );
    const back = readEmb1(p);
    expect(back.dim).toBe(3);
    expect(back.rows.map((r) => Array.from(r))).toEqual([
      [1.5, -2.25, 0],
      [0.125, 3, -1],
    ]);
    expect(back.index).toEqual([
      { docId: "d0", chunkIndex: 0 },
      { docId: "d1", chunkIndex: 0 },
    ]);
  });

  it("lays out the header as magic, count, dim (little-endian)", () => {
    const p = write([[1, 2, 3, 4]], 4);
    const data = fs.readFileSync(p);
    expect(data.toString("ascii", 0, 4)).toBe("EMB1");
    expect(data.readUInt32LE(4)).toBe(1);
    expect(data.readUInt32LE(8)).toBe(4);
    expect(data.length).toBe(HEADER_BYTES + 4 * 4);
  });

  it("writes a bare header and empty index for zero rows", () => {
    const p = write([], 7);
    const data = fs.readFileSync(p);
    expect(data.length).toBe(HEADER_BYTES);
    expect(data.readUInt32LE(4)).toBe(0);
    expect(data.readUInt32LE(8)).toBe(7);
    expect(fs.readFileSync(indexPathFor(p), "utf8")).toBe("");
  });

  it("derives the index path as <out>.idx.jsonl", () => {
    expect(indexPathFor("/a/b/v.emb1")).toBe("/a/b/v.emb1.idx.jsonl");
  });

  it("rejects rows of the wrong width", () => {
    const writer = new Emb1Writer(path.join(dir, "w.emb1"), 3);
    expect(() => writer.writeRow(Float32Array.from([1, 2]), { docId: "d", chunkIndex: 0 })).toThrow(
      /2 values, expected 3/
    );
    writer.close();
  });

  it("rejects writes after close", () => {
    const writer = new Emb1Writer(path.join(dir, "w.emb1"), 1);
    writer.close();
    expect(() => writer.writeRow(Float32Array.from([1]), { docId: "d", chunkIndex: 0 })).toThrow(
      /closed/
    );
  });

  it("rejects a non-positive dim", () => {
    expect(() => new Emb1Writer(path.join(dir, "w.emb1"), 0)).toThrow(/positive integer/);
  });
});

describe("readEmb1", () => {
  it("rejects a bad magic", () => {
    const p = path.join(dir, "bad.emb1");
    fs.writeFileSync(p, Buffer.from("NOPE\x00\x00\x00\x00\x01\x00\x00\x00", "binary"));
    expect(() => readEmb1(p)).toThrow(/not an EMB1 file/);
  });

  it("rejects a truncated payload", () => {
    const p = write([[1, 2]], 2);
    const data = fs.readFileSync(p);
    fs.writeFileSync(p, data.subarray(0, data.length - 4));
    expect(() => readEmb1(p)).toThrow(/expected 20 bytes/);
  });

  it("rejects an index whose length disagrees with the header", () => {
    const p = write([[1, 2]], 2);
    fs.appendFileSync(indexPathFor(p), '{"doc_id": "extra", "chunk_index": 9}\n');
    expect(() => readEmb1(p)).toThrow(/index has 2 entries, header says 1/);
  });
});
