import { execFileSync } from "node:child_process";
import * as fs from "node:fs";
import * as os from "node:os";
import * as path from "node:path";

import { afterEach, beforeEach, describe, expect, it } from "vitest";

import { main } from "../src/cli.js";
import { readChunks } from "../src/chunks.js";
import { HEADER_BYTES, readEmb1 } from "../src/emb1.js";
import { exportEmbeddings } from "../src/export.js";

const FIXTURE = new URL("./fixtures/chunks_25.jsonl", import.meta.url).pathname;

let dir: string;

beforeEach(() => {
  dir = fs.mkdtempSync(path.join(os.tmpdir(), "export-"));
});

afterEach(() => {
  fs.rmSync(dir, { recursive: true, force: true });
});

function chunkLine(docId: string, chunkIndex: number, tokens: string[]): string {
  return JSON.stringify({ doc_id: docId, chunk_index: chunkIndex, tokens }) + "\n";
}

function runCli(...argv: string[]): { code: number; out: string[]; err: string[] } {
  const out: string[] = [];
  const err: string[] = [];
  const code = main(argv, { out: (m) => out.push(m), err: (m) => err.push(m) });
  return { code, out, err };
}

describe("exportEmbeddings", () => {
  it("writes one row per input line, in input order", () => {
    const chunks = path.join(dir, "c.jsonl");
    fs.writeFileSync(
      chunks,
      chunkLine("z", 1, ["gamma"]) + chunkLine("a", 0, ["alpha", "beta"]) + chunkLine("z", 0, ["delta"])
    );
    const out = path.join(dir, "v.emb1");
    const result = exportEmbeddings({ chunks, model: "hash-16", out, batchSize: 2 });
    expect(result).toEqual({ count: 3, dim: 16, truncated: 0 });
    const back = readEmb1(out);
    expect(back.index).toEqual([
      { docId: "z", chunkIndex: 1 },
      { docId: "a", chunkIndex: 0 },
      { docId: "z", chunkIndex: 0 },
    ]);
  });

  it("is invariant to batch size, byte for byte", () => {
    const outs: Buffer[] = [];
    for (const batchSize of [1, 7, 1000]) {
      const out = path.join(dir, `v${batchSize}.emb1`);
      exportEmbeddings({ chunks: FIXTURE, model: "hash-32", out, batchSize });
      outs.push(fs.readFileSync(out));
    }
    expect(outs[1]!.equals(outs[0]!)).toBe(true);
    expect(outs[2]!.equals(outs[0]!)).toBe(true);
  });

  it("gives duplicated input lines identical vector rows", () => {
    const line = chunkLine("dup", 0, ["res", "judicata", "estoppel"]);
    const other = chunkLine("other", 0, ["appeal"]);
    const chunks = path.join(dir, "c.jsonl");
    fs.writeFileSync(chunks, line + other + line);
    const out = path.join(dir, "v.emb1");
    exportEmbeddings({ chunks, model: "hash-64", out, batchSize: 2 });
    const data = fs.readFileSync(out);
    const rowBytes = 64 * 4;
    const row = (i: number) =>
      data.subarray(HEADER_BYTES + i * rowBytes, HEADER_BYTES + (i + 1) * rowBytes);
    expect(row(0).equals(row(2))).toBe(true);
    expect(row(0).equals(row(1))).toBe(false);
  });

  it("truncates over-long chunks with a warning instead of dropping them", () => {
    const long = Array.from({ length: 600 }, (_, i) => `t${i}`);
    const chunks = path.join(dir, "c.jsonl");
    fs.writeFileSync(chunks, chunkLine("big", 0, long) + chunkLine("small", 0, ["x"]));
    const out = path.join(dir, "v.emb1");
    const warnings: string[] = [];
    const result = exportEmbeddings(
      { chunks, model: "hash-8", out, batchSize: 32 },
      (m) => warnings.push(m)
    );
    expect(result.count).toBe(2);
    expect(result.truncated).toBe(1);
    expect(warnings).toHaveLength(1);
    expect(warnings[0]).toMatch(/big:0 has 600 tokens; truncating to 512/);

    // the row equals the embedding of the first 512 tokens
    const truncated = path.join(dir, "t.jsonl");
    fs.writeFileSync(truncated, chunkLine("big", 0, long.slice(0, 512)));
    const out2 = path.join(dir, "t.emb1");
    exportEmbeddings({ chunks: truncated, model: "hash-8", out: out2, batchSize: 32 });
    expect(Array.from(readEmb1(out).rows[0]!)).toEqual(Array.from(readEmb1(out2).rows[0]!));
  });

  it("handles an empty chunks file", () => {
    const chunks = path.join(dir, "empty.jsonl");
    fs.writeFileSync(chunks, "");
    const out = path.join(dir, "v.emb1");
    const result = exportEmbeddings({ chunks, model: "hash-384", out, batchSize: 32 });
    expect(result.count).toBe(0);
    const data = fs.readFileSync(out);
    expect(data.length).toBe(HEADER_BYTES);
    expect(data.readUInt32LE(4)).toBe(0);
    expect(fs.readFileSync(`${out}.idx.jsonl`, "utf8")).toBe("");
  });

  it("writes the documented header for 3 chunks at dim 384", () => {
    const chunks = path.join(dir, "c.jsonl");
    fs.writeFileSync(
      chunks,
      chunkLine("a", 0, ["x"]) + chunkLine("a", 1, ["y"]) + chunkLine("b", 0, ["z"])
    );
    const out = path.join(dir, "v.emb1");
    exportEmbeddings({ chunks, model: "hash-384", out, batchSize: 32 });
    const data = fs.readFileSync(out);
    expect(data.toString("ascii", 0, 4)).toBe("EMB1");
    expect(data.readUInt32LE(4)).toBe(3);
    expect(data.readUInt32LE(8)).toBe(384);
    expect(data.length).toBe(HEADER_BYTES + 3 * 384 * 4);
  });
});

describe("round-trip into the Python consumer", () => {
  it("loads with matching count, dim, and order", () => {
    const out = path.join(dir, "v.emb1");
    exportEmbeddings({ chunks: FIXTURE, model: "hash-64", out, batchSize: 8 });
    const report = JSON.parse(
      execFileSync(
        "python3",
        [
          "-c",
          "import json, sys\n" +
            "from legaltopics.embio import read_embeddings\n" +
            "emb = read_embeddings(sys.argv[1])\n" +
            "print(json.dumps({'count': len(emb), 'dim': emb.dim, 'index': [list(e) for e in emb.index]}))",
          out,
        ],
        { encoding: "utf8" }
      )
    ) as { count: number; dim: number; index: [string, number][] };
    const records = readChunks(FIXTURE);
    expect(report.count).toBe(25);
    expect(report.dim).toBe(64);
    expect(report.index).toEqual(records.map((r) => [r.docId, r.chunkIndex]));
  });
});

describe("cli", () => {
  it("exports and reports the shape", () => {
    const out = path.join(dir, "v.emb1");
    const res = runCli("export", "--chunks", FIXTURE, "--out", out, "--model", "hash-16");
    expect(res.code).toBe(0);
    expect(res.out).toEqual([`wrote 25 x 16 embeddings to ${out}`]);
    expect(readEmb1(out).rows).toHaveLength(25);
  });

  it("exits 0 on an empty chunks file", () => {
    const chunks = path.join(dir, "empty.jsonl");
    fs.writeFileSync(chunks, "");
    const out = path.join(dir, "v.emb1");
    const res = runCli("export", "--chunks", chunks, "--out", out);
    expect(res.code).toBe(0);
    expect(res.out[0]).toContain("wrote 0 x 256");
  });

  it("requires --chunks and --out", () => {
    const res = runCli("export", "--chunks", FIXTURE);
    expect(res.code).toBe(1);
    expect(res.err[0]).toMatch(/--chunks and --out are required/);
  });

  it("rejects unknown flags and commands", () => {
    expect(runCli("export", "--nope").code).toBe(1);
    const res = runCli("frobnicate");
    expect(res.code).toBe(1);
    expect(res.err[0]).toMatch(/unknown command "frobnicate"/);
  });

  it("rejects a bad batch size", () => {
    const res = runCli("export", "--chunks", FIXTURE, "--out", "x", "--batch-size", "zero");
    expect(res.code).toBe(1);
    expect(res.err[0]).toMatch(/--batch-size/);
  });

  it("exits 1 for an unknown model", () => {
    const res = runCli("export", "--chunks", FIXTURE, "--out", path.join(dir, "v.emb1"), "--model", "bert-base");
    expect(res.code).toBe(1);
    expect(res.err[0]).toMatch(/cannot load embedding model/);
  });

  it("exits 2 for a missing chunks file", () => {
    const res = runCli("export", "--chunks", "/nonexistent.jsonl", "--out", path.join(dir, "v.emb1"));
    expect(res.code).toBe(2);
    expect(res.err[0]).toMatch(/cannot read chunks file/);
  });

  it("exits 2 for a malformed chunk line, naming the location", () => {
    const chunks = path.join(dir, "bad.jsonl");
    fs.writeFileSync(chunks, chunkLine("ok", 0, ["a"]) + "{broken\n");
    const res = runCli("export", "--chunks", chunks, "--out", path.join(dir, "v.emb1"));
    expect(res.code).toBe(2);
    expect(res.err[0]).toMatch(/bad\.jsonl:2/);
  });

  it("prints usage with no arguments and on --help", () => {
    expect(runCli().code).toBe(1);
    const res = runCli("--help");
    expect(res.code).toBe(0);
    expect(res.out[0]).toMatch(/usage: embed-export export/);
  });
});
