import * as fs from "node:fs";

export const MAGIC = "EMB1";
export const HEADER_BYTES = 12; // magic + u32 count + u32 dim, little-endian

export interface IndexEntry {
  docId: string;
  chunkIndex: number;
}

export function indexPathFor(outPath: string): string {
  return `${outPath}.idx.jsonl`;
}

/**
 * Single-writer EMB1 emitter. Rows are written in call order; the header
 * count is patched on close so the writer never buffers the whole payload.
 */
export class Emb1Writer {
  private fd: number;
  private indexLines: string[] = [];
  private count = 0;
  private closed = false;

  constructor(
    readonly path: string,
    readonly dim: number
  ) {
    if (!Number.isInteger(dim) || dim < 1) {
      throw new Error(`dim must be a positive integer, got ${dim}`);
    }
    this.fd = fs.openSync(path, "w");
    const header = Buffer.alloc(HEADER_BYTES);
    header.write(MAGIC, 0, "ascii");
    header.writeUInt32LE(0, 4); // placeholder count
    header.writeUInt32LE(dim, 8);
    fs.writeSync(this.fd, header);
  }

  writeRow(row: Float32Array, entry: IndexEntry): void {
    if (this.closed) throw new Error("writer is closed");
    if (row.length !== this.dim) {
      throw new Error(`row ${this.count} has ${row.length} values, expected ${this.dim}`);
    }
    const buf = Buffer.alloc(this.dim * 4);
    for (let i = 0; i < this.dim; i++) buf.writeFloatLE(row[i]!, i * 4);
    fs.writeSync(this.fd, buf);
    this.indexLines.push(
      JSON.stringify({ doc_id: entry.docId, chunk_index: entry.chunkIndex }) + "\n"
    );
    this.count++;
  }

  close(): number {
    if (this.closed) return this.count;
    this.closed = true;
    const countBuf = Buffer.alloc(4);
    countBuf.writeUInt32LE(this.count, 0);
    fs.writeSync(this.fd, countBuf, 0, 4, 4);
    fs.closeSync(this.fd);
    fs.writeFileSync(indexPathFor(this.path), this.indexLines.join(""));
    return this.count;
  }
}

/** Read an EMB1 file back (used by tests; the primary consumer is Python). */
export function readEmb1(path: string): {
  dim: number;
  rows: Float32Array[];
  index: IndexEntry[];
} {
  const data = fs.readFileSync(path);
  if (data.length < HEADER_BYTES || data.toString("ascii", 0, 4) !== MAGIC) {
    throw new Error(`${path}: not an EMB1 file`);
  }
  const count = data.readUInt32LE(4);
  const dim = data.readUInt32LE(8);
  const expected = HEADER_BYTES + count * dim * 4;
  if (data.length !== expected) {
    throw new Error(`${path}: expected ${expected} bytes for ${count}x${dim}, got ${data.length}`);
  }
  const rows: Float32Array[] = [];
  for (let r = 0; r < count; r++) {
    const row = new Float32Array(dim);
    for (let i = 0; i < dim; i++) {
      row[i] = data.readFloatLE(HEADER_BYTES + (r * dim + i) * 4);
    }
    rows.push(row);
  }
  const index = fs
    .readFileSync(indexPathFor(path), "utf8")
    .split("\n")
    .filter((line) => line.trim())
    .map((line) => {
      const rec = JSON.parse(line) as { doc_id: string; chunk_index: number };
      return { docId: rec.doc_id, chunkIndex: rec.chunk_index };
    });
  if (index.length !== count) {
    throw new Error(`${path}: index has ${index.length} entries, header says ${count}`);
  }
  return { dim, rows, index };
}
