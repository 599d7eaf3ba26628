import * as fs from "node:fs";

export interface ChunkRecord {
  docId: string;
  chunkIndex: number;
  tokens: string[];
}

/** Raised for unreadable or malformed chunk files (data errors, not usage errors). */
export class ChunkParseError extends Error {}

export function parseChunkLine(line: string, where: string): ChunkRecord {
  let raw: unknown;
  try {
    raw = JSON.parse(line);
  } catch (err) {
    throw new ChunkParseError(`${where}: invalid JSON (${(err as Error).message})`);
  }
  if (typeof raw !== "object" || raw === null || Array.isArray(raw)) {
    throw new ChunkParseError(`${where}: chunk record must be a JSON object`);
  }
  const rec = raw as Record<string, unknown>;
  const docId = rec["doc_id"];
  const chunkIndex = rec["chunk_index"];
  const tokens = rec["tokens"];
  if (typeof docId !== "string" || docId.length === 0) {
    throw new ChunkParseError(`${where}: "doc_id" must be a non-empty string`);
  }
  if (typeof chunkIndex !== "number" || !Number.isInteger(chunkIndex) || chunkIndex < 0) {
    throw new ChunkParseError(`${where}: "chunk_index" must be a non-negative integer`);
  }
  if (!Array.isArray(tokens) || tokens.some((t) => typeof t !== "string")) {
    throw new ChunkParseError(`${where}: "tokens" must be an array of strings`);
  }
  return { docId, chunkIndex, tokens: tokens as string[] };
}

/** Read a chunked-corpus JSONL file. Blank lines are skipped; order is preserved. */
export function readChunks(path: string): ChunkRecord[] {
  let text: string;
  try {
    text = fs.readFileSync(path, "utf8");
  } catch (err) {
    throw new ChunkParseError(`cannot read chunks file ${path}: ${(err as Error).message}`);
  }
  const records: ChunkRecord[] = [];
  const lines = text.split("\n");
  for (let i = 0; i < lines.length; i++) {
    const line = (lines[i] ?? "").trim();
    if (!line) continue;
    records.push(parseChunkLine(line, `${path}:${i + 1}`));
  }
  return records;
}
