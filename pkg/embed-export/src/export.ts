import { readChunks } from "./chunks.js";
import { Emb1Writer } from "./emb1.js";
import { loadEmbedder } from "./embedder.js";

export interface ExportOptions {
  chunks: string;
  model: string;
  out: string;
  batchSize: number;
}

export interface ExportResult {
  count: number;
  dim: number;
  truncated: number;
}

/**
 * Embed every chunk in input order and write the EMB1 file plus its JSONL
 * index. Inference runs in batches of batchSize; output rows are written by
 * a single writer as each batch completes, so row i always corresponds to
 * input line i. Over-long chunks are truncated with a warning, never dropped.
 */
export function exportEmbeddings(
  opts: ExportOptions,
  log: (msg: string) => void = (msg) => console.error(msg)
): ExportResult {
  if (!Number.isInteger(opts.batchSize) || opts.batchSize < 1) {
    throw new RangeError(`batch size must be a positive integer, got ${opts.batchSize}`);
  }
  const embedder = loadEmbedder(opts.model);
  const records = readChunks(opts.chunks);

  const writer = new Emb1Writer(opts.out, embedder.dim);
  let truncated = 0;
  try {
    for (let start = 0; start < records.length; start += opts.batchSize) {
      const batch = records.slice(start, start + opts.batchSize);
      const texts = batch.map((rec) => {
        let tokens = rec.tokens;
        if (tokens.length > embedder.maxTokens) {
          truncated++;
          log(
            `warning: chunk ${rec.docId}:${rec.chunkIndex} has ${tokens.length} tokens; ` +
              `truncating to ${embedder.maxTokens}`
          );
          tokens = tokens.slice(0, embedder.maxTokens);
        }
        return tokens.join(" ");
      });
      const vectors = embedder.embedBatch(texts);
      vectors.forEach((vec, i) => {
        const rec = batch[i]!;
        writer.writeRow(vec, { docId: rec.docId, chunkIndex: rec.chunkIndex });
      });
    }
  } finally {
    writer.close();
  }
  return { count: records.length, dim: embedder.dim, truncated };
}
