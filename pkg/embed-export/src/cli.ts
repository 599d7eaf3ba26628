import { parseArgs } from "node:util";

import { DEFAULT_MODEL, ModelError } from "./embedder.js";
import { exportEmbeddings } from "./export.js";

const USAGE =
  "usage: embed-export export --chunks <path> --out <path> [--model <name>] [--batch-size <n>]";

export interface Io {
  out: (msg: string) => void;
  err: (msg: string) => void;
}

const consoleIo: Io = {
  out: (msg) => console.log(msg),
  err: (msg) => console.error(msg),
};

/** Exit codes match the corpus pipeline: 0 ok, 1 usage/config, 2 data error. */
export function main(argv: string[], io: Io = consoleIo): number {
  if (argv.length === 0 || argv[0] === "--help" || argv[0] === "-h") {
    io.out(USAGE);
    return argv.length === 0 ? 1 : 0;
  }
  if (argv[0] !== "export") {
    io.err(`unknown command "${argv[0]}"\n${USAGE}`);
    return 1;
  }

  let values: { chunks?: string; model?: string; out?: string; "batch-size"?: string };
  try {
    values = parseArgs({
      args: argv.slice(1),
      options: {
        chunks: { type: "string" },
        model: { type: "string", default: DEFAULT_MODEL },
        out: { type: "string" },
        "batch-size": { type: "string", default: "32" },
      },
      allowPositionals: false,
    }).values;
  } catch (err) {
    io.err(`${(err as Error).message}\n${USAGE}`);
    return 1;
  }
  if (!values.chunks || !values.out) {
    io.err(`--chunks and --out are required\n${USAGE}`);
    return 1;
  }
  const batchSize = Number(values["batch-size"]);
  if (!Number.isInteger(batchSize) || batchSize < 1) {
    io.err(`--batch-size must be a positive integer, got "${values["batch-size"]}"`);
    return 1;
  }

  try {
    const result = exportEmbeddings(
      { chunks: values.chunks, model: values.model ?? DEFAULT_MODEL, out: values.out, batchSize },
      io.err
    );
    io.out(`wrote ${result.count} x ${result.dim} embeddings to ${values.out}`);
    if (result.truncated > 0) {
      io.err(`truncated ${result.truncated} over-long chunk(s)`);
    }
    return 0;
  } catch (err) {
    if (err instanceof ModelError || err instanceof RangeError) {
      io.err(`error: ${err.message}`);
      return 1;
    }
    io.err(`error: ${(err as Error).message}`);
    return 2;
  }
}
