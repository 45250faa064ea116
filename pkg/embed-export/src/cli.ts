#!/usr/bin/env node
/**
 * embed-export: run a sentence encoder over a JSONL corpus and write the
 * vectors as an EMB1 binary file.
 *
 *   embed-export export --model hash:64 --input corpus.jsonl --output corpus.emb
 *   embed-export export --model <encoder-id> --input windows.jsonl --output w.emb \
 *       --windowed --max-length 256
 *
 * Exit codes: 0 success, 1 usage or configuration problem, 2 bad input data.
 */
import { parseArgs } from "node:util";

import { readInputs } from "./corpus";
import {
  DEFAULT_BATCH_SIZE,
  DEFAULT_MAX_LENGTH,
  ExportConfig,
  makeEncoder,
} from "./encoder";
import { readEmb1, writeEmb1 } from "./emb1";

const USAGE =
  "usage: embed-export export --model <id> --input <corpus.jsonl> " +
  "--output <file.emb> [--windowed] [--max-length N] [--batch-size N]";

class UsageError extends Error {}

function parseCli(argv: string[]): { cfg: ExportConfig; input: string; output: string } {
  const { values, positionals } = parseArgs({
    args: argv,
    allowPositionals: true,
    options: {
      model: { type: "string" },
      input: { type: "string" },
      output: { type: "string" },
      windowed: { type: "boolean", default: false },
      "max-length": { type: "string", default: String(DEFAULT_MAX_LENGTH) },
      "batch-size": { type: "string", default: String(DEFAULT_BATCH_SIZE) },
    },
  });
  if (positionals.length !== 1 || positionals[0] !== "export") {
    throw new UsageError(USAGE);
  }
  if (!values.model || !values.input || !values.output) {
    throw new UsageError(USAGE);
  }
  const maxLength = Number(values["max-length"]);
  const batchSize = Number(values["batch-size"]);
  if (!Number.isInteger(maxLength) || !Number.isInteger(batchSize)) {
    throw new UsageError("--max-length and --batch-size must be integers");
  }
  return {
    cfg: {
      modelId: values.model,
      maxLength,
      batchSize,
      inputMode: values.windowed ? "windowed" : "plain",
    },
    input: values.input,
    output: values.output,
  };
}

export async function run(argv: string[]): Promise<number> {
  let parsed;
  try {
    parsed = parseCli(argv);
  } catch (err) {
    process.stderr.write(`embed-export: error: ${(err as Error).message}\n`);
    return 1;
  }
  const { cfg, input, output } = parsed;
  try {
    const encoder = makeEncoder(cfg);
    const texts = readInputs(input, cfg.inputMode);
    const rows = await encoder.encode(texts);
    if (rows.length !== texts.length) {
      throw new Error(
        `encoder produced ${rows.length} rows for ${texts.length} inputs`
      );
    }
    writeEmb1(rows, output);
    // post-validation: the written file must read back with one row per line
    const back = readEmb1(output);
    if (back.length !== texts.length) {
      throw new Error(
        `written file holds ${back.length} rows, expected ${texts.length}`
      );
    }
    process.stderr.write(
      `wrote ${back.length} x ${back[0].length} embeddings to ${output}\n`
    );
    return 0;
  } catch (err) {
    const message = (err as Error).message;
    process.stderr.write(`embed-export: error: ${message}\n`);
    const configish =
      /max-length|batch-size|model id|dims must be|needs the optional/.test(
        message
      );
    return configish ? 1 : 2;
  }
}

if (typeof require !== "undefined" && require.main === module) {
  run(process.argv.slice(2)).then((code) => {
    process.exitCode = code;
  });
}
