/**
 * JSONL inputs: either a corpus file (one {"doc_id", "sent_index", "text"}
 * object per line) or a windowed file as produced by the pipeline's window
 * command (one {"doc_id", "sent_index", "input"} object per line). Lines
 * come back in file order; the embedding row order matches it one-to-one.
 */
import * as fs from "node:fs";

export type InputMode = "plain" | "windowed";

export function readInputs(inputPath: string, mode: InputMode): string[] {
  const field = mode === "windowed" ? "input" : "text";
  const raw = fs.readFileSync(inputPath, "utf-8");
  const texts: string[] = [];
  const lines = raw.split("\n");
  for (let i = 0; i < lines.length; i++) {
    const line = lines[i].trim();
    if (line === "") {
      continue;
    }
    let obj: unknown;
    try {
      obj = JSON.parse(line);
    } catch {
      throw new Error(`line ${i + 1}: invalid JSON`);
    }
    if (typeof obj !== "object" || obj === null) {
      throw new Error(`line ${i + 1}: expected a JSON object`);
    }
    const value = (obj as Record<string, unknown>)[field];
    if (typeof value !== "string") {
      throw new Error(`line ${i + 1}: missing string field "${field}"`);
    }
    texts.push(value);
  }
  if (texts.length === 0) {
    throw new Error(`no input lines found in ${inputPath}`);
  }
  return texts;
}
