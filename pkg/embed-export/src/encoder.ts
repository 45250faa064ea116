/**
 * Sentence encoders keyed by model id.
 *
 * Two families are understood:
 *
 * - "hash:<dims>" — a deterministic lexical-hash encoder that needs no
 *   downloads: each whitespace token is hashed (FNV-1a over its UTF-8
 *   bytes), expanded to <dims> pseudo-random coordinates, summed and
 *   L2-normalized. Identical input text always produces identical bytes,
 *   which is what the round-trip and determinism tests pin down.
 * - anything else — treated as a pretrained encoder name and loaded through
 *   the optional @huggingface/transformers package; the per-input summary
 *   vector (CLS pooling) is exported. This path needs the package installed
 *   and the model available locally or downloadable.
 */

export interface ExportConfig {
  modelId: string;
  maxLength: number;
  batchSize: number;
  inputMode: "plain" | "windowed";
}

export interface Encoder {
  dims: number | null; // null when unknown until the first batch
  encode(texts: string[]): Promise<Float32Array[]>;
}

export const DEFAULT_MAX_LENGTH = 512;
export const DEFAULT_BATCH_SIZE = 16;

export function validateConfig(cfg: ExportConfig): void {
  if (cfg.maxLength < 8) {
    throw new Error(`max-length must be >= 8, got ${cfg.maxLength}`);
  }
  if (cfg.batchSize < 1) {
    throw new Error(`batch-size must be >= 1, got ${cfg.batchSize}`);
  }
  if (cfg.modelId.trim() === "") {
    throw new Error("model id must be non-empty");
  }
}

const FNV_OFFSET = 0x811c9dc5;
const FNV_PRIME = 0x01000193;

function fnv1a(bytes: Uint8Array, seed: number = FNV_OFFSET): number {
  let h = seed >>> 0;
  for (const b of bytes) {
    h = (h ^ b) >>> 0;
    h = Math.imul(h, FNV_PRIME) >>> 0;
  }
  return h >>> 0;
}

function mixIndex(h: number, index: number): number {
  const bytes = new Uint8Array(4);
  bytes[0] = index & 0xff;
  bytes[1] = (index >>> 8) & 0xff;
  bytes[2] = (index >>> 16) & 0xff;
  bytes[3] = (index >>> 24) & 0xff;
  return fnv1a(bytes, h);
}

/** Map a 32-bit hash to the half-open interval [-1, 1). */
function toUnit(h: number): number {
  return (h / 0x100000000) * 2 - 1;
}

export function hashEmbed(
  text: string,
  dims: number,
  maxLength: number
): Float32Array {
  let tokens = text.toLowerCase().split(/\s+/).filter((t) => t.length > 0);
  if (tokens.length === 0) {
    // blank input still gets a deterministic, nonzero row
    tokens = ["<empty>"];
  }
  if (tokens.length > maxLength) {
    tokens = tokens.slice(0, maxLength);
  }
  const acc = new Float64Array(dims);
  for (const token of tokens) {
    const h = fnv1a(Buffer.from(token, "utf-8"));
    for (let j = 0; j < dims; j++) {
      acc[j] += toUnit(mixIndex(h, j));
    }
  }
  let norm = 0;
  for (let j = 0; j < dims; j++) {
    norm += acc[j] * acc[j];
  }
  norm = Math.sqrt(norm);
  const out = new Float32Array(dims);
  if (norm === 0) {
    // astronomically unlikely, but keep the no-zero-rows guarantee airtight
    out[fnv1a(Buffer.from(text, "utf-8")) % dims] = 1;
    return out;
  }
  for (let j = 0; j < dims; j++) {
    out[j] = acc[j] / norm;
  }
  return out;
}

const HASH_MODEL = /^hash:(\d+)$/;

function hashEncoder(dims: number, maxLength: number): Encoder {
  if (dims < 1 || dims > 65536) {
    throw new Error(`hash encoder dims must be in 1..65536, got ${dims}`);
  }
  return {
    dims,
    async encode(texts: string[]): Promise<Float32Array[]> {
      return texts.map((t) => hashEmbed(t, dims, maxLength));
    },
  };
}

function transformerEncoder(modelId: string, batchSize: number): Encoder {
  let pipePromise: Promise<any> | null = null;

  async function loadPipeline(): Promise<any> {
    if (!pipePromise) {
      pipePromise = (async () => {
        // computed specifier: the package is optional, so the compiler must
        // not demand its type declarations at build time
        const optionalDep = "@huggingface/transformers";
        let mod: any;
        try {
          mod = await import(optionalDep);
        } catch {
          throw new Error(
            `model "${modelId}" needs the optional @huggingface/transformers ` +
              `package; install it, or use a deterministic "hash:<dims>" model id`
          );
        }
        return mod.pipeline("feature-extraction", modelId);
      })();
    }
    return pipePromise;
  }

  const encoder: Encoder = {
    dims: null,
    async encode(texts: string[]): Promise<Float32Array[]> {
      const pipe = await loadPipeline();
      const out: Float32Array[] = [];
      for (let start = 0; start < texts.length; start += batchSize) {
        const batch = texts.slice(start, start + batchSize);
        const result = await pipe(batch, { pooling: "cls", normalize: false });
        const [rows, dims] = result.dims;
        if (rows !== batch.length) {
          throw new Error(
            `encoder returned ${rows} rows for a batch of ${batch.length}`
          );
        }
        const data = result.data as Float32Array;
        for (let i = 0; i < rows; i++) {
          out.push(data.slice(i * dims, (i + 1) * dims));
        }
        encoder.dims = dims;
      }
      return out;
    },
  };
  return encoder;
}

export function makeEncoder(cfg: ExportConfig): Encoder {
  validateConfig(cfg);
  const match = HASH_MODEL.exec(cfg.modelId);
  if (match) {
    return hashEncoder(parseInt(match[1], 10), cfg.maxLength);
  }
  return transformerEncoder(cfg.modelId, cfg.batchSize);
}
