/**
 * Reader for the forge's dataset interchange files (JSON Lines).
 *
 * One example per line:
 *   {"id": "...", "audio": "...", "context": ["..."], "instruction": "...",
 *    "queried_slots": ["..."]|null, "mode": "regular"|"reasoning",
 *    "control_tag": "think"|"no_think"|null, "target": "...",
 *    "meta": {"call_id": "...", "turn": 7, ...}}
 */

import fs from 'node:fs';

export interface DatasetExample {
  id: string;
  audio: string;
  context: string[];
  instruction: string;
  queried_slots: string[] | null;
  mode: 'regular' | 'reasoning';
  control_tag: 'think' | 'no_think' | null;
  target: string;
  meta: { call_id: string; turn: number; [key: string]: unknown };
}

export class DatasetSchemaError extends Error {
  constructor(
    public readonly line: number,
    cause: string,
  ) {
    super(`line ${line}: ${cause}`);
  }
}

function isStringArray(value: unknown): value is string[] {
  return Array.isArray(value) && value.every((item) => typeof item === 'string');
}

function validateExample(record: unknown, line: number): DatasetExample {
  if (typeof record !== 'object' || record === null || Array.isArray(record)) {
    throw new DatasetSchemaError(line, 'record is not an object');
  }
  const rec = record as Record<string, unknown>;
  for (const key of ['id', 'audio', 'instruction', 'target'] as const) {
    if (typeof rec[key] !== 'string') {
      throw new DatasetSchemaError(line, `missing or non-string '${key}'`);
    }
  }
  if (!isStringArray(rec.context)) {
    throw new DatasetSchemaError(line, "'context' must be an array of strings");
  }
  if (rec.queried_slots !== null && !isStringArray(rec.queried_slots)) {
    throw new DatasetSchemaError(line, "'queried_slots' must be null or an array of strings");
  }
  if (rec.mode !== 'regular' && rec.mode !== 'reasoning') {
    throw new DatasetSchemaError(line, `unknown mode ${JSON.stringify(rec.mode)}`);
  }
  if (rec.control_tag !== null && rec.control_tag !== 'think' && rec.control_tag !== 'no_think') {
    throw new DatasetSchemaError(line, `unknown control_tag ${JSON.stringify(rec.control_tag)}`);
  }
  const meta = rec.meta as Record<string, unknown> | undefined;
  if (typeof meta !== 'object' || meta === null) {
    throw new DatasetSchemaError(line, "missing 'meta' object");
  }
  if (typeof meta.call_id !== 'string' || typeof meta.turn !== 'number') {
    throw new DatasetSchemaError(line, "'meta' needs call_id (string) and turn (number)");
  }
  return rec as unknown as DatasetExample;
}

export function readDatasetJsonl(path: string): DatasetExample[] {
  const text = fs.readFileSync(path, 'utf8');
  const examples: DatasetExample[] = [];
  const lines = text.split('\n');
  for (let i = 0; i < lines.length; i++) {
    const line = lines[i].trim();
    if (!line) continue;
    let record: unknown;
    try {
      record = JSON.parse(line);
    } catch {
      throw new DatasetSchemaError(i + 1, 'invalid JSON');
    }
    examples.push(validateExample(record, i + 1));
  }
  return examples;
}
