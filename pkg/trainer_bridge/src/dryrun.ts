/**
 * Dry run: prove a dataset + config are trainable before renting GPUs.
 *
 * Builds a toy-width stub of the real stack — a frozen "encoder" projection,
 * a trainable "adapter" matrix, and a scalar head — hashes each example's
 * text into features, and runs at most ten full-batch AdamW steps on at most
 * 64 examples. The summary reports the loss trajectory (must stay finite),
 * that the adapter moved, and that the frozen encoder did not.
 */

import fs from 'node:fs';

import { type TrainConfig } from './config.js';
import { readDatasetJsonl, type DatasetExample } from './dataset.js';

export class NonFiniteLoss extends Error {}

export interface DryRunSummary {
  examples_used: number;
  steps: number;
  losses: number[];
  finite: boolean;
  decreased: boolean;
  encoder_delta: number;
  adapter_delta: number;
  grad_clip: number;
  max_lr: number;
}

const FEATURE_DIM = 16;
const ENC_DIM = 8;
const ADAPTER_DIM = 4;
const MAX_EXAMPLES = 64;
const MAX_STEPS = 10;

/** Deterministic 32-bit mix for feature hashing and parameter init. */
function mix32(x: number): number {
  let z = (x + 0x9e3779b9) >>> 0;
  z = Math.imul(z ^ (z >>> 16), 0x21f0aaad) >>> 0;
  z = Math.imul(z ^ (z >>> 15), 0x735a2d97) >>> 0;
  return (z ^ (z >>> 15)) >>> 0;
}

function hashToken(token: string): number {
  let h = 0x811c9dc5;
  for (let i = 0; i < token.length; i++) {
    h = Math.imul(h ^ token.charCodeAt(i), 0x01000193) >>> 0;
  }
  return h >>> 0;
}

function features(example: DatasetExample): Float64Array {
  const x = new Float64Array(FEATURE_DIM);
  const tokens = (example.instruction + ' ' + example.target).split(/\s+/);
  for (const token of tokens) {
    if (!token) continue;
    const h = hashToken(token);
    const sign = (h & 1) === 0 ? 1 : -1;
    x[(h >>> 1) % FEATURE_DIM] += sign;
  }
  const norm = Math.hypot(...x) || 1;
  for (let i = 0; i < FEATURE_DIM; i++) x[i] /= norm;
  return x;
}

/** Supervision signal: how much of the target dict is filled (bounded 0..1). */
function targetSignal(example: DatasetExample): number {
  const nones = (example.target.match(/'None'/g) ?? []).length;
  const entries = (example.target.match(/':/g) ?? []).length;
  if (entries === 0) return 0;
  return (entries - nones) / entries;
}

function initMatrix(rows: number, cols: number, seed: number): Float64Array[] {
  const matrix: Float64Array[] = [];
  for (let r = 0; r < rows; r++) {
    const row = new Float64Array(cols);
    for (let c = 0; c < cols; c++) {
      row[c] = (mix32(seed + r * 1009 + c) / 0xffffffff - 0.5) / Math.sqrt(cols);
    }
    matrix.push(row);
  }
  return matrix;
}

function matVec(matrix: Float64Array[], vec: Float64Array): Float64Array {
  const out = new Float64Array(matrix.length);
  for (let r = 0; r < matrix.length; r++) {
    let sum = 0;
    for (let c = 0; c < vec.length; c++) sum += matrix[r][c] * vec[c];
    out[r] = sum;
  }
  return out;
}

class AdamW {
  private m: Float64Array;
  private v: Float64Array;
  private t = 0;

  constructor(
    private size: number,
    private lr: number,
    private weightDecay = 0.01,
    private beta1 = 0.9,
    private beta2 = 0.999,
    private eps = 1e-8,
  ) {
    this.m = new Float64Array(size);
    this.v = new Float64Array(size);
  }

  step(params: Float64Array, grads: Float64Array): void {
    this.t += 1;
    for (let i = 0; i < this.size; i++) {
      this.m[i] = this.beta1 * this.m[i] + (1 - this.beta1) * grads[i];
      this.v[i] = this.beta2 * this.v[i] + (1 - this.beta2) * grads[i] * grads[i];
      const mHat = this.m[i] / (1 - this.beta1 ** this.t);
      const vHat = this.v[i] / (1 - this.beta2 ** this.t);
      params[i] -= this.lr * (mHat / (Math.sqrt(vHat) + this.eps) + this.weightDecay * params[i]);
    }
  }
}

function flatten(matrix: Float64Array[]): Float64Array {
  const flat = new Float64Array(matrix.length * matrix[0].length);
  matrix.forEach((row, r) => flat.set(row, r * row.length));
  return flat;
}

function unflattenInto(matrix: Float64Array[], flat: Float64Array): void {
  matrix.forEach((row, r) => {
    for (let c = 0; c < row.length; c++) row[c] = flat[r * row.length + c];
  });
}

export function dryRun(datasetPath: string, config: TrainConfig): DryRunSummary {
  const examples = readDatasetJsonl(datasetPath).slice(0, MAX_EXAMPLES);
  const xs = examples.map(features);
  const ys = examples.map(targetSignal);

  const encoder = initMatrix(ENC_DIM, FEATURE_DIM, 11);
  const encoderFrozen = encoder.map((row) => Float64Array.from(row));
  const adapter = initMatrix(ADAPTER_DIM, ENC_DIM, 23);
  const adapterStart = adapter.map((row) => Float64Array.from(row));
  const head = initMatrix(1, ADAPTER_DIM, 37)[0];

  const encoded = xs.map((x) => matVec(encoder, x)); // frozen, so precompute

  const adapterFlat = flatten(adapter);
  const optAdapter = new AdamW(adapterFlat.length, config.max_lr);
  const optHead = new AdamW(head.length, config.max_lr);

  const losses: number[] = [];
  for (let step = 0; step < MAX_STEPS; step++) {
    unflattenInto(adapter, adapterFlat);
    const gradAdapter = new Float64Array(adapterFlat.length);
    const gradHead = new Float64Array(head.length);
    let loss = 0;
    for (let i = 0; i < examples.length; i++) {
      const h = encoded[i];
      const z = matVec(adapter, h);
      let pred = 0;
      for (let j = 0; j < ADAPTER_DIM; j++) pred += head[j] * z[j];
      const err = pred - ys[i];
      loss += (err * err) / examples.length;
      const scale = (2 * err) / examples.length;
      for (let j = 0; j < ADAPTER_DIM; j++) {
        gradHead[j] += scale * z[j];
        for (let c = 0; c < ENC_DIM; c++) {
          gradAdapter[j * ENC_DIM + c] += scale * head[j] * h[c];
        }
      }
    }
    if (!Number.isFinite(loss)) {
      throw new NonFiniteLoss(`loss became non-finite at step ${step}`);
    }
    losses.push(loss);

    // Global-norm gradient clipping at the configured threshold.
    let norm = 0;
    for (const g of gradAdapter) norm += g * g;
    for (const g of gradHead) norm += g * g;
    norm = Math.sqrt(norm);
    if (norm > config.grad_clip) {
      const shrink = config.grad_clip / norm;
      for (let i = 0; i < gradAdapter.length; i++) gradAdapter[i] *= shrink;
      for (let i = 0; i < gradHead.length; i++) gradHead[i] *= shrink;
    }

    optAdapter.step(adapterFlat, gradAdapter);
    optHead.step(head, gradHead);
  }
  unflattenInto(adapter, adapterFlat);

  let encoderDelta = 0;
  let adapterDelta = 0;
  for (let r = 0; r < ENC_DIM; r++) {
    for (let c = 0; c < FEATURE_DIM; c++) {
      encoderDelta = Math.max(encoderDelta, Math.abs(encoder[r][c] - encoderFrozen[r][c]));
    }
  }
  for (let r = 0; r < ADAPTER_DIM; r++) {
    for (let c = 0; c < ENC_DIM; c++) {
      adapterDelta = Math.max(adapterDelta, Math.abs(adapter[r][c] - adapterStart[r][c]));
    }
  }

  const decreased = losses.some((l, i) => i > 0 && l < losses[i - 1]);
  return {
    examples_used: examples.length,
    steps: losses.length,
    losses,
    finite: losses.every(Number.isFinite),
    decreased,
    encoder_delta: encoderDelta,
    adapter_delta: adapterDelta,
    grad_clip: config.grad_clip,
    max_lr: config.max_lr,
  };
}

export function writeSummary(path: string, summary: DryRunSummary): void {
  fs.writeFileSync(path, JSON.stringify(summary, null, 2) + '\n', 'utf8');
}
