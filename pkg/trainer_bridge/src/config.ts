/**
 * Training configuration for QLoRA fine-tuning of a speech LLM on forged
 * slot-filling datasets.
 *
 * The hyperparameters are fixed by the training recipe this bridge
 * materializes: LoRA rank 32 / alpha 128 / dropout 0.05 on all linear target
 * modules, effective batch 128 (devices x per-device batch x grad accum),
 * cosine schedule over 10-15 epochs with max LR 2e-4 and linear warm-up for
 * the first 20% of iterations, AdamW, gradient clipping at 1.0, encoder
 * frozen, adapter fully trainable.
 */

export type TrainMode = 'regular' | 'reasoning' | 'hybrid';

export interface TrainConfig {
  mode: TrainMode;
  model_ref: string;
  dataset_path: string;
  lora_rank: number;
  lora_alpha: number;
  lora_dropout: number;
  lora_target_modules: string;
  devices: number;
  per_device_batch: number;
  grad_accum: number;
  effective_batch: number;
  scheduler: string;
  epochs: number;
  max_lr: number;
  warmup_fraction: number;
  optimizer: string;
  grad_clip: number;
  freeze_encoder: boolean;
  train_adapter: boolean;
}

export class ConfigInvariantError extends Error {}

export const EFFECTIVE_BATCH = 128;
export const EPOCH_RANGE: [number, number] = [10, 15];

export interface BuildOptions {
  modelRef?: string;
  datasetPath?: string;
  devices?: number;
  perDeviceBatch?: number;
  epochs?: number;
}

/** Round warm-up: the first 20% of total iterations, as whole steps. */
export function warmupSteps(totalSteps: number, fraction = 0.2): number {
  return Math.round(fraction * totalSteps);
}

export function buildTrainConfig(mode: TrainMode, options: BuildOptions = {}): TrainConfig {
  const devices = options.devices ?? 4;
  const perDeviceBatch = options.perDeviceBatch ?? 4;
  const epochs = options.epochs ?? 12;
  if (devices < 1 || perDeviceBatch < 1) {
    throw new ConfigInvariantError('devices and per-device batch must be >= 1');
  }
  if (epochs < EPOCH_RANGE[0] || epochs > EPOCH_RANGE[1]) {
    throw new ConfigInvariantError(`epochs must lie in ${EPOCH_RANGE[0]}..${EPOCH_RANGE[1]}`);
  }
  // Gradient accumulation adapts so the effective batch stays at 128.
  const denominator = devices * perDeviceBatch;
  if (EFFECTIVE_BATCH % denominator !== 0) {
    throw new ConfigInvariantError(
      `devices*batch = ${denominator} does not divide the effective batch ${EFFECTIVE_BATCH}`,
    );
  }
  const gradAccum = EFFECTIVE_BATCH / denominator;
  return {
    mode,
    model_ref: options.modelRef ?? 'user-supplied-foundation-model',
    dataset_path: options.datasetPath ?? `datasets/${mode}.jsonl`,
    lora_rank: 32,
    lora_alpha: 128,
    lora_dropout: 0.05,
    lora_target_modules: 'all-linear',
    devices,
    per_device_batch: perDeviceBatch,
    grad_accum: gradAccum,
    effective_batch: EFFECTIVE_BATCH,
    scheduler: 'cosine',
    epochs,
    max_lr: 2e-4,
    warmup_fraction: 0.2,
    optimizer: 'adamw',
    grad_clip: 1.0,
    freeze_encoder: true,
    train_adapter: true,
  };
}

export function assertInvariants(config: TrainConfig): void {
  if (config.devices * config.per_device_batch * config.grad_accum !== config.effective_batch) {
    throw new ConfigInvariantError(
      'effective_batch must equal devices * per_device_batch * grad_accum',
    );
  }
}

const KEY_ORDER: (keyof TrainConfig)[] = [
  'mode',
  'model_ref',
  'dataset_path',
  'lora_rank',
  'lora_alpha',
  'lora_dropout',
  'lora_target_modules',
  'devices',
  'per_device_batch',
  'grad_accum',
  'effective_batch',
  'scheduler',
  'epochs',
  'max_lr',
  'warmup_fraction',
  'optimizer',
  'grad_clip',
  'freeze_encoder',
  'train_adapter',
];

/** Flat YAML, stable key order; parseConfigYaml round-trips it exactly. */
export function emitConfigYaml(config: TrainConfig): string {
  assertInvariants(config);
  const lines = KEY_ORDER.map((key) => {
    const value = config[key];
    return typeof value === 'string' ? `${key}: "${value}"` : `${key}: ${value}`;
  });
  return lines.join('\n') + '\n';
}

export function parseConfigYaml(text: string): TrainConfig {
  const out: Record<string, unknown> = {};
  for (const rawLine of text.split('\n')) {
    const line = rawLine.trim();
    if (!line || line.startsWith('#')) continue;
    const sep = line.indexOf(':');
    if (sep === -1) throw new ConfigInvariantError(`not a key: value line: ${line}`);
    const key = line.slice(0, sep).trim();
    const raw = line.slice(sep + 1).trim();
    if (raw.startsWith('"') && raw.endsWith('"')) {
      out[key] = raw.slice(1, -1);
    } else if (raw === 'true' || raw === 'false') {
      out[key] = raw === 'true';
    } else {
      const num = Number(raw);
      if (Number.isNaN(num)) throw new ConfigInvariantError(`unparseable value: ${line}`);
      out[key] = num;
    }
  }
  for (const key of KEY_ORDER) {
    if (!(key in out)) throw new ConfigInvariantError(`missing key ${key}`);
  }
  const config = out as unknown as TrainConfig;
  assertInvariants(config);
  return config;
}
