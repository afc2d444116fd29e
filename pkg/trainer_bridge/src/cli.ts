/**
 * trainer-bridge CLI.
 *
 * Usage (after `npm run build`):
 *   node dist/cli.js emit-config --mode hybrid \
 *     --dataset datasets/hybrid.jsonl --out train.yaml [--devices 4]
 *   node dist/cli.js dry-run --dataset ds.jsonl --out summary.json [--mode regular]
 */

import fs from 'node:fs';

import { buildTrainConfig, emitConfigYaml, type TrainMode } from './config.js';
import { dryRun, writeSummary } from './dryrun.js';

function parseArg(name: string): string | undefined {
  const idx = process.argv.findIndex((a) => a === `--${name}`);
  if (idx === -1) return undefined;
  return process.argv[idx + 1];
}

function parseMode(): TrainMode {
  const mode = parseArg('mode') ?? 'regular';
  if (mode !== 'regular' && mode !== 'reasoning' && mode !== 'hybrid') {
    console.error(`unknown mode ${mode}`);
    process.exit(2);
  }
  return mode;
}

const command = process.argv[2];

if (command === 'emit-config') {
  const mode = parseMode();
  const config = buildTrainConfig(mode, {
    modelRef: parseArg('model'),
    datasetPath: parseArg('dataset'),
    devices: parseArg('devices') ? Number(parseArg('devices')) : undefined,
    perDeviceBatch: parseArg('batch') ? Number(parseArg('batch')) : undefined,
    epochs: parseArg('epochs') ? Number(parseArg('epochs')) : undefined,
  });
  const out = parseArg('out') ?? `train.${mode}.yaml`;
  fs.writeFileSync(out, emitConfigYaml(config), 'utf8');
  console.log(`wrote ${out}`);
  console.log(`  rank=${config.lora_rank} alpha=${config.lora_alpha} dropout=${config.lora_dropout}`);
  console.log(`  effective batch ${config.effective_batch} = ${config.devices} devices x ` +
    `${config.per_device_batch} batch x ${config.grad_accum} accum`);
} else if (command === 'dry-run') {
  const dataset = parseArg('dataset');
  if (!dataset) {
    console.error('dry-run needs --dataset');
    process.exit(2);
  }
  const config = buildTrainConfig(parseMode(), { datasetPath: dataset });
  const summary = dryRun(dataset, config);
  const out = parseArg('out') ?? 'dryrun_summary.json';
  writeSummary(out, summary);
  console.log(`dry run: ${summary.steps} steps on ${summary.examples_used} examples`);
  console.log(`  loss ${summary.losses[0].toFixed(6)} -> ${summary.losses.at(-1)!.toFixed(6)}` +
    ` (finite=${summary.finite}, decreased=${summary.decreased})`);
  console.log(`  encoder_delta=${summary.encoder_delta} adapter_delta=${summary.adapter_delta}`);
  console.log(`wrote ${out}`);
} else {
  console.error('usage: cli.ts <emit-config|dry-run> [options]');
  process.exit(2);
}
