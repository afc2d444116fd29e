export {
  buildTrainConfig,
  emitConfigYaml,
  parseConfigYaml,
  warmupSteps,
  assertInvariants,
  ConfigInvariantError,
  EFFECTIVE_BATCH,
  EPOCH_RANGE,
  type TrainConfig,
  type TrainMode,
} from './config.js';
export { readDatasetJsonl, DatasetSchemaError, type DatasetExample } from './dataset.js';
export { dryRun, writeSummary, NonFiniteLoss, type DryRunSummary } from './dryrun.js';
