// Command-line entry: `train`, `gradcheck`, `export-golden`.
//
//   train --train a.csv,b.csv --test c.csv --out model.json [--epochs N ...]
//   gradcheck
//   export-golden --model model.json --probe probe.csv --out golden.csv

import { parseArgs } from "node:util";

import { buildDataset, DEFAULT_AUGMENT, loadImuCsv } from "./data.js";
import { forwardSequence, initModel } from "./lstm.js";
import { Rng } from "./rng.js";
import {
  DEFAULT_CONFIG,
  TrainConfig,
  accuracy,
  gatedAccuracy,
  gradientCheck,
  train,
} from "./train.js";
import { loadModel, saveModel, writeGoldenVectors } from "./weights.js";

function fail(msg: string): never {
  process.stderr.write(msg + "\n");
  process.exit(1);
}

function cmdGradcheck(argv: string[]): void {
  const { values } = parseArgs({
    args: argv,
    options: {
      hidden: { type: "string", default: "2" },
      layers: { type: "string", default: "1" },
      steps: { type: "string", default: "5" },
      seed: { type: "string", default: "0" },
    },
  });
  const rng = new Rng(Number(values.seed));
  const model = initModel(Number(values.layers), Number(values.hidden), rng);
  const window: Float64Array[] = [];
  for (let t = 0; t < Number(values.steps); t++) {
    window.push(Float64Array.from({ length: 6 }, () => rng.gauss()));
  }
  const worst = gradientCheck(model, window, 1);
  process.stdout.write(`max_rel_error ${worst}\n`);
  if (worst >= 1e-3) fail("gradient check FAILED; refusing to train with these gradients");
}

function numOr<T>(v: string | undefined, fallback: T): number | T {
  return v === undefined ? fallback : Number(v);
}

function cmdTrain(argv: string[]): void {
  const { values } = parseArgs({
    args: argv,
    options: {
      train: { type: "string" },
      test: { type: "string", default: "" },
      out: { type: "string" },
      layers: { type: "string" },
      hidden: { type: "string" },
      "window-len": { type: "string" },
      epochs: { type: "string" },
      "windows-per-trial": { type: "string", default: "40" },
      lr: { type: "string" },
      "batch-size": { type: "string" },
      seed: { type: "string" },
      "no-augment": { type: "boolean", default: false },
      quiet: { type: "boolean", default: false },
    },
  });
  if (!values.train || !values.out) fail("train requires --train and --out");
  const cfg: TrainConfig = {
    ...DEFAULT_CONFIG,
    layers: numOr(values.layers, DEFAULT_CONFIG.layers),
    hiddenDim: numOr(values.hidden, DEFAULT_CONFIG.hiddenDim),
    windowLen: numOr(values["window-len"], DEFAULT_CONFIG.windowLen),
    epochs: numOr(values.epochs, DEFAULT_CONFIG.epochs),
    lr: numOr(values.lr, DEFAULT_CONFIG.lr),
    batchSize: numOr(values["batch-size"], DEFAULT_CONFIG.batchSize),
    seed: numOr(values.seed, DEFAULT_CONFIG.seed),
  };

  const rng = new Rng(cfg.seed);
  const sanity = initModel(1, 2, new Rng(cfg.seed));
  const probeWin = Array.from({ length: 5 }, () =>
    Float64Array.from({ length: 6 }, () => rng.gauss()),
  );
  const gcErr = gradientCheck(sanity, probeWin, 1);
  if (gcErr >= 1e-3) fail(`gradient self-check failed (${gcErr}); refusing to train`);

  const trainTrials = values.train.split(",").map(loadImuCsv);
  const testTrials = values.test === "" ? [] : values.test.split(",").map(loadImuCsv);
  const dataset = buildDataset(
    trainTrials,
    testTrials,
    cfg.windowLen,
    Number(values["windows-per-trial"]),
    values["no-augment"] ? null : DEFAULT_AUGMENT,
    rng,
  );

  const model = initModel(cfg.layers, cfg.hiddenDim, rng);
  model.confidenceThreshold = cfg.confidenceThreshold;
  train(model, dataset.train, cfg, rng, (stats) => {
    if (!values.quiet && (stats.epoch % 10 === 0 || stats.epoch === cfg.epochs - 1)) {
      process.stderr.write(
        `epoch ${stats.epoch} loss ${stats.loss.toFixed(5)} lr ${stats.lr.toExponential(2)}\n`,
      );
    }
  });

  saveModel(values.out, model);
  process.stdout.write(`train_accuracy ${accuracy(model, dataset.train).toFixed(4)}\n`);
  if (dataset.test.length > 0) {
    process.stdout.write(`test_accuracy ${accuracy(model, dataset.test).toFixed(4)}\n`);
    for (const gate of [0.5, 0.7, 0.85, 0.95]) {
      process.stdout.write(
        `test_accuracy_gate_${gate} ${gatedAccuracy(model, dataset.test, gate).toFixed(4)}\n`,
      );
    }
  }
}

function cmdExportGolden(argv: string[]): void {
  const { values } = parseArgs({
    args: argv,
    options: {
      model: { type: "string" },
      probe: { type: "string" },
      out: { type: "string" },
      "random-seed": { type: "string" },
      layers: { type: "string", default: "2" },
      hidden: { type: "string", default: "16" },
    },
  });
  if (!values.probe || !values.out) fail("export-golden requires --probe and --out");
  let model;
  if (values.model) {
    model = loadModel(values.model);
  } else if (values["random-seed"] !== undefined) {
    model = initModel(Number(values.layers), Number(values.hidden), new Rng(Number(values["random-seed"])));
  } else {
    fail("export-golden needs --model or --random-seed");
  }
  const trial = loadImuCsv(values.probe);
  const probs = forwardSequence(model, trial.samples);
  writeGoldenVectors(values.out, trial.times, probs);
  process.stdout.write(`wrote ${probs.length} golden rows to ${values.out}\n`);
}

const [command, ...rest] = process.argv.slice(2);
switch (command) {
  case "gradcheck":
    cmdGradcheck(rest);
    break;
  case "train":
    cmdTrain(rest);
    break;
  case "export-golden":
    cmdExportGolden(rest);
    break;
  default:
    fail("usage: cli.js {train|gradcheck|export-golden} [options]");
}
