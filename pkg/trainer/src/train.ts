// Training loop: Adam with L2 weight decay, global-norm gradient
// clipping at 1.0, and a learning rate halved on a fixed epoch period.
// The per-window loss is final-timestep cross-entropy.

import { Window } from "./data.js";
import {
  Model,
  backwardWindow,
  forwardWindow,
  paramArrays,
  zeroGrads,
} from "./lstm.js";
import { Rng } from "./rng.js";

export interface TrainConfig {
  layers: number;
  hiddenDim: number;
  windowLen: number;
  epochs: number;
  lr: number;
  lrHalvingPeriod: number;
  weightDecay: number;
  batchSize: number;
  gradClipNorm: number;
  confidenceThreshold: number;
  seed: number;
}

export const DEFAULT_CONFIG: TrainConfig = {
  layers: 2,
  hiddenDim: 16,
  windowLen: 100,
  epochs: 300,
  lr: 5e-3,
  lrHalvingPeriod: 30,
  weightDecay: 1e-5,
  batchSize: 800,
  gradClipNorm: 1.0,
  confidenceThreshold: 0.85,
  seed: 0,
};

export function validateConfig(cfg: TrainConfig): void {
  const positive: Array<[string, number]> = [
    ["layers", cfg.layers],
    ["hiddenDim", cfg.hiddenDim],
    ["windowLen", cfg.windowLen],
    ["epochs", cfg.epochs],
    ["lr", cfg.lr],
    ["lrHalvingPeriod", cfg.lrHalvingPeriod],
    ["batchSize", cfg.batchSize],
    ["gradClipNorm", cfg.gradClipNorm],
  ];
  for (const [name, v] of positive) {
    if (!(v > 0)) throw new Error(`config.${name} must be positive`);
  }
  if (cfg.weightDecay < 0) throw new Error("config.weightDecay must be >= 0");
  if (!(cfg.confidenceThreshold > 0 && cfg.confidenceThreshold < 1)) {
    throw new Error("config.confidenceThreshold must be in (0, 1)");
  }
}

export interface EpochStats {
  epoch: number;
  loss: number;
  lr: number;
}

export function accuracy(model: Model, windows: Window[]): number {
  if (windows.length === 0) return NaN;
  let correct = 0;
  for (const win of windows) {
    const { probs } = forwardWindow(model, win.samples, win.label);
    const pred = probs[1] > probs[0] ? 1 : 0;
    if (pred === win.label) correct++;
  }
  return correct / windows.length;
}

/** Accuracy of the gated decision (stationary iff p_stat > gate). */
export function gatedAccuracy(model: Model, windows: Window[], gate: number): number {
  let correct = 0;
  for (const win of windows) {
    const { probs } = forwardWindow(model, win.samples, win.label);
    const pred = probs[1] > gate ? 1 : 0;
    if (pred === win.label) correct++;
  }
  return correct / windows.length;
}

/**
 * Train `model` in place on `windows`; returns per-epoch mean losses.
 * Seed-deterministic: batch order comes from `rng` only.
 */
export function train(
  model: Model,
  windows: Window[],
  cfg: TrainConfig,
  rng: Rng,
  onEpoch?: (stats: EpochStats) => void,
): EpochStats[] {
  validateConfig(cfg);
  if (windows.length === 0) throw new Error("empty training set");
  const batchSize = Math.min(cfg.batchSize, windows.length);

  const params = paramArrays(model);
  const m = params.map((p) => new Float64Array(p.length));
  const v = params.map((p) => new Float64Array(p.length));
  const beta1 = 0.9;
  const beta2 = 0.999;
  const eps = 1e-8;
  let adamStep = 0;

  const order = windows.map((_, i) => i);
  const history: EpochStats[] = [];
  for (let epoch = 0; epoch < cfg.epochs; epoch++) {
    const lr = cfg.lr * Math.pow(0.5, Math.floor(epoch / cfg.lrHalvingPeriod));
    rng.shuffle(order);
    let epochLoss = 0;
    let seen = 0;
    for (let start = 0; start < order.length; start += batchSize) {
      const batch = order.slice(start, start + batchSize);
      const grads = zeroGrads(model);
      let batchLoss = 0;
      for (const idx of batch) {
        batchLoss += backwardWindow(model, windows[idx].samples, windows[idx].label, grads);
      }
      if (!Number.isFinite(batchLoss)) {
        throw new Error(`training diverged: non-finite loss at epoch ${epoch}`);
      }
      epochLoss += batchLoss;
      seen += batch.length;

      // mean gradient + decoupled-from-schedule L2 term
      let sq = 0;
      for (let a = 0; a < grads.length; a++) {
        const g = grads[a];
        const p = params[a];
        for (let k = 0; k < g.length; k++) {
          g[k] = g[k] / batch.length + cfg.weightDecay * p[k];
          sq += g[k] * g[k];
        }
      }
      const norm = Math.sqrt(sq);
      const clip = norm > cfg.gradClipNorm ? cfg.gradClipNorm / norm : 1.0;

      adamStep++;
      const c1 = 1 - Math.pow(beta1, adamStep);
      const c2 = 1 - Math.pow(beta2, adamStep);
      for (let a = 0; a < grads.length; a++) {
        const g = grads[a];
        const p = params[a];
        const ma = m[a];
        const va = v[a];
        for (let k = 0; k < g.length; k++) {
          const gk = g[k] * clip;
          ma[k] = beta1 * ma[k] + (1 - beta1) * gk;
          va[k] = beta2 * va[k] + (1 - beta2) * gk * gk;
          p[k] -= (lr * (ma[k] / c1)) / (Math.sqrt(va[k] / c2) + eps);
        }
      }
    }
    const stats = { epoch, loss: epochLoss / seen, lr };
    history.push(stats);
    if (onEpoch) onEpoch(stats);
  }
  return history;
}

/**
 * Analytic-vs-central-finite-difference gradient comparison on one
 * window.  Returns the max relative discrepancy over every parameter.
 */
export function gradientCheck(model: Model, window: Float64Array[], label: number, step = 1e-6): number {
  const params = paramArrays(model);
  const grads = zeroGrads(model);
  backwardWindow(model, window, label, grads);
  let worst = 0;
  for (let a = 0; a < params.length; a++) {
    const p = params[a];
    for (let k = 0; k < p.length; k++) {
      const orig = p[k];
      p[k] = orig + step;
      const up = forwardWindow(model, window, label).loss;
      p[k] = orig - step;
      const down = forwardWindow(model, window, label).loss;
      p[k] = orig;
      const numeric = (up - down) / (2 * step);
      const analytic = grads[a][k];
      // the denominator floor absorbs central-difference round-off
      // (~|loss|*eps/step ~ 1e-10): entries whose true gradient sits
      // below it cannot be compared relatively in double precision
      const denom = Math.max(1e-4, Math.abs(numeric) + Math.abs(analytic));
      const rel = Math.abs(numeric - analytic) / denom;
      if (!Number.isFinite(rel)) return Infinity;
      if (rel > worst) worst = rel;
    }
  }
  return worst;
}
