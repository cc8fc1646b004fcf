// Stacked LSTM with a 2-class softmax head, all in double precision.
//
// Gate blocks are stacked (i, f, g, o) in every 4H-row weight matrix,
// matching the shared weight-file contract:
//
//   z = W x + U h + b
//   i = sig(z[0:H])   f = sig(z[H:2H])
//   g = tanh(z[2H:3H])  o = sig(z[3H:4H])
//   s' = g*i + s*f      h' = tanh(s')*o
//
// The classification loss is cross-entropy on the FINAL timestep's
// softmax only; earlier timesteps contribute through backprop through
// time, not through extra loss terms.

import { Rng } from "./rng.js";

export interface LayerParams {
  wInput: Float64Array; // (4H, D) row-major
  wHidden: Float64Array; // (4H, H) row-major
  bias: Float64Array; // (4H)
  inputDim: number;
  hiddenDim: number;
}

export interface Model {
  layers: LayerParams[];
  headWeight: Float64Array; // (2, H) row-major
  headBias: Float64Array; // (2)
  inputDim: number;
  hiddenDim: number;
  confidenceThreshold: number;
}

export function zeroLayer(inputDim: number, hiddenDim: number): LayerParams {
  return {
    wInput: new Float64Array(4 * hiddenDim * inputDim),
    wHidden: new Float64Array(4 * hiddenDim * hiddenDim),
    bias: new Float64Array(4 * hiddenDim),
    inputDim,
    hiddenDim,
  };
}

export function zeroModel(numLayers: number, hiddenDim: number, inputDim = 6): Model {
  const layers: LayerParams[] = [];
  let d = inputDim;
  for (let l = 0; l < numLayers; l++) {
    layers.push(zeroLayer(d, hiddenDim));
    d = hiddenDim;
  }
  return {
    layers,
    headWeight: new Float64Array(2 * hiddenDim),
    headBias: new Float64Array(2),
    inputDim,
    hiddenDim,
    confidenceThreshold: 0.85,
  };
}

/** Small uniform init; forget-gate bias nudged positive so early cells retain state. */
export function initModel(
  numLayers: number,
  hiddenDim: number,
  rng: Rng,
  inputDim = 6,
  scale = 0.2,
): Model {
  const model = zeroModel(numLayers, hiddenDim, inputDim);
  for (const layer of model.layers) {
    for (let k = 0; k < layer.wInput.length; k++) layer.wInput[k] = rng.uniform(-scale, scale);
    for (let k = 0; k < layer.wHidden.length; k++) layer.wHidden[k] = rng.uniform(-scale, scale);
    for (let k = 0; k < layer.bias.length; k++) layer.bias[k] = rng.uniform(-scale, scale);
    for (let k = layer.hiddenDim; k < 2 * layer.hiddenDim; k++) layer.bias[k] += 1.0;
  }
  for (let k = 0; k < model.headWeight.length; k++) model.headWeight[k] = rng.uniform(-scale, scale);
  for (let k = 0; k < 2; k++) model.headBias[k] = rng.uniform(-scale, scale);
  return model;
}

export function paramArrays(model: Model): Float64Array[] {
  const out: Float64Array[] = [];
  for (const l of model.layers) out.push(l.wInput, l.wHidden, l.bias);
  out.push(model.headWeight, model.headBias);
  return out;
}

export function zeroGrads(model: Model): Float64Array[] {
  return paramArrays(model).map((p) => new Float64Array(p.length));
}

function sigmoid(x: number): number {
  return x >= 0 ? 1 / (1 + Math.exp(-x)) : Math.exp(x) / (1 + Math.exp(x));
}

interface StepCache {
  x: Float64Array; // layer input at this timestep
  hPrev: Float64Array;
  sPrev: Float64Array;
  i: Float64Array;
  f: Float64Array;
  g: Float64Array;
  o: Float64Array;
  s: Float64Array;
  tanhS: Float64Array;
  h: Float64Array;
}

export interface ForwardResult {
  probs: Float64Array; // (p_moving, p_stationary) at the final timestep
  loss: number;
  caches: StepCache[][]; // [t][layer]
}

function cellForward(layer: LayerParams, x: Float64Array, hPrev: Float64Array, sPrev: Float64Array): StepCache {
  const H = layer.hiddenDim;
  const D = layer.inputDim;
  const z = new Float64Array(4 * H);
  for (let r = 0; r < 4 * H; r++) {
    let acc = layer.bias[r];
    const wiRow = r * D;
    for (let c = 0; c < D; c++) acc += layer.wInput[wiRow + c] * x[c];
    const whRow = r * H;
    for (let c = 0; c < H; c++) acc += layer.wHidden[whRow + c] * hPrev[c];
    z[r] = acc;
  }
  const i = new Float64Array(H);
  const f = new Float64Array(H);
  const g = new Float64Array(H);
  const o = new Float64Array(H);
  const s = new Float64Array(H);
  const tanhS = new Float64Array(H);
  const h = new Float64Array(H);
  for (let k = 0; k < H; k++) {
    i[k] = sigmoid(z[k]);
    f[k] = sigmoid(z[H + k]);
    g[k] = Math.tanh(z[2 * H + k]);
    o[k] = sigmoid(z[3 * H + k]);
    s[k] = g[k] * i[k] + sPrev[k] * f[k];
    tanhS[k] = Math.tanh(s[k]);
    h[k] = tanhS[k] * o[k];
  }
  return { x, hPrev, sPrev, i, f, g, o, s, tanhS, h };
}

function headSoftmax(model: Model, h: Float64Array): Float64Array {
  const H = model.hiddenDim;
  const logits = new Float64Array(2);
  for (let r = 0; r < 2; r++) {
    let acc = model.headBias[r];
    for (let c = 0; c < H; c++) acc += model.headWeight[r * H + c] * h[c];
    logits[r] = acc;
  }
  const m = Math.max(logits[0], logits[1]);
  const e0 = Math.exp(logits[0] - m);
  const e1 = Math.exp(logits[1] - m);
  return new Float64Array([e0 / (e0 + e1), e1 / (e0 + e1)]);
}

/**
 * Forward pass over one window from zero state.  `label` is 0 (moving)
 * or 1 (stationary); the returned loss is -log p[label] at the final
 * timestep.
 */
export function forwardWindow(model: Model, window: Float64Array[], label: number): ForwardResult {
  const L = model.layers.length;
  const h: Float64Array[] = model.layers.map((l) => new Float64Array(l.hiddenDim));
  const s: Float64Array[] = model.layers.map((l) => new Float64Array(l.hiddenDim));
  const caches: StepCache[][] = [];
  for (let t = 0; t < window.length; t++) {
    let x = window[t];
    const row: StepCache[] = [];
    for (let l = 0; l < L; l++) {
      const cache = cellForward(model.layers[l], x, h[l], s[l]);
      h[l] = cache.h;
      s[l] = cache.s;
      row.push(cache);
      x = cache.h;
    }
    caches.push(row);
  }
  const probs = headSoftmax(model, h[L - 1]);
  const loss = -Math.log(Math.max(probs[label], 1e-300));
  return { probs, loss, caches };
}

/** Stateful full-sequence probabilities, used for golden-vector export. */
export function forwardSequence(model: Model, samples: Float64Array[]): Float64Array[] {
  const L = model.layers.length;
  let h: Float64Array[] = model.layers.map((l) => new Float64Array(l.hiddenDim));
  let s: Float64Array[] = model.layers.map((l) => new Float64Array(l.hiddenDim));
  const out: Float64Array[] = [];
  for (const sample of samples) {
    let x = sample;
    for (let l = 0; l < L; l++) {
      const cache = cellForward(model.layers[l], x, h[l], s[l]);
      h[l] = cache.h;
      s[l] = cache.s;
      x = cache.h;
    }
    out.push(headSoftmax(model, x));
  }
  return out;
}

/**
 * Backprop through time for one window; accumulates parameter gradients
 * of the final-timestep cross-entropy into `grads` (layout of
 * paramArrays).  Returns the forward loss.
 */
export function backwardWindow(
  model: Model,
  window: Float64Array[],
  label: number,
  grads: Float64Array[],
): number {
  const fwd = forwardWindow(model, window, label);
  const L = model.layers.length;
  const T = window.length;
  const H = model.hiddenDim;

  const gHeadW = grads[3 * L];
  const gHeadB = grads[3 * L + 1];

  // dL/dlogits = p - onehot(label)
  const dLogits = new Float64Array([fwd.probs[0], fwd.probs[1]]);
  dLogits[label] -= 1;
  const hFinal = fwd.caches[T - 1][L - 1].h;
  const dhCarry: Float64Array[] = model.layers.map((l) => new Float64Array(l.hiddenDim));
  const dsCarry: Float64Array[] = model.layers.map((l) => new Float64Array(l.hiddenDim));
  for (let r = 0; r < 2; r++) {
    gHeadB[r] += dLogits[r];
    for (let c = 0; c < H; c++) {
      gHeadW[r * H + c] += dLogits[r] * hFinal[c];
      dhCarry[L - 1][c] += model.headWeight[r * H + c] * dLogits[r];
    }
  }

  for (let t = T - 1; t >= 0; t--) {
    for (let l = L - 1; l >= 0; l--) {
      const layer = model.layers[l];
      const cache = fwd.caches[t][l];
      const n = layer.hiddenDim;
      const D = layer.inputDim;
      const dh = dhCarry[l];
      const ds = dsCarry[l];
      const dz = new Float64Array(4 * n);
      for (let k = 0; k < n; k++) {
        const dsk = dh[k] * cache.o[k] * (1 - cache.tanhS[k] * cache.tanhS[k]) + ds[k];
        const dok = dh[k] * cache.tanhS[k];
        dz[k] = dsk * cache.g[k] * cache.i[k] * (1 - cache.i[k]);
        dz[n + k] = dsk * cache.sPrev[k] * cache.f[k] * (1 - cache.f[k]);
        dz[2 * n + k] = dsk * cache.i[k] * (1 - cache.g[k] * cache.g[k]);
        dz[3 * n + k] = dok * cache.o[k] * (1 - cache.o[k]);
        ds[k] = dsk * cache.f[k]; // carried to t-1
      }
      const gW = grads[3 * l];
      const gU = grads[3 * l + 1];
      const gB = grads[3 * l + 2];
      const dhPrev = new Float64Array(n);
      for (let r = 0; r < 4 * n; r++) {
        const v = dz[r];
        if (v === 0) continue;
        gB[r] += v;
        const wiRow = r * D;
        for (let c = 0; c < D; c++) {
          gW[wiRow + c] += v * cache.x[c];
        }
        const whRow = r * n;
        for (let c = 0; c < n; c++) {
          gU[whRow + c] += v * cache.hPrev[c];
          dhPrev[c] += layer.wHidden[whRow + c] * v;
        }
      }
      // gradient w.r.t. this layer's input: to the layer below (same t)
      if (l > 0) {
        const below = dhCarry[l - 1];
        for (let c = 0; c < D; c++) {
          let acc = 0;
          for (let r = 0; r < 4 * n; r++) acc += layer.wInput[r * D + c] * dz[r];
          below[c] += acc;
        }
      }
      dhCarry[l] = dhPrev;
    }
  }
  return fwd.loss;
}
