// Shared weight-file format (JSON) and golden-vector export.
//
// The JSON document carries format_version, input_dim, hidden_dim,
// num_layers, confidence_threshold, per-layer {w_input (4H x D),
// w_hidden (4H x H), bias (4H)} as nested arrays, then head_weight
// (2 x H) and head_bias (2).  Gate blocks are ordered i, f, g, o.
// Doubles survive the round trip bit-exactly via JSON number text.

import * as fs from "node:fs";

import { Model, zeroModel } from "./lstm.js";

export const FORMAT_VERSION = 1;

function toNested(flat: Float64Array, rows: number, cols: number): number[][] {
  const out: number[][] = [];
  for (let r = 0; r < rows; r++) {
    out.push(Array.from(flat.subarray(r * cols, (r + 1) * cols)));
  }
  return out;
}

function fromNested(rows: number[][], expectRows: number, expectCols: number, name: string): Float64Array {
  if (rows.length !== expectRows) {
    throw new Error(`${name}: expected ${expectRows} rows, got ${rows.length}`);
  }
  const flat = new Float64Array(expectRows * expectCols);
  for (let r = 0; r < expectRows; r++) {
    if (rows[r].length !== expectCols) {
      throw new Error(`${name}: row ${r} has ${rows[r].length} columns, expected ${expectCols}`);
    }
    for (let c = 0; c < expectCols; c++) {
      const v = rows[r][c];
      if (typeof v !== "number" || !Number.isFinite(v)) {
        throw new Error(`${name}[${r}][${c}] is not a finite number`);
      }
      flat[r * expectCols + c] = v;
    }
  }
  return flat;
}

export function saveModel(path: string, model: Model): void {
  const H = model.hiddenDim;
  const doc = {
    format_version: FORMAT_VERSION,
    input_dim: model.inputDim,
    hidden_dim: H,
    num_layers: model.layers.length,
    confidence_threshold: model.confidenceThreshold,
    layers: model.layers.map((l) => ({
      w_input: toNested(l.wInput, 4 * H, l.inputDim),
      w_hidden: toNested(l.wHidden, 4 * H, H),
      bias: Array.from(l.bias),
    })),
    head_weight: toNested(model.headWeight, 2, H),
    head_bias: Array.from(model.headBias),
  };
  fs.writeFileSync(path, JSON.stringify(doc) + "\n");
}

export function loadModel(path: string): Model {
  const doc = JSON.parse(fs.readFileSync(path, "utf-8"));
  if (doc.format_version !== FORMAT_VERSION) {
    throw new Error(`unsupported weight format_version ${doc.format_version}`);
  }
  const inputDim: number = doc.input_dim;
  const H: number = doc.hidden_dim;
  const numLayers: number = doc.num_layers;
  if (!Array.isArray(doc.layers) || doc.layers.length !== numLayers) {
    throw new Error(`layers: expected ${numLayers} entries`);
  }
  const model = zeroModel(numLayers, H, inputDim);
  let d = inputDim;
  for (let l = 0; l < numLayers; l++) {
    const raw = doc.layers[l];
    model.layers[l].wInput = fromNested(raw.w_input, 4 * H, d, `layers[${l}].w_input`);
    model.layers[l].wHidden = fromNested(raw.w_hidden, 4 * H, H, `layers[${l}].w_hidden`);
    const bias = raw.bias as number[];
    if (bias.length !== 4 * H) throw new Error(`layers[${l}].bias: expected ${4 * H} values`);
    model.layers[l].bias = Float64Array.from(bias);
    d = H;
  }
  model.headWeight = fromNested(doc.head_weight, 2, H, "head_weight");
  const hb = doc.head_bias as number[];
  if (hb.length !== 2) throw new Error("head_bias: expected 2 values");
  model.headBias = Float64Array.from(hb);
  model.confidenceThreshold = doc.confidence_threshold;
  return model;
}

/**
 * Write per-timestep probabilities for a probe sequence, full
 * precision, as `t,p_moving,p_stationary` — the cross-implementation
 * oracle consumed by the inference engine's test suite.
 */
export function writeGoldenVectors(path: string, times: Float64Array, probs: Float64Array[]): void {
  const lines = ["t,p_moving,p_stationary"];
  for (let k = 0; k < probs.length; k++) {
    lines.push(`${times[k]},${probs[k][0]},${probs[k][1]}`);
  }
  fs.writeFileSync(path, lines.join("\n") + "\n");
}
