// Labeled IMU ingestion (CSV), window extraction, and training-time
// augmentation.
//
// Input format: `t,ax,ay,az,gx,gy,gz,zv` — one row per sample, the zv
// column holding the zero-velocity label (1 = stationary).  Each
// training window is `windowLen` consecutive samples labeled by the
// flag at its FINAL timestep.  Augmentation (train set only): random
// rotation of the specific-force and angular-rate vectors, per-window
// scale factor, then additive Gaussian jitter.

import * as fs from "node:fs";

import { Rng } from "./rng.js";

export interface Trial {
  times: Float64Array;
  samples: Float64Array[]; // rows of [ax, ay, az, gx, gy, gz]
  labels: Int8Array;
}

export interface Window {
  samples: Float64Array[]; // windowLen rows of 6 channels
  label: number; // 0 moving, 1 stationary
}

export interface AugmentOptions {
  rotation: boolean;
  scaleLo: number;
  scaleHi: number;
  jitterStd: number;
}

export const DEFAULT_AUGMENT: AugmentOptions = {
  rotation: true,
  scaleLo: 0.92,
  scaleHi: 1.02,
  jitterStd: 0.075,
};

export function loadImuCsv(path: string): Trial {
  const text = fs.readFileSync(path, "utf-8");
  const lines = text.split("\n").filter((l) => l.trim().length > 0);
  const header = lines[0].trim();
  if (!header.startsWith("t,ax,ay,az,gx,gy,gz")) {
    throw new Error(`${path}: unexpected header '${header}'`);
  }
  const hasLabel = header.split(",").includes("zv");
  if (!hasLabel) {
    throw new Error(`${path}: training data needs the zv label column`);
  }
  const n = lines.length - 1;
  const times = new Float64Array(n);
  const samples: Float64Array[] = [];
  const labels = new Int8Array(n);
  for (let k = 0; k < n; k++) {
    const parts = lines[k + 1].split(",");
    if (parts.length !== 8) {
      throw new Error(`${path}: row ${k + 1} has ${parts.length} fields, expected 8`);
    }
    const row = new Float64Array(6);
    times[k] = Number(parts[0]);
    for (let c = 0; c < 6; c++) {
      row[c] = Number(parts[1 + c]);
      if (!Number.isFinite(row[c])) {
        throw new Error(`${path}: non-finite value at row ${k + 1}`);
      }
    }
    samples.push(row);
    labels[k] = Number(parts[7]) === 1 ? 1 : 0;
  }
  return { times, samples, labels };
}

/** Uniformly spaced window starts; label from the window's last sample. */
export function extractWindows(trial: Trial, windowLen: number, count: number): Window[] {
  const n = trial.samples.length;
  if (n < windowLen) {
    throw new Error(`trial too short: ${n} samples < window ${windowLen}`);
  }
  const out: Window[] = [];
  const maxStart = n - windowLen;
  for (let w = 0; w < count; w++) {
    const start = count === 1 ? 0 : Math.round((w * maxStart) / (count - 1));
    out.push({
      samples: trial.samples.slice(start, start + windowLen),
      label: trial.labels[start + windowLen - 1],
    });
  }
  return out;
}

/** Uniform random rotation matrix from a normalized 4-Gaussian quaternion. */
function randomRotation(rng: Rng): number[][] {
  let w = 0;
  let x = 0;
  let y = 0;
  let z = 0;
  let norm = 0;
  do {
    w = rng.gauss();
    x = rng.gauss();
    y = rng.gauss();
    z = rng.gauss();
    norm = Math.sqrt(w * w + x * x + y * y + z * z);
  } while (norm < 1e-12);
  w /= norm;
  x /= norm;
  y /= norm;
  z /= norm;
  return [
    [1 - 2 * (y * y + z * z), 2 * (x * y - w * z), 2 * (x * z + w * y)],
    [2 * (x * y + w * z), 1 - 2 * (x * x + z * z), 2 * (y * z - w * x)],
    [2 * (x * z - w * y), 2 * (y * z + w * x), 1 - 2 * (x * x + y * y)],
  ];
}

/** Rotation, then scale, then jitter; one draw of each per window. */
export function augmentWindow(win: Window, opts: AugmentOptions, rng: Rng): Window {
  const R = opts.rotation ? randomRotation(rng) : null;
  const scale = rng.uniform(opts.scaleLo, opts.scaleHi);
  const samples = win.samples.map((row) => {
    const out = new Float64Array(6);
    for (const base of [0, 3]) {
      if (R !== null) {
        for (let r = 0; r < 3; r++) {
          out[base + r] =
            R[r][0] * row[base] + R[r][1] * row[base + 1] + R[r][2] * row[base + 2];
        }
      } else {
        for (let r = 0; r < 3; r++) out[base + r] = row[base + r];
      }
    }
    for (let c = 0; c < 6; c++) {
      out[c] = out[c] * scale + rng.gauss() * opts.jitterStd;
    }
    return out;
  });
  return { samples, label: win.label };
}

export interface Dataset {
  train: Window[];
  test: Window[];
}

/**
 * Windows from every trial; training windows augmented, held-out test
 * windows left untouched.
 */
export function buildDataset(
  trainTrials: Trial[],
  testTrials: Trial[],
  windowLen: number,
  windowsPerTrial: number,
  augment: AugmentOptions | null,
  rng: Rng,
): Dataset {
  if (trainTrials.length === 0) throw new Error("no training trials");
  const train: Window[] = [];
  for (const trial of trainTrials) {
    for (const win of extractWindows(trial, windowLen, windowsPerTrial)) {
      train.push(augment === null ? win : augmentWindow(win, augment, rng));
    }
  }
  const test: Window[] = [];
  for (const trial of testTrials) {
    test.push(...extractWindows(trial, windowLen, windowsPerTrial));
  }
  return { train, test };
}
