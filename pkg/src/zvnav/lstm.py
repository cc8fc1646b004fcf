"""Stacked-LSTM zero-velocity classifier: deterministic forward pass only.

Gate packing: the stacked weight blocks are ordered (i, f, g, o) —
input gate, forget gate, cell candidate, output gate.  Cell update:

    g = tanh(Wg [x] + Ug [h] + bg)        i, f, o = sigmoid(...)
    s' = g * i + s * f
    h' = tanh(s') * o

The dense head maps the top hidden state to 2 logits, softmax'd to
(p_moving, p_stationary).  Inference is stateful over the whole
sequence; training-time windowing lives in the trainer, not here.

Weight file: JSON with format_version, input_dim, hidden_dim, num_layers,
confidence_threshold, layers: [{w_input (4H x D row-major), w_hidden
(4H x H), bias (4H)}], head_weight (2 x H), head_bias (2).  Floats are
stored as 64-bit decimal text and round-trip bit-exactly.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

from .errors import ValidationError
from .imu import ImuSequence

FORMAT_VERSION = 1


def sigmoid(x):
    out = np.empty_like(x, dtype=float)
    pos = x >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-x[pos]))
    ex = np.exp(x[~pos])
    out[~pos] = ex / (1.0 + ex)
    return out


def softmax(logits):
    z = logits - np.max(logits, axis=-1, keepdims=True)
    e = np.exp(z)
    return e / e.sum(axis=-1, keepdims=True)


@dataclass(frozen=True)
class LstmLayerWeights:
    """One layer's stacked gate weights, blocks ordered (i, f, g, o)."""

    w_input: np.ndarray   # (4H, D)
    w_hidden: np.ndarray  # (4H, H)
    bias: np.ndarray      # (4H,)

    def __post_init__(self):
        object.__setattr__(self, "w_input", np.asarray(self.w_input, dtype=float))
        object.__setattr__(self, "w_hidden", np.asarray(self.w_hidden, dtype=float))
        object.__setattr__(self, "bias", np.asarray(self.bias, dtype=float))
        h4 = self.w_input.shape[0]
        if h4 % 4 != 0:
            raise ValidationError("w_input row count must be a multiple of 4")
        h = h4 // 4
        if self.w_hidden.shape != (h4, h):
            raise ValidationError(f"w_hidden must be ({h4}, {h})")
        if self.bias.shape != (h4,):
            raise ValidationError(f"bias must be ({h4},)")
        for name, arr in (("w_input", self.w_input), ("w_hidden", self.w_hidden),
                          ("bias", self.bias)):
            if not np.all(np.isfinite(arr)):
                raise ValidationError(f"{name} contains non-finite values")

    @property
    def hidden_dim(self):
        return self.w_hidden.shape[1]

    @property
    def input_dim(self):
        return self.w_input.shape[1]


@dataclass(frozen=True)
class LstmModel:
    layers: tuple
    head_weight: np.ndarray  # (2, H)
    head_bias: np.ndarray    # (2,)
    confidence_threshold: float = 0.85
    input_dim: int = 6

    def __post_init__(self):
        object.__setattr__(self, "layers", tuple(self.layers))
        object.__setattr__(self, "head_weight", np.asarray(self.head_weight, dtype=float))
        object.__setattr__(self, "head_bias", np.asarray(self.head_bias, dtype=float))
        if len(self.layers) < 1:
            raise ValidationError("model needs at least one LSTM layer")
        d = self.input_dim
        for li, layer in enumerate(self.layers):
            if layer.input_dim != d:
                raise ValidationError(
                    f"layer {li} expects input dim {layer.input_dim}, got {d}")
            d = layer.hidden_dim
        if self.head_weight.shape != (2, d):
            raise ValidationError(f"head_weight must be (2, {d})")
        if self.head_bias.shape != (2,):
            raise ValidationError("head_bias must be (2,)")
        if not 0.0 < self.confidence_threshold < 1.0:
            raise ValidationError("confidence_threshold must be in (0, 1)")

    @property
    def hidden_dim(self):
        return self.layers[-1].hidden_dim


def zero_state(model: LstmModel):
    """Fresh all-zero (h, s) pairs, one per layer."""
    return [(np.zeros(l.hidden_dim), np.zeros(l.hidden_dim)) for l in model.layers]


def lstm_cell_step(layer: LstmLayerWeights, x, state):
    """One cell update; returns (h', s')."""
    h, s = state
    z = layer.w_input @ np.asarray(x, dtype=float) + layer.w_hidden @ h + layer.bias
    n = layer.hidden_dim
    i = sigmoid(z[0:n])
    f = sigmoid(z[n:2 * n])
    g = np.tanh(z[2 * n:3 * n])
    o = sigmoid(z[3 * n:4 * n])
    s_new = g * i + s * f
    h_new = np.tanh(s_new) * o
    return h_new, s_new


def forward_sequence(model: LstmModel, seq, state=None, return_state=False):
    """Run the stacked network over a whole sequence.

    seq may be an ImuSequence or an (N, input_dim) array.  Returns an
    (N, 2) array of (p_moving, p_stationary) rows; pass/return `state`
    to process a long log in chunks with carried hidden state.
    """
    x = seq.channels() if isinstance(seq, ImuSequence) else np.asarray(seq, dtype=float)
    if x.ndim != 2 or x.shape[1] != model.input_dim:
        raise ValidationError(
            f"input must be (N, {model.input_dim}), got {x.shape}")
    if state is None:
        state = zero_state(model)
    probs = np.empty((len(x), 2))
    for k in range(len(x)):
        inp = x[k]
        for li, layer in enumerate(model.layers):
            h, s = lstm_cell_step(layer, inp, state[li])
            state[li] = (h, s)
            inp = h
        probs[k] = softmax(model.head_weight @ inp + model.head_bias)
    if return_state:
        return probs, state
    return probs


def gate_confidence(probs, threshold):
    """Flag stationary only when p_stationary exceeds the confidence gate."""
    from .detectors import ZvDecision

    probs = np.asarray(probs, dtype=float)
    p_stat = probs[:, 1]
    return ZvDecision(statistic=p_stat, flag=(p_stat > threshold).astype(int))


def save_model(path, model: LstmModel):
    doc = {
        "format_version": FORMAT_VERSION,
        "input_dim": model.input_dim,
        "hidden_dim": model.hidden_dim,
        "num_layers": len(model.layers),
        "confidence_threshold": model.confidence_threshold,
        "layers": [
            {
                "w_input": layer.w_input.tolist(),
                "w_hidden": layer.w_hidden.tolist(),
                "bias": layer.bias.tolist(),
            }
            for layer in model.layers
        ],
        "head_weight": model.head_weight.tolist(),
        "head_bias": model.head_bias.tolist(),
    }
    with open(path, "w", encoding="utf-8") as f:
        json.dump(doc, f)
        f.write("\n")


def _expect(doc, key, path="model"):
    if key not in doc:
        raise ValidationError(f"weight file missing field {path}.{key}")
    return doc[key]


def load_model(path) -> LstmModel:
    with open(path, encoding="utf-8") as f:
        try:
            doc = json.load(f)
        except json.JSONDecodeError as e:
            raise ValidationError(f"weight file is not valid JSON: {e}") from None
    version = _expect(doc, "format_version")
    if version != FORMAT_VERSION:
        raise ValidationError(f"unsupported weight format_version {version}")
    input_dim = int(_expect(doc, "input_dim"))
    hidden_dim = int(_expect(doc, "hidden_dim"))
    num_layers = int(_expect(doc, "num_layers"))
    raw_layers = _expect(doc, "layers")
    if len(raw_layers) != num_layers:
        raise ValidationError(
            f"layers: expected {num_layers} entries, found {len(raw_layers)}")
    layers = []
    d = input_dim
    for li, raw in enumerate(raw_layers):
        where = f"layers[{li}]"
        w_in = np.array(_expect(raw, "w_input", where), dtype=float)
        w_hid = np.array(_expect(raw, "w_hidden", where), dtype=float)
        bias = np.array(_expect(raw, "bias", where), dtype=float)
        if w_in.shape != (4 * hidden_dim, d):
            raise ValidationError(
                f"{where}.w_input: expected shape ({4 * hidden_dim}, {d}), "
                f"got {w_in.shape}")
        try:
            layers.append(LstmLayerWeights(w_input=w_in, w_hidden=w_hid, bias=bias))
        except ValidationError as e:
            raise ValidationError(f"{where}: {e}") from None
        d = hidden_dim
    head_w = np.array(_expect(doc, "head_weight"), dtype=float)
    head_b = np.array(_expect(doc, "head_bias"), dtype=float)
    if head_w.shape != (2, hidden_dim):
        raise ValidationError(
            f"head_weight: expected shape (2, {hidden_dim}), got {head_w.shape}")
    if head_b.shape != (2,):
        raise ValidationError(f"head_bias: expected shape (2,), got {head_b.shape}")
    return LstmModel(layers=tuple(layers), head_weight=head_w, head_bias=head_b,
                     confidence_threshold=float(_expect(doc, "confidence_threshold")),
                     input_dim=input_dim)


def random_model(num_layers, hidden_dim, input_dim=6, seed=0, scale=0.4,
                 confidence_threshold=0.85) -> LstmModel:
    """Small random model for fixtures and tests (uniform [-scale, scale])."""
    rng = np.random.default_rng(seed)
    layers = []
    d = input_dim
    for _ in range(num_layers):
        layers.append(LstmLayerWeights(
            w_input=rng.uniform(-scale, scale, (4 * hidden_dim, d)),
            w_hidden=rng.uniform(-scale, scale, (4 * hidden_dim, hidden_dim)),
            bias=rng.uniform(-scale, scale, 4 * hidden_dim),
        ))
        d = hidden_dim
    return LstmModel(layers=tuple(layers),
                     head_weight=rng.uniform(-scale, scale, (2, hidden_dim)),
                     head_bias=rng.uniform(-scale, scale, 2),
                     confidence_threshold=confidence_threshold,
                     input_dim=input_dim)
