"""From-scratch feedforward classifier on raw density-matrix elements.

ReLU hidden layers, softmax output, cross-entropy loss, adaptive-moment
updates. Inputs are the 2 * 4^n real features in file order (row-major,
re/im interleaved), z-scored with statistics taken from the training split
and stored in the model so inference sees the same transform.
"""

import json
from dataclasses import dataclass, field

import numpy as np

from . import classify
from .states import DensityMatrix

MODEL_VERSION = 1

DEFAULT_LR = 1e-3
DEFAULT_BATCH = 64
DEFAULT_EPOCHS = 50
BETA1, BETA2, ADAM_EPS = 0.9, 0.999, 1e-8


class ModelFormatError(ValueError):
    pass


class DivergenceError(RuntimeError):
    def __init__(self, epoch, lr):
        super().__init__(f"loss became non-finite at epoch {epoch} (lr={lr})")
        self.epoch = epoch
        self.lr = lr


def default_hidden(n_qubits: int):
    return [64, 32] if n_qubits == 2 else [256, 128]


@dataclass
class MlpModel:
    n_qubits: int
    layer_sizes: list            # [input, hidden..., classes]
    weights: list                # per layer, shape [fan_in, fan_out]
    biases: list                 # per layer, shape [fan_out]
    class_names: list
    feature_mean: np.ndarray
    feature_std: np.ndarray
    activation: str = "relu"
    train_meta: dict = field(default_factory=dict)

    def standardize(self, x: np.ndarray) -> np.ndarray:
        return (x - self.feature_mean) / self.feature_std


def _check_dims(model, x):
    if x.ndim != 2 or x.shape[1] != model.layer_sizes[0]:
        raise ValueError(
            f"feature dim {x.shape} does not match model input {model.layer_sizes[0]}"
        )


def _softmax(z):
    z = z - z.max(axis=1, keepdims=True)
    e = np.exp(z)
    return e / e.sum(axis=1, keepdims=True)


def forward(model: MlpModel, x: np.ndarray) -> np.ndarray:
    """Class probabilities for standardized feature rows."""
    x = np.atleast_2d(np.asarray(x, dtype=np.float64))
    _check_dims(model, x)
    a = x
    last = len(model.weights) - 1
    for i, (w, b) in enumerate(zip(model.weights, model.biases)):
        z = a @ w + b
        a = _softmax(z) if i == last else np.maximum(z, 0.0)
    return a


def _forward_trace(model, x):
    # keeps layer activations for backprop
    acts = [x]
    last = len(model.weights) - 1
    a = x
    for i, (w, b) in enumerate(zip(model.weights, model.biases)):
        z = a @ w + b
        a = _softmax(z) if i == last else np.maximum(z, 0.0)
        acts.append(a)
    return acts


def _gradients(model, x, y_onehot):
    """Mean cross-entropy gradients for one batch."""
    acts = _forward_trace(model, x)
    m = x.shape[0]
    delta = (acts[-1] - y_onehot) / m
    gw, gb = [], []
    for i in range(len(model.weights) - 1, -1, -1):
        gw.append(acts[i].T @ delta)
        gb.append(delta.sum(axis=0))
        if i > 0:
            delta = (delta @ model.weights[i].T) * (acts[i] > 0)
    gw.reverse()
    gb.reverse()
    return gw, gb


def _loss(probs, y_onehot):
    p = np.clip(probs, 1e-300, None)
    return float(-(y_onehot * np.log(p)).sum() / probs.shape[0])


def train(features, labels, n_qubits, hidden=None, epochs=DEFAULT_EPOCHS,
          lr=DEFAULT_LR, batch=DEFAULT_BATCH, seed=0) -> MlpModel:
    """Deterministic minibatch training; raises DivergenceError on NaN loss.

    Row order of the inputs does not matter: rows are first sorted by a
    canonical key, then shuffled by the seeded stream.
    """
    x = np.asarray(features, dtype=np.float64)
    y = np.asarray(labels, dtype=np.int64)
    if x.ndim != 2 or x.shape[0] != y.shape[0] or x.shape[0] == 0:
        raise ValueError("features/labels shape mismatch or empty training set")
    if not np.isfinite(x).all():
        raise ValueError("non-finite feature values")
    names = classify.class_names(n_qubits)
    n_classes = len(names)
    if y.min() < 0 or y.max() >= n_classes:
        raise ValueError("label code out of range for n_qubits")
    if hidden is None:
        hidden = default_hidden(n_qubits)

    # canonical row order: training must not depend on file order
    order = np.lexsort(np.vstack([x.T, y]))
    x, y = x[order], y[order]

    mean = x.mean(axis=0)
    std = x.std(axis=0)
    std[std < 1e-12] = 1.0
    xs = (x - mean) / std
    onehot = np.eye(n_classes)[y]

    sizes = [x.shape[1]] + list(hidden) + [n_classes]
    rng = np.random.default_rng([seed, 0])
    weights, biases = [], []
    for fan_in, fan_out in zip(sizes[:-1], sizes[1:]):
        lim = np.sqrt(6.0 / (fan_in + fan_out))
        weights.append(rng.uniform(-lim, lim, size=(fan_in, fan_out)))
        biases.append(np.zeros(fan_out))
    model = MlpModel(n_qubits, sizes, weights, biases, names,
                     mean, std, "relu", {})

    mw = [np.zeros_like(w) for w in weights]
    vw = [np.zeros_like(w) for w in weights]
    mb = [np.zeros_like(b) for b in biases]
    vb = [np.zeros_like(b) for b in biases]
    step = 0
    m = xs.shape[0]
    final_loss = None
    for epoch in range(epochs):
        perm = np.random.default_rng([seed, 1 + epoch]).permutation(m)
        for lo in range(0, m, batch):
            idx = perm[lo:lo + batch]
            gw, gb = _gradients(model, xs[idx], onehot[idx])
            step += 1
            c1 = 1 - BETA1 ** step
            c2 = 1 - BETA2 ** step
            for i in range(len(weights)):
                mw[i] = BETA1 * mw[i] + (1 - BETA1) * gw[i]
                vw[i] = BETA2 * vw[i] + (1 - BETA2) * gw[i] ** 2
                weights[i] -= lr * (mw[i] / c1) / (np.sqrt(vw[i] / c2) + ADAM_EPS)
                mb[i] = BETA1 * mb[i] + (1 - BETA1) * gb[i]
                vb[i] = BETA2 * vb[i] + (1 - BETA2) * gb[i] ** 2
                biases[i] -= lr * (mb[i] / c1) / (np.sqrt(vb[i] / c2) + ADAM_EPS)
        final_loss = _loss(forward(model, xs), onehot)
        if not np.isfinite(final_loss):
            raise DivergenceError(epoch, lr)
    model.train_meta = {
        "seed": int(seed), "epochs": int(epochs), "lr": float(lr),
        "batch": int(batch), "hidden": [int(h) for h in hidden],
        "final_loss": final_loss,
    }
    return model


def features_from_state(dm: DensityMatrix) -> np.ndarray:
    flat = np.empty(2 * dm.mat.size, dtype=np.float64)
    flat[0::2] = dm.mat.real.reshape(-1)
    flat[1::2] = dm.mat.imag.reshape(-1)
    return flat


def predict(model: MlpModel, dm: DensityMatrix):
    """(ClassLabel, probability); argmax ties resolve to the lowest class code."""
    if dm.n_qubits != model.n_qubits:
        raise ValueError(
            f"state has {dm.n_qubits} qubits, model expects {model.n_qubits}"
        )
    probs = forward(model, model.standardize(features_from_state(dm)[None, :]))[0]
    code = int(np.argmax(probs))
    return classify.label_from_code(code, model.n_qubits), float(probs[code])


def gradient_check(model, x, y_onehot, h=1e-5, n_params=50, seed=0):
    """Max relative error of analytic vs central-difference gradients.

    Parameters where both gradients are below 1e-8 in magnitude are skipped.
    """
    x = np.atleast_2d(np.asarray(x, dtype=np.float64))
    y_onehot = np.atleast_2d(y_onehot)
    gw, gb = _gradients(model, x, y_onehot)
    rng = np.random.default_rng(seed)
    worst = 0.0
    tensors = [(model.weights, gw), (model.biases, gb)]
    for _ in range(n_params):
        kind = rng.integers(0, 2)
        params, grads = tensors[kind]
        li = int(rng.integers(0, len(params)))
        flat_idx = int(rng.integers(0, params[li].size))
        pos = np.unravel_index(flat_idx, params[li].shape)
        orig = params[li][pos]
        params[li][pos] = orig + h
        lp = _loss(forward(model, x), y_onehot)
        params[li][pos] = orig - h
        lm = _loss(forward(model, x), y_onehot)
        params[li][pos] = orig
        numeric = (lp - lm) / (2 * h)
        analytic = grads[li][pos]
        if abs(numeric) < 1e-8 and abs(analytic) < 1e-8:
            continue
        rel = abs(numeric - analytic) / max(abs(numeric), abs(analytic))
        worst = max(worst, rel)
    return worst


def save_model(model: MlpModel, path) -> None:
    doc = {
        "version": MODEL_VERSION,
        "n_qubits": model.n_qubits,
        "layer_sizes": model.layer_sizes,
        "activation": model.activation,
        "class_names": model.class_names,
        "feature_mean": [repr(float(v)) for v in model.feature_mean],
        "feature_std": [repr(float(v)) for v in model.feature_std],
        "weights": [[[repr(float(v)) for v in row] for row in w] for w in model.weights],
        "biases": [[repr(float(v)) for v in b] for b in model.biases],
        "train_meta": model.train_meta,
    }
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(doc, fh)


_REQUIRED_KEYS = ("version", "n_qubits", "layer_sizes", "activation",
                  "class_names", "feature_mean", "feature_std",
                  "weights", "biases", "train_meta")


def load_model(path) -> MlpModel:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            doc = json.load(fh)
    except json.JSONDecodeError as exc:
        raise ModelFormatError(f"not valid model JSON: {exc}") from exc
    if not isinstance(doc, dict):
        raise ModelFormatError("model JSON must be an object")
    missing = [k for k in _REQUIRED_KEYS if k not in doc]
    if missing:
        raise ModelFormatError(f"model JSON missing keys: {missing}")
    if doc["version"] != MODEL_VERSION:
        raise ModelFormatError(
            f"unsupported model version {doc['version']}, this build reads {MODEL_VERSION}"
        )
    sizes = [int(s) for s in doc["layer_sizes"]]
    weights = [np.array([[float(v) for v in row] for row in w]) for w in doc["weights"]]
    biases = [np.array([float(v) for v in b]) for b in doc["biases"]]
    for i, w in enumerate(weights):
        if w.shape != (sizes[i], sizes[i + 1]) or biases[i].shape != (sizes[i + 1],):
            raise ModelFormatError(f"layer {i} shape mismatch against layer_sizes")
    return MlpModel(
        int(doc["n_qubits"]), sizes, weights, biases, list(doc["class_names"]),
        np.array([float(v) for v in doc["feature_mean"]]),
        np.array([float(v) for v in doc["feature_std"]]),
        str(doc["activation"]), dict(doc["train_meta"]),
    )
