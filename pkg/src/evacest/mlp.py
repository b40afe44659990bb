"""From-scratch feedforward surrogate trained with per-sample SGD.

A small fully connected network maps the six room parameters to a scalar
evacuation-time prediction. Weights are plain numpy arrays; training is
stochastic gradient descent on squared error with a halve-on-plateau
learning-rate schedule.
"""

import json

import numpy as np

from .dataset import PARAM_RANGES

MODEL_VERSION = "evacest-mlp-1"

# default input normalization bounds, in input order
# (width, length, exit_size, input_flow, flow_duration, initial_population)
DEFAULT_NORM_BOUNDS = [
    PARAM_RANGES["width"],
    PARAM_RANGES["length"],
    PARAM_RANGES["exit_size"],
    PARAM_RANGES["input_flow"],
    PARAM_RANGES["flow_duration"],
    (0.0, 99.0),
]


def _sigmoid(x):
    out = np.empty_like(x)
    pos = x >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-x[pos]))
    ex = np.exp(x[~pos])
    out[~pos] = ex / (1.0 + ex)
    return out


class MLP:
    """Fully connected net: linear layers with sigmoid hidden activations.

    `dims` lists layer widths input-first, e.g. [6, 400, 1]. The output
    layer is linear. Layers have no bias terms by default.
    """

    def __init__(self, dims, seed=0, norm_bounds=None, use_bias=False):
        if len(dims) < 2 or any(d < 1 for d in dims):
            raise ValueError(f"bad layer dims: {dims}")
        self.dims = list(int(d) for d in dims)
        self.use_bias = use_bias
        rng = np.random.default_rng(seed)
        self.weights = [rng.uniform(-0.5, 0.5, size=(dims[i], dims[i + 1]))
                        for i in range(len(dims) - 1)]
        self.biases = [np.zeros(dims[i + 1]) for i in range(len(dims) - 1)]
        self.norm = (None if norm_bounds is None
                     else np.asarray(norm_bounds, dtype=np.float64))
        if self.norm is not None and self.norm.shape != (self.dims[0], 2):
            raise ValueError("norm_bounds must give (lo, hi) per input")

    def normalize(self, X):
        if self.norm is None:
            return np.asarray(X, dtype=np.float64)
        lo, hi = self.norm[:, 0], self.norm[:, 1]
        return (np.asarray(X, dtype=np.float64) - lo) / (hi - lo)

    def _forward(self, x):
        """Activations per layer for one normalized sample."""
        acts = [x]
        for i, w in enumerate(self.weights):
            z = acts[-1] @ w + self.biases[i]
            acts.append(z if i == len(self.weights) - 1 else _sigmoid(z))
        return acts

    def predict(self, X):
        X = self.normalize(np.atleast_2d(X))
        a = X
        for i, w in enumerate(self.weights):
            z = a @ w + self.biases[i]
            a = z if i == len(self.weights) - 1 else _sigmoid(z)
        return a[:, 0]

    def gradients(self, x, y):
        """Per-sample gradients of (pred - y)^2 wrt weights and biases."""
        acts = self._forward(self.normalize(x))
        delta = 2.0 * (acts[-1] - y)  # linear output layer
        gw = [None] * len(self.weights)
        gb = [None] * len(self.weights)
        for i in range(len(self.weights) - 1, -1, -1):
            gw[i] = np.outer(acts[i], delta)
            gb[i] = delta.copy()
            if i > 0:
                delta = (self.weights[i] @ delta) * acts[i] * (1.0 - acts[i])
        return gw, gb

    def sgd_step(self, x, y, lr):
        gw, gb = self.gradients(x, y)
        for i in range(len(self.weights)):
            self.weights[i] -= lr * gw[i]
            if self.use_bias:
                self.biases[i] -= lr * gb[i]

    def loss(self, X, y):
        return float(np.mean((self.predict(X) - np.asarray(y)) ** 2))

    # --- persistence ---------------------------------------------------

    def to_dict(self):
        return {
            "version": MODEL_VERSION,
            "dims": self.dims,
            "activation": "sigmoid",
            "use_bias": self.use_bias,
            "norm": None if self.norm is None else self.norm.tolist(),
            "weights": [w.tolist() for w in self.weights],
            "biases": [b.tolist() for b in self.biases],
        }

    @classmethod
    def from_dict(cls, d):
        if d.get("version") != MODEL_VERSION:
            raise ValueError(f"unsupported model version: {d.get('version')}")
        m = cls(d["dims"], norm_bounds=d["norm"], use_bias=d["use_bias"])
        m.weights = [np.asarray(w, dtype=np.float64) for w in d["weights"]]
        m.biases = [np.asarray(b, dtype=np.float64) for b in d["biases"]]
        for i, w in enumerate(m.weights):
            if w.shape != (m.dims[i], m.dims[i + 1]):
                raise ValueError("weight shape does not match dims")
        return m

    def save(self, path):
        with open(path, "w") as fh:
            json.dump(self.to_dict(), fh)

    @classmethod
    def load(cls, path):
        with open(path) as fh:
            return cls.from_dict(json.load(fh))


def train(model, X, y, lr=1e-6, epochs=200, val_fraction=0.1, seed=0,
          patience=10, max_halvings=4, log=None):
    """SGD with halve-on-plateau schedule.

    Samples are shuffled each epoch. After each epoch the validation loss is
    checked; `patience` epochs without improvement halve the learning rate,
    and training stops after `max_halvings` halvings (or `epochs`).
    Returns a history list of (epoch, lr, train_loss, val_loss).
    """
    X = np.asarray(X, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    rng = np.random.default_rng(seed)
    n = len(X)
    n_val = int(round(n * val_fraction)) if n > 1 else 0
    if val_fraction > 0 and n > 1:
        n_val = max(1, n_val)
    order = rng.permutation(n)
    val_idx, train_idx = order[:n_val], order[n_val:]
    if len(train_idx) == 0:
        train_idx, val_idx = order, order
    Xt, yt = X[train_idx], y[train_idx]
    Xv, yv = X[val_idx], y[val_idx]

    best_val = np.inf
    stall = 0
    halvings = 0
    history = []
    for epoch in range(epochs):
        for i in rng.permutation(len(Xt)):
            model.sgd_step(Xt[i], yt[i], lr)
        train_loss = model.loss(Xt, yt)
        val_loss = model.loss(Xv, yv) if len(Xv) else train_loss
        history.append((epoch, lr, train_loss, val_loss))
        if log:
            log(epoch, lr, train_loss, val_loss)
        if val_loss < best_val - 1e-12:
            best_val = val_loss
            stall = 0
        else:
            stall += 1
            if stall >= patience:
                halvings += 1
                if halvings > max_halvings:
                    break
                lr *= 0.5
                stall = 0
    return history


def score_below_threshold(model, X, y, threshold=0.10):
    """Fraction of samples whose relative prediction error is < threshold.

    Samples with a zero true value are counted as hits only when the
    prediction is exact.
    """
    y = np.asarray(y, dtype=np.float64)
    pred = model.predict(X)
    hits = 0
    for p, t in zip(pred, y):
        if t == 0:
            hits += p == 0
        else:
            hits += abs(p - t) / abs(t) < threshold
    return hits / len(y) if len(y) else 0.0
