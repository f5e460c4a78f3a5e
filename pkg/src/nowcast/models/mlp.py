"""Small feed-forward network trained with full-batch gradient descent on
MSE, plus a finite-difference verifier for the backprop gradients.

The adaptive-halving schedule retries any step that would increase the loss
with half the learning rate (reverting the step), which makes the recorded
loss curve nonincreasing once it engages.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ..errors import DataError, NumericalError
from .linear import _require_standardized

_ACTIVATIONS = ("relu", "tanh", "identity")


@dataclass
class MlpParams:
    hidden_sizes: tuple[int, ...] = (3,)
    activation: str = "relu"
    learning_rate: float = 0.05
    schedule: str = "adaptive-halving"  # or "constant"
    epochs: int = 2000
    seed: int = 0

    def __post_init__(self):
        if self.activation not in _ACTIVATIONS:
            raise DataError(f"mlp: unknown activation {self.activation!r}")
        if self.schedule not in ("constant", "adaptive-halving"):
            raise DataError(f"mlp: unknown schedule {self.schedule!r}")
        if self.learning_rate <= 0.0:
            raise DataError("mlp: learning_rate must be > 0")


@dataclass
class MlpFit:
    params: MlpParams
    weights: list[np.ndarray]
    biases: list[np.ndarray]
    loss_path: np.ndarray = field(repr=False, default=None)
    final_lr: float = 0.0

    def predict(self, X: np.ndarray) -> np.ndarray:
        X = np.asarray(X, dtype=np.float64)
        if X.ndim != 2 or X.shape[1] != self.weights[0].shape[0]:
            raise DataError(f"mlp predict: feature mismatch, got shape {X.shape}")
        out, _ = _forward(X, self.weights, self.biases, self.params.activation)
        return out


def _act(z: np.ndarray, kind: str) -> np.ndarray:
    if kind == "relu":
        return np.maximum(z, 0.0)
    if kind == "tanh":
        return np.tanh(z)
    return z


def _act_grad(z: np.ndarray, kind: str) -> np.ndarray:
    if kind == "relu":
        return (z > 0.0).astype(np.float64)
    if kind == "tanh":
        t = np.tanh(z)
        return 1.0 - t * t
    return np.ones_like(z)


def init_params(n_features: int, params: MlpParams):
    """Uniform(-r, r) weights with r = sqrt(6 / (fan_in + fan_out)), zero biases."""
    rng = np.random.default_rng(params.seed)
    sizes = [n_features, *params.hidden_sizes, 1]
    weights, biases = [], []
    for fan_in, fan_out in zip(sizes[:-1], sizes[1:]):
        r = np.sqrt(6.0 / (fan_in + fan_out))
        weights.append(rng.uniform(-r, r, size=(fan_in, fan_out)))
        biases.append(np.zeros(fan_out))
    return weights, biases


def _forward(X, weights, biases, activation):
    """Returns (predictions, pre-activations per layer).  The output layer is
    always linear."""
    zs = []
    a = X
    last = len(weights) - 1
    for k, (W, b) in enumerate(zip(weights, biases)):
        z = a @ W + b
        zs.append(z)
        a = z if k == last else _act(z, activation)
    if not np.isfinite(a).all():
        raise NumericalError("mlp: non-finite values in forward pass")
    return a[:, 0], zs


def mse_loss(X, y, weights, biases, activation) -> float:
    pred, _ = _forward(X, weights, biases, activation)
    d = pred - y
    return float(d @ d / d.size)


def _gradients(X, y, weights, biases, activation):
    """Backprop gradients of the MSE over the full batch."""
    n = X.shape[0]
    pred, zs = _forward(X, weights, biases, activation)
    grads_w = [None] * len(weights)
    grads_b = [None] * len(weights)
    delta = (2.0 / n) * (pred - y)[:, None]  # dL/dz at the linear output
    for k in range(len(weights) - 1, -1, -1):
        a_prev = X if k == 0 else _act(zs[k - 1], activation)
        grads_w[k] = a_prev.T @ delta
        grads_b[k] = delta.sum(axis=0)
        if k > 0:
            delta = (delta @ weights[k].T) * _act_grad(zs[k - 1], activation)
    return grads_w, grads_b


def fit_mlp(X: np.ndarray, y: np.ndarray, params: MlpParams) -> MlpFit:
    """Full-batch gradient descent; inputs and target must be standardized."""
    X = np.asarray(X, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    _require_standardized(X, "fit_mlp")
    if abs(y.mean()) > 1e-6 or abs(y.std() - 1.0) > 1e-6:
        raise DataError("fit_mlp: target must be standardized")

    weights, biases = init_params(X.shape[1], params)
    lr = params.learning_rate
    loss = mse_loss(X, y, weights, biases, params.activation)
    path = [loss]
    for _ in range(params.epochs):
        gw, gb = _gradients(X, y, weights, biases, params.activation)
        new_w = [W - lr * g for W, g in zip(weights, gw)]
        new_b = [b - lr * g for b, g in zip(biases, gb)]
        new_loss = mse_loss(X, y, new_w, new_b, params.activation)
        if params.schedule == "adaptive-halving" and new_loss > loss:
            lr *= 0.5  # reject the step, retry smaller next epoch
            if lr < 1e-14:
                break
            path.append(loss)
            continue
        weights, biases, loss = new_w, new_b, new_loss
        path.append(loss)
        for W in weights:
            if not np.isfinite(W).all():
                raise NumericalError("mlp: non-finite weights after update")
    return MlpFit(params, weights, biases, np.array(path), final_lr=lr)


def grad_check(
    X: np.ndarray,
    y: np.ndarray,
    params: MlpParams,
    probes: int = 20,
    h: float = 1e-5,
    seed: int = 0,
) -> float:
    """Max relative error between backprop and central finite differences over
    ``probes`` randomly chosen parameters of a freshly initialized network."""
    if h <= 0.0:
        raise DataError("grad_check: h must be > 0")
    X = np.asarray(X, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    weights, biases = init_params(X.shape[1], params)
    gw, gb = _gradients(X, y, weights, biases, params.activation)
    flat = [(w, g) for w, g in zip(weights, gw)] + [(b, g) for b, g in zip(biases, gb)]

    rng = np.random.default_rng(seed)
    worst = 0.0
    for _ in range(probes):
        k = int(rng.integers(len(flat)))
        arr, grad = flat[k]
        idx = tuple(int(rng.integers(s)) for s in arr.shape)
        orig = arr[idx]
        arr[idx] = orig + h
        up = mse_loss(X, y, weights, biases, params.activation)
        arr[idx] = orig - h
        dn = mse_loss(X, y, weights, biases, params.activation)
        arr[idx] = orig
        numeric = (up - dn) / (2.0 * h)
        analytic = grad[idx]
        scale = max(abs(numeric), abs(analytic), 1e-12)
        worst = max(worst, abs(numeric - analytic) / scale)
    return worst
