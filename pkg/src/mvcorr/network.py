"""Sub-networks and the correlation-maximizing training loop.

A model holds m sub-networks with identical layer shapes and independent
weights. Every layer applies a sigmoid; the final output is constrained to
unit L2 norm per column, and the normalization is differentiated through
(projection Jacobian (I - u u^T) / ||h|| per column) rather than applied as
a post-hoc fix.

Training draws bootstrap batches, routes the m slots through the
sub-networks by slot index, backpropagates the correlation loss 1 - rho,
and applies SGD with momentum under an inverse-time learning-rate schedule
lr_t = lr / (1 + decay * step). Early stopping halts once the epoch loss
has failed to improve by a threshold for a fixed number of epochs.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .bootstrap import as_generator, batch_size_for, sample_batch
from .linalg import as_matrix
from .objective import loss_and_grad
from .tensorio import atomic_write_bytes

CHECKPOINT_MAGIC = "MVCM1"


@dataclass
class SubNetwork:
    """Fully-connected sigmoid stack; weights[i] is (out, in), biases[i] (out,)."""

    weights: list
    biases: list

    @property
    def n_layers(self):
        return len(self.weights)

    @property
    def input_dim(self):
        return self.weights[0].shape[1]

    @property
    def output_dim(self):
        return self.weights[-1].shape[0]


@dataclass
class MultiViewModel:
    subnets: list
    d: int
    velocities: list | None = None
    history: list = field(default_factory=list)

    @property
    def m(self):
        return len(self.subnets)

    @property
    def input_dim(self):
        return self.subnets[0].input_dim


@dataclass(frozen=True)
class TrainConfig:
    lr: float = 0.01
    momentum: float = 0.9
    decay: float = 1e-6
    nu: float = 0.2
    max_epochs: int = 50
    early_stop_delta: float = 1e-3
    early_stop_patience: int = 5
    batch: int | None = None  # None: ceil(d ln d)
    seed: int = 0

    def validate(self):
        if self.lr < 0:
            raise ValueError(f"learning rate must be >= 0, got {self.lr}")
        if not 0.0 <= self.momentum < 1.0:
            raise ValueError(f"momentum must lie in [0, 1), got {self.momentum}")
        if not 0.0 <= self.nu <= 1.0:
            raise ValueError(f"nu must lie in [0, 1], got {self.nu}")
        if self.max_epochs < 1:
            raise ValueError("max_epochs must be >= 1")
        if self.early_stop_patience < 1:
            raise ValueError("early_stop_patience must be >= 1")


@dataclass(frozen=True)
class EpochStats:
    epoch: int
    loss: float
    rho: float


class EarlyStopping:
    """Stop after `patience` consecutive epochs without a `delta` improvement."""

    def __init__(self, delta, patience):
        self.delta = float(delta)
        self.patience = int(patience)
        self.best = math.inf
        self.stale = 0

    def update(self, loss):
        if loss < self.best - self.delta:
            self.best = loss
            self.stale = 0
        else:
            self.stale += 1
        return self.stale >= self.patience


def init_model(m, layer_widths, input_dim, seed):
    """m sub-networks with the given widths (last width is the embedding d).

    Weights are uniform in +-1/sqrt(fan_in) with independent draws per
    sub-network; biases start at zero. Bit-identical for identical seeds.
    """
    m = int(m)
    if m < 2:
        raise ValueError(f"need at least 2 sub-networks, got {m}")
    widths = [int(w) for w in layer_widths]
    if not widths or any(w < 1 for w in widths):
        raise ValueError(f"layer widths must be positive, got {layer_widths}")
    if int(input_dim) < 1:
        raise ValueError(f"input dimension must be positive, got {input_dim}")
    rng = np.random.default_rng(seed)
    subnets = []
    for _ in range(m):
        weights, biases = [], []
        fan_in = int(input_dim)
        for w in widths:
            bound = 1.0 / math.sqrt(fan_in)
            weights.append(rng.uniform(-bound, bound, size=(w, fan_in)))
            biases.append(np.zeros(w))
            fan_in = w
        subnets.append(SubNetwork(weights=weights, biases=biases))
    return MultiViewModel(subnets=subnets, d=widths[-1])


def _sigmoid(z):
    out = np.empty_like(z)
    pos = z >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-z[pos]))
    ez = np.exp(z[~pos])
    out[~pos] = ez / (1.0 + ez)
    return out


def _normalize_columns(h):
    norms = np.linalg.norm(h, axis=0, keepdims=True)
    safe = np.where(norms == 0.0, 1.0, norms)  # zero columns stay zero
    return h / safe, norms


def _forward_cached(subnet, x):
    activations = [x]
    for w, b in zip(subnet.weights, subnet.biases):
        activations.append(_sigmoid(w @ activations[-1] + b[:, None]))
    out, norms = _normalize_columns(activations[-1])
    return out, activations, norms


def forward(subnet, x):
    """Embed a (input_dim, n) matrix: sigmoid layers, then unit-norm columns."""
    x = as_matrix(x, "forward input")
    if x.shape[0] != subnet.input_dim:
        raise ValueError(
            f"input has {x.shape[0]} features, sub-network expects {subnet.input_dim}"
        )
    out, _, _ = _forward_cached(subnet, x)
    return out


def _backward(subnet, activations, norms, grad_out):
    """Parameter gradients for one sub-network given d(loss)/d(output)."""
    out = activations[-1] / np.where(norms == 0.0, 1.0, norms)
    # unit-norm layer: g_h = (g - u (u.g)) / ||h|| per column
    grad = (grad_out - out * np.sum(out * grad_out, axis=0, keepdims=True))
    grad = grad / np.where(norms == 0.0, 1.0, norms)
    grad[:, norms.ravel() == 0.0] = 0.0
    grads_w, grads_b = [], []
    for i in range(subnet.n_layers - 1, -1, -1):
        act = activations[i + 1]
        dz = grad * act * (1.0 - act)  # sigmoid derivative
        grads_w.append(dz @ activations[i].T)
        grads_b.append(dz.sum(axis=1))
        if i > 0:
            grad = subnet.weights[i].T @ dz
    grads_w.reverse()
    grads_b.reverse()
    return grads_w, grads_b


def _init_velocities(model):
    return [
        [
            (np.zeros_like(w), np.zeros_like(b))
            for w, b in zip(net.weights, net.biases)
        ]
        for net in model.subnets
    ]


def train(model, data, cfg):
    """Train the model on a multi-view dataset; returns the epoch history.

    The model is updated in place; its history accumulates one EpochStats
    per epoch. Deterministic given cfg.seed.
    """
    cfg.validate()
    if data.dim != model.input_dim:
        raise ValueError(
            f"dataset dimension {data.dim} does not match model input "
            f"{model.input_dim}"
        )
    rng = as_generator(cfg.seed)
    batch = cfg.batch if cfg.batch else batch_size_for(model.d)
    steps_per_epoch = max(1, math.ceil(len(data) / batch))
    if model.velocities is None:
        model.velocities = _init_velocities(model)
    stopper = EarlyStopping(cfg.early_stop_delta, cfg.early_stop_patience)
    history = []
    step = 0
    start_epoch = len(model.history)
    for epoch in range(start_epoch + 1, start_epoch + cfg.max_epochs + 1):
        losses = np.empty(steps_per_epoch)
        rhos = np.empty(steps_per_epoch)
        for b in range(steps_per_epoch):
            views = sample_batch(data, model.m, batch, rng)
            caches = [
                _forward_cached(net, views.tensor[:, l, :].T)
                for l, net in enumerate(model.subnets)
            ]
            result, grads = loss_and_grad([c[0] for c in caches], cfg.nu)
            if not math.isfinite(result.loss):
                raise RuntimeError(
                    f"non-finite loss at epoch {epoch}, batch {b + 1}"
                )
            losses[b] = result.loss
            rhos[b] = result.rho
            lr_t = cfg.lr / (1.0 + cfg.decay * step)
            step += 1
            for net, vel, (_, acts, norms), g_out in zip(
                model.subnets, model.velocities, caches, grads
            ):
                grads_w, grads_b = _backward(net, acts, norms, g_out)
                for i, (gw, gb) in enumerate(zip(grads_w, grads_b)):
                    vw, vb = vel[i]
                    vw *= cfg.momentum
                    vw -= lr_t * gw
                    vb *= cfg.momentum
                    vb -= lr_t * gb
                    net.weights[i] += vw
                    net.biases[i] += vb
        stats = EpochStats(epoch=epoch, loss=float(losses.mean()), rho=float(rhos.mean()))
        history.append(stats)
        model.history.append(stats)
        if stopper.update(stats.loss):
            break
    return history


def embed(model, x, subnet_index=None, seed=0):
    """Embeddings from a single sub-network (seeded-random choice by default)."""
    if subnet_index is None:
        subnet_index = int(np.random.default_rng(seed).integers(model.m))
    if not 0 <= subnet_index < model.m:
        raise ValueError(f"sub-network index {subnet_index} out of range 0..{model.m - 1}")
    return forward(model.subnets[subnet_index], x)


def save_model(model, path):
    """Checkpoint: ASCII header, then per layer a dims line followed by the
    raw little-endian float64 weight and bias blocks. Round-trips bit-exactly.
    """
    n_layers = model.subnets[0].n_layers
    chunks = [f"{CHECKPOINT_MAGIC} {model.m} {model.d} {n_layers}\n".encode("ascii")]
    for net in model.subnets:
        for w, b in zip(net.weights, net.biases):
            chunks.append(f"{w.shape[0]} {w.shape[1]}\n".encode("ascii"))
            chunks.append(np.ascontiguousarray(w, dtype="<f8").tobytes())
            chunks.append(np.ascontiguousarray(b, dtype="<f8").tobytes())
    atomic_write_bytes(path, b"".join(chunks))


def _read_line(buf, pos):
    end = buf.find(b"\n", pos)
    if end < 0:
        raise ValueError("truncated checkpoint file")
    return buf[pos:end].decode("ascii"), end + 1


def load_model(path):
    with open(path, "rb") as fh:
        buf = fh.read()
    header, pos = _read_line(buf, 0)
    parts = header.split()
    if len(parts) != 4 or parts[0] != CHECKPOINT_MAGIC:
        raise ValueError(f"not a model checkpoint: bad header {header!r}")
    m, d, n_layers = (int(p) for p in parts[1:])
    subnets = []
    for _ in range(m):
        weights, biases = [], []
        for _ in range(n_layers):
            dims, pos = _read_line(buf, pos)
            out_dim, in_dim = (int(p) for p in dims.split())
            w_bytes = 8 * out_dim * in_dim
            b_bytes = 8 * out_dim
            if pos + w_bytes + b_bytes > len(buf):
                raise ValueError("truncated checkpoint file")
            w = np.frombuffer(buf[pos : pos + w_bytes], dtype="<f8").reshape(out_dim, in_dim)
            pos += w_bytes
            b = np.frombuffer(buf[pos : pos + b_bytes], dtype="<f8")
            pos += b_bytes
            weights.append(w.astype(np.float64).copy())
            biases.append(b.astype(np.float64).copy())
        subnets.append(SubNetwork(weights=weights, biases=biases))
    if pos != len(buf):
        raise ValueError("trailing bytes in checkpoint file")
    return MultiViewModel(subnets=subnets, d=d)
