"""Minimal dense-network training harness with exact reverse-mode gradients.

Networks are stacks of fully connected layers with one activation spec
shared across hidden layers; when the activation is BerLU or PReLU its
slope alpha is a learnable per-layer scalar trained jointly with the
weights.  Optimization is AdamW with decoupled weight decay on weights
only, global-norm gradient clipping, and a cosine learning-rate schedule
with linear warmup.  Everything is driven by explicit seeds: a run is
reproducible bit for bit.
"""

import json
import math
import time
from dataclasses import dataclass, replace

import numpy as np
from scipy import special

from .activations import ActivationSpec, _dx_kernel, _fwd_kernel, _berlu_dalpha
from .data import Dataset

_PARAMETRIC = ("berlu", "prelu")


@dataclass(frozen=True)
class TrainConfig:
    epochs: int = 200
    batch_size: int = 64
    base_lr: float = 1e-2
    weight_decay: float = 0.05
    warmup_epochs: int = 5
    grad_clip: float = 1.0
    seed: int = 0
    adam_beta1: float = 0.9
    adam_beta2: float = 0.999
    adam_eps: float = 1e-8

    def __post_init__(self):
        if not self.epochs > self.warmup_epochs >= 0:
            raise ValueError(
                f"need epochs > warmup_epochs >= 0, got {self.epochs} "
                f"and {self.warmup_epochs}"
            )
        for name in ("batch_size", "base_lr", "grad_clip", "adam_beta1",
                     "adam_beta2", "adam_eps"):
            if getattr(self, name) <= 0:
                raise ValueError(f"{name} must be positive")
        if self.weight_decay < 0:
            raise ValueError("weight_decay must be >= 0")

    @classmethod
    def from_json(cls, path) -> "TrainConfig":
        with open(path) as f:
            return cls(**json.load(f))

    def to_dict(self) -> dict:
        return {
            "epochs": self.epochs,
            "batch_size": self.batch_size,
            "base_lr": self.base_lr,
            "weight_decay": self.weight_decay,
            "warmup_epochs": self.warmup_epochs,
            "grad_clip": self.grad_clip,
            "seed": self.seed,
            "adam_beta1": self.adam_beta1,
            "adam_beta2": self.adam_beta2,
            "adam_eps": self.adam_eps,
        }


@dataclass(frozen=True)
class DenseNet:
    weights: tuple  # (out, in) matrices
    biases: tuple  # (out,) vectors
    activation: ActivationSpec
    alphas: np.ndarray  # one learnable slope per hidden layer, possibly empty

    @property
    def n_hidden(self) -> int:
        return len(self.weights) - 1

    def hidden_spec(self, i: int) -> ActivationSpec:
        if self.activation.kind in _PARAMETRIC:
            return self.activation.with_alpha(float(self.alphas[i]))
        return self.activation


@dataclass(frozen=True)
class Grads:
    weights: tuple
    biases: tuple
    alphas: np.ndarray

    def flat_norm(self) -> float:
        total = sum(float(np.sum(g * g)) for g in self.weights)
        total += sum(float(np.sum(g * g)) for g in self.biases)
        total += float(np.sum(self.alphas * self.alphas))
        return math.sqrt(total)


@dataclass
class AdamState:
    m_w: list
    v_w: list
    m_b: list
    v_b: list
    m_a: np.ndarray
    v_a: np.ndarray
    t: int = 0


@dataclass(frozen=True)
class RunReport:
    per_epoch: tuple  # dicts: train_loss, train_acc, val_acc, lr
    final_alphas: tuple
    wall_time_s: float

    def to_dict(self) -> dict:
        # wall_time_s is intentionally left out: the serialized report is
        # a pure function of (config, dataset, seed)
        return {
            "per_epoch": [dict(e) for e in self.per_epoch],
            "final_alphas": list(self.final_alphas),
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2)

    def write_csv(self, path):
        with open(path, "w") as f:
            f.write("epoch,train_loss,train_acc,val_acc,lr\n")
            for i, e in enumerate(self.per_epoch):
                f.write(
                    f"{i},{e['train_loss']!r},{e['train_acc']!r},"
                    f"{e['val_acc']!r},{e['lr']!r}\n"
                )


class TrainingDiverged(RuntimeError):
    def __init__(self, epoch: int, what: str):
        super().__init__(f"training diverged at epoch {epoch}: {what}")
        self.epoch = epoch


def init_net(dims, activation: ActivationSpec, seed: int = 0) -> DenseNet:
    """Truncated-normal weights (std 0.02, cut at 2 std), zero biases.

    The truncation is applied through the inverse CDF so the draw is a
    deterministic function of the seed.  Learnable alphas start at 0.01.
    """
    dims = [int(d) for d in dims]
    if len(dims) < 2:
        raise ValueError(f"need at least input and output dims, got {dims}")
    if any(d <= 0 for d in dims):
        raise ValueError(f"dimensions must be positive, got {dims}")
    rng = np.random.default_rng(seed)
    lo, hi = special.ndtr(-2.0), special.ndtr(2.0)
    weights, biases = [], []
    for fan_in, fan_out in zip(dims[:-1], dims[1:]):
        u = rng.uniform(lo, hi, size=(fan_out, fan_in))
        weights.append(0.02 * special.ndtri(u))
        biases.append(np.zeros(fan_out))
    n_hidden = len(dims) - 2
    if activation.kind in _PARAMETRIC:
        alphas = np.full(n_hidden, 0.01)
    else:
        alphas = np.zeros(0)
    return DenseNet(tuple(weights), tuple(biases), activation, alphas)


def _forward(net: DenseNet, x: np.ndarray):
    """Returns (pre-activations per hidden layer, activations per layer, logits)."""
    a = x
    pre, acts = [], [a]
    for i in range(net.n_hidden):
        h = a @ net.weights[i].T + net.biases[i]
        pre.append(h)
        a = _fwd_kernel(net.hidden_spec(i), h)
        acts.append(a)
    logits = a @ net.weights[-1].T + net.biases[-1]
    return pre, acts, logits


def _softmax_ce(logits: np.ndarray, labels: np.ndarray):
    """Mean cross-entropy and d loss / d logits."""
    z = logits - logits.max(axis=1, keepdims=True)
    ez = np.exp(z)
    p = ez / ez.sum(axis=1, keepdims=True)
    n = len(labels)
    nll = -np.log(p[np.arange(n), labels])
    dlogits = p.copy()
    dlogits[np.arange(n), labels] -= 1.0
    return float(nll.mean()), dlogits / n


def forward_backward(net: DenseNet, batch_x: np.ndarray, batch_y: np.ndarray):
    """Loss and exact gradients for weights, biases, and per-layer alpha."""
    batch_x = np.asarray(batch_x, dtype=np.float64)
    batch_y = np.asarray(batch_y)
    if len(batch_x) == 0:
        raise ValueError("empty batch")
    if batch_y.min() < 0 or batch_y.max() >= net.weights[-1].shape[0]:
        raise ValueError("labels out of range")

    pre, acts, logits = _forward(net, batch_x)
    if not np.isfinite(logits).all():
        bad = next(
            i for i, h in enumerate(pre + [logits]) if not np.isfinite(h).all()
        )
        raise FloatingPointError(f"non-finite activations at layer {bad}")
    loss, delta = _softmax_ce(logits, batch_y)

    g_w = [np.zeros_like(w) for w in net.weights]
    g_b = [np.zeros_like(b) for b in net.biases]
    g_a = np.zeros_like(net.alphas)

    # output layer
    g_w[-1] = delta.T @ acts[-1]
    g_b[-1] = delta.sum(axis=0)
    upstream = delta @ net.weights[-1]
    for i in range(net.n_hidden - 1, -1, -1):
        spec = net.hidden_spec(i)
        if net.activation.kind == "berlu":
            g_a[i] = float(
                np.sum(upstream * _berlu_dalpha(pre[i], spec.alpha, spec.epsilon))
            )
        elif net.activation.kind == "prelu":
            g_a[i] = float(np.sum(upstream * np.minimum(pre[i], 0.0)))
        dh = upstream * _dx_kernel(spec, pre[i])
        g_w[i] = dh.T @ acts[i]
        g_b[i] = dh.sum(axis=0)
        if i > 0:
            upstream = dh @ net.weights[i]
    return loss, Grads(tuple(g_w), tuple(g_b), g_a)


def clip_gradients(grads: Grads, threshold: float) -> Grads:
    """Global-norm clipping: rescale everything when ||g||_2 > threshold."""
    if threshold <= 0:
        raise ValueError(f"threshold must be > 0, got {threshold}")
    norm = grads.flat_norm()
    if norm <= threshold:
        return grads
    s = threshold / norm
    return Grads(
        tuple(s * g for g in grads.weights),
        tuple(s * g for g in grads.biases),
        s * grads.alphas,
    )


def lr_at(step: int, total_steps: int, warmup_steps: int, base_lr: float) -> float:
    """Linear warmup to base_lr, then cosine decay hitting 0 at the last step."""
    if not 0 <= step < total_steps:
        raise ValueError(f"step {step} outside [0, {total_steps})")
    if not 0 <= warmup_steps < total_steps:
        raise ValueError(f"warmup_steps {warmup_steps} outside [0, {total_steps})")
    if step < warmup_steps:
        return base_lr * step / warmup_steps
    denom = total_steps - 1 - warmup_steps
    progress = (step - warmup_steps) / denom if denom > 0 else 0.0
    return base_lr * 0.5 * (1.0 + math.cos(math.pi * progress))


def init_adam_state(net: DenseNet) -> AdamState:
    return AdamState(
        m_w=[np.zeros_like(w) for w in net.weights],
        v_w=[np.zeros_like(w) for w in net.weights],
        m_b=[np.zeros_like(b) for b in net.biases],
        v_b=[np.zeros_like(b) for b in net.biases],
        m_a=np.zeros_like(net.alphas),
        v_a=np.zeros_like(net.alphas),
    )


def _adam_update(p, g, m, v, lr, t, cfg):
    m_new = cfg.adam_beta1 * m + (1.0 - cfg.adam_beta1) * g
    v_new = cfg.adam_beta2 * v + (1.0 - cfg.adam_beta2) * g * g
    m_hat = m_new / (1.0 - cfg.adam_beta1**t)
    v_hat = v_new / (1.0 - cfg.adam_beta2**t)
    return p - lr * m_hat / (np.sqrt(v_hat) + cfg.adam_eps), m_new, v_new


def adamw_step(net: DenseNet, grads: Grads, state: AdamState, lr: float,
               cfg: TrainConfig):
    """One AdamW step; weight decay is decoupled and touches weights only."""
    t = state.t + 1
    new_w, new_b = [], []
    for i, w in enumerate(net.weights):
        w = w * (1.0 - lr * cfg.weight_decay)
        w, state.m_w[i], state.v_w[i] = _adam_update(
            w, grads.weights[i], state.m_w[i], state.v_w[i], lr, t, cfg
        )
        new_w.append(w)
    for i, b in enumerate(net.biases):
        b, state.m_b[i], state.v_b[i] = _adam_update(
            b, grads.biases[i], state.m_b[i], state.v_b[i], lr, t, cfg
        )
        new_b.append(b)
    alphas = net.alphas
    if len(alphas):
        alphas, state.m_a, state.v_a = _adam_update(
            alphas, grads.alphas, state.m_a, state.v_a, lr, t, cfg
        )
    state.t = t
    return replace(net, weights=tuple(new_w), biases=tuple(new_b),
                   alphas=alphas), state


def _accuracy(net: DenseNet, x: np.ndarray, y: np.ndarray) -> float:
    _, _, logits = _forward(net, x)
    return float(np.mean(np.argmax(logits, axis=1) == y))


def train(net: DenseNet, dataset: Dataset, cfg: TrainConfig):
    """Run the full recipe; returns (trained net, RunReport).

    Shuffle order is drawn from a generator seeded by (seed, epoch), so the
    whole run is a deterministic function of (net, dataset, config).
    """
    train_x, train_y = dataset.train()
    val_x, val_y = dataset.val()
    if len(train_y) == 0 or len(val_y) == 0:
        raise ValueError("dataset needs non-empty train and val splits")

    bpe = math.ceil(len(train_y) / cfg.batch_size)
    total_steps = cfg.epochs * bpe
    warmup_steps = cfg.warmup_epochs * bpe
    state = init_adam_state(net)
    t0 = time.perf_counter()
    per_epoch = []
    gstep = 0
    for epoch in range(cfg.epochs):
        order = np.random.default_rng([cfg.seed, epoch]).permutation(len(train_y))
        loss_sum = 0.0
        lr = cfg.base_lr
        for b in range(bpe):
            sel = order[b * cfg.batch_size : (b + 1) * cfg.batch_size]
            lr = lr_at(gstep, total_steps, warmup_steps, cfg.base_lr)
            try:
                loss, grads = forward_backward(net, train_x[sel], train_y[sel])
            except FloatingPointError as e:
                raise TrainingDiverged(epoch, str(e)) from e
            if not np.isfinite(loss):
                raise TrainingDiverged(epoch, f"loss = {loss}")
            grads = clip_gradients(grads, cfg.grad_clip)
            net, state = adamw_step(net, grads, state, lr, cfg)
            loss_sum += loss * len(sel)
            gstep += 1
        per_epoch.append(
            {
                "train_loss": loss_sum / len(train_y),
                "train_acc": _accuracy(net, train_x, train_y),
                "val_acc": _accuracy(net, val_x, val_y),
                "lr": lr,
            }
        )
    report = RunReport(
        per_epoch=tuple(per_epoch),
        final_alphas=tuple(float(a) for a in net.alphas),
        wall_time_s=time.perf_counter() - t0,
    )
    return net, report
