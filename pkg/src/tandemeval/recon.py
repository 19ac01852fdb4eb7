"""Embedding reconstruction attack against anonymized speaker embeddings.

A single regressor F maps an anonymized embedding back toward its
original; during training F is applied to both members of a pair-of-pairs
(two weight-shared branches) and fitted with the sum of the two squared
reconstruction errors plus a cosine-similarity term whose target is 1 when
both inputs come from the same datum and 0 otherwise:

    loss = ||F(a1) - r1||^2 + ||F(a2) - r2||^2
           + penalty( cos(F(a1), F(a2)) - delta(id1, id2) )

The penalty is squared by default (absolute available behind a flag), and
the three terms carry configurable weights (default 1). At inference the
Siamese arrangement disappears: reconstruction is a plain forward pass.

The network is a small dense net, tanh on hidden layers, identity output,
trained by plain mini-batch gradient descent with a fixed learning rate.
Initialization, batch sampling, and pairing all draw from the portable
SplitMix64 stream, so a seed fixes the final parameters exactly. Gradients
are exact analytic backprop (finite-difference-checked in the tests).
Forward/loss evaluation is pure; training is single-threaded per run.
"""

import json
import math
from dataclasses import dataclass

import numpy as np

from .errors import (
    DegenerateCosineError,
    DivergenceError,
    DuplicateIdError,
    ParseError,
    ShapeError,
)
from .rng import SplitMix64

_NORM_FLOOR = 1e-12


@dataclass(frozen=True)
class EmbeddingPair:
    datum_id: str
    x_anon: np.ndarray
    x_raw: np.ndarray

    def __post_init__(self):
        object.__setattr__(
            self, "x_anon", np.asarray(self.x_anon, dtype=np.float64)
        )
        object.__setattr__(
            self, "x_raw", np.asarray(self.x_raw, dtype=np.float64)
        )
        if self.x_anon.shape != self.x_raw.shape or self.x_anon.ndim != 1:
            raise ShapeError(
                f"pair {self.datum_id!r}: anon {self.x_anon.shape} vs "
                f"raw {self.x_raw.shape}"
            )
        if not (
            np.all(np.isfinite(self.x_anon)) and np.all(np.isfinite(self.x_raw))
        ):
            raise ValueError(f"pair {self.datum_id!r} has non-finite entries")

    @property
    def dim(self):
        return self.x_anon.size


class ReconNet:
    """Dense regressor with equal input/output width."""

    def __init__(self, dims, weights, biases, seed=None):
        if len(dims) < 2 or dims[0] != dims[-1]:
            raise ShapeError(f"dims must start and end at d, got {dims}")
        self.dims = list(int(d) for d in dims)
        self.weights = [np.asarray(w, dtype=np.float64) for w in weights]
        self.biases = [np.asarray(b, dtype=np.float64) for b in biases]
        self.seed = seed
        for l, (w, b) in enumerate(zip(self.weights, self.biases)):
            if w.shape != (self.dims[l + 1], self.dims[l]) or b.shape != (
                self.dims[l + 1],
            ):
                raise ShapeError(f"layer {l}: weight {w.shape}, bias {b.shape}")
            if not (np.all(np.isfinite(w)) and np.all(np.isfinite(b))):
                raise ValueError(f"layer {l} has non-finite parameters")

    @classmethod
    def initialize(cls, dims, seed):
        """Seeded uniform init in [-1/sqrt(fan_in), +1/sqrt(fan_in)]."""
        rng = SplitMix64(seed)
        weights, biases = [], []
        for fan_in, fan_out in zip(dims[:-1], dims[1:]):
            bound = 1.0 / math.sqrt(fan_in)
            u = rng.uniforms(fan_out * fan_in).reshape(fan_out, fan_in)
            weights.append((2.0 * u - 1.0) * bound)
            biases.append((2.0 * rng.uniforms(fan_out) - 1.0) * bound)
        return cls(dims, weights, biases, seed=seed)

    @property
    def n_layers(self):
        return len(self.weights)

    def copy(self):
        return ReconNet(
            self.dims,
            [w.copy() for w in self.weights],
            [b.copy() for b in self.biases],
            seed=self.seed,
        )

    def to_dict(self):
        return {
            "dims": self.dims,
            "weights": [w.reshape(-1).tolist() for w in self.weights],
            "biases": [b.tolist() for b in self.biases],
            "activation": "tanh",
            "seed": self.seed,
        }

    @classmethod
    def from_dict(cls, d):
        if d.get("activation", "tanh") != "tanh":
            raise ValueError(f"unsupported activation {d['activation']!r}")
        dims = d["dims"]
        weights = [
            np.asarray(flat, dtype=np.float64).reshape(dims[l + 1], dims[l])
            for l, flat in enumerate(d["weights"])
        ]
        return cls(dims, weights, d["biases"], seed=d.get("seed"))


def forward(net, x):
    """Feed-forward evaluation: tanh hidden layers, identity output."""
    a = np.asarray(x, dtype=np.float64)
    if a.shape != (net.dims[0],):
        raise ShapeError(f"input shape {a.shape}, expected ({net.dims[0]},)")
    for l in range(net.n_layers):
        a = net.weights[l] @ a + net.biases[l]
        if l < net.n_layers - 1:
            a = np.tanh(a)
    return a


def reconstruct(net, x_anon):
    """Inference-time reconstruction: a plain forward pass."""
    return forward(net, x_anon)


def delta(id1, id2):
    """1 if both ids name the same datum, else 0."""
    return 1 if id1 == id2 else 0


def _forward_trace(net, x):
    """Activations per layer (post-nonlinearity), input first."""
    acts = [np.asarray(x, dtype=np.float64)]
    for l in range(net.n_layers):
        z = net.weights[l] @ acts[-1] + net.biases[l]
        acts.append(np.tanh(z) if l < net.n_layers - 1 else z)
    return acts


def _cosine(y1, y2):
    n1 = float(np.linalg.norm(y1))
    n2 = float(np.linalg.norm(y2))
    if n1 < _NORM_FLOOR or n2 < _NORM_FLOOR:
        raise DegenerateCosineError(
            f"reconstructed embedding norm below {_NORM_FLOOR}"
        )
    return float(y1 @ y2) / (n1 * n2), n1, n2


def _penalty(u, kind):
    if kind == "squared":
        return u * u
    if kind == "absolute":
        return abs(u)
    raise ValueError(f"unknown penalty {kind!r}")


def _penalty_grad(u, kind):
    if kind == "squared":
        return 2.0 * u
    return math.copysign(1.0, u) if u != 0.0 else 0.0


def siamese_loss(net, p1, p2, recon_weight=1.0, cos_weight=1.0, penalty="squared"):
    """Two reconstruction terms plus the cosine-vs-delta term."""
    if p1.dim != net.dims[0] or p2.dim != net.dims[0]:
        raise ShapeError("pair dimension does not match the net")
    y1 = forward(net, p1.x_anon)
    y2 = forward(net, p2.x_anon)
    cos, _, _ = _cosine(y1, y2)
    d = delta(p1.datum_id, p2.datum_id)
    return float(
        recon_weight * (np.sum((y1 - p1.x_raw) ** 2) + np.sum((y2 - p2.x_raw) ** 2))
        + cos_weight * _penalty(cos - d, penalty)
    )


def loss_gradient(net, p1, p2, recon_weight=1.0, cos_weight=1.0, penalty="squared"):
    """Exact gradient of siamese_loss w.r.t. every weight and bias.

    Returns (grad_weights, grad_biases) shaped like net.weights/net.biases;
    the two weight-shared branches accumulate into the same arrays.
    """
    acts1 = _forward_trace(net, p1.x_anon)
    acts2 = _forward_trace(net, p2.x_anon)
    y1, y2 = acts1[-1], acts2[-1]
    cos, n1, n2 = _cosine(y1, y2)
    d = delta(p1.datum_id, p2.datum_id)
    pgrad = cos_weight * _penalty_grad(cos - d, penalty)

    dy1 = 2.0 * recon_weight * (y1 - p1.x_raw) + pgrad * (
        y2 / (n1 * n2) - cos * y1 / (n1 * n1)
    )
    dy2 = 2.0 * recon_weight * (y2 - p2.x_raw) + pgrad * (
        y1 / (n1 * n2) - cos * y2 / (n2 * n2)
    )

    grad_w = [np.zeros_like(w) for w in net.weights]
    grad_b = [np.zeros_like(b) for b in net.biases]
    for acts, dy in ((acts1, dy1), (acts2, dy2)):
        delta_l = dy
        for l in range(net.n_layers - 1, -1, -1):
            grad_w[l] += np.outer(delta_l, acts[l])
            grad_b[l] += delta_l
            if l > 0:
                delta_l = (net.weights[l].T @ delta_l) * (1.0 - acts[l] ** 2)
    return grad_w, grad_b


@dataclass(frozen=True)
class TrainResult:
    net: "ReconNet"
    initial_loss: float
    final_loss: float
    epochs_run: int


def _eval_batch(pairs):
    """Fixed deterministic pair-of-pairs set used to track progress."""
    n = len(pairs)
    k = min(n, 8)
    batch = [(pairs[i], pairs[i]) for i in range(k)]
    if n > 1:
        batch += [(pairs[i], pairs[(i + 1) % n]) for i in range(k)]
    return batch


def _mean_loss(net, batch, **loss_kw):
    return sum(siamese_loss(net, p1, p2, **loss_kw) for p1, p2 in batch) / len(batch)


def train(
    pairs,
    epochs=100,
    lr=0.01,
    batch_size=8,
    seed=0,
    hidden=(),
    recon_weight=1.0,
    cos_weight=1.0,
    penalty="squared",
):
    """Mini-batch gradient descent on sampled pair-of-pairs.

    Each batch element is same-datum (p, p) with probability 1/2, else two
    distinct pairs, balancing the cosine targets 1 and 0. Returns the
    parameters of the best evaluation-batch epoch (the last one under
    normal descent), so the final loss never exceeds the initial loss.
    Raises DivergenceError naming the epoch if the loss goes non-finite.
    """
    if len(pairs) < 2:
        raise ValueError("need at least 2 embedding pairs to train")
    d = pairs[0].dim
    for p in pairs:
        if p.dim != d:
            raise ShapeError("embedding pairs have inconsistent dimensions")

    loss_kw = dict(
        recon_weight=recon_weight, cos_weight=cos_weight, penalty=penalty
    )
    net = ReconNet.initialize([d, *hidden, d], seed)
    rng = SplitMix64(seed ^ 0x5DEECE66D)
    eval_batch = _eval_batch(pairs)
    initial_loss = _mean_loss(net, eval_batch, **loss_kw)
    best_loss, best_net = initial_loss, net.copy()

    n = len(pairs)
    batches_per_epoch = max(1, n // batch_size)
    for epoch in range(epochs):
        for _ in range(batches_per_epoch):
            gw = [np.zeros_like(w) for w in net.weights]
            gb = [np.zeros_like(b) for b in net.biases]
            for _ in range(batch_size):
                if rng.uniform() < 0.5:
                    i = rng.index_below(n)
                    p1, p2 = pairs[i], pairs[i]
                else:
                    i = rng.index_below(n)
                    j = rng.index_below(n - 1)
                    if j >= i:
                        j += 1
                    p1, p2 = pairs[i], pairs[j]
                bw, bb = loss_gradient(net, p1, p2, **loss_kw)
                for l in range(net.n_layers):
                    gw[l] += bw[l]
                    gb[l] += bb[l]
            for l in range(net.n_layers):
                net.weights[l] -= lr * gw[l] / batch_size
                net.biases[l] -= lr * gb[l] / batch_size
        epoch_loss = _mean_loss(net, eval_batch, **loss_kw)
        if not math.isfinite(epoch_loss):
            raise DivergenceError(epoch)
        if epoch_loss < best_loss:
            best_loss, best_net = epoch_loss, net.copy()

    return TrainResult(
        net=best_net,
        initial_loss=float(initial_loss),
        final_loss=float(best_loss),
        epochs_run=epochs,
    )


def mean_reconstruction_error(net, pairs):
    """Mean ||F(x_anon) - x_raw||^2 over the pairs."""
    return float(
        np.mean([np.sum((forward(net, p.x_anon) - p.x_raw) ** 2) for p in pairs])
    )


def baseline_error(pairs):
    """Mean ||x_anon - x_raw||^2: the no-attack reference."""
    return float(np.mean([np.sum((p.x_anon - p.x_raw) ** 2) for p in pairs]))


def parse_pairs(stream, path=None):
    """Parse the pair file: '<datum_id> anon <floats>' / '<datum_id> raw <floats>'."""
    anon, raw = {}, {}
    order = []
    for lineno, line in enumerate(stream, start=1):
        stripped = line.strip()
        if not stripped or stripped.startswith("#"):
            continue
        fields = stripped.split()
        if len(fields) < 3:
            raise ParseError("expected '<id> anon|raw <floats>'", line=lineno, path=path)
        datum_id, kind = fields[0], fields[1]
        if kind not in ("anon", "raw"):
            raise ParseError(f"unknown row kind {kind!r}", line=lineno, path=path)
        try:
            vec = np.asarray([float(t) for t in fields[2:]], dtype=np.float64)
        except ValueError:
            raise ParseError("unparseable embedding entry", line=lineno, path=path)
        if not np.all(np.isfinite(vec)):
            raise ParseError("non-finite embedding entry", line=lineno, path=path)
        side = anon if kind == "anon" else raw
        if datum_id in side:
            raise DuplicateIdError(
                f"duplicate {kind} row for {datum_id!r}", line=lineno, path=path
            )
        side[datum_id] = vec
        if datum_id not in order:
            order.append(datum_id)
    pairs = []
    for datum_id in order:
        if datum_id not in anon or datum_id not in raw:
            raise ParseError(f"datum {datum_id!r} is missing its anon or raw row", path=path)
        pairs.append(EmbeddingPair(datum_id, anon[datum_id], raw[datum_id]))
    return pairs


def serialize_pairs(pairs):
    lines = []
    for p in pairs:
        anon = " ".join(repr(float(v)) for v in p.x_anon)
        raw = " ".join(repr(float(v)) for v in p.x_raw)
        lines.append(f"{p.datum_id} anon {anon}\n{p.datum_id} raw {raw}\n")
    return "".join(lines)


def save_net(net, path):
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(net.to_dict(), fh, indent=2)
        fh.write("\n")


def load_net(path):
    with open(path, encoding="utf-8") as fh:
        return ReconNet.from_dict(json.load(fh))
