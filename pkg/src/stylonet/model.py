"""The classifier network: subword embedding -> BLSTM -> 2D conv -> 2D max
pooling -> regularized softmax head.

Forward passes are built from :mod:`stylonet.tensor` ops so every parameter
gets an exact reverse-mode gradient. The stochastic layers (inverted dropout,
additive Gaussian noise) are active only in training mode; inference is a
deterministic pure function of (params, ids).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import Iterator, Sequence

import numpy as np

from . import tensor as T
from .bpe import PAD_ID
from .tensor import Rng, Tensor

COMBINE_MODES = ("sum", "concat")


class ModelConfigError(ValueError):
    """Raised when a configuration violates the architecture's shape algebra."""


class ShapeAuditError(ValueError):
    """Raised when a parameter tensor does not match its configured shape."""


@dataclass(frozen=True)
class ModelConfig:
    vocab_size: int
    n_authors: int
    embed_dim: int = 64
    hidden_units: int = 64
    conv_filters: int = 128
    filter_shape: tuple[int, int] = (3, 3)
    pool_shape: tuple[int, int] = (2, 2)
    max_seq_len: int = 64
    dropout_embed: float = 0.5
    dropout_blstm: float = 0.3
    dropout_penult: float = 0.2
    noise_sigma: float = 0.2
    noise_anneal_gamma: float = 0.0
    combine: str = "sum"

    def validate(self) -> None:
        k, d = self.filter_shape
        p1, p2 = self.pool_shape
        for name in ("vocab_size", "n_authors", "embed_dim", "hidden_units", "conv_filters", "max_seq_len"):
            if getattr(self, name) < 1:
                raise ModelConfigError(f"{name} must be >= 1, got {getattr(self, name)}")
        if self.vocab_size < 3:
            raise ModelConfigError("vocab_size must cover pad, unk and at least one token")
        if k < 1 or d < 1 or p1 < 1 or p2 < 1:
            raise ModelConfigError(f"filter/pool extents must be >= 1, got {self.filter_shape}, {self.pool_shape}")
        if k > self.max_seq_len:
            raise ModelConfigError(f"filter height {k} exceeds sequence length {self.max_seq_len}")
        if d > self.hidden_units:
            raise ModelConfigError(f"filter width {d} exceeds feature width {self.hidden_units}")
        ch, cw = self.conv_output_shape
        if p1 > ch or p2 > cw:
            raise ModelConfigError(f"pool window {self.pool_shape} exceeds feature map shape {(ch, cw)}")
        for name in ("dropout_embed", "dropout_blstm", "dropout_penult"):
            rate = getattr(self, name)
            if not 0.0 <= rate < 1.0:
                raise ModelConfigError(f"{name} must lie in [0, 1), got {rate}")
        if self.noise_sigma < 0:
            raise ModelConfigError(f"noise_sigma must be >= 0, got {self.noise_sigma}")
        if self.combine not in COMBINE_MODES:
            raise ModelConfigError(f"combine must be one of {COMBINE_MODES}, got {self.combine!r}")

    @property
    def conv_output_shape(self) -> tuple[int, int]:
        """Feature-map extent of one valid k-by-d filter over the l-by-h context matrix."""
        k, d = self.filter_shape
        return (self.max_seq_len - k + 1, self.hidden_units - d + 1)

    @property
    def pooled_shape(self) -> tuple[int, int]:
        ch, cw = self.conv_output_shape
        return (ch // self.pool_shape[0], cw // self.pool_shape[1])

    @property
    def feature_len(self) -> int:
        """Length of the pooled stylometric vector fed to the classifier."""
        ph, pw = self.pooled_shape
        return self.conv_filters * ph * pw


@dataclass
class LstmDirParams:
    """Weights and biases of one scan direction (input/hidden per gate)."""

    w_xf: Tensor
    w_hf: Tensor
    b_f: Tensor
    w_xi: Tensor
    w_hi: Tensor
    b_i: Tensor
    w_xo: Tensor
    w_ho: Tensor
    b_o: Tensor
    w_xc: Tensor
    w_hc: Tensor
    b_c: Tensor


@dataclass
class ModelParams:
    """Every trainable tensor, shapes fixed by a :class:`ModelConfig`.

    Row 0 of ``embedding`` is the padding row: initialized to zero and kept
    out of optimizer updates.
    """

    embedding: Tensor
    forward_lstm: LstmDirParams
    backward_lstm: LstmDirParams
    w_combine: Tensor
    b_combine: Tensor
    conv_filters: list[Tensor]
    conv_biases: list[Tensor]
    w_classifier: Tensor
    b_classifier: Tensor

    def named_tensors(self) -> Iterator[tuple[str, Tensor]]:
        """Canonical (name, tensor) order shared by init, optimizer and checkpoints."""
        yield "embedding", self.embedding
        for prefix, direction in (("forward_lstm", self.forward_lstm), ("backward_lstm", self.backward_lstm)):
            for gate_name in ("w_xf", "w_hf", "b_f", "w_xi", "w_hi", "b_i", "w_xo", "w_ho", "b_o", "w_xc", "w_hc", "b_c"):
                yield f"{prefix}.{gate_name}", getattr(direction, gate_name)
        yield "w_combine", self.w_combine
        yield "b_combine", self.b_combine
        for i, f in enumerate(self.conv_filters):
            yield f"conv_filters.{i}", f
        for i, b in enumerate(self.conv_biases):
            yield f"conv_biases.{i}", b
        yield "w_classifier", self.w_classifier
        yield "b_classifier", self.b_classifier

    def weight_tensors(self) -> Iterator[tuple[str, Tensor]]:
        """Weights only: the default L2 scope (biases excluded)."""
        for name, t in self.named_tensors():
            if name.split(".")[-1].startswith("b_") or name.startswith("conv_biases"):
                continue
            yield name, t

    def zero_grads(self) -> None:
        for _, t in self.named_tensors():
            t.zero_grad()


def expected_shapes(config: ModelConfig) -> dict[str, tuple[int, ...]]:
    n, dim, h, m = config.vocab_size, config.embed_dim, config.hidden_units, config.n_authors
    k, d = config.filter_shape
    combine_rows = h if config.combine == "sum" else 2 * h
    shapes: dict[str, tuple[int, ...]] = {"embedding": (n, dim)}
    for prefix in ("forward_lstm", "backward_lstm"):
        for gate in "fioc":
            shapes[f"{prefix}.w_x{gate}"] = (dim, h)
            shapes[f"{prefix}.w_h{gate}"] = (h, h)
            shapes[f"{prefix}.b_{gate}"] = (h,)
    shapes["w_combine"] = (combine_rows, h)
    shapes["b_combine"] = (h,)
    for i in range(config.conv_filters):
        shapes[f"conv_filters.{i}"] = (k, d)
        shapes[f"conv_biases.{i}"] = ()
    shapes["w_classifier"] = (config.feature_len, m)
    shapes["b_classifier"] = (m,)
    return shapes


def validate_params(params: ModelParams, config: ModelConfig) -> None:
    """Audit every parameter shape against the config before any forward pass."""
    expected = expected_shapes(config)
    actual = dict(params.named_tensors())
    for name, shape in expected.items():
        if name not in actual:
            raise ShapeAuditError(f"missing parameter tensor {name!r}")
        if actual[name].data.shape != shape:
            raise ShapeAuditError(f"parameter {name!r} has shape {actual[name].data.shape}, expected {shape}")
    extra = set(actual) - set(expected)
    if extra:
        raise ShapeAuditError(f"unexpected parameter tensors: {sorted(extra)}")


def init_params(config: ModelConfig, rng: Rng) -> ModelParams:
    """Glorot-uniform weights, zero biases, zero pad-embedding row; seed-deterministic."""
    config.validate()
    tensors: dict[str, Tensor] = {}
    for name, shape in expected_shapes(config).items():
        leaf = name.split(".")[-1]
        if leaf.startswith("b_") or name.startswith("conv_biases"):
            data = np.zeros(shape)
        else:
            fan_in, fan_out = (shape[0], shape[1]) if len(shape) == 2 else (shape[0], 1)
            bound = math.sqrt(6.0 / (fan_in + fan_out))
            data = rng.uniform(-bound, bound, shape)
        tensors[name] = Tensor(data, requires_grad=True)
    tensors["embedding"].data[PAD_ID, :] = 0.0

    def direction(prefix: str) -> LstmDirParams:
        return LstmDirParams(**{k: tensors[f"{prefix}.{k}"] for k in (
            "w_xf", "w_hf", "b_f", "w_xi", "w_hi", "b_i", "w_xo", "w_ho", "b_o", "w_xc", "w_hc", "b_c")})

    return ModelParams(
        embedding=tensors["embedding"],
        forward_lstm=direction("forward_lstm"),
        backward_lstm=direction("backward_lstm"),
        w_combine=tensors["w_combine"],
        b_combine=tensors["b_combine"],
        conv_filters=[tensors[f"conv_filters.{i}"] for i in range(config.conv_filters)],
        conv_biases=[tensors[f"conv_biases.{i}"] for i in range(config.conv_filters)],
        w_classifier=tensors["w_classifier"],
        b_classifier=tensors["b_classifier"],
    )


# ---------------------------------------------------------------------------
# Forward stages
# ---------------------------------------------------------------------------


def pad_or_truncate(ids: Sequence[int], length: int) -> np.ndarray:
    idx = np.full(length, PAD_ID, dtype=np.int64)
    take = min(len(ids), length)
    idx[:take] = np.asarray(ids[:take], dtype=np.int64)
    return idx


def embed_sequence(params: ModelParams, ids: Sequence[int], length: int) -> Tensor:
    """Rows of the embedding matrix for each token id, padded/truncated to ``length``."""
    n = params.embedding.data.shape[0]
    arr = np.asarray(ids, dtype=np.int64)
    if arr.size and (arr.min() < 0 or arr.max() >= n):
        raise IndexError(f"token id out of range [0, {n})")
    return T.gather_rows(params.embedding, pad_or_truncate(list(ids), length))


def lstm_cell_step(dir_params: LstmDirParams, x_t: Tensor, h_prev: Tensor, c_prev: Tensor) -> tuple[Tensor, Tensor]:
    """One gated recurrence step; returns (hidden, cell) for this position."""
    p = dir_params
    f_t = T.sigmoid(T.add(T.add(T.matmul(x_t, p.w_xf), T.matmul(h_prev, p.w_hf)), p.b_f))
    i_t = T.sigmoid(T.add(T.add(T.matmul(x_t, p.w_xi), T.matmul(h_prev, p.w_hi)), p.b_i))
    o_t = T.sigmoid(T.add(T.add(T.matmul(x_t, p.w_xo), T.matmul(h_prev, p.w_ho)), p.b_o))
    c_hat = T.tanh(T.add(T.add(T.matmul(x_t, p.w_xc), T.matmul(h_prev, p.w_hc)), p.b_c))
    c_t = T.add(T.mul(f_t, c_prev), T.mul(i_t, c_hat))
    h_t = T.mul(o_t, T.tanh(c_t))
    return h_t, c_t


def _scan_direction(p: LstmDirParams, embedded: Tensor, reverse: bool) -> Tensor:
    """All hidden states of one direction as an l-by-h matrix (rows by time step).

    The input projections of every step are batched into four matrix products
    up front; the sequential recurrence runs as one fused op whose backward is
    a hand-written pass through time. Step semantics match
    :func:`lstm_cell_step` exactly (zero initial state).
    """
    length = embedded.data.shape[0]
    h = p.w_hf.data.shape[0]
    xp_f = T.add_rowvec(T.matmul(embedded, p.w_xf), p.b_f)
    xp_i = T.add_rowvec(T.matmul(embedded, p.w_xi), p.b_i)
    xp_o = T.add_rowvec(T.matmul(embedded, p.w_xo), p.b_o)
    xp_c = T.add_rowvec(T.matmul(embedded, p.w_xc), p.b_c)

    w_all = np.hstack([p.w_hf.data, p.w_hi.data, p.w_ho.data, p.w_hc.data])  # (h, 4h)
    x_all = np.hstack([xp_f.data, xp_i.data, xp_o.data, xp_c.data])          # (l, 4h)
    steps = range(length - 1, -1, -1) if reverse else range(length)

    # caches for the backward pass, one row per step
    gates = np.empty((length, 4 * h))   # sigmoid(f), sigmoid(i), sigmoid(o), tanh(c-hat)
    tanh_cells = np.empty((length, h))
    h_prevs = np.empty((length, h))
    c_prevs = np.empty((length, h))
    hidden = np.empty((length, h))

    h_t = np.zeros(h)
    c_t = np.zeros(h)
    for t in steps:
        h_prevs[t] = h_t
        c_prevs[t] = c_t
        pre = x_all[t] + h_t @ w_all
        sig = 1.0 / (1.0 + np.exp(-pre[: 3 * h]))
        c_hat = np.tanh(pre[3 * h:])
        c_t = sig[:h] * c_t + sig[h:2 * h] * c_hat
        tc = np.tanh(c_t)
        h_t = sig[2 * h:] * tc
        gates[t, : 3 * h] = sig
        gates[t, 3 * h:] = c_hat
        tanh_cells[t] = tc
        hidden[t] = h_t

    parents = (xp_f, xp_i, xp_o, xp_c, p.w_hf, p.w_hi, p.w_ho, p.w_hc)

    def bwd(g: np.ndarray) -> None:
        d_x_all = np.zeros((length, 4 * h))
        dh_next = np.zeros(h)
        dc_next = np.zeros(h)
        for t in reversed(list(steps)):
            f_t = gates[t, :h]
            i_t = gates[t, h:2 * h]
            o_t = gates[t, 2 * h:3 * h]
            c_hat = gates[t, 3 * h:]
            tc = tanh_cells[t]
            dh = g[t] + dh_next
            dc = dc_next + dh * o_t * (1.0 - tc * tc)
            dpre = np.empty(4 * h)
            dpre[:h] = dc * c_prevs[t] * f_t * (1.0 - f_t)
            dpre[h:2 * h] = dc * c_hat * i_t * (1.0 - i_t)
            dpre[2 * h:3 * h] = dh * tc * o_t * (1.0 - o_t)
            dpre[3 * h:] = dc * i_t * (1.0 - c_hat * c_hat)
            d_x_all[t] = dpre
            dh_next = w_all @ dpre
            dc_next = dc * f_t
        d_w_all = h_prevs.T @ d_x_all  # sum of outer(h_prev_t, dpre_t) over steps
        for k, xp in enumerate((xp_f, xp_i, xp_o, xp_c)):
            if xp.requires_grad:
                xp.accumulate_grad(d_x_all[:, k * h:(k + 1) * h])
        for k, w in enumerate((p.w_hf, p.w_hi, p.w_ho, p.w_hc)):
            if w.requires_grad:
                w.accumulate_grad(d_w_all[:, k * h:(k + 1) * h])

    return T.make_op(hidden, parents, bwd)


def blstm_forward(params: ModelParams, embedded: Tensor) -> Tensor:
    """Context matrix H: two opposite scans combined per step, then projected.

    The combine mode is inferred from the projection's shape: ``h`` rows mean
    element-wise sum of the two directions, ``2h`` rows mean concatenation.
    """
    fwd = _scan_direction(params.forward_lstm, embedded, reverse=False)
    bwd = _scan_direction(params.backward_lstm, embedded, reverse=True)
    h_width = params.forward_lstm.w_hf.data.shape[0]
    if params.w_combine.data.shape[0] == h_width:
        combined = T.add(fwd, bwd)
    else:
        combined = T.hstack([fwd, bwd])
    return T.add_rowvec(T.matmul(combined, params.w_combine), params.b_combine)


def _conv_activations(params: ModelParams, context: Tensor) -> tuple[Tensor, int, int]:
    """tanh conv pre-pooling activations, one column per filter, plus the map extent.

    All filters share the unfolded window matrix so the conv reduces to one
    matrix product; column f equals conv2d_valid(H, filter_f, bias_f, tanh).
    """
    k, d = params.conv_filters[0].data.shape
    out_h = context.data.shape[0] - k + 1
    out_w = context.data.shape[1] - d + 1
    cols = T.im2col(context, k, d)
    filter_bank = T.transpose(T.stack_flat(params.conv_filters))
    bias_vec = T.reshape(T.stack_flat(params.conv_biases), len(params.conv_biases))
    activated = T.tanh(T.add_rowvec(T.matmul(cols, filter_bank), bias_vec))
    return activated, out_h, out_w


def feature_map(params: ModelParams, context: Tensor) -> list[Tensor]:
    """One tanh feature map per filter, each the valid 2-D correlation over H."""
    activated, out_h, out_w = _conv_activations(params, context)
    return [T.reshape(T.col(activated, j), (out_h, out_w)) for j in range(len(params.conv_filters))]


def pool_features(maps: Sequence[Tensor], pool: tuple[int, int]) -> Tensor:
    """Max-pool each map and concatenate the flattened results in filter order."""
    pooled = [T.reshape(T.maxpool2d(m, pool), -1) for m in maps]
    return T.concat(pooled)


def apply_dropout(x: Tensor, rate: float, rng: Rng, training: bool) -> Tensor:
    """Inverted dropout: zero with probability ``rate``, scale survivors by 1/(1-rate)."""
    if not 0.0 <= rate < 1.0:
        raise ValueError(f"dropout rate must lie in [0, 1), got {rate}")
    if not training or rate == 0.0:
        return x
    mask = (rng.random(x.data.shape) >= rate) / (1.0 - rate)
    return T.mul(x, Tensor(mask))


def apply_gaussian_noise(x: Tensor, sigma: float, rng: Rng, training: bool) -> Tensor:
    """Additive zero-mean noise of the given std at training time; identity otherwise."""
    if sigma < 0:
        raise ValueError(f"noise sigma must be >= 0, got {sigma}")
    if not training or sigma == 0.0:
        return x
    return T.add(x, Tensor(rng.normal(sigma, x.data.shape)))


def annealed_sigma(sigma0: float, gamma: float, epoch: int) -> float:
    """Noise schedule sigma0 / (1 + epoch)^gamma; gamma = 0 keeps it constant."""
    return sigma0 / (1.0 + epoch) ** gamma


def classify(
    params: ModelParams,
    config: ModelConfig,
    h_star: Tensor,
    training: bool,
    rng: Rng,
    sigma_epoch: float = 0.0,
) -> Tensor:
    """Author probabilities from the pooled feature vector.

    In training mode the penultimate dropout and Gaussian noise are applied
    before the affine projection; the softmax output always sums to 1.
    """
    if h_star.data.shape != (params.w_classifier.data.shape[0],):
        raise ValueError(
            f"feature vector shape {h_star.data.shape} does not match classifier input {params.w_classifier.data.shape[0]}")
    x = apply_dropout(h_star, config.dropout_penult, rng, training)
    x = apply_gaussian_noise(x, sigma_epoch if training else 0.0, rng, training)
    logits = T.add(T.matmul(x, params.w_classifier), params.b_classifier)
    return T.softmax(logits)


def predict_author_index(probs: Tensor) -> int:
    """Argmax class index; exact ties resolve to the lowest index."""
    return int(np.argmax(probs.data))


def forward_full(
    params: ModelParams,
    config: ModelConfig,
    ids: Sequence[int],
    training: bool,
    rng: Rng,
    epoch: int = 0,
) -> Tensor:
    """The full per-document path: embed, BLSTM, conv, pool, classify."""
    validate_params(params, config)
    emb = embed_sequence(params, ids, config.max_seq_len)
    emb = apply_dropout(emb, config.dropout_embed, rng, training)
    context = blstm_forward(params, emb)
    context = apply_dropout(context, config.dropout_blstm, rng, training)
    # fused conv+pool: bitwise-identical to feature_map -> pool_features
    activated, out_h, out_w = _conv_activations(params, context)
    h_star = T.maxpool_columns(activated, (out_h, out_w), config.pool_shape)
    sigma = annealed_sigma(config.noise_sigma, config.noise_anneal_gamma, epoch)
    return classify(params, config, h_star, training, rng, sigma)


def config_with_dims(config: ModelConfig, vocab_size: int, n_authors: int) -> ModelConfig:
    """Fill the data-derived dimensions into an architecture config."""
    return replace(config, vocab_size=vocab_size, n_authors=n_authors)
