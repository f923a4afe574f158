"""Dense float64 tensors with reverse-mode automatic differentiation.

Every operation records a backward closure onto the tensors it produces;
calling :func:`backward` on a scalar loss walks the graph in reverse
topological order and accumulates gradients additively into ``.grad``.
The op set is deliberately small: exactly what a recurrent/convolutional
text classifier needs, all in 64-bit precision so finite-difference
checks stay tight.
"""

from __future__ import annotations

import contextlib
from typing import Callable, Iterable, Sequence

import numpy as np

__all__ = [
    "Tensor",
    "Rng",
    "no_grad",
    "make_op",
    "hstack",
    "matmul",
    "add",
    "mul",
    "scale",
    "add_rowvec",
    "sigmoid",
    "tanh",
    "softmax",
    "safe_log",
    "sum_all",
    "reshape",
    "transpose",
    "concat",
    "stack_rows",
    "stack_flat",
    "row",
    "col",
    "gather_rows",
    "conv2d_valid",
    "im2col",
    "maxpool2d",
    "maxpool_columns",
    "backward",
    "grad_check",
]

_grad_enabled = True


@contextlib.contextmanager
def no_grad():
    """Disable graph recording inside the block (inference / finite differences)."""
    global _grad_enabled
    saved = _grad_enabled
    _grad_enabled = False
    try:
        yield
    finally:
        _grad_enabled = saved


class Tensor:
    """Shape + dense row-major float64 values + lazily allocated gradient."""

    __slots__ = ("data", "grad", "requires_grad", "_parents", "_backward")

    def __init__(self, data, requires_grad: bool = False):
        self.data = np.asarray(data, dtype=np.float64)
        self.grad: np.ndarray | None = None
        self.requires_grad = bool(requires_grad)
        self._parents: tuple[Tensor, ...] = ()
        self._backward: Callable[[np.ndarray], None] | None = None

    @property
    def shape(self) -> tuple[int, ...]:
        return self.data.shape

    def zero_grad(self) -> None:
        self.grad = None

    def accumulate_grad(self, g: np.ndarray) -> None:
        if self.grad is None:
            self.grad = np.array(g)  # copy: g may be shared with another consumer
        else:
            self.grad += g

    def backward(self) -> None:
        backward(self)

    def __repr__(self) -> str:
        return f"Tensor(shape={self.data.shape}, requires_grad={self.requires_grad})"


def _make(data: np.ndarray, parents: Sequence[Tensor], bwd: Callable[[np.ndarray], None]) -> Tensor:
    """Wrap an op result, recording the backward closure only when needed."""
    out = Tensor(data)
    if _grad_enabled and any(p.requires_grad for p in parents):
        out.requires_grad = True
        out._parents = tuple(parents)
        out._backward = bwd
    return out


def make_op(data, parents: Sequence[Tensor], backward_fn: Callable[[np.ndarray], None]) -> Tensor:
    """Extension hook for fused ops: wrap a forward result with its backward closure.

    ``backward_fn`` receives the output gradient and must call
    ``accumulate_grad`` on every parent that ``requires_grad``.
    """
    return _make(np.asarray(data, dtype=np.float64), parents, backward_fn)


def backward(loss: Tensor) -> None:
    """Reverse-accumulate d(loss)/d(tensor) into every participating ``.grad``.

    Gradients add across multiple uses of the same tensor. ``loss`` must be
    a scalar (shape ``()``) produced by a recorded computation.
    """
    if loss.data.shape != ():
        raise ValueError(f"backward requires a scalar loss, got shape {loss.data.shape}")
    # Iterative post-order traversal; the reversed order is topological.
    topo: list[Tensor] = []
    seen: set[int] = set()
    stack: list[tuple[Tensor, bool]] = [(loss, False)]
    while stack:
        node, expanded = stack.pop()
        if expanded:
            topo.append(node)
            continue
        if id(node) in seen:
            continue
        seen.add(id(node))
        stack.append((node, True))
        for parent in node._parents:
            if id(parent) not in seen:
                stack.append((parent, False))
    loss.accumulate_grad(np.ones_like(loss.data))
    for node in reversed(topo):
        if node._backward is not None and node.grad is not None:
            node._backward(node.grad)


# ---------------------------------------------------------------------------
# Core ops
# ---------------------------------------------------------------------------


def matmul(a: Tensor, b: Tensor) -> Tensor:
    """Matrix product; 1-D operands are treated as a row (a) / column (b) vector."""
    ad, bd = a.data, b.data
    if ad.ndim not in (1, 2) or bd.ndim not in (1, 2):
        raise ValueError(f"matmul expects 1-D or 2-D operands, got {ad.shape} @ {bd.shape}")
    ak = ad.shape[-1]
    bk = bd.shape[0]
    if ak != bk:
        raise ValueError(f"matmul inner extents differ: {ad.shape} @ {bd.shape}")
    out_data = ad @ bd

    if ad.ndim == 1 and bd.ndim == 2:

        def bwd(g: np.ndarray) -> None:
            if a.requires_grad:
                a.accumulate_grad(bd @ g)
            if b.requires_grad:
                b.accumulate_grad(np.outer(ad, g))

    elif ad.ndim == 2 and bd.ndim == 1:

        def bwd(g: np.ndarray) -> None:
            if a.requires_grad:
                a.accumulate_grad(np.outer(g, bd))
            if b.requires_grad:
                b.accumulate_grad(g @ ad)

    else:

        def bwd(g: np.ndarray) -> None:
            a2 = ad.reshape(1, -1) if ad.ndim == 1 else ad
            b2 = bd.reshape(-1, 1) if bd.ndim == 1 else bd
            g2 = g.reshape(a2.shape[0], b2.shape[1])
            if a.requires_grad:
                a.accumulate_grad((g2 @ b2.T).reshape(ad.shape))
            if b.requires_grad:
                b.accumulate_grad((a2.T @ g2).reshape(bd.shape))

    return _make(out_data, (a, b), bwd)


def add(a: Tensor, b: Tensor) -> Tensor:
    if a.data.shape != b.data.shape:
        raise ValueError(f"add shape mismatch: {a.data.shape} vs {b.data.shape}")
    out_data = a.data + b.data

    def bwd(g: np.ndarray) -> None:
        if a.requires_grad:
            a.accumulate_grad(g)
        if b.requires_grad:
            b.accumulate_grad(g)

    return _make(out_data, (a, b), bwd)


def mul(a: Tensor, b: Tensor) -> Tensor:
    """Element-wise product of equal-shape tensors."""
    if a.data.shape != b.data.shape:
        raise ValueError(f"mul shape mismatch: {a.data.shape} vs {b.data.shape}")
    out_data = a.data * b.data

    def bwd(g: np.ndarray) -> None:
        if a.requires_grad:
            a.accumulate_grad(g * b.data)
        if b.requires_grad:
            b.accumulate_grad(g * a.data)

    return _make(out_data, (a, b), bwd)


def scale(a: Tensor, c: float) -> Tensor:
    c = float(c)
    out_data = a.data * c

    def bwd(g: np.ndarray) -> None:
        if a.requires_grad:
            a.accumulate_grad(g * c)

    return _make(out_data, (a,), bwd)


def add_rowvec(a: Tensor, v: Tensor) -> Tensor:
    """Add a length-n vector to every row of an m-by-n matrix."""
    if a.data.ndim != 2 or v.data.ndim != 1 or a.data.shape[1] != v.data.shape[0]:
        raise ValueError(f"add_rowvec shape mismatch: {a.data.shape} vs {v.data.shape}")
    out_data = a.data + v.data

    def bwd(g: np.ndarray) -> None:
        if a.requires_grad:
            a.accumulate_grad(g)
        if v.requires_grad:
            v.accumulate_grad(g.sum(axis=0))

    return _make(out_data, (a, v), bwd)


def sigmoid(a: Tensor) -> Tensor:
    out_data = 1.0 / (1.0 + np.exp(-a.data))

    def bwd(g: np.ndarray) -> None:
        if a.requires_grad:
            a.accumulate_grad(g * out_data * (1.0 - out_data))

    return _make(out_data, (a,), bwd)


def tanh(a: Tensor) -> Tensor:
    out_data = np.tanh(a.data)

    def bwd(g: np.ndarray) -> None:
        if a.requires_grad:
            a.accumulate_grad(g * (1.0 - out_data * out_data))

    return _make(out_data, (a,), bwd)


def softmax(a: Tensor) -> Tensor:
    """Numerically stable softmax of a 1-D tensor (max subtraction)."""
    if a.data.ndim != 1 or a.data.shape[0] < 1:
        raise ValueError(f"softmax expects a non-empty 1-D tensor, got shape {a.data.shape}")
    if not np.all(np.isfinite(a.data)):
        raise ValueError("softmax input contains non-finite values")
    shifted = a.data - a.data.max()
    ex = np.exp(shifted)
    out_data = ex / ex.sum()

    def bwd(g: np.ndarray) -> None:
        if a.requires_grad:
            # Jacobian-vector product of diag(y) - y y^T
            a.accumulate_grad(out_data * (g - np.dot(g, out_data)))

    return _make(out_data, (a,), bwd)


def safe_log(a: Tensor, floor: float = 1e-12) -> Tensor:
    """Natural log with the argument clamped below at ``floor``."""
    clamped = np.maximum(a.data, floor)
    out_data = np.log(clamped)
    inside = a.data > floor

    def bwd(g: np.ndarray) -> None:
        if a.requires_grad:
            a.accumulate_grad(np.where(inside, g / clamped, 0.0))

    return _make(out_data, (a,), bwd)


def sum_all(a: Tensor) -> Tensor:
    out_data = np.asarray(a.data.sum())

    def bwd(g: np.ndarray) -> None:
        if a.requires_grad:
            a.accumulate_grad(np.full_like(a.data, float(g)))

    return _make(out_data, (a,), bwd)


def reshape(a: Tensor, shape: tuple[int, ...] | int) -> Tensor:
    out_data = a.data.reshape(shape)

    def bwd(g: np.ndarray) -> None:
        if a.requires_grad:
            a.accumulate_grad(g.reshape(a.data.shape))

    return _make(out_data, (a,), bwd)


def transpose(a: Tensor) -> Tensor:
    if a.data.ndim != 2:
        raise ValueError(f"transpose expects a 2-D tensor, got shape {a.data.shape}")
    out_data = a.data.T.copy()

    def bwd(g: np.ndarray) -> None:
        if a.requires_grad:
            a.accumulate_grad(g.T)

    return _make(out_data, (a,), bwd)


def concat(parts: Sequence[Tensor]) -> Tensor:
    """Concatenate 1-D tensors in order."""
    parts = list(parts)
    if not parts or any(p.data.ndim != 1 for p in parts):
        raise ValueError("concat expects a non-empty sequence of 1-D tensors")
    out_data = np.concatenate([p.data for p in parts])
    offsets = np.cumsum([0] + [p.data.shape[0] for p in parts])

    def bwd(g: np.ndarray) -> None:
        for i, p in enumerate(parts):
            if p.requires_grad:
                p.accumulate_grad(g[offsets[i]:offsets[i + 1]])

    return _make(out_data, parts, bwd)


def stack_rows(rows: Sequence[Tensor]) -> Tensor:
    """Stack equal-length 1-D tensors into a matrix, one per row."""
    rows = list(rows)
    if not rows or any(r.data.ndim != 1 for r in rows):
        raise ValueError("stack_rows expects a non-empty sequence of 1-D tensors")
    out_data = np.stack([r.data for r in rows])

    def bwd(g: np.ndarray) -> None:
        for i, r in enumerate(rows):
            if r.requires_grad:
                r.accumulate_grad(g[i])

    return _make(out_data, rows, bwd)


def stack_flat(parts: Sequence[Tensor]) -> Tensor:
    """Flatten equal-shape tensors and stack them into a matrix, one per row."""
    parts = list(parts)
    if not parts:
        raise ValueError("stack_flat expects a non-empty sequence")
    shape = parts[0].data.shape
    if any(p.data.shape != shape for p in parts):
        raise ValueError("stack_flat expects tensors of identical shape")
    out_data = np.stack([p.data.reshape(-1) for p in parts])

    def bwd(g: np.ndarray) -> None:
        for i, p in enumerate(parts):
            if p.requires_grad:
                p.accumulate_grad(g[i].reshape(shape))

    return _make(out_data, parts, bwd)


def hstack(parts: Sequence[Tensor]) -> Tensor:
    """Concatenate 2-D tensors column-wise."""
    parts = list(parts)
    if not parts or any(p.data.ndim != 2 for p in parts):
        raise ValueError("hstack expects a non-empty sequence of 2-D tensors")
    out_data = np.hstack([p.data for p in parts])
    offsets = np.cumsum([0] + [p.data.shape[1] for p in parts])

    def bwd(g: np.ndarray) -> None:
        for i, p in enumerate(parts):
            if p.requires_grad:
                p.accumulate_grad(g[:, offsets[i]:offsets[i + 1]])

    return _make(out_data, parts, bwd)


def row(a: Tensor, i: int) -> Tensor:
    if a.data.ndim != 2:
        raise ValueError(f"row expects a 2-D tensor, got shape {a.data.shape}")
    out_data = a.data[i].copy()

    def bwd(g: np.ndarray) -> None:
        if a.requires_grad:
            if a.grad is None:
                a.grad = np.zeros_like(a.data)
            a.grad[i] += g

    return _make(out_data, (a,), bwd)


def col(a: Tensor, j: int) -> Tensor:
    if a.data.ndim != 2:
        raise ValueError(f"col expects a 2-D tensor, got shape {a.data.shape}")
    out_data = a.data[:, j].copy()

    def bwd(g: np.ndarray) -> None:
        if a.requires_grad:
            if a.grad is None:
                a.grad = np.zeros_like(a.data)
            a.grad[:, j] += g

    return _make(out_data, (a,), bwd)


def gather_rows(a: Tensor, indices: np.ndarray) -> Tensor:
    """Select rows of a matrix by index; backward scatter-adds into those rows."""
    if a.data.ndim != 2:
        raise ValueError(f"gather_rows expects a 2-D tensor, got shape {a.data.shape}")
    idx = np.asarray(indices, dtype=np.int64)
    if idx.ndim != 1:
        raise ValueError("gather_rows expects a 1-D index array")
    if idx.size and (idx.min() < 0 or idx.max() >= a.data.shape[0]):
        raise IndexError(f"gather_rows index out of range for {a.data.shape[0]} rows")
    out_data = a.data[idx]

    def bwd(g: np.ndarray) -> None:
        if a.requires_grad:
            if a.grad is None:
                a.grad = np.zeros_like(a.data)
            np.add.at(a.grad, idx, g)

    return _make(out_data, (a,), bwd)


# ---------------------------------------------------------------------------
# Convolution and pooling
# ---------------------------------------------------------------------------

_NONLINEARITIES = ("tanh", "identity")


def conv2d_valid(x: Tensor, filt: Tensor, bias: Tensor, nonlinearity: str = "tanh") -> Tensor:
    """Narrow (valid, stride-1) 2-D correlation with scalar bias and nonlinearity.

    Output extent is ``(a-k+1, b-d+1)`` for an a-by-b input and k-by-d filter.
    """
    if nonlinearity not in _NONLINEARITIES:
        raise ValueError(f"unknown nonlinearity {nonlinearity!r}")
    if x.data.ndim != 2 or filt.data.ndim != 2:
        raise ValueError(f"conv2d_valid expects 2-D input/filter, got {x.data.shape} and {filt.data.shape}")
    if bias.data.shape != ():
        raise ValueError(f"conv2d_valid bias must be scalar, got shape {bias.data.shape}")
    a, b = x.data.shape
    k, d = filt.data.shape
    if k > a or d > b:
        raise ValueError(f"filter {filt.data.shape} larger than input {x.data.shape}")
    windows = np.lib.stride_tricks.sliding_window_view(x.data, (k, d))
    pre = np.einsum("ijuv,uv->ij", windows, filt.data) + float(bias.data)
    out_data = np.tanh(pre) if nonlinearity == "tanh" else pre

    def bwd(g: np.ndarray) -> None:
        dpre = g * (1.0 - out_data * out_data) if nonlinearity == "tanh" else g
        if filt.requires_grad:
            filt.accumulate_grad(np.einsum("ijuv,ij->uv", windows, dpre))
        if bias.requires_grad:
            bias.accumulate_grad(np.asarray(dpre.sum()))
        if x.requires_grad:
            padded = np.pad(dpre, ((k - 1, k - 1), (d - 1, d - 1)))
            pw = np.lib.stride_tricks.sliding_window_view(padded, (k, d))
            x.accumulate_grad(np.einsum("ijuv,uv->ij", pw, filt.data[::-1, ::-1]))

    return _make(out_data, (x, filt, bias), bwd)


def _window_indices(a: int, b: int, k: int, d: int) -> np.ndarray:
    """Flat indices of each valid k-by-d window, one window per row."""
    base = np.lib.stride_tricks.sliding_window_view(np.arange(a * b).reshape(a, b), (k, d))
    return base.reshape(-1, k * d)


def im2col(x: Tensor, k: int, d: int) -> Tensor:
    """Unfold valid k-by-d windows of a matrix into rows of a patch matrix."""
    if x.data.ndim != 2:
        raise ValueError(f"im2col expects a 2-D tensor, got shape {x.data.shape}")
    a, b = x.data.shape
    if k > a or d > b:
        raise ValueError(f"window ({k}, {d}) larger than input {x.data.shape}")
    idx = _window_indices(a, b, k, d)
    out_data = x.data.reshape(-1)[idx]

    def bwd(g: np.ndarray) -> None:
        if x.requires_grad:
            if x.grad is None:
                x.grad = np.zeros_like(x.data)
            np.add.at(x.grad.reshape(-1), idx, g)

    return _make(out_data, (x,), bwd)


def maxpool2d(x: Tensor, window: tuple[int, int]) -> Tensor:
    """Non-overlapping 2-D max pooling; trailing remainder rows/columns dropped.

    Backward routes each window's gradient to the first (row-major) argmax.
    """
    p1, p2 = int(window[0]), int(window[1])
    if x.data.ndim != 2:
        raise ValueError(f"maxpool2d expects a 2-D tensor, got shape {x.data.shape}")
    a, b = x.data.shape
    if p1 > a or p2 > b:
        raise ValueError(f"pool window {window} larger than input {x.data.shape}")
    if p1 < 1 or p2 < 1:
        raise ValueError(f"pool window must be positive, got {window}")
    oh, ow = a // p1, b // p2
    cropped = x.data[: oh * p1, : ow * p2]
    tiles = cropped.reshape(oh, p1, ow, p2).transpose(0, 2, 1, 3).reshape(oh, ow, p1 * p2)
    flat_arg = tiles.argmax(axis=2)  # first occurrence on ties
    out_data = np.take_along_axis(tiles, flat_arg[..., None], axis=2)[..., 0]

    def bwd(g: np.ndarray) -> None:
        if x.requires_grad:
            if x.grad is None:
                x.grad = np.zeros_like(x.data)
            ii, jj = _pool_grids(oh, ow)
            rows_ = ii * p1 + flat_arg // p2
            cols_ = jj * p2 + flat_arg % p2
            # windows are disjoint, so each target index appears exactly once
            x.grad[rows_.reshape(-1), cols_.reshape(-1)] += g.reshape(-1)

    return _make(out_data, (x,), bwd)


_POOL_GRID_CACHE: dict[tuple[int, int], tuple[np.ndarray, np.ndarray]] = {}


def _pool_grids(oh: int, ow: int) -> tuple[np.ndarray, np.ndarray]:
    key = (oh, ow)
    grids = _POOL_GRID_CACHE.get(key)
    if grids is None:
        grids = np.meshgrid(np.arange(oh), np.arange(ow), indexing="ij")
        _POOL_GRID_CACHE[key] = (grids[0], grids[1])
    return _POOL_GRID_CACHE[key]


def maxpool_columns(x: Tensor, grid: tuple[int, int], window: tuple[int, int]) -> Tensor:
    """Pool every column of a (gh*gw)-by-F matrix as its own gh-by-gw map.

    Returns the F flattened pooled maps concatenated in column order; values
    and gradients are exactly those of per-column :func:`maxpool2d` followed
    by flatten and concat, computed in one pass.
    """
    gh, gw = int(grid[0]), int(grid[1])
    p1, p2 = int(window[0]), int(window[1])
    if x.data.ndim != 2 or x.data.shape[0] != gh * gw:
        raise ValueError(f"maxpool_columns expects ({gh * gw}, F) input, got shape {x.data.shape}")
    if p1 > gh or p2 > gw:
        raise ValueError(f"pool window {window} larger than map shape {(gh, gw)}")
    n_filters = x.data.shape[1]
    oh, ow = gh // p1, gw // p2
    vol = x.data.reshape(gh, gw, n_filters)[: oh * p1, : ow * p2, :]
    tiles = vol.reshape(oh, p1, ow, p2, n_filters).transpose(0, 2, 4, 1, 3).reshape(oh, ow, n_filters, p1 * p2)
    arg = tiles.argmax(axis=3)  # first occurrence on ties, row-major window order
    pooled = np.take_along_axis(tiles, arg[..., None], axis=3)[..., 0]
    out_data = pooled.transpose(2, 0, 1).reshape(-1)

    def bwd(g: np.ndarray) -> None:
        if x.requires_grad:
            if x.grad is None:
                x.grad = np.zeros_like(x.data)
            gg = g.reshape(n_filters, oh, ow).transpose(1, 2, 0)
            base, offset_lut = _pool_scatter_tables(oh, ow, gw, p1, p2)
            rows_ = base[:, :, None] + offset_lut[arg]
            cols_ = np.broadcast_to(np.arange(n_filters), arg.shape)
            x.grad[rows_.reshape(-1), cols_.reshape(-1)] += gg.reshape(-1)

    return _make(out_data, (x,), bwd)


_POOL_SCATTER_CACHE: dict[tuple[int, int, int, int, int], tuple[np.ndarray, np.ndarray]] = {}


def _pool_scatter_tables(oh: int, ow: int, gw: int, p1: int, p2: int) -> tuple[np.ndarray, np.ndarray]:
    """Static parts of the pooled-gradient scatter: window origins and in-window offsets."""
    key = (oh, ow, gw, p1, p2)
    tables = _POOL_SCATTER_CACHE.get(key)
    if tables is None:
        ii, jj = _pool_grids(oh, ow)
        base = ii * p1 * gw + jj * p2
        offsets = np.arange(p1 * p2)
        offset_lut = (offsets // p2) * gw + offsets % p2
        tables = (base, offset_lut)
        _POOL_SCATTER_CACHE[key] = tables
    return tables


# ---------------------------------------------------------------------------
# Gradient checking
# ---------------------------------------------------------------------------


def grad_check(f: Callable[[], Tensor], params: Iterable[Tensor], eps: float = 1e-5) -> float:
    """Max relative error between analytic gradients of ``f()`` and central differences.

    Relative error per element is |analytic - numeric| / max(|analytic|, |numeric|, 1e-12).
    ``f`` must rebuild its graph on every call from the current parameter values.
    """
    if not 1e-7 <= eps <= 1e-3:
        raise ValueError(f"eps must lie in [1e-7, 1e-3], got {eps}")
    params = list(params)
    for p in params:
        p.zero_grad()
    out = f()
    if out.data.shape != ():
        raise ValueError("grad_check requires a scalar-valued function")
    if not np.isfinite(out.data):
        raise ValueError("grad_check: non-finite function value")
    backward(out)
    analytic = [np.array(p.grad) if p.grad is not None else np.zeros_like(p.data) for p in params]

    max_err = 0.0
    with no_grad():
        for p, ana in zip(params, analytic):
            flat = p.data.reshape(-1)
            ana_flat = ana.reshape(-1)
            for i in range(flat.size):
                orig = flat[i]
                flat[i] = orig + eps
                f_plus = float(f().data)
                flat[i] = orig - eps
                f_minus = float(f().data)
                flat[i] = orig
                if not (np.isfinite(f_plus) and np.isfinite(f_minus)):
                    raise ValueError("grad_check: non-finite intermediate value")
                numeric = (f_plus - f_minus) / (2.0 * eps)
                denom = max(abs(ana_flat[i]), abs(numeric), 1e-12)
                max_err = max(max_err, abs(ana_flat[i] - numeric) / denom)
    for p in params:
        p.zero_grad()
    return max_err


# ---------------------------------------------------------------------------
# Seeded randomness
# ---------------------------------------------------------------------------


class Rng:
    """Seeded PCG64 stream; the same seed yields the same draws on every platform.

    All stochastic behavior in the package (initialization, shuffling, dropout
    masks, additive noise) flows through one of these, so a run is a pure
    function of its configuration and seed.
    """

    def __init__(self, seed: int):
        self.seed = int(seed)
        self._gen = np.random.Generator(np.random.PCG64(self.seed))

    def random(self, shape) -> np.ndarray:
        return self._gen.random(size=shape)

    def uniform(self, low: float, high: float, shape) -> np.ndarray:
        return self._gen.uniform(low, high, size=shape)

    def normal(self, sigma: float, shape) -> np.ndarray:
        return self._gen.normal(0.0, sigma, size=shape)

    def permutation(self, n: int) -> np.ndarray:
        return self._gen.permutation(n)

    def integers(self, low: int, high: int, size=None):
        return self._gen.integers(low, high, size=size)
