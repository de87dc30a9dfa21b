"""Layer kinds of the network engine.

Every layer works on a leading batch axis. Shapes passed to ``build`` exclude
the batch axis. ``forward`` returns ``(output, cache)``; ``backward`` takes
the cache back and returns ``(input_gradient, parameter_gradients)``.
"""

from abc import ABC, abstractmethod
from dataclasses import dataclass, field
from typing import Any, ClassVar, Dict, Iterator, List, Optional, Sequence, Tuple, Type

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view

from ..errors import ConfigError, DimensionError

Shape = Tuple[int, ...]

BN_MOMENTUM = 0.9
BN_EPSILON = 1e-5


@dataclass
class LayerSpec:
    """Kind plus kind-specific parameters; JSON-serializable."""
    kind: str
    params: Dict[str, Any] = field(default_factory=dict)

    def to_dict(self) -> Dict[str, Any]:
        params = dict(self.params)
        if self.kind == "parallel":
            params["branches"] = [[s.to_dict() for s in branch] for branch in params["branches"]]
        return {"kind": self.kind, "params": params}

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "LayerSpec":
        params = dict(data.get("params", {}))
        if data["kind"] == "parallel":
            params["branches"] = [[cls.from_dict(s) for s in branch] for branch in params["branches"]]
        return cls(kind=data["kind"], params=params)


class Layer(ABC):
    """Base class: parameters, optional running state, frozen flag."""

    kind: ClassVar[str] = ""
    has_params: ClassVar[bool] = False

    def __init__(self, spec: LayerSpec):
        self.spec = spec
        self.params: Dict[str, np.ndarray] = {}
        self.state: Dict[str, np.ndarray] = {}
        self.frozen = False
        self.l2 = float(spec.params.get("l2", 0.0))
        self.input_shape: Optional[Shape] = None
        self.output_shape: Optional[Shape] = None

    def build(self, input_shape: Shape, rng: np.random.Generator, init: str = "he_uniform") -> Shape:
        self.input_shape = tuple(int(d) for d in input_shape)
        self.output_shape = self._build(self.input_shape, rng, init)
        return self.output_shape

    @abstractmethod
    def _build(self, input_shape: Shape, rng: np.random.Generator, init: str) -> Shape:
        ...

    @abstractmethod
    def forward(self, x: np.ndarray, train: bool, rng: Optional[np.random.Generator]) -> Tuple[np.ndarray, Any]:
        ...

    @abstractmethod
    def backward(self, dy: np.ndarray, cache: Any) -> Tuple[np.ndarray, Dict[str, np.ndarray]]:
        ...

    def check_input(self, x: np.ndarray) -> None:
        if tuple(x.shape[1:]) != self.input_shape:
            raise DimensionError(
                f"{self.kind} expects input shape (batch, {', '.join(map(str, self.input_shape))}), "
                f"got {tuple(x.shape)}"
            )

    def set_frozen(self, frozen: bool) -> None:
        self.frozen = frozen

    def named_parameters(self, prefix: str) -> Iterator[Tuple[str, np.ndarray, "Layer"]]:
        for name, value in self.params.items():
            yield f"{prefix}{name}", value, self

    def named_state(self, prefix: str) -> Iterator[Tuple[str, np.ndarray]]:
        for name, value in self.state.items():
            yield f"{prefix}{name}", value

    def decay_keys(self) -> Sequence[str]:
        """Parameters that receive the layer's L2 term (kernels only)."""
        return ("W",) if self.l2 > 0 and "W" in self.params else ()

    def decay_rates(self) -> Dict[str, float]:
        return {k: self.l2 for k in self.decay_keys()}

    def parameter_count(self) -> int:
        return int(sum(p.size for p in self.params.values()))


def _init_weights(shape: Shape, fan_in: int, rng: np.random.Generator, init: str) -> np.ndarray:
    if init == "zeros":
        return np.zeros(shape, dtype=np.float64)
    if init != "he_uniform":
        raise ConfigError(f"Unknown initializer '{init}'")
    limit = np.sqrt(6.0 / max(fan_in, 1))
    return rng.uniform(-limit, limit, size=shape).astype(np.float64)


def _positive(spec: LayerSpec, key: str) -> int:
    value = spec.params.get(key)
    if value is None or int(value) <= 0:
        raise ConfigError(f"{spec.kind} parameter '{key}' must be a positive integer, got {value}")
    return int(value)


def _pair(value: Any) -> Tuple[int, int]:
    if isinstance(value, (list, tuple)):
        return int(value[0]), int(value[1])
    return int(value), int(value)


class Conv1D(Layer):
    """Valid cross-correlation along time: (C, L) → (F, L_out)."""

    kind = "conv1d"
    has_params = True

    def _build(self, input_shape, rng, init):
        if len(input_shape) != 2:
            raise ConfigError(f"conv1d expects (channels, length) input, got {input_shape}")
        filters = _positive(self.spec, "filters")
        self.k = _positive(self.spec, "kernel")
        self.s = int(self.spec.params.get("stride", 1))
        if self.s <= 0:
            raise ConfigError("conv1d stride must be positive")
        C, L = input_shape
        if self.k > L:
            raise ConfigError(f"conv1d kernel {self.k} is longer than the input length {L}")
        self.params["W"] = _init_weights((filters, C, self.k), C * self.k, rng, init)
        self.params["b"] = np.zeros(filters, dtype=np.float64)
        return (filters, (L - self.k) // self.s + 1)

    def forward(self, x, train, rng):
        self.check_input(x)
        win = sliding_window_view(x, self.k, axis=2)[:, :, ::self.s, :]
        y = np.einsum("bclk,fck->bfl", win, self.params["W"], optimize=True)
        y += self.params["b"][None, :, None]
        return y, (x.shape, win)

    def backward(self, dy, cache):
        x_shape, win = cache
        W = self.params["W"]
        grads = {
            "W": np.einsum("bfl,bclk->fck", dy, win, optimize=True),
            "b": dy.sum(axis=(0, 2)),
        }
        dwin = np.einsum("bfl,fck->bclk", dy, W, optimize=True)
        dx = np.zeros(x_shape, dtype=np.float64)
        l_out = dy.shape[2]
        span = self.s * (l_out - 1) + 1
        for j in range(self.k):
            dx[:, :, j:j + span:self.s] += dwin[:, :, :, j]
        return dx, grads


class Conv2D(Layer):
    """Valid 2-D cross-correlation: (C, H, W) → (F, H_out, W_out)."""

    kind = "conv2d"
    has_params = True

    def _build(self, input_shape, rng, init):
        if len(input_shape) != 3:
            raise ConfigError(f"conv2d expects (channels, height, width) input, got {input_shape}")
        filters = _positive(self.spec, "filters")
        self.kh, self.kw = _pair(self.spec.params.get("kernel"))
        self.sh, self.sw = _pair(self.spec.params.get("stride", 1))
        if min(self.kh, self.kw, self.sh, self.sw) <= 0:
            raise ConfigError("conv2d kernel and stride must be positive")
        C, H, W = input_shape
        if self.kh > H or self.kw > W:
            raise ConfigError(f"conv2d kernel {self.kh}x{self.kw} does not fit input {H}x{W}")
        self.params["W"] = _init_weights((filters, C, self.kh, self.kw), C * self.kh * self.kw, rng, init)
        self.params["b"] = np.zeros(filters, dtype=np.float64)
        return (filters, (H - self.kh) // self.sh + 1, (W - self.kw) // self.sw + 1)

    def forward(self, x, train, rng):
        self.check_input(x)
        win = sliding_window_view(x, (self.kh, self.kw), axis=(2, 3))[:, :, ::self.sh, ::self.sw]
        y = np.einsum("bchwij,fcij->bfhw", win, self.params["W"], optimize=True)
        y += self.params["b"][None, :, None, None]
        return y, (x.shape, win)

    def backward(self, dy, cache):
        x_shape, win = cache
        grads = {
            "W": np.einsum("bfhw,bchwij->fcij", dy, win, optimize=True),
            "b": dy.sum(axis=(0, 2, 3)),
        }
        dwin = np.einsum("bfhw,fcij->bchwij", dy, self.params["W"], optimize=True)
        dx = np.zeros(x_shape, dtype=np.float64)
        h_out, w_out = dy.shape[2], dy.shape[3]
        span_h = self.sh * (h_out - 1) + 1
        span_w = self.sw * (w_out - 1) + 1
        for i in range(self.kh):
            for j in range(self.kw):
                dx[:, :, i:i + span_h:self.sh, j:j + span_w:self.sw] += dwin[:, :, :, :, i, j]
        return dx, grads


class Dense(Layer):
    kind = "dense"
    has_params = True

    def _build(self, input_shape, rng, init):
        if len(input_shape) != 1:
            raise ConfigError(f"dense expects a flat input, got {input_shape}; add a flatten layer")
        units = _positive(self.spec, "units")
        (D,) = input_shape
        self.params["W"] = _init_weights((D, units), D, rng, init)
        self.params["b"] = np.zeros(units, dtype=np.float64)
        return (units,)

    def forward(self, x, train, rng):
        self.check_input(x)
        return x @ self.params["W"] + self.params["b"], x

    def backward(self, dy, cache):
        x = cache
        return dy @ self.params["W"].T, {"W": x.T @ dy, "b": dy.sum(axis=0)}


class ReLU(Layer):
    kind = "relu"

    def _build(self, input_shape, rng, init):
        return input_shape

    def forward(self, x, train, rng):
        mask = x > 0
        return x * mask, mask

    def backward(self, dy, cache):
        return dy * cache, {}


class Dropout(Layer):
    """Inverted dropout; identity in eval mode."""

    kind = "dropout"

    def _build(self, input_shape, rng, init):
        self.rate = float(self.spec.params.get("rate", 0.0))
        if not 0.0 <= self.rate < 1.0:
            raise ConfigError(f"dropout rate must be in [0, 1), got {self.rate}")
        return input_shape

    def forward(self, x, train, rng):
        if not train or self.frozen or self.rate == 0.0:
            return x, None
        if rng is None:
            raise ConfigError("dropout in train mode needs a random generator")
        mask = (rng.random(x.shape) >= self.rate) / (1.0 - self.rate)
        return x * mask, mask

    def backward(self, dy, cache):
        return (dy if cache is None else dy * cache), {}


class BatchNorm(Layer):
    """Per-channel normalization over every axis except axis 1."""

    kind = "batchnorm"
    has_params = True

    def _build(self, input_shape, rng, init):
        channels = input_shape[0]
        self.momentum = float(self.spec.params.get("momentum", BN_MOMENTUM))
        self.eps = float(self.spec.params.get("epsilon", BN_EPSILON))
        self.params["gamma"] = np.ones(channels, dtype=np.float64)
        self.params["beta"] = np.zeros(channels, dtype=np.float64)
        self.state["running_mean"] = np.zeros(channels, dtype=np.float64)
        self.state["running_var"] = np.ones(channels, dtype=np.float64)
        return input_shape

    def _axes(self, x):
        return (0,) + tuple(range(2, x.ndim))

    def _bcast(self, v, ndim):
        return v.reshape((1, -1) + (1,) * (ndim - 2))

    def forward(self, x, train, rng):
        self.check_input(x)
        axes = self._axes(x)
        use_batch = train and not self.frozen
        if use_batch:
            mean = x.mean(axis=axes)
            var = x.var(axis=axes)
            self.state["running_mean"] *= self.momentum
            self.state["running_mean"] += (1.0 - self.momentum) * mean
            self.state["running_var"] *= self.momentum
            self.state["running_var"] += (1.0 - self.momentum) * var
        else:
            mean = self.state["running_mean"]
            var = self.state["running_var"]
        inv_std = 1.0 / np.sqrt(var + self.eps)
        xhat = (x - self._bcast(mean, x.ndim)) * self._bcast(inv_std, x.ndim)
        y = xhat * self._bcast(self.params["gamma"], x.ndim) + self._bcast(self.params["beta"], x.ndim)
        return y, (xhat, inv_std, use_batch)

    def backward(self, dy, cache):
        xhat, inv_std, use_batch = cache
        axes = self._axes(dy)
        grads = {"gamma": (dy * xhat).sum(axis=axes), "beta": dy.sum(axis=axes)}
        dxhat = dy * self._bcast(self.params["gamma"], dy.ndim)
        if not use_batch:
            return dxhat * self._bcast(inv_std, dy.ndim), grads
        n = dy.size // dy.shape[1]
        sum_dxhat = self._bcast(dxhat.sum(axis=axes), dy.ndim)
        sum_dxhat_xhat = self._bcast((dxhat * xhat).sum(axis=axes), dy.ndim)
        dx = self._bcast(inv_std, dy.ndim) / n * (n * dxhat - sum_dxhat - xhat * sum_dxhat_xhat)
        return dx, grads


class GlobalMaxPool1D(Layer):
    kind = "global_max_pool_1d"

    def _build(self, input_shape, rng, init):
        if len(input_shape) != 2:
            raise ConfigError(f"global_max_pool_1d expects (channels, length), got {input_shape}")
        return (input_shape[0],)

    def forward(self, x, train, rng):
        self.check_input(x)
        idx = np.argmax(x, axis=2)
        y = np.take_along_axis(x, idx[:, :, None], axis=2)[:, :, 0]
        return y, (x.shape, idx)

    def backward(self, dy, cache):
        x_shape, idx = cache
        dx = np.zeros(x_shape, dtype=np.float64)
        np.put_along_axis(dx, idx[:, :, None], dy[:, :, None], axis=2)
        return dx, {}


class Flatten(Layer):
    kind = "flatten"

    def _build(self, input_shape, rng, init):
        return (int(np.prod(input_shape)),)

    def forward(self, x, train, rng):
        self.check_input(x)
        return x.reshape(x.shape[0], -1), x.shape

    def backward(self, dy, cache):
        return dy.reshape(cache), {}


class ToImage(Layer):
    """(C, L) window → (1, L, C) single-plane image: time rows, channel columns."""

    kind = "to_image"

    def _build(self, input_shape, rng, init):
        if len(input_shape) != 2:
            raise ConfigError(f"to_image expects (channels, length), got {input_shape}")
        C, L = input_shape
        return (1, L, C)

    def forward(self, x, train, rng):
        self.check_input(x)
        return np.ascontiguousarray(x.transpose(0, 2, 1)[:, None, :, :]), None

    def backward(self, dy, cache):
        return np.ascontiguousarray(dy[:, 0].transpose(0, 2, 1)), {}


class Softmax(Layer):
    kind = "softmax"

    def _build(self, input_shape, rng, init):
        if len(input_shape) != 1:
            raise ConfigError(f"softmax expects a flat input, got {input_shape}")
        return input_shape

    def forward(self, x, train, rng):
        self.check_input(x)
        shifted = x - x.max(axis=1, keepdims=True)
        e = np.exp(shifted)
        y = e / e.sum(axis=1, keepdims=True)
        return y, y

    def backward(self, dy, cache):
        y = cache
        return y * (dy - (dy * y).sum(axis=1, keepdims=True)), {}


class Parallel(Layer):
    """
    Independent branches over the same input (or over channel slices of it),
    each flattened and concatenated along the feature axis.

    params: branches = list of LayerSpec lists; channel_splits = optional list
    of [start, stop) channel ranges, one per branch.
    """

    kind = "parallel"
    has_params = True

    def _build(self, input_shape, rng, init):
        branch_specs = self.spec.params.get("branches") or []
        if len(branch_specs) < 2:
            raise ConfigError("parallel needs at least two branches")
        splits = self.spec.params.get("channel_splits")
        if splits is not None and len(splits) != len(branch_specs):
            raise ConfigError("parallel channel_splits must have one range per branch")
        self.splits: List[Optional[Tuple[int, int]]] = (
            [tuple(int(v) for v in s) for s in splits] if splits is not None else [None] * len(branch_specs)
        )
        self.branches: List[List[Layer]] = []
        self.branch_shapes: List[Shape] = []
        total = 0
        for specs, split in zip(branch_specs, self.splits):
            shape = input_shape
            if split is not None:
                start, stop = split
                if not 0 <= start < stop <= input_shape[0]:
                    raise ConfigError(f"parallel channel range {split} outside input channels {input_shape[0]}")
                shape = (stop - start,) + tuple(input_shape[1:])
            layers = [create_layer(s) for s in specs]
            for layer in layers:
                shape = layer.build(shape, rng, init)
            self.branches.append(layers)
            self.branch_shapes.append(shape)
            total += int(np.prod(shape))
        return (total,)

    def set_frozen(self, frozen: bool) -> None:
        self.frozen = frozen
        for branch in self.branches:
            for layer in branch:
                layer.set_frozen(frozen)

    def named_parameters(self, prefix):
        for b, branch in enumerate(self.branches):
            for i, layer in enumerate(branch):
                yield from layer.named_parameters(f"{prefix}b{b}.{i}.{layer.kind}.")

    def named_state(self, prefix):
        for b, branch in enumerate(self.branches):
            for i, layer in enumerate(branch):
                yield from layer.named_state(f"{prefix}b{b}.{i}.{layer.kind}.")

    def parameter_count(self) -> int:
        return int(sum(layer.parameter_count() for branch in self.branches for layer in branch))

    def forward(self, x, train, rng):
        self.check_input(x)
        outputs, caches = [], []
        for layers, split in zip(self.branches, self.splits):
            h = x if split is None else x[:, split[0]:split[1]]
            branch_caches = []
            for layer in layers:
                h, cache = layer.forward(h, train and not layer.frozen, rng)
                branch_caches.append(cache)
            caches.append(branch_caches)
            outputs.append(h.reshape(h.shape[0], -1))
        return np.concatenate(outputs, axis=1), (x.shape, caches)

    def backward(self, dy, cache):
        x_shape, caches = cache
        dx = np.zeros(x_shape, dtype=np.float64)
        grads: Dict[str, np.ndarray] = {}
        offset = 0
        for b, (layers, split, shape) in enumerate(zip(self.branches, self.splits, self.branch_shapes)):
            size = int(np.prod(shape))
            d = dy[:, offset:offset + size].reshape((dy.shape[0],) + shape)
            offset += size
            for i in reversed(range(len(layers))):
                d, layer_grads = layers[i].backward(d, caches[b][i])
                for name, g in layer_grads.items():
                    grads[f"b{b}.{i}.{layers[i].kind}.{name}"] = g
            if split is None:
                dx += d
            else:
                dx[:, split[0]:split[1]] += d
        return dx, grads

    def decay_rates(self) -> Dict[str, float]:
        rates = {}
        for b, branch in enumerate(self.branches):
            for i, layer in enumerate(branch):
                for k, rate in layer.decay_rates().items():
                    rates[f"b{b}.{i}.{layer.kind}.{k}"] = rate
        return rates


LAYER_REGISTRY: Dict[str, Type[Layer]] = {
    cls.kind: cls
    for cls in (Conv1D, Conv2D, Dense, ReLU, Dropout, BatchNorm, GlobalMaxPool1D, Flatten, ToImage, Softmax, Parallel)
}


def create_layer(spec: LayerSpec) -> Layer:
    """Instantiate an unbuilt layer from its spec."""
    try:
        layer_cls = LAYER_REGISTRY[spec.kind]
    except KeyError:
        raise ConfigError(f"Unknown layer kind '{spec.kind}'. Available kinds: {sorted(LAYER_REGISTRY)}")
    return layer_cls(spec)
