"""Sequential network: forward with per-layer activations, backward to parameter gradients."""

import hashlib
from dataclasses import dataclass
from typing import Any, Dict, List, Optional, Sequence, Tuple, Union

import numpy as np

from config.logging_config import get_netcore_logger
from ..errors import ConfigError, ContractError, DimensionError
from .layers import Layer, LayerSpec, Shape, create_layer

logger = get_netcore_logger()

MODES = ("train", "eval")


@dataclass
class ForwardResult:
    """Activations of one forward call; ``activations[0]`` is the input, ``activations[i + 1]`` layer i's output."""
    activations: List[np.ndarray]
    caches: List[Any]
    mode: str
    network_id: int

    @property
    def probabilities(self) -> np.ndarray:
        return self.activations[-1]


class Network:
    """
    A stack of layers ending in softmax.

    ``feature_layer`` is the index of the final dense layer; its input is the
    penultimate-layer feature vector. Layers with index < ``frozen_until``
    are frozen: no gradients, eval-mode forward.
    """

    def __init__(self, specs: Sequence[LayerSpec], input_shape: Shape, name: str = "network"):
        self.specs = list(specs)
        self.input_shape = tuple(int(d) for d in input_shape)
        self.name = name
        self.layers: List[Layer] = [create_layer(spec) for spec in self.specs]
        self.frozen_until = 0
        self.built = False

    def build(self, rng: np.random.Generator, init: str = "he_uniform") -> "Network":
        shape = self.input_shape
        for i, layer in enumerate(self.layers):
            try:
                shape = layer.build(shape, rng, init)
            except ConfigError as e:
                raise ConfigError(f"Layer {i} ({layer.kind}) of {self.name}: {e}") from e
        if not self.layers or self.layers[-1].kind != "softmax":
            raise ConfigError(f"{self.name}: the final layer must be softmax")
        self.output_shape = shape
        self.built = True
        logger.debug(f"Built {self.name}: {len(self.layers)} layers, {self.parameter_count()} parameters")
        return self

    # -- introspection -------------------------------------------------

    @property
    def feature_layer(self) -> int:
        for i in range(len(self.layers) - 1, -1, -1):
            if self.layers[i].kind == "dense":
                return i
        raise ConfigError(f"{self.name} has no dense output layer")

    def parameter_count(self) -> int:
        return int(sum(layer.parameter_count() for layer in self.layers))

    def named_parameters(self) -> List[Tuple[str, np.ndarray, Layer, int]]:
        out = []
        for i, layer in enumerate(self.layers):
            for name, value, owner in layer.named_parameters(f"{i}.{layer.kind}."):
                out.append((name, value, owner, i))
        return out

    def parameters(self) -> Dict[str, np.ndarray]:
        """Every parameter array by qualified name (live references)."""
        return {name: value for name, value, _, _ in self.named_parameters()}

    def trainable_parameters(self) -> Dict[str, np.ndarray]:
        return {name: value for name, value, _, i in self.named_parameters() if i >= self.frozen_until}

    def frozen_parameters(self) -> Dict[str, np.ndarray]:
        return {name: value for name, value, _, i in self.named_parameters() if i < self.frozen_until}

    def state_arrays(self) -> Dict[str, np.ndarray]:
        out = {}
        for i, layer in enumerate(self.layers):
            for name, value in layer.named_state(f"{i}.{layer.kind}."):
                out[name] = value
        return out

    def weight_decay(self) -> Dict[str, float]:
        """Per-parameter L2 rate for parameters whose layer declares one."""
        rates = {}
        for i, layer in enumerate(self.layers):
            for key, rate in layer.decay_rates().items():
                rates[f"{i}.{layer.kind}.{key}"] = rate
        return rates

    def freeze(self, until: int) -> None:
        """Freeze layers [0, until); unfreeze the rest."""
        if not 0 <= until <= len(self.layers):
            raise ConfigError(f"freeze index {until} outside [0, {len(self.layers)}]")
        self.frozen_until = until
        for i, layer in enumerate(self.layers):
            layer.set_frozen(i < until)

    def digest(self, names: Optional[Sequence[str]] = None) -> str:
        """SHA-256 over parameter bytes (all, or ``names``) in name order."""
        params = self.parameters()
        h = hashlib.sha256()
        for key in sorted(names if names is not None else params):
            h.update(key.encode("utf-8"))
            h.update(np.ascontiguousarray(params[key]).tobytes())
        return h.hexdigest()

    def layer_specs(self) -> List[Dict[str, Any]]:
        return [spec.to_dict() for spec in self.specs]

    # -- passes --------------------------------------------------------

    def forward(self, batch: np.ndarray, mode: str = "eval", seed: Optional[int] = None) -> ForwardResult:
        if not self.built:
            raise ContractError(f"{self.name} must be built before forward")
        if mode not in MODES:
            raise ConfigError(f"mode must be one of {MODES}, got '{mode}'")
        x = np.asarray(batch, dtype=np.float64)
        if tuple(x.shape[1:]) != self.input_shape:
            raise DimensionError(
                f"{self.name} expects batches of shape (N, {', '.join(map(str, self.input_shape))}), got {tuple(x.shape)}"
            )
        train = mode == "train"
        rng = np.random.default_rng(seed if seed is not None else 0) if train else None
        activations = [x]
        caches = []
        for layer in self.layers:
            x, cache = layer.forward(x, train and not layer.frozen, rng)
            activations.append(x)
            caches.append(cache)
        return ForwardResult(activations=activations, caches=caches, mode=mode, network_id=id(self))

    def backward(self, result: ForwardResult, loss_grad: np.ndarray,
                 wrt: str = "logits", return_input_grad: bool = False
                 ) -> Union[Dict[str, np.ndarray], Tuple[Dict[str, np.ndarray], np.ndarray]]:
        """
        Backpropagate ``loss_grad`` into parameter gradients.

        ``wrt="logits"`` means the gradient is w.r.t. the softmax input (as
        returned by cross_entropy), so the softmax layer is skipped;
        ``wrt="output"`` starts at the softmax output.
        Only trainable layers produce entries. With ``return_input_grad`` the
        pass continues to the input and also returns its gradient.
        """
        if result.mode != "train":
            raise ContractError("backward needs activations from a train-mode forward call")
        if result.network_id != id(self):
            raise ContractError("activations were produced by a different network")
        if wrt not in ("logits", "output"):
            raise ConfigError(f"wrt must be 'logits' or 'output', got '{wrt}'")
        top = len(self.layers) - 1
        if wrt == "logits":
            top -= 1
        expected = result.activations[top + 1].shape
        if tuple(loss_grad.shape) != tuple(expected):
            raise DimensionError(f"loss gradient shape {tuple(loss_grad.shape)} does not match {tuple(expected)}")

        bottom = 0 if return_input_grad else self.frozen_until
        grads: Dict[str, np.ndarray] = {}
        d = np.asarray(loss_grad, dtype=np.float64)
        for i in range(top, bottom - 1, -1):
            layer = self.layers[i]
            d, layer_grads = layer.backward(d, result.caches[i])
            if i >= self.frozen_until:
                for name, g in layer_grads.items():
                    grads[f"{i}.{layer.kind}.{name}"] = g
        if return_input_grad:
            return grads, d
        return grads


def forward(network: Network, batch: np.ndarray, mode: str = "eval", seed: Optional[int] = None) -> ForwardResult:
    """Run ``network`` on ``batch``; see :meth:`Network.forward`."""
    return network.forward(batch, mode, seed)


def backward(network: Network, activations: ForwardResult, loss_grad: np.ndarray, **kwargs):
    """Gradients per trainable parameter; see :meth:`Network.backward`."""
    return network.backward(activations, loss_grad, **kwargs)
