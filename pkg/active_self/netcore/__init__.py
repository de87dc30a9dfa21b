from .layers import LAYER_REGISTRY, Layer, LayerSpec, create_layer
from .network import ForwardResult, Network, backward, forward
from .losses import cross_entropy, one_hot
from .optim import AdamState, adam_step
from .checkpoint import CHECKPOINT_FORMAT, load_checkpoint, save_checkpoint
from .gradcheck import check_network_gradients, numeric_gradient, relative_error

__all__ = [
    "LAYER_REGISTRY",
    "Layer",
    "LayerSpec",
    "create_layer",
    "ForwardResult",
    "Network",
    "backward",
    "forward",
    "cross_entropy",
    "one_hot",
    "AdamState",
    "adam_step",
    "CHECKPOINT_FORMAT",
    "load_checkpoint",
    "save_checkpoint",
    "check_network_gradients",
    "numeric_gradient",
    "relative_error",
]
