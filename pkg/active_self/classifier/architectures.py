"""Layer stacks for the supported architectures and their closed-form parameter counts."""

from dataclasses import dataclass, field
from typing import Any, Dict, List, Tuple

from ..errors import ConfigError
from ..netcore.layers import LayerSpec

ARCHITECTURES = ("tpn", "double_stream", "mlp")

TPN_CONV = ((32, 24), (64, 16), (96, 8))
TPN_DROPOUT = 0.1
TPN_L2 = 1e-4
TPN_DENSE = (1024, 32)

# (filters, kernel, stride) for the two stacked layers of each stream,
# then the two parallel branch kernels
DS_STEM = ((32, (3, 1), (1, 1)), (64, (6, 3), (3, 3)))
DS_BRANCHES = ((64, (6, 1), (1, 1)), (64, (3, 3), (1, 1)))
DS_DENSE = 32


@dataclass
class ArchitectureConfig:
    """
    Which network to build and for what input.

    ``hidden`` only applies to the mlp; the other two stacks are fixed.
    """
    name: str = "mlp"
    input_shape: Tuple[int, int] = (6, 30)
    n_classes: int = 6
    hidden: Tuple[int, ...] = (64, 32)

    def __post_init__(self):
        self.input_shape = tuple(int(d) for d in self.input_shape)
        self.hidden = tuple(int(h) for h in self.hidden)
        if self.name not in ARCHITECTURES:
            raise ConfigError(f"Unknown architecture '{self.name}'. Available: {list(ARCHITECTURES)}")
        if len(self.input_shape) != 2 or min(self.input_shape) < 1:
            raise ConfigError(f"input_shape must be (channels, length), got {self.input_shape}")
        if self.n_classes < 2:
            raise ConfigError(f"n_classes must be at least 2, got {self.n_classes}")
        if self.name == "mlp" and (not self.hidden or min(self.hidden) < 1):
            raise ConfigError("mlp needs at least one positive hidden width")

    def to_dict(self) -> Dict[str, Any]:
        return {
            "name": self.name,
            "input_shape": list(self.input_shape),
            "n_classes": self.n_classes,
            "hidden": list(self.hidden),
        }

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "ArchitectureConfig":
        return cls(
            name=data["name"],
            input_shape=tuple(data["input_shape"]),
            n_classes=int(data["n_classes"]),
            hidden=tuple(data.get("hidden", (64, 32))),
        )


@dataclass
class LayerPlan:
    """Layer specs plus the index of the first trainable layer during fine-tuning."""
    specs: List[LayerSpec] = field(default_factory=list)
    head_start: int = 0


def _mlp(config: ArchitectureConfig) -> LayerPlan:
    # the last hidden layer joins the head unless it is the only one
    specs = [LayerSpec("flatten")]
    head_start = 0
    for i, width in enumerate(config.hidden):
        if i == len(config.hidden) - 1:
            head_start = len(specs)
        specs += [LayerSpec("dense", {"units": width}), LayerSpec("relu")]
    if len(config.hidden) == 1:
        head_start = len(specs)
    specs += [LayerSpec("dense", {"units": config.n_classes}), LayerSpec("softmax")]
    return LayerPlan(specs, head_start)


def _tpn(config: ArchitectureConfig) -> LayerPlan:
    _, length = config.input_shape
    for filters, kernel in TPN_CONV:
        if kernel > length:
            raise ConfigError(
                f"tpn: kernel {kernel} is longer than the remaining sequence length {length} "
                f"(input length {config.input_shape[1]})"
            )
        length = length - kernel + 1
    specs: List[LayerSpec] = []
    for filters, kernel in TPN_CONV:
        specs += [
            LayerSpec("conv1d", {"filters": filters, "kernel": kernel, "stride": 1, "l2": TPN_L2}),
            LayerSpec("relu"),
            LayerSpec("dropout", {"rate": TPN_DROPOUT}),
        ]
    specs.append(LayerSpec("global_max_pool_1d"))
    head_start = len(specs)
    for units in TPN_DENSE:
        specs += [LayerSpec("dense", {"units": units}), LayerSpec("relu")]
    specs += [LayerSpec("dense", {"units": config.n_classes}), LayerSpec("softmax")]
    return LayerPlan(specs, head_start)


def stream_channels(n_channels: int) -> Tuple[Tuple[int, int], Tuple[int, int]]:
    """Channel ranges of the two streams: first half, second half."""
    half = n_channels // 2
    return (0, half), (half, n_channels)


def _stream_output(height: int, width: int) -> Tuple[int, int]:
    """Spatial size after the two stem layers, or raises when the stream is too small."""
    for _, (kh, kw), (sh, sw) in DS_STEM:
        if kh > height or kw > width:
            raise ConfigError(f"double_stream: kernel {kh}x{kw} does not fit a {height}x{width} stream")
        height = (height - kh) // sh + 1
        width = (width - kw) // sw + 1
    for _, (kh, kw), _ in DS_BRANCHES:
        if kh > height or kw > width:
            raise ConfigError(f"double_stream: branch kernel {kh}x{kw} does not fit a {height}x{width} map")
    return height, width


def _stream() -> List[LayerSpec]:
    layers = [LayerSpec("to_image")]
    for filters, kernel, stride in DS_STEM:
        layers += [
            LayerSpec("conv2d", {"filters": filters, "kernel": list(kernel), "stride": list(stride)}),
            LayerSpec("batchnorm"),
            LayerSpec("relu"),
        ]
    branches = [
        [
            LayerSpec("conv2d", {"filters": filters, "kernel": list(kernel), "stride": list(stride)}),
            LayerSpec("batchnorm"),
            LayerSpec("relu"),
        ]
        for filters, kernel, stride in DS_BRANCHES
    ]
    layers.append(LayerSpec("parallel", {"branches": branches}))
    return layers


def _double_stream(config: ArchitectureConfig) -> LayerPlan:
    channels, length = config.input_shape
    ranges = stream_channels(channels)
    for start, stop in ranges:
        # streams are images of (time rows, channel columns)
        _stream_output(length, stop - start)
    specs = [
        LayerSpec("parallel", {
            "branches": [_stream() for _ in ranges],
            "channel_splits": [list(r) for r in ranges],
        }),
    ]
    head_start = len(specs)
    specs += [
        LayerSpec("dense", {"units": DS_DENSE}),
        LayerSpec("relu"),
        LayerSpec("dense", {"units": config.n_classes}),
        LayerSpec("softmax"),
    ]
    return LayerPlan(specs, head_start)


def layer_plan(config: ArchitectureConfig) -> LayerPlan:
    """Layer specs for ``config``; raises ConfigError when the input cannot pass the kernel chain."""
    builders = {"mlp": _mlp, "tpn": _tpn, "double_stream": _double_stream}
    return builders[config.name](config)


def expected_parameter_count(config: ArchitectureConfig) -> int:
    """Closed-form parameter count, independent of the layer engine."""
    channels, length = config.input_shape
    k = config.n_classes
    if config.name == "mlp":
        total, prev = 0, channels * length
        for width in config.hidden:
            total += prev * width + width
            prev = width
        return total + prev * k + k

    if config.name == "tpn":
        total, prev = 0, channels
        for filters, kernel in TPN_CONV:
            total += filters * prev * kernel + filters
            prev = filters
        for units in TPN_DENSE:
            total += prev * units + units
            prev = units
        return total + prev * k + k

    total, flat = 0, 0
    for start, stop in stream_channels(channels):
        prev = 1
        for filters, (kh, kw), _ in DS_STEM:
            total += filters * prev * kh * kw + filters + 2 * filters
            prev = filters
        height, width = _stream_output(length, stop - start)
        for filters, (kh, kw), _ in DS_BRANCHES:
            total += filters * prev * kh * kw + filters + 2 * filters
            flat += filters * (height - kh + 1) * (width - kw + 1)
    total += flat * DS_DENSE + DS_DENSE
    return total + DS_DENSE * k + k
