"""Self-describing model checkpoints: one .npz archive with a JSON header entry."""

import json
from pathlib import Path
from typing import Any, Dict, Optional, Tuple, Union

import numpy as np

from config.logging_config import get_netcore_logger
from ..errors import DataError
from .layers import LayerSpec
from .network import Network
from .optim import AdamState

logger = get_netcore_logger()

CHECKPOINT_FORMAT = "activeself-checkpoint/1"
HEADER_KEY = "__header__"


def save_checkpoint(path: Union[str, Path],
                    network: Network,
                    seed: int,
                    optimizer: Optional[AdamState] = None,
                    metadata: Optional[Dict[str, Any]] = None) -> Path:
    """
    Write layer specs, parameters, running statistics and Adam moments.

    Args:
        path: Target file; ``.npz`` is appended by numpy when missing.
        network: Built network.
        seed: Training seed recorded in the header.
        optimizer: Optional Adam state to persist.
        metadata: Extra JSON-serializable header fields (architecture config etc.).

    Returns:
        Path of the written archive.
    """
    path = Path(path)
    if path.suffix != ".npz":
        path = path.with_suffix(".npz")
    path.parent.mkdir(parents=True, exist_ok=True)

    arrays: Dict[str, np.ndarray] = {}
    for name, value in network.parameters().items():
        arrays[f"param:{name}"] = value
    for name, value in network.state_arrays().items():
        arrays[f"state:{name}"] = value
    header: Dict[str, Any] = {
        "format": CHECKPOINT_FORMAT,
        "name": network.name,
        "input_shape": list(network.input_shape),
        "layers": network.layer_specs(),
        "frozen_until": network.frozen_until,
        "seed": int(seed),
        "metadata": metadata or {},
    }
    if optimizer is not None:
        header["adam"] = {
            "learning_rate": optimizer.learning_rate,
            "beta1": optimizer.beta1,
            "beta2": optimizer.beta2,
            "epsilon": optimizer.epsilon,
            "step": optimizer.step,
            "t": dict(optimizer.t),
        }
        for name in optimizer.m:
            arrays[f"adam_m:{name}"] = optimizer.m[name]
            arrays[f"adam_v:{name}"] = optimizer.v[name]
    arrays[HEADER_KEY] = np.frombuffer(json.dumps(header, sort_keys=True).encode("utf-8"), dtype=np.uint8)

    with open(path, "wb") as fh:
        np.savez(fh, **arrays)
    logger.info(f"Saved checkpoint {path} ({network.parameter_count()} parameters)")
    return path


def load_checkpoint(path: Union[str, Path]) -> Tuple[Network, Optional[AdamState], Dict[str, Any]]:
    """
    Rebuild a network from a checkpoint.

    Returns:
        (network, adam state or None, header)
    """
    path = Path(path)
    if not path.exists():
        raise DataError(f"Checkpoint not found: {path}")
    with np.load(path, allow_pickle=False) as archive:
        if HEADER_KEY not in archive.files:
            raise DataError(f"{path} is not a model checkpoint (no header)")
        header = json.loads(archive[HEADER_KEY].tobytes().decode("utf-8"))
        if header.get("format") != CHECKPOINT_FORMAT:
            raise DataError(f"Unsupported checkpoint format {header.get('format')!r}, expected {CHECKPOINT_FORMAT}")

        specs = [LayerSpec.from_dict(d) for d in header["layers"]]
        network = Network(specs, tuple(header["input_shape"]), name=header.get("name", "network"))
        network.build(np.random.default_rng(0), init="zeros")
        params = network.parameters()
        state = network.state_arrays()
        for name, target in params.items():
            key = f"param:{name}"
            if key not in archive.files:
                raise DataError(f"Checkpoint {path} is missing parameter {name}")
            target[...] = archive[key]
        for name, target in state.items():
            key = f"state:{name}"
            if key in archive.files:
                target[...] = archive[key]
        network.freeze(int(header.get("frozen_until", 0)))

        optimizer = None
        if "adam" in header:
            a = header["adam"]
            optimizer = AdamState(
                learning_rate=a["learning_rate"], beta1=a["beta1"], beta2=a["beta2"],
                epsilon=a["epsilon"], step=a["step"], t={k: int(v) for k, v in a["t"].items()},
            )
            for name in optimizer.t:
                optimizer.m[name] = archive[f"adam_m:{name}"].copy()
                optimizer.v[name] = archive[f"adam_v:{name}"].copy()
    logger.info(f"Loaded checkpoint {path}")
    return network, optimizer, header
