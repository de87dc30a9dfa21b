"""Central finite-difference checks for analytic gradients."""

from typing import Callable, Dict, Optional

import numpy as np

from .losses import cross_entropy
from .network import Network

FD_STEP = 1e-4


def relative_error(analytic: np.ndarray, numeric: np.ndarray, floor: float = 1e-8) -> float:
    """max |a − n| / max(|a| + |n|, floor), elementwise."""
    analytic = np.asarray(analytic, dtype=np.float64)
    numeric = np.asarray(numeric, dtype=np.float64)
    denom = np.maximum(np.abs(analytic) + np.abs(numeric), floor)
    return float(np.max(np.abs(analytic - numeric) / denom)) if analytic.size else 0.0


def numeric_gradient(fn: Callable[[], float], array: np.ndarray, h: float = FD_STEP) -> np.ndarray:
    """Central differences of ``fn`` w.r.t. every entry of ``array`` (perturbed in place)."""
    grad = np.zeros_like(array)
    flat = array.reshape(-1)
    out = grad.reshape(-1)
    for i in range(flat.size):
        original = flat[i]
        flat[i] = original + h
        plus = fn()
        flat[i] = original - h
        minus = fn()
        flat[i] = original
        out[i] = (plus - minus) / (2.0 * h)
    return grad


def check_network_gradients(network: Network,
                            batch: np.ndarray,
                            targets: np.ndarray,
                            seed: int = 0,
                            h: float = FD_STEP,
                            names: Optional[list] = None,
                            floor: float = 1e-8) -> Dict[str, float]:
    """
    Compare backprop gradients of the cross-entropy loss with central differences.

    Dropout masks are fixed by reusing ``seed`` for every forward call. ``floor``
    bounds the relative-error denominator for near-zero gradients.

    Returns:
        Relative error per checked parameter name, plus ``"input"`` for the
        gradient w.r.t. the batch.
    """
    batch = np.array(batch, dtype=np.float64)

    def loss() -> float:
        state = {k: v.copy() for k, v in network.state_arrays().items()}
        result = network.forward(batch, mode="train", seed=seed)
        value, _ = cross_entropy(result.probabilities, targets)
        for k, v in network.state_arrays().items():
            v[...] = state[k]
        return value

    state = {k: v.copy() for k, v in network.state_arrays().items()}
    result = network.forward(batch, mode="train", seed=seed)
    for k, v in network.state_arrays().items():
        v[...] = state[k]
    _, dlogits = cross_entropy(result.probabilities, targets)
    grads, dx = network.backward(result, dlogits, return_input_grad=True)

    params = network.parameters()
    errors: Dict[str, float] = {}
    for name in (names if names is not None else sorted(grads)):
        numeric = numeric_gradient(loss, params[name], h)
        errors[name] = relative_error(grads[name], numeric, floor)
    errors["input"] = relative_error(dx, numeric_gradient(loss, batch, h), floor)
    return errors
