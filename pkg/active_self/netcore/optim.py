"""Adam with bias correction and per-parameter L2 terms."""

from dataclasses import dataclass, field
from typing import Dict, Mapping, Tuple, Union

import numpy as np

from config.logging_config import get_netcore_logger
from ..errors import DimensionError, NonFiniteGradientError

logger = get_netcore_logger()


@dataclass
class AdamState:
    """
    Moment accumulators keyed by parameter name.

    ``step`` counts update calls; ``t`` holds the per-parameter update count
    used for bias correction, so parameters that sit out some steps (frozen
    ones) keep exact corrections.
    """
    learning_rate: float = 1e-3
    beta1: float = 0.9
    beta2: float = 0.999
    epsilon: float = 1e-8
    step: int = 0
    m: Dict[str, np.ndarray] = field(default_factory=dict)
    v: Dict[str, np.ndarray] = field(default_factory=dict)
    t: Dict[str, int] = field(default_factory=dict)


def _check_finite(grads: Mapping[str, np.ndarray]) -> None:
    bad = {}
    for key, g in grads.items():
        finite = np.isfinite(g)
        if not finite.all():
            bad[key] = {
                "nan": int(np.isnan(g).sum()),
                "inf": int(np.isinf(g).sum()),
                "size": int(g.size),
            }
    if bad:
        logger.error(f"Non-finite gradients in {len(bad)} parameters: {bad}")
        raise NonFiniteGradientError(f"Non-finite gradient in parameters {sorted(bad)}", {"parameters": bad})


def adam_step(params: Dict[str, np.ndarray],
              grads: Mapping[str, np.ndarray],
              state: AdamState,
              weight_decay: Union[float, Mapping[str, float]] = 0.0) -> Tuple[Dict[str, np.ndarray], AdamState]:
    """
    One Adam update, in place, for every key present in ``grads``.

    Args:
        params: Parameter arrays by name; updated in place.
        grads: Gradients by name; keys absent here are left untouched.
        state: Moment accumulators; updated in place.
        weight_decay: A rate for every parameter, or a per-name mapping.
            The term λ·θ is added to the gradient.

    Returns:
        (params, state)
    """
    _check_finite(grads)
    state.step += 1
    for key, g in grads.items():
        theta = params[key]
        if g.shape != theta.shape:
            raise DimensionError(f"gradient for {key} has shape {g.shape}, parameter has {theta.shape}")
        rate = weight_decay.get(key, 0.0) if isinstance(weight_decay, Mapping) else float(weight_decay)
        if rate:
            g = g + rate * theta
        if key not in state.m:
            state.m[key] = np.zeros_like(theta)
            state.v[key] = np.zeros_like(theta)
            state.t[key] = 0
        state.t[key] += 1
        t = state.t[key]

        state.m[key] *= state.beta1
        state.m[key] += (1.0 - state.beta1) * g
        state.v[key] *= state.beta2
        state.v[key] += (1.0 - state.beta2) * (g * g)

        bc1 = 1.0 - state.beta1 ** t
        bc2 = 1.0 - state.beta2 ** t
        denom = np.sqrt(state.v[key] / bc2) + state.epsilon
        theta -= (state.learning_rate / bc1) * state.m[key] / denom
    return params, state
