"""
Central finite-difference gradient checks.

Meaningful only for a 64-bit ParameterStore.
"""

import logging
from dataclasses import dataclass
from typing import Callable, Iterable, List, Optional

import numpy as np

from .graph import Node, Parameter, backward

logger = logging.getLogger(__name__)


@dataclass
class GradCheckResult:
    name: str
    max_relative_error: float
    checked: int

    def passed(self, tolerance: float = 1e-4) -> bool:
        return self.max_relative_error < tolerance


def relative_error(analytic: float, numeric: float, floor: float = 1e-3) -> float:
    return abs(analytic - numeric) / max(abs(analytic), abs(numeric), floor)


def check_gradients(
    loss_fn: Callable[[], Node],
    params: Iterable[Parameter],
    eps: float = 1e-6,
    max_entries: Optional[int] = None,
    rng: Optional[np.random.Generator] = None,
) -> List[GradCheckResult]:
    """
    Compare backprop gradients of `loss_fn()` with central differences.

    `loss_fn` must rebuild the graph on each call and be deterministic.
    With `max_entries`, a random subset of each parameter's entries is checked.
    """
    params = [p for p in params if p.trainable]
    for p in params:
        p.zero_grad()
    backward(loss_fn())
    analytic = {p.name: p.grad.copy() for p in params}
    for p in params:
        p.zero_grad()

    rng = rng if rng is not None else np.random.default_rng(0)
    results = []
    for p in params:
        flat = p.value.reshape(-1)
        entries = np.arange(flat.size)
        if max_entries is not None and flat.size > max_entries:
            entries = rng.choice(flat.size, size=max_entries, replace=False)
        worst = 0.0
        for k in entries:
            saved = flat[k]
            flat[k] = saved + eps
            plus = float(loss_fn().value)
            flat[k] = saved - eps
            minus = float(loss_fn().value)
            flat[k] = saved
            numeric = (plus - minus) / (2 * eps)
            worst = max(worst, relative_error(float(analytic[p.name].reshape(-1)[k]), numeric))
        results.append(GradCheckResult(p.name, worst, len(entries)))
        logger.debug(f"gradcheck {p.name}: max relative error {worst:.2e} over {len(entries)} entries")
    return results
