"""
Parameter Store, initialization and the SGD schedule
=====================================================

All model matrices, vectors and embedding tables are registered here exactly
once by name. The store fixes the numeric precision: 32-bit for training,
64-bit for finite-difference gradient checks.
"""

import logging
import math
from dataclasses import dataclass
from typing import Dict, Iterator, List, Optional, Tuple, Union

import numpy as np

from ..errors import ShapeError
from .graph import Node, Parameter

logger = logging.getLogger(__name__)

Shape = Union[int, Tuple[int, ...]]

PRECISIONS = {"float32": np.float32, "float64": np.float64}


def glorot_init(rows: int, cols: int, rng: np.random.Generator, dtype=np.float32) -> np.ndarray:
    """Uniform samples in ±sqrt(6 / (rows + cols))"""
    if rows < 1 or cols < 1:
        raise ShapeError(f"glorot_init needs positive sizes, got {rows}x{cols}")
    bound = math.sqrt(6.0 / (rows + cols))
    return rng.uniform(-bound, bound, size=(rows, cols)).astype(dtype)


class ParameterStore:
    """
    Named parameters of one model.

    Registration order is preserved; serialization sorts by name.
    """

    def __init__(self, rng: Optional[np.random.Generator] = None, precision: str = "float32"):
        if precision not in PRECISIONS:
            raise ValueError(f"unknown precision '{precision}' (expected one of {sorted(PRECISIONS)})")
        self.precision = precision
        self.dtype = PRECISIONS[precision]
        self.rng = rng if rng is not None else np.random.default_rng(0)
        self._params: Dict[str, Parameter] = {}

    def add(
        self,
        name: str,
        shape: Shape,
        init: str = "glorot",
        trainable: bool = True,
        value: Optional[np.ndarray] = None,
    ) -> Parameter:
        """
        Register a parameter.

        Args:
            name: Unique name
            shape: (rows, cols) for matrices and tables, int for vectors
            init: "glorot" or "zeros"; ignored when `value` is given
            trainable: False for fixed inputs (they never receive gradients)
            value: Explicit initial value
        """
        if name in self._params:
            raise ValueError(f"parameter '{name}' registered twice")
        shape = (shape,) if isinstance(shape, int) else tuple(shape)

        if value is not None:
            value = np.array(value, dtype=self.dtype, copy=True)
            if value.shape != shape:
                raise ShapeError(f"parameter '{name}': value shape {value.shape} != {shape}")
        elif init == "zeros":
            value = np.zeros(shape, dtype=self.dtype)
        elif init == "glorot":
            rows, cols = shape if len(shape) == 2 else (shape[0], 1)
            value = glorot_init(rows, cols, self.rng, self.dtype).reshape(shape)
        else:
            raise ValueError(f"unknown initializer '{init}'")

        param = Parameter(name, value, trainable=trainable)
        self._params[name] = param
        return param

    def __getitem__(self, name: str) -> Parameter:
        return self._params[name]

    def __contains__(self, name: str) -> bool:
        return name in self._params

    def __iter__(self) -> Iterator[Parameter]:
        return iter(self._params.values())

    def __len__(self) -> int:
        return len(self._params)

    def names(self) -> List[str]:
        return list(self._params)

    def trainable(self) -> List[Parameter]:
        return [p for p in self._params.values() if p.trainable]

    def zero_grad(self) -> None:
        for param in self._params.values():
            param.zero_grad()

    def constant(self, value) -> Node:
        return Node(np.asarray(value, dtype=self.dtype))

    def zeros(self, dim: int) -> Node:
        return Node(np.zeros(dim, dtype=self.dtype))

    def snapshot(self) -> Dict[str, np.ndarray]:
        return {name: p.value.copy() for name, p in self._params.items()}

    def restore(self, snapshot: Dict[str, np.ndarray]) -> None:
        for name, value in snapshot.items():
            target = self._params[name].value
            if target.shape != value.shape:
                raise ShapeError(f"parameter '{name}': snapshot shape {value.shape} != {target.shape}")
            target[...] = value

    def gradient_norm(self) -> float:
        total = 0.0
        for param in self.trainable():
            total += float(np.sum(param.grad.astype(np.float64) ** 2))
        return math.sqrt(total)


@dataclass
class SGDUpdate:
    """Statistics of one update"""
    learning_rate: float
    gradient_norm: float
    clipped: bool


class SGDTrainer:
    """
    Plain SGD with eta_t = eta0 / (1 + decay * t) and global l2 clipping.

    t is the epoch index starting at 0.
    """

    def __init__(self, store: ParameterStore, eta0: float = 0.1, decay: float = 0.1, clip: float = 5.0):
        self.store = store
        self.eta0 = eta0
        self.decay = decay
        self.clip = clip

    def learning_rate(self, epoch: int) -> float:
        return self.eta0 / (1.0 + self.decay * epoch)

    def update(self, epoch: int) -> SGDUpdate:
        lr = self.learning_rate(epoch)
        norm = self.store.gradient_norm()
        factor = 1.0
        clipped = self.clip is not None and self.clip > 0 and norm > self.clip
        if clipped:
            factor = self.clip / norm
        step = lr * factor
        for param in self.store.trainable():
            param.value -= param.value.dtype.type(step) * param.grad
        self.store.zero_grad()
        return SGDUpdate(learning_rate=lr, gradient_norm=norm, clipped=clipped)


def sgd_update(store: ParameterStore, epoch: int, eta0: float = 0.1, decay: float = 0.1, clip: float = 5.0) -> SGDUpdate:
    return SGDTrainer(store, eta0=eta0, decay=decay, clip=clip).update(epoch)
