"""
Recurrent composites: LSTM layers, stack-LSTMs and bidirectional LSTMs.

One LSTM step is a single fused graph node whose value is [h; c]; h and c
are read back through slices. Gate order inside the weight matrix is
input, forget, output, candidate.
"""

from dataclasses import dataclass
from typing import Any, List, Optional, Sequence, Tuple

import numpy as np

from ..errors import ShapeError
from .graph import Node, Parameter, _sigmoid, concat, slice_
from .params import ParameterStore

# per-layer (h, c)
LayerState = Tuple[Node, Node]
LSTMState = Tuple[LayerState, ...]


@dataclass
class LSTMLayer:
    W: Parameter   # (4h, in + h)
    b: Parameter   # (4h,)
    input_dim: int
    hidden_dim: int


@dataclass
class LSTMParams:
    """Stacked LSTM layers; layer k > 0 reads the hidden state of layer k - 1"""
    layers: List[LSTMLayer]

    @property
    def input_dim(self) -> int:
        return self.layers[0].input_dim

    @property
    def hidden_dim(self) -> int:
        return self.layers[-1].hidden_dim

    @classmethod
    def create(cls, store: ParameterStore, name: str, input_dim: int, hidden_dim: int, n_layers: int = 1) -> "LSTMParams":
        if n_layers < 1:
            raise ValueError("an LSTM needs at least one layer")
        layers = []
        dim = input_dim
        for k in range(n_layers):
            W = store.add(f"{name}.l{k}.W", (4 * hidden_dim, dim + hidden_dim))
            b = store.add(f"{name}.l{k}.b", 4 * hidden_dim, init="zeros")
            layers.append(LSTMLayer(W, b, dim, hidden_dim))
            dim = hidden_dim
        return cls(layers)


def lstm_cell(layer: LSTMLayer, x: Node, h_prev: Node, c_prev: Node) -> Node:
    """One LSTM step as a single node with value [h; c]"""
    H = layer.hidden_dim
    if x.value.shape != (layer.input_dim,):
        raise ShapeError(f"LSTM input of shape {x.shape}, expected ({layer.input_dim},)")
    if h_prev.value.shape != (H,) or c_prev.value.shape != (H,):
        raise ShapeError(f"LSTM state of shape {h_prev.shape}/{c_prev.shape}, expected ({H},)")

    xh = np.concatenate([x.value, h_prev.value])
    z = layer.W.value @ xh + layer.b.value
    i = _sigmoid(z[:H])
    f = _sigmoid(z[H:2 * H])
    o = _sigmoid(z[2 * H:3 * H])
    g = np.tanh(z[3 * H:])
    c = f * c_prev.value + i * g
    tc = np.tanh(c)
    h = o * tc

    def backward(grad: np.ndarray) -> None:
        dh = grad[:H]
        dc = grad[H:] + dh * o * (1 - tc * tc)
        dz = np.concatenate([
            dc * g * i * (1 - i),
            dc * c_prev.value * f * (1 - f),
            dh * tc * o * (1 - o),
            dc * i * (1 - g * g),
        ])
        layer.W.accumulate(np.outer(dz, xh))
        layer.b.accumulate(dz)
        if x.requires_grad or h_prev.requires_grad:
            dxh = layer.W.value.T @ dz
            x.accumulate(dxh[:layer.input_dim])
            h_prev.accumulate(dxh[layer.input_dim:])
        c_prev.accumulate(dc * f)

    return Node(np.concatenate([h, c]), (layer.W, layer.b, x, h_prev, c_prev), backward, "lstm")


def initial_state(params: LSTMParams, dtype=np.float32) -> LSTMState:
    return tuple(
        (Node(np.zeros(layer.hidden_dim, dtype=dtype)), Node(np.zeros(layer.hidden_dim, dtype=dtype)))
        for layer in params.layers
    )


def lstm_step(params: LSTMParams, state: LSTMState, x: Node) -> LSTMState:
    """Advance every layer by one input"""
    if len(state) != len(params.layers):
        raise ShapeError(f"state has {len(state)} layers, LSTM has {len(params.layers)}")
    new_state = []
    inp = x
    for layer, (h, c) in zip(params.layers, state):
        hc = lstm_cell(layer, inp, h, c)
        H = layer.hidden_dim
        h_new, c_new = slice_(hc, 0, H), slice_(hc, H, 2 * H)
        new_state.append((h_new, c_new))
        inp = h_new
    return tuple(new_state)


def run_lstm(params: LSTMParams, inputs: Sequence[Node]) -> List[Node]:
    """Top-layer hidden state after each input"""
    state = initial_state(params, params.layers[0].W.value.dtype)
    outputs = []
    for x in inputs:
        state = lstm_step(params, state, x)
        outputs.append(state[-1][0])
    return outputs


@dataclass
class BiLSTMParams:
    forward: LSTMParams
    backward: LSTMParams

    @classmethod
    def create(cls, store: ParameterStore, name: str, input_dim: int, hidden_dim: int, n_layers: int = 1) -> "BiLSTMParams":
        return cls(
            LSTMParams.create(store, f"{name}.fwd", input_dim, hidden_dim, n_layers),
            LSTMParams.create(store, f"{name}.bwd", input_dim, hidden_dim, n_layers),
        )

    @property
    def output_dim(self) -> int:
        return self.forward.hidden_dim + self.backward.hidden_dim


def bilstm(params: BiLSTMParams, inputs: Sequence[Node]) -> List[Node]:
    """Per position, forward hidden state ‖ backward hidden state"""
    if not inputs:
        raise ShapeError("bilstm over an empty sequence")
    fwd = run_lstm(params.forward, inputs)
    bwd = run_lstm(params.backward, list(reversed(inputs)))[::-1]
    return [concat([f, b]) for f, b in zip(fwd, bwd)]


class StackLSTM:
    """
    An LSTM over a stack: push runs one step from the current top state,
    pop restores the state before the matching push.

    The summary of an empty stack is the learned `empty` vector.
    """

    def __init__(self, params: LSTMParams, empty: Parameter):
        if empty.value.shape != (params.hidden_dim,):
            raise ShapeError(f"empty vector {empty.shape} does not match hidden size {params.hidden_dim}")
        self.params = params
        self.empty = empty
        self.states: List[LSTMState] = [initial_state(params, empty.value.dtype)]
        self.items: List[Any] = []

    def push(self, x: Node, item: Any = None) -> None:
        self.states.append(lstm_step(self.params, self.states[-1], x))
        self.items.append(item)

    def pop(self) -> Any:
        if not self.items:
            raise IndexError("pop from an empty stack-LSTM")
        self.states.pop()
        return self.items.pop()

    def top(self) -> Optional[Any]:
        return self.items[-1] if self.items else None

    def summary(self) -> Node:
        if not self.items:
            return self.empty
        return self.states[-1][-1][0]

    def __len__(self) -> int:
        return len(self.items)

    def __repr__(self) -> str:
        return f"<StackLSTM depth={len(self)}>"
