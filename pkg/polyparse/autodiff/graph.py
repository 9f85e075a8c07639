"""
Reverse-Mode Automatic Differentiation
======================================

A small dynamic computation graph over numpy vectors and matrices.

Every op builds a Node holding its forward value and a closure that, given
the node's gradient, accumulates gradients into the parents. `backward`
visits the graph once in reverse topological order. Parameters keep their
gradients across graphs (a mini-batch sums per-sentence gradients) until the
optimizer zeroes them.

Only the operators the parser and tagger need are provided; there is no
broadcasting beyond what each op states.
"""

from typing import Callable, List, Optional, Sequence, Tuple

import numpy as np

from ..errors import ShapeError

BackwardFn = Callable[[np.ndarray], None]


class Node:
    """A value in the computation graph"""

    __slots__ = ("value", "grad", "parents", "backward_fn", "op", "requires_grad")

    def __init__(
        self,
        value: np.ndarray,
        parents: Tuple["Node", ...] = (),
        backward_fn: Optional[BackwardFn] = None,
        op: str = "const",
    ):
        self.value = value
        self.parents = parents
        self.backward_fn = backward_fn
        self.op = op
        self.requires_grad = any(p.requires_grad for p in parents)
        self.grad: Optional[np.ndarray] = None

    @property
    def shape(self) -> Tuple[int, ...]:
        return self.value.shape

    @property
    def dtype(self):
        return self.value.dtype

    def accumulate(self, grad: np.ndarray) -> None:
        if not self.requires_grad:
            return
        if self.grad is None:
            self.grad = np.array(grad, dtype=self.value.dtype, copy=True)
        else:
            self.grad += grad

    def __repr__(self) -> str:
        return f"Node(op={self.op}, shape={self.shape})"


class Parameter(Node):
    """
    A named, persistent leaf.

    Non-trainable parameters (fixed pretrained embeddings) never receive
    gradients.
    """

    __slots__ = ("name", "trainable")

    def __init__(self, name: str, value: np.ndarray, trainable: bool = True):
        super().__init__(value, op="param")
        self.name = name
        self.trainable = trainable
        self.requires_grad = trainable
        self.grad = np.zeros_like(value) if trainable else None

    def accumulate(self, grad: np.ndarray) -> None:
        if self.trainable:
            self.grad += grad

    def accumulate_row(self, row: int, grad: np.ndarray) -> None:
        if self.trainable:
            self.grad[row] += grad

    def zero_grad(self) -> None:
        if self.trainable:
            self.grad.fill(0)

    def __repr__(self) -> str:
        return f"Parameter({self.name}, shape={self.shape}, trainable={self.trainable})"


# ============================================
# Leaves
# ============================================

def constant(value, dtype=np.float32) -> Node:
    return Node(np.asarray(value, dtype=dtype))


def zeros(dim: int, dtype=np.float32) -> Node:
    return Node(np.zeros(dim, dtype=dtype))


# ============================================
# Operators
# ============================================

def lookup(table: Parameter, index: int) -> Node:
    """Row `index` of an embedding table"""
    if not 0 <= index < table.value.shape[0]:
        raise ShapeError(f"row {index} outside table {table.name} with {table.value.shape[0]} rows")

    def backward(g: np.ndarray) -> None:
        table.accumulate_row(index, g)

    return Node(table.value[index], (table,), backward, "lookup")


def concat(nodes: Sequence[Node]) -> Node:
    if not nodes:
        raise ShapeError("concat of no vectors")
    for node in nodes:
        if node.value.ndim != 1:
            raise ShapeError(f"concat expects vectors, got shape {node.shape}")
    sizes = [node.value.shape[0] for node in nodes]
    offsets = np.cumsum([0] + sizes)

    def backward(g: np.ndarray) -> None:
        for node, start, stop in zip(nodes, offsets[:-1], offsets[1:]):
            if node.requires_grad:
                node.accumulate(g[start:stop])

    return Node(np.concatenate([node.value for node in nodes]), tuple(nodes), backward, "concat")


def slice_(x: Node, start: int, stop: int) -> Node:
    if not 0 <= start < stop <= x.value.shape[0]:
        raise ShapeError(f"slice {start}:{stop} outside vector of size {x.value.shape[0]}")

    def backward(g: np.ndarray) -> None:
        full = np.zeros_like(x.value)
        full[start:stop] = g
        x.accumulate(full)

    return Node(x.value[start:stop], (x,), backward, "slice")


def affine(W: Node, x: Node, b: Optional[Node] = None) -> Node:
    """W x + b"""
    if W.value.ndim != 2 or x.value.ndim != 1 or W.value.shape[1] != x.value.shape[0]:
        raise ShapeError(f"affine: W {W.shape} cannot multiply x {x.shape}")
    if b is not None and b.value.shape != (W.value.shape[0],):
        raise ShapeError(f"affine: bias {b.shape} does not match W {W.shape}")

    out = W.value @ x.value
    if b is not None:
        out = out + b.value
    parents = (W, x) if b is None else (W, x, b)

    def backward(g: np.ndarray) -> None:
        if W.requires_grad:
            W.accumulate(np.outer(g, x.value))
        if x.requires_grad:
            x.accumulate(W.value.T @ g)
        if b is not None and b.requires_grad:
            b.accumulate(g)

    return Node(out, parents, backward, "affine")


def add(*nodes: Node) -> Node:
    shape = nodes[0].shape
    for node in nodes[1:]:
        if node.shape != shape:
            raise ShapeError(f"add: shapes {shape} and {node.shape}")

    def backward(g: np.ndarray) -> None:
        for node in nodes:
            node.accumulate(g)

    return Node(sum(node.value for node in nodes[1:]) + nodes[0].value, tuple(nodes), backward, "add")


def mul(a: Node, b: Node) -> Node:
    """Componentwise product"""
    if a.shape != b.shape:
        raise ShapeError(f"mul: shapes {a.shape} and {b.shape}")

    def backward(g: np.ndarray) -> None:
        a.accumulate(g * b.value)
        b.accumulate(g * a.value)

    return Node(a.value * b.value, (a, b), backward, "mul")


def scale(x: Node, factor: float) -> Node:
    """Multiply by a constant scalar"""
    factor = x.value.dtype.type(factor)

    def backward(g: np.ndarray) -> None:
        x.accumulate(g * factor)

    return Node(x.value * factor, (x,), backward, "scale")


def tanh(x: Node) -> Node:
    y = np.tanh(x.value)

    def backward(g: np.ndarray) -> None:
        x.accumulate(g * (1 - y * y))

    return Node(y, (x,), backward, "tanh")


def _sigmoid(v: np.ndarray) -> np.ndarray:
    out = np.empty_like(v)
    pos = v >= 0
    out[pos] = 1 / (1 + np.exp(-v[pos]))
    e = np.exp(v[~pos])
    out[~pos] = e / (1 + e)
    return out


def sigmoid(x: Node) -> Node:
    y = _sigmoid(x.value)

    def backward(g: np.ndarray) -> None:
        x.accumulate(g * y * (1 - y))

    return Node(y, (x,), backward, "sigmoid")


def rectify(x: Node) -> Node:
    """max{0, x} componentwise"""
    mask = x.value > 0

    def backward(g: np.ndarray) -> None:
        x.accumulate(g * mask)

    return Node(x.value * mask, (x,), backward, "rectify")


def sum_scalars(nodes: Sequence[Node]) -> Node:
    """Sum of scalar nodes"""
    if not nodes:
        raise ShapeError("sum of no losses")
    for node in nodes:
        if node.value.size != 1:
            raise ShapeError(f"sum_scalars expects scalars, got shape {node.shape}")

    def backward(g: np.ndarray) -> None:
        for node in nodes:
            node.accumulate(g)

    total = np.asarray(sum(float(n.value) for n in nodes), dtype=nodes[0].value.dtype)
    return Node(total, tuple(nodes), backward, "sum")


# ============================================
# Softmax
# ============================================

def masked_log_softmax(scores: np.ndarray, allowed: Optional[Sequence[int]] = None) -> np.ndarray:
    """
    Log-probabilities restricted to `allowed` indices.

    Entries outside `allowed` are -inf; they take no part in normalization.
    """
    if allowed is None:
        restricted = scores
    else:
        if len(allowed) == 0:
            raise ShapeError("softmax over an empty set of classes")
        restricted = np.full_like(scores, -np.inf)
        restricted[list(allowed)] = scores[list(allowed)]
    top = np.max(restricted)
    shifted = restricted - top
    return shifted - np.log(np.sum(np.exp(shifted)))


def softmax(scores: np.ndarray, allowed: Optional[Sequence[int]] = None) -> np.ndarray:
    return np.exp(masked_log_softmax(scores, allowed))


def softmax_cross_entropy(scores: Node, gold: int, allowed: Optional[Sequence[int]] = None) -> Node:
    """
    -log p(gold) under softmax(scores) restricted to `allowed`.

    Raises:
        ShapeError: gold outside the allowed set
    """
    if scores.value.ndim != 1:
        raise ShapeError(f"softmax expects a vector, got shape {scores.shape}")
    if allowed is not None and gold not in allowed:
        raise ShapeError(f"gold class {gold} is not among the allowed classes")
    log_p = masked_log_softmax(scores.value, allowed)
    p = np.exp(log_p)

    def backward(g: np.ndarray) -> None:
        d = p.copy()
        d[gold] -= 1
        scores.accumulate(g * d)

    loss = np.asarray(-log_p[gold], dtype=scores.value.dtype)
    return Node(loss, (scores,), backward, "softmax_xent")


# ============================================
# Backpropagation
# ============================================

def topological_order(root: Node) -> List[Node]:
    """Nodes that need gradients, parents before children"""
    order: List[Node] = []
    visited = set()
    stack: List[Tuple[Node, bool]] = [(root, False)]
    while stack:
        node, expanded = stack.pop()
        if expanded:
            order.append(node)
            continue
        if id(node) in visited or not node.requires_grad:
            continue
        visited.add(id(node))
        stack.append((node, True))
        for parent in node.parents:
            if parent.requires_grad and id(parent) not in visited:
                stack.append((parent, False))
    return order


def backward(loss: Node) -> None:
    """
    Accumulate d loss / d parameter into every trainable parameter reachable from `loss`.

    Call once per graph.

    Raises:
        ShapeError: loss is not a scalar
    """
    if loss.value.size != 1:
        raise ShapeError(f"backward needs a scalar loss, got shape {loss.shape}")
    if not loss.requires_grad:
        return
    loss.grad = np.ones_like(loss.value)
    for node in reversed(topological_order(loss)):
        if node.backward_fn is not None and node.grad is not None:
            node.backward_fn(node.grad)
