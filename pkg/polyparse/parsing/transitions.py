"""
Arc-standard transition system
==============================

ROOT (index 0) starts on the stack. With stack top v and second item u:

    SHIFT            move the buffer front onto the stack
    REDUCE_RIGHT(r)  add u -> v with label r, pop v
    REDUCE_LEFT(r)   add v -> u with label r, remove u

ROOT can only take a dependent through REDUCE_RIGHT once the buffer is empty
and the stack is exactly [ROOT, x], which guarantees a single root.
"""

from dataclasses import dataclass, field
from enum import Enum
from typing import FrozenSet, Hashable, List, Optional, Sequence, Sized, Tuple, Union

from ..errors import IllegalActionError, IncompleteParseError, NonProjectiveError, TreeStructureError
from ..treebank.projectivity import is_projective
from ..treebank.tree import ROOT, DependencyTree


class ActionKind(Enum):
    SHIFT = "SHIFT"
    REDUCE_LEFT = "REDUCE_LEFT"
    REDUCE_RIGHT = "REDUCE_RIGHT"


@dataclass(frozen=True)
class Action:
    kind: ActionKind
    label: Optional[Hashable] = None

    def __post_init__(self):
        if (self.kind is ActionKind.SHIFT) != (self.label is None):
            raise ValueError(f"{self.kind.value} {'takes no' if self.kind is ActionKind.SHIFT else 'needs a'} label")

    def __str__(self) -> str:
        if self.kind is ActionKind.SHIFT:
            return "SHIFT"
        return f"{self.kind.value}({self.label})"


SHIFT = Action(ActionKind.SHIFT)

Arc = Tuple[int, int, Hashable]


@dataclass(frozen=True)
class ParserConfiguration:
    """Stack (top last), buffer (front first), history and arcs so far"""
    stack: Tuple[int, ...]
    buffer: Tuple[int, ...]
    history: Tuple[Action, ...] = ()
    arcs: FrozenSet[Arc] = field(default_factory=frozenset)

    @property
    def n_tokens(self) -> int:
        return len(self.stack) + len(self.buffer) + len(self.arcs) - 1

    def is_terminal(self) -> bool:
        return not self.buffer and self.stack == (ROOT,)

    def has_head(self, token: int) -> bool:
        return any(d == token for _, d, _ in self.arcs)


def initial_configuration(n_tokens: Union[int, Sized]) -> ParserConfiguration:
    """
    Configuration for a sentence of `n_tokens` tokens (also accepts a Sentence).

    Raises:
        IncompleteParseError: empty sentence
    """
    n = n_tokens if isinstance(n_tokens, int) else len(n_tokens)
    if n < 1:
        raise IncompleteParseError("cannot parse an empty sentence")
    return ParserConfiguration(stack=(ROOT,), buffer=tuple(range(1, n + 1)))


def legal_actions(config: ParserConfiguration) -> FrozenSet[ActionKind]:
    legal = set()
    if config.buffer:
        legal.add(ActionKind.SHIFT)
    if len(config.stack) >= 2:
        u = config.stack[-2]
        if u != ROOT:
            legal.add(ActionKind.REDUCE_LEFT)
            legal.add(ActionKind.REDUCE_RIGHT)
        elif not config.buffer and len(config.stack) == 2:
            legal.add(ActionKind.REDUCE_RIGHT)
    return frozenset(legal)


def _violation(config: ParserConfiguration, kind: ActionKind) -> str:
    if kind is ActionKind.SHIFT:
        return "SHIFT needs a nonempty buffer"
    if len(config.stack) < 2:
        return f"{kind.value} needs at least two stack items"
    if kind is ActionKind.REDUCE_LEFT:
        return "REDUCE_LEFT cannot make ROOT a dependent"
    return "ROOT takes its dependent only when the buffer is empty and the stack is [ROOT, x]"


def apply(config: ParserConfiguration, action: Action) -> ParserConfiguration:
    """
    Apply one transition.

    Raises:
        IllegalActionError: the action's precondition does not hold
    """
    if action.kind not in legal_actions(config):
        raise IllegalActionError(f"{action} illegal: {_violation(config, action.kind)}")

    history = config.history + (action,)
    if action.kind is ActionKind.SHIFT:
        return ParserConfiguration(
            stack=config.stack + (config.buffer[0],),
            buffer=config.buffer[1:],
            history=history,
            arcs=config.arcs,
        )

    u, v = config.stack[-2], config.stack[-1]
    if action.kind is ActionKind.REDUCE_RIGHT:
        arc = (u, v, action.label)
        stack = config.stack[:-1]
    else:
        arc = (v, u, action.label)
        stack = config.stack[:-2] + (v,)
    return ParserConfiguration(stack=stack, buffer=config.buffer, history=history, arcs=config.arcs | {arc})


def oracle(tree: DependencyTree) -> List[Action]:
    """
    Static oracle: the eager arc-standard action sequence producing `tree`.

    A reduce is preferred over SHIFT whenever it is gold-consistent; a right
    reduce fires only once the dependent has collected all its dependents.

    Raises:
        NonProjectiveError: the tree must be projectivized first
    """
    if not is_projective(tree):
        raise NonProjectiveError("oracle needs a projective tree; projectivize the training data first")

    n = len(tree)
    missing = [0] * (n + 1)
    for h in tree.heads:
        missing[h] += 1

    config = initial_configuration(n)
    actions: List[Action] = []
    while not config.is_terminal():
        action = SHIFT
        if len(config.stack) >= 2:
            u, v = config.stack[-2], config.stack[-1]
            if u != ROOT and tree.head(u) == v:
                action = Action(ActionKind.REDUCE_LEFT, tree.label(u))
            elif tree.head(v) == u and missing[v] == 0:
                action = Action(ActionKind.REDUCE_RIGHT, tree.label(v))

        if action.kind is ActionKind.REDUCE_LEFT:
            missing[config.stack[-1]] -= 1
        elif action.kind is ActionKind.REDUCE_RIGHT:
            missing[config.stack[-2]] -= 1
        elif not config.buffer:
            raise NonProjectiveError("oracle got stuck; the tree is not reachable by arc-standard")

        config = apply(config, action)
        actions.append(action)
    return actions


def action_inventory(deprel_count: int) -> List[Action]:
    """
    All actions over relation ids 0..deprel_count-1.

    Index 0 is SHIFT; relation r has REDUCE_LEFT at 1 + 2r and REDUCE_RIGHT at 2 + 2r.
    """
    if deprel_count < 1:
        raise ValueError("action inventory needs at least one relation")
    actions = [SHIFT]
    for r in range(deprel_count):
        actions.append(Action(ActionKind.REDUCE_LEFT, r))
        actions.append(Action(ActionKind.REDUCE_RIGHT, r))
    return actions


def action_index(action: Action) -> int:
    """Position of `action` (relation label as integer id) in action_inventory"""
    if action.kind is ActionKind.SHIFT:
        return 0
    offset = 1 if action.kind is ActionKind.REDUCE_LEFT else 2
    return offset + 2 * int(action.label)


def tree_from_arcs(arcs: Sequence[Arc], n: int) -> DependencyTree:
    """
    Head/label arrays from (head, dependent, label) arcs.

    Raises:
        IncompleteParseError: fewer than n arcs
        TreeStructureError: duplicate or out-of-range dependent
    """
    if len(arcs) < n:
        raise IncompleteParseError(f"incomplete parse: {len(arcs)} arcs for {n} tokens")
    heads: List[Optional[int]] = [None] * n
    labels: List[Hashable] = [None] * n
    for h, d, lab in sorted(arcs, key=lambda a: a[1]):
        if not 1 <= d <= n:
            raise TreeStructureError(f"dependent {d} outside 1..{n}")
        if heads[d - 1] is not None:
            raise TreeStructureError(f"token {d} has two heads ({heads[d - 1]} and {h})")
        heads[d - 1] = h
        labels[d - 1] = lab
    return DependencyTree(tuple(heads), tuple(labels))
