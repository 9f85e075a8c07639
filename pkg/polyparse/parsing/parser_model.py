"""
Stack-LSTM Parser
=================

Three stack-LSTMs summarize the stack (s), the buffer (b) and the action
history (a). The parser state is

    p = max{0, W [s; b; a; l'] + W_bias}

and the next action is drawn from softmax(G p + q) restricted to the
actions whose arc-standard preconditions hold.

ROOT is not pushed: the stack-LSTM's learned empty vector stands for a stack
holding only ROOT. A reduce pops head and dependent and pushes
tanh(U [head; dependent; relation] + u) in the head's place.
"""

import logging
from dataclasses import dataclass
from typing import List, Optional, Sequence, Tuple

import numpy as np

from ..autodiff import (
    LSTMParams,
    Node,
    ParameterStore,
    StackLSTM,
    affine,
    concat,
    lookup,
    masked_log_softmax,
    rectify,
    softmax,
    softmax_cross_entropy,
    sum_scalars,
    tanh,
)
from ..config import RunConfig
from ..errors import IllegalActionError, ShapeError
from ..treebank.tree import DependencyTree
from .transitions import (
    Action,
    ActionKind,
    action_index,
    action_inventory,
    apply,
    initial_configuration,
    legal_actions,
    tree_from_arcs,
)

logger = logging.getLogger(__name__)


@dataclass
class ParseResult:
    tree: DependencyTree
    actions: List[Action]
    log_probs: List[float]


def legal_action_ids(kinds, n_labels: int) -> List[int]:
    """Inventory positions of every action whose kind is legal"""
    ids: List[int] = []
    if ActionKind.SHIFT in kinds:
        ids.append(0)
    for r in range(n_labels):
        if ActionKind.REDUCE_LEFT in kinds:
            ids.append(1 + 2 * r)
        if ActionKind.REDUCE_RIGHT in kinds:
            ids.append(2 + 2 * r)
    return sorted(ids)


class ParserNetwork:
    """
    Args:
        config: Dimensions and language-injection switches
        store: Parameter store
        token_dim: Size of the token representations pushed on the stacks
        n_labels: Number of dependency relations
        lang_dim: Size of l' (0 when language embeddings are off)
    """

    def __init__(self, config: RunConfig, store: ParameterStore, token_dim: int, n_labels: int, lang_dim: int = 0):
        self.config = config
        self.store = store
        self.token_dim = token_dim
        self.n_labels = n_labels
        self.inventory = action_inventory(n_labels)
        self.n_actions = len(self.inventory)

        self.lang_state_dim = lang_dim if config.injects("state") else 0
        self.lang_action_dim = lang_dim if config.injects("action") else 0

        H, layers = config.lstm_dim, config.lstm_layers
        self.stack_lstm = LSTMParams.create(store, "parser.stack", token_dim, H, layers)
        self.buffer_lstm = LSTMParams.create(store, "parser.buffer", token_dim, H, layers)
        self.action_lstm = LSTMParams.create(store, "parser.actions", config.action_dim + self.lang_action_dim, H, layers)
        self.stack_empty = store.add("parser.stack.empty", H)
        self.buffer_empty = store.add("parser.buffer.empty", H)
        self.action_empty = store.add("parser.actions.empty", H)

        self.action_embed = store.add("parser.action_embed", (self.n_actions, config.action_dim))
        self.relation_embed = store.add("parser.relation_embed", (n_labels, config.relation_dim))

        self.W = store.add("parser.W", (config.state_dim, 3 * H + self.lang_state_dim))
        self.W_bias = store.add("parser.W_bias", config.state_dim, init="zeros")
        self.G = store.add("parser.G", (self.n_actions, config.state_dim))
        self.q = store.add("parser.q", self.n_actions, init="zeros")

        self.U = store.add("parser.compose.U", (token_dim, 2 * token_dim + config.relation_dim))
        self.u = store.add("parser.compose.u", token_dim, init="zeros")

    # ============================================
    # Building blocks
    # ============================================

    def parser_state(self, s: Node, b: Node, a: Node, lang_emb: Optional[Node] = None) -> Node:
        parts = [s, b, a]
        if self.lang_state_dim:
            if lang_emb is None:
                raise ShapeError("parser state expects a language embedding")
            parts.append(lang_emb)
        return rectify(affine(self.W, concat(parts), self.W_bias))

    def action_scores(self, p: Node) -> Node:
        return affine(self.G, p, self.q)

    def action_distribution(self, p: Node, legal_ids: Sequence[int]) -> np.ndarray:
        """Probabilities over the full inventory; zero outside `legal_ids`"""
        if not legal_ids:
            raise ShapeError("no legal action")
        return softmax(self.action_scores(p).value, legal_ids)

    def subtree_composition(self, head: Node, dependent: Node, relation: int) -> Node:
        rel = lookup(self.relation_embed, relation)
        return tanh(affine(self.U, concat([head, dependent, rel]), self.u))

    def _action_input(self, action_id: int, lang_emb: Optional[Node]) -> Node:
        emb = lookup(self.action_embed, action_id)
        if self.lang_action_dim:
            return concat([emb, lang_emb])
        return emb

    # ============================================
    # Transition loop
    # ============================================

    def _run(
        self,
        inputs: Sequence[Node],
        lang_emb: Optional[Node],
        gold: Optional[Sequence[Action]] = None,
    ) -> Tuple[List[Action], List[float], Optional[Node], DependencyTree]:
        n = len(inputs)
        config = initial_configuration(n)
        stack = StackLSTM(self.stack_lstm, self.stack_empty)
        buffer = StackLSTM(self.buffer_lstm, self.buffer_empty)
        history = StackLSTM(self.action_lstm, self.action_empty)
        for index in range(n, 0, -1):
            buffer.push(inputs[index - 1], (index, inputs[index - 1]))

        losses: List[Node] = []
        actions: List[Action] = []
        log_probs: List[float] = []
        step = 0
        while not config.is_terminal():
            legal_ids = legal_action_ids(legal_actions(config), self.n_labels)
            p = self.parser_state(stack.summary(), buffer.summary(), history.summary(), lang_emb)
            scores = self.action_scores(p)
            log_p = masked_log_softmax(scores.value, legal_ids)

            if gold is not None:
                if step >= len(gold):
                    raise IllegalActionError(f"gold sequence ended after {step} actions before the parse completed")
                action_id = action_index(gold[step])
                if action_id not in legal_ids:
                    raise IllegalActionError(f"gold action {gold[step]} is illegal at step {step}")
                losses.append(softmax_cross_entropy(scores, action_id, legal_ids))
            else:
                # -inf outside the legal set; argmax picks the smallest id on ties
                action_id = int(np.argmax(log_p))

            action = self.inventory[action_id]
            config = apply(config, action)
            actions.append(action)
            log_probs.append(float(log_p[action_id]))

            if action.kind is ActionKind.SHIFT:
                item = buffer.pop()
                stack.push(item[1], item)
            else:
                top = stack.pop()
                # an empty stack-LSTM here means the head is ROOT and the parse is complete
                if len(stack):
                    second = stack.pop()
                    if action.kind is ActionKind.REDUCE_RIGHT:
                        head, dep = second, top
                    else:
                        head, dep = top, second
                    composed = self.subtree_composition(head[1], dep[1], int(action.label))
                    stack.push(composed, (head[0], composed))
            history.push(self._action_input(action_id, lang_emb))
            step += 1

        tree = tree_from_arcs(sorted(config.arcs, key=lambda arc: arc[1]), n)
        loss = sum_scalars(losses) if losses else None
        return actions, log_probs, loss, tree

    def sentence_loss(self, inputs: Sequence[Node], gold_actions: Sequence[Action], lang_emb: Optional[Node] = None) -> Node:
        """
        -sum_j log p(z_j | p_j) along the gold action sequence, conditioning on gold history.

        Raises:
            IllegalActionError: a gold action is illegal where it occurs
        """
        _, _, loss, _ = self._run(inputs, lang_emb, gold=gold_actions)
        return loss

    def greedy_parse(self, inputs: Sequence[Node], lang_emb: Optional[Node] = None) -> ParseResult:
        actions, log_probs, _, tree = self._run(inputs, lang_emb)
        return ParseResult(tree, actions, log_probs)
