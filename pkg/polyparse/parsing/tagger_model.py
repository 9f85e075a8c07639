"""
BiLSTM coarse-POS tagger trained jointly with the parser.
"""

import logging
from typing import List, Sequence

import numpy as np

from ..autodiff import BiLSTMParams, Node, ParameterStore, affine, bilstm, rectify, softmax, softmax_cross_entropy, sum_scalars
from ..config import RunConfig
from ..errors import ShapeError

logger = logging.getLogger(__name__)


class TaggerNetwork:
    """
    Tag scores: rectified input layer, one-layer BiLSTM, per-position affine
    over the coarse tagset.
    """

    def __init__(self, config: RunConfig, store: ParameterStore, input_dim: int, n_tags: int):
        if n_tags < 1:
            raise ShapeError("the tagger needs a nonempty tagset")
        self.n_tags = n_tags
        self.T_in = store.add("tagger.in.W", (config.tagger_input_dim, input_dim))
        self.t_in = store.add("tagger.in.b", config.tagger_input_dim, init="zeros")
        self.lstm = BiLSTMParams.create(store, "tagger.bilstm", config.tagger_input_dim, config.tagger_hidden_dim)
        self.T_out = store.add("tagger.out.W", (n_tags, self.lstm.output_dim))
        self.t_out = store.add("tagger.out.b", n_tags, init="zeros")

    def tag_scores(self, inputs: Sequence[Node]) -> List[Node]:
        if not inputs:
            raise ShapeError("cannot tag an empty sentence")
        hidden = bilstm(self.lstm, [rectify(affine(self.T_in, x, self.t_in)) for x in inputs])
        return [affine(self.T_out, h, self.t_out) for h in hidden]

    def tag_distributions(self, inputs: Sequence[Node]) -> List[np.ndarray]:
        return [softmax(s.value) for s in self.tag_scores(inputs)]

    def tagging_loss(self, scores: Sequence[Node], gold_tags: Sequence[int]) -> Node:
        """-sum_i log p(y_i | x); gold tags outside the tagset are skipped"""
        losses = [softmax_cross_entropy(s, y) for s, y in zip(scores, gold_tags) if 0 <= y < self.n_tags]
        if not losses:
            return Node(np.zeros((), dtype=scores[0].value.dtype))
        return sum_scalars(losses)

    @staticmethod
    def argmax_tags(scores: Sequence[Node]) -> List[int]:
        # np.argmax returns the first maximum: ties go to the smallest tag id
        return [int(np.argmax(s.value)) for s in scores]

    def predict_tags(self, inputs: Sequence[Node]) -> List[int]:
        return self.argmax_tags(self.tag_scores(inputs))
