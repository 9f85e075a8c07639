"""
Token Representations
=====================

Builds the vectors the parser and the tagger read for each token, the
language embedding l' = tanh(L l + L_bias), and the two dropout mechanisms:

- block dropout on the predicted coarse-tag embedding (rate mu, tied to the
  tagger's dev error rate)
- plain dropout on the fine-tag embedding (zeroed, never rescaled)

Tables shared between parsing and tagging (pretrained words, clusters,
language embedding) are single Parameter objects.
"""

import logging
from dataclasses import dataclass, field
from typing import Dict, List, Mapping, Optional

import numpy as np

from ..autodiff import Node, Parameter, ParameterStore, affine, concat, lookup, scale, tanh
from ..config import BlockDropoutVariant, RunConfig
from ..errors import ShapeError, UnknownLanguageError
from ..lexicon.resources import EmbeddingTable
from ..treebank.conllu import Sentence, Token
from ..treebank.vocabulary import Vocabulary

logger = logging.getLogger(__name__)


@dataclass
class DropoutState:
    """
    Stochastic state of one training run.

    mu starts at 1.0 (the predicted-tag embedding is always dropped) and is
    set to the tagger's dev error rate after every evaluation.
    """
    mu: float = 1.0
    fine_pos_rate: float = 0.5
    unk_rate: float = 0.25
    rng: np.random.Generator = field(default_factory=lambda: np.random.default_rng(0))

    def __post_init__(self):
        if not 0.0 <= self.mu <= 1.0:
            raise ValueError(f"mu must lie in [0, 1], got {self.mu}")

    def update_mu(self, dev_accuracy: float) -> float:
        """mu <- 1 - accuracy, clamped to [0, 1]"""
        self.mu = min(1.0, max(0.0, 1.0 - dev_accuracy))
        return self.mu


@dataclass
class LexicalResources:
    """Fixed pretrained embeddings and the word -> cluster map"""
    pretrained: Optional[EmbeddingTable] = None
    clusters: Dict[str, str] = field(default_factory=dict)


def block_dropout(
    e: Node,
    mu: float,
    training: bool,
    rng: np.random.Generator,
    variant: BlockDropoutVariant = BlockDropoutVariant.VERBATIM,
) -> Node:
    """
    Zero the whole vector with probability mu, otherwise rescale it.

    Verbatim: (1 - b) / mu * e. Normalized: (1 - b) / (1 - mu) * e.
    Identity at test time and when mu = 0.
    """
    if not 0.0 <= mu <= 1.0:
        raise ValueError(f"mu must lie in [0, 1], got {mu}")
    if not training or mu == 0.0:
        return e
    if rng.random() < mu:
        return Node(np.zeros_like(e.value))
    factor = 1.0 / mu if variant is BlockDropoutVariant.VERBATIM else 1.0 / (1.0 - mu)
    return scale(e, factor)


class TokenEncoder:
    """
    Embedding tables and token representation builders.

    Args:
        config: Feature switches and dimensions
        vocab: Vocabulary the tables are indexed by
        store: Parameter store to register tables in
        resources: Pretrained embeddings and cluster map
        language_vectors: Raw language vector l per language
    """

    def __init__(
        self,
        config: RunConfig,
        vocab: Vocabulary,
        store: ParameterStore,
        resources: LexicalResources,
        language_vectors: Mapping[str, np.ndarray],
    ):
        self.config = config
        self.vocab = vocab
        self.store = store
        self.resources = resources
        self.language_vectors = dict(language_vectors)

        self.pretrained: Optional[Parameter] = None
        self.words: Optional[Parameter] = None
        self.clusters: Optional[Parameter] = None
        self.xpos: Optional[Parameter] = None
        self.L: Optional[Parameter] = None
        self.L_bias: Optional[Parameter] = None

        if config.lexical:
            if resources.pretrained is None:
                raise ShapeError("lexical features need a pretrained embedding table")
            self.pretrained = store.add(
                "embed.pretrained",
                resources.pretrained.matrix.shape,
                trainable=False,
                value=resources.pretrained.matrix,
            )
            self.words = store.add("embed.word", (vocab.words.n_rows, config.word_dim))
            if self.has_clusters:
                self.clusters = store.add("embed.cluster", (vocab.clusters.n_rows, config.cluster_dim))
        self.upos = store.add("embed.upos", (vocab.upos.n_rows, config.upos_dim))
        if self.uses_fine_pos:
            self.xpos = store.add("embed.xpos", (vocab.xpos.n_rows, config.xpos_dim))
        if config.uses_language_vectors:
            raw_dim = self.language_vector_dim
            if raw_dim < 1:
                raise ShapeError("language vectors are enabled but have dimension 0")
            self.L = store.add("lang.L", (config.lang_dim, raw_dim))
            self.L_bias = store.add("lang.L_bias", config.lang_dim, init="zeros")

    @property
    def has_clusters(self) -> bool:
        return bool(self.config.lexical and len(self.vocab.clusters) > 0)

    @property
    def uses_fine_pos(self) -> bool:
        # fine tags are never predicted; joint models drop the slice
        return self.config.fine_pos and not self.config.joint_tagging

    @property
    def language_vector_dim(self) -> int:
        dims = {len(v) for v in self.language_vectors.values()}
        if len(dims) > 1:
            raise ShapeError(f"language vectors of mixed dimension {sorted(dims)}")
        return dims.pop() if dims else 0

    @property
    def parse_dim(self) -> int:
        c = self.config
        dim = c.upos_dim
        if c.lexical:
            dim += self.pretrained.value.shape[1] + c.word_dim
            if self.has_clusters:
                dim += c.cluster_dim
        if self.uses_fine_pos:
            dim += c.xpos_dim
        if c.injects("token"):
            dim += c.lang_dim
        return dim

    @property
    def tag_dim(self) -> int:
        dim = self.pretrained.value.shape[1] if self.pretrained is not None else 0
        if self.has_clusters:
            dim += self.config.cluster_dim
        if self.config.uses_language_vectors:
            dim += self.config.lang_dim
        return dim

    def supported_languages(self) -> List[str]:
        return sorted(set(self.vocab.languages.symbols) | set(self.language_vectors))

    def check_language(self, language: Optional[str]) -> str:
        if language is None or language not in self.supported_languages():
            raise UnknownLanguageError(str(language), self.supported_languages())
        if self.config.uses_language_vectors and language not in self.language_vectors:
            raise UnknownLanguageError(language, self.language_vectors)
        return language

    # ============================================
    # Language embedding
    # ============================================

    def language_embedding(self, language: str) -> Optional[Node]:
        """l' = tanh(L l + L_bias), or None when language vectors are off"""
        if not self.config.uses_language_vectors:
            return None
        self.check_language(language)
        raw = Node(np.asarray(self.language_vectors[language], dtype=self.store.dtype))
        return tanh(affine(self.L, raw, self.L_bias))

    # ============================================
    # Token representations
    # ============================================

    def _word_id(self, token: Token, training: bool, dropout: Optional[DropoutState]) -> int:
        word = token.lowercased_form or token.form.lower()
        if training and dropout is not None and word in self.vocab.singletons:
            if dropout.rng.random() < dropout.unk_rate:
                return self.vocab.words.unk_id
        return self.vocab.words.lookup(word)

    def _pretrained_row(self, token: Token, language: Optional[str]) -> int:
        return self.resources.pretrained.row(token.lowercased_form or token.form.lower(), language)

    def token_rep_parse(
        self,
        token: Token,
        language: Optional[str],
        lang_emb: Optional[Node],
        dropout: Optional[DropoutState] = None,
        training: bool = False,
        predicted_tag: Optional[int] = None,
    ) -> Node:
        """
        Parser input vector of one token.

        Slices: pretrained word (fixed), learned word, cluster, coarse tag,
        fine tag, language embedding; each present only when enabled. With
        `predicted_tag` the coarse slice embeds the tagger's output and goes
        through block dropout during training.
        """
        c = self.config
        parts: List[Node] = []
        if c.lexical:
            parts.append(lookup(self.pretrained, self._pretrained_row(token, language)))
            parts.append(lookup(self.words, self._word_id(token, training, dropout)))
            if self.has_clusters:
                parts.append(lookup(self.clusters, self.vocab.clusters.lookup(token.cluster)))

        if predicted_tag is not None:
            tag = lookup(self.upos, predicted_tag)
            if training and dropout is not None:
                tag = block_dropout(tag, dropout.mu, True, dropout.rng, c.block_dropout)
            parts.append(tag)
        else:
            parts.append(lookup(self.upos, self.vocab.upos.lookup(token.upos)))

        if self.uses_fine_pos:
            fine = lookup(self.xpos, self.vocab.xpos.lookup(token.fine_tag))
            if training and dropout is not None and dropout.rng.random() < dropout.fine_pos_rate:
                fine = Node(np.zeros_like(fine.value))
            parts.append(fine)

        if c.injects("token"):
            parts.append(lang_emb)
        return concat(parts)

    def token_rep_tag(self, token: Token, language: Optional[str], lang_emb: Optional[Node]) -> Node:
        """Tagger input: pretrained word, cluster and language embedding"""
        parts: List[Node] = [lookup(self.pretrained, self._pretrained_row(token, language))]
        if self.has_clusters:
            parts.append(lookup(self.clusters, self.vocab.clusters.lookup(token.cluster)))
        if lang_emb is not None:
            parts.append(lang_emb)
        return concat(parts)

    def parse_inputs(
        self,
        sentence: Sentence,
        lang_emb: Optional[Node],
        dropout: Optional[DropoutState] = None,
        training: bool = False,
        predicted_tags: Optional[List[int]] = None,
    ) -> List[Node]:
        tags = predicted_tags if predicted_tags is not None else [None] * len(sentence)
        return [
            self.token_rep_parse(t, sentence.language, lang_emb, dropout, training, tag)
            for t, tag in zip(sentence.tokens, tags)
        ]

    def tag_inputs(self, sentence: Sentence, lang_emb: Optional[Node]) -> List[Node]:
        return [self.token_rep_tag(t, sentence.language, lang_emb) for t in sentence.tokens]
