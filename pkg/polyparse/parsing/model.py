"""
Multilingual Model
==================

Ties the vocabulary, lexical resources, language vectors, token encoder,
parser and (optionally) tagger into one object that can be trained, saved,
loaded and used to parse or tag sentences of any supported language.
"""

import logging
from dataclasses import dataclass
from typing import Any, Dict, List, Mapping, Optional, Tuple

import numpy as np

from ..autodiff import Node, ParameterStore, add
from ..config import RunConfig
from ..errors import ConfigError
from ..lexicon.resources import attach_clusters
from ..treebank.conllu import Sentence, preprocess
from ..treebank.projectivity import projectivize
from ..treebank.tree import DependencyTree
from ..treebank.vocabulary import Vocabulary
from .parser_model import ParserNetwork, ParseResult
from .representations import DropoutState, LexicalResources, TokenEncoder
from .tagger_model import TaggerNetwork
from .transitions import Action, oracle

logger = logging.getLogger(__name__)


@dataclass
class SentenceLoss:
    total: Node
    parse: float
    tag: float


class MultilingualModel:
    """
    One parser (and tagger) for every language of the vocabulary.

    Args:
        config: Run configuration (features and dimensions)
        vocab: Training vocabulary
        resources: Pretrained embeddings and cluster map
        language_vectors: Raw language vector per language
        rng: Generator for parameter initialization
    """

    def __init__(
        self,
        config: RunConfig,
        vocab: Vocabulary,
        resources: Optional[LexicalResources] = None,
        language_vectors: Optional[Mapping[str, np.ndarray]] = None,
        rng: Optional[np.random.Generator] = None,
    ):
        if config.joint_tagging and not config.lexical:
            raise ConfigError("joint tagging needs lexical resources")
        self.config = config
        self.vocab = vocab
        self.resources = resources or LexicalResources()
        self.language_vectors = {k: np.asarray(v, dtype=np.float64) for k, v in (language_vectors or {}).items()}
        self.store = ParameterStore(rng if rng is not None else np.random.default_rng(config.seed), config.precision)

        self.encoder = TokenEncoder(config, vocab, self.store, self.resources, self.language_vectors)
        lang_dim = config.lang_dim if config.uses_language_vectors else 0
        self.parser = ParserNetwork(config, self.store, self.encoder.parse_dim, len(vocab.deprels), lang_dim)
        self.tagger: Optional[TaggerNetwork] = None
        if config.joint_tagging:
            self.tagger = TaggerNetwork(config, self.store, self.encoder.tag_dim, len(vocab.upos))

        logger.info(
            f"Model: {len(self.store)} parameter tensors, token dim {self.encoder.parse_dim}, "
            f"{self.parser.n_actions} actions, tagger {'on' if self.tagger else 'off'}"
        )

    @property
    def joint(self) -> bool:
        return self.tagger is not None

    def supported_languages(self) -> List[str]:
        return self.encoder.supported_languages()

    def manifest(self) -> Dict[str, Any]:
        return {
            "config": self.config.to_dict(),
            "vocabulary_hash": self.vocab.content_hash(),
            "language_vectors": {k: v.tolist() for k, v in sorted(self.language_vectors.items())},
        }

    # ============================================
    # Sentence preparation
    # ============================================

    def prepare(self, sentence: Sentence, language: Optional[str] = None) -> Sentence:
        """Preprocess, set the language and attach clusters"""
        if sentence.language is None and language is not None:
            sentence = sentence.with_language(language)
        self.encoder.check_language(sentence.language)
        sentence = preprocess(sentence)
        if self.resources.clusters:
            sentence = attach_clusters(sentence, self.resources.clusters)
        return sentence

    def gold_actions(self, sentence: Sentence, projective_tree: Optional[DependencyTree] = None) -> List[Action]:
        """Oracle actions of the projectivized gold tree, labels as relation ids"""
        tree = projective_tree if projective_tree is not None else projectivize(sentence.gold_tree())
        return oracle(tree.relabel(self.vocab.deprels.lookup))

    def gold_tag_ids(self, sentence: Sentence) -> List[int]:
        return [self.vocab.upos.lookup(t.upos) for t in sentence.tokens]

    # ============================================
    # Training loss
    # ============================================

    def sentence_loss(
        self,
        sentence: Sentence,
        dropout: Optional[DropoutState] = None,
        training: bool = True,
        gold_actions: Optional[List[Action]] = None,
    ) -> SentenceLoss:
        """
        Parsing loss, plus the tagging loss for joint models.

        With joint tagging the parser reads the tagger's argmax tags (a constant
        per step), passed through block dropout while training.
        """
        lang_emb = self.encoder.language_embedding(sentence.language)
        gold = gold_actions if gold_actions is not None else self.gold_actions(sentence)

        predicted = None
        tag_loss = None
        if self.tagger is not None:
            scores = self.tagger.tag_scores(self.encoder.tag_inputs(sentence, lang_emb))
            tag_loss = self.tagger.tagging_loss(scores, self.gold_tag_ids(sentence))
            predicted = self.tagger.argmax_tags(scores)

        inputs = self.encoder.parse_inputs(sentence, lang_emb, dropout, training, predicted)
        parse_loss = self.parser.sentence_loss(inputs, gold, lang_emb)
        total = parse_loss if tag_loss is None else add(parse_loss, tag_loss)
        return SentenceLoss(
            total=total,
            parse=float(parse_loss.value),
            tag=float(tag_loss.value) if tag_loss is not None else 0.0,
        )

    # ============================================
    # Decoding
    # ============================================

    def predict_tags(self, sentence: Sentence) -> List[str]:
        if self.tagger is None:
            raise ConfigError("this model was trained without joint tagging")
        lang_emb = self.encoder.language_embedding(sentence.language)
        ids = self.tagger.predict_tags(self.encoder.tag_inputs(sentence, lang_emb))
        return [self.vocab.upos.symbol(i) for i in ids]

    def decode(self, sentence: Sentence, gold_pos: bool = False) -> Tuple[ParseResult, Optional[List[int]]]:
        """Greedy parse of a prepared sentence and the tag ids the parser read (None without a tagger)"""
        lang_emb = self.encoder.language_embedding(sentence.language)
        tags = None
        if self.tagger is not None:
            if gold_pos:
                tags = self.gold_tag_ids(sentence)
            else:
                tags = self.tagger.predict_tags(self.encoder.tag_inputs(sentence, lang_emb))
        inputs = self.encoder.parse_inputs(sentence, lang_emb, None, False, tags)
        return self.parser.greedy_parse(inputs, lang_emb), tags

    def parse_result(self, sentence: Sentence, gold_pos: bool = False) -> ParseResult:
        """Greedy parse of a prepared sentence; relation labels are ids"""
        return self.decode(sentence, gold_pos)[0]

    def parse(
        self,
        sentence: Sentence,
        language: Optional[str] = None,
        gold_pos: bool = False,
        with_tags: bool = True,
    ) -> Sentence:
        """
        Parse one raw sentence; returns it with predicted heads and relations
        (and, if `with_tags`, the predicted tags of joint models unless `gold_pos`).
        """
        prepared = self.prepare(sentence, language)
        result, tag_ids = self.decode(prepared, gold_pos)
        tree = result.tree.relabel(lambda r: self.vocab.deprels.symbol(int(r)))
        tags = None
        if tag_ids is not None and with_tags and not gold_pos:
            tags = [self.vocab.upos.symbol(i) for i in tag_ids]
        out = sentence if sentence.language is not None or language is None else sentence.with_language(language)
        return out.with_predictions(tree=tree, tags=tags)

    def tag(self, sentence: Sentence, language: Optional[str] = None) -> Sentence:
        prepared = self.prepare(sentence, language)
        out = sentence if sentence.language is not None or language is None else sentence.with_language(language)
        return out.with_predictions(tags=self.predict_tags(prepared))
