"""
Multilingual Training
=====================

Loads treebanks and lexical resources for a RunConfig, builds the
vocabulary and model, and trains with balanced mini-batches:

- each mini-batch holds one sentence per language; its per-sentence
  gradients are summed, then one SGD step is taken
- after every epoch the dev set (first N sentences per language) is parsed,
  mu follows the tagger's dev error rate, and the parameters are
  snapshotted when dev UAS improves
- training stops once dev UAS has not improved for `patience` epochs and
  the best snapshot is restored
"""

import logging
import math
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Dict, List, Mapping, Optional, Tuple

import numpy as np

from ..autodiff import SGDTrainer, backward
from ..config import RunConfig
from ..errors import ConfigError, PolyparseError, TrainingDivergedError
from ..lexicon.language import language_vector_table
from ..lexicon.resources import attach_clusters, load_clusters, load_embeddings, load_wals
from ..parsing.model import MultilingualModel
from ..parsing.representations import DropoutState, LexicalResources
from ..parsing.transitions import Action
from ..treebank.conllu import Sentence, Treebank, preprocess, read_conllu
from ..treebank.projectivity import lift_nonprojective
from ..treebank.vocabulary import build_vocabulary
from .batching import BalancedBatcher
from .evaluation import attachment_scores, tag_accuracy

logger = logging.getLogger(__name__)


# ============================================
# Early stopping
# ============================================

class EarlyStopping:
    """Tracks the best dev score; epochs are numbered from 1"""

    def __init__(self, patience: int):
        if patience < 1:
            raise ValueError("patience must be at least 1")
        self.patience = patience
        self.best_score = -math.inf
        self.best_epoch = 0
        self.last_epoch = 0

    def update(self, score: float, epoch: int) -> bool:
        """Record an epoch's score; True when it is a new best"""
        self.last_epoch = epoch
        if score > self.best_score:
            self.best_score = score
            self.best_epoch = epoch
            return True
        return False

    def should_stop(self) -> bool:
        return self.last_epoch - self.best_epoch >= self.patience


@dataclass
class EpochRecord:
    epoch: int
    loss: float
    parse_loss: float
    tag_loss: float
    dev_uas: float
    dev_las: float
    dev_tag_accuracy: Optional[float]
    mu: float
    learning_rate: float
    clipped: int
    seconds: float


@dataclass
class TrainingResult:
    model: MultilingualModel
    history: List[EpochRecord] = field(default_factory=list)
    best_epoch: int = 0
    best_uas: float = 0.0


# ============================================
# Data loading
# ============================================

def read_treebanks(
    paths: Mapping[str, str],
    split: str,
    langs: Tuple[str, ...] = (),
    workers: int = 1,
) -> Dict[str, Treebank]:
    """Read one treebank per language (in parallel with workers > 1)"""
    selected = sorted(lang for lang in paths if not langs or lang in langs)

    def read(lang: str) -> Treebank:
        return read_conllu(paths[lang], language=lang, split=split)

    if workers > 1 and len(selected) > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            treebanks = list(pool.map(read, selected))
    else:
        treebanks = [read(lang) for lang in selected]
    for lang, tb in zip(selected, treebanks):
        logger.info(f"{split} {lang}: {len(tb)} sentences, {tb.n_tokens} tokens")
    return dict(zip(selected, treebanks))


def load_resources(config: RunConfig) -> LexicalResources:
    resources = LexicalResources()
    if config.lexical:
        resources.pretrained = load_embeddings(config.embeddings)
        if config.clusters:
            resources.clusters = load_clusters(config.clusters)
    return resources


def prepare_sentences(
    sentences: List[Sentence],
    resources: LexicalResources,
    language: Optional[str] = None,
) -> List[Sentence]:
    """Preprocess, fill in a missing language and attach clusters"""
    if language is not None:
        sentences = [s if s.language is not None else s.with_language(language) for s in sentences]
    prepared = [preprocess(s) for s in sentences]
    if resources.clusters:
        prepared = [attach_clusters(s, resources.clusters) for s in prepared]
    return prepared


def build_model(
    config: RunConfig,
    train_sets: Mapping[str, List[Sentence]],
    resources: LexicalResources,
    rng: Optional[np.random.Generator] = None,
) -> MultilingualModel:
    """Vocabulary, language vectors and a freshly initialized model"""
    vocab = build_vocabulary([Treebank(sents, language=lang) for lang, sents in sorted(train_sets.items())])
    languages = sorted(set(vocab.languages.symbols) | set(config.langs))
    wals = load_wals(config.wals) if config.language_vector.uses_wals else None
    vectors = language_vector_table(languages, config.language_vector, wals) if config.uses_language_vectors else {}
    return MultilingualModel(config, vocab, resources, vectors, rng=rng)


# ============================================
# Trainer
# ============================================

class Trainer:
    """
    Args:
        config: Run configuration
        model: Model to train in place
        train_sets: Prepared training sentences per language
        dev_sets: Prepared dev sentences per language
        rng: Generator for batching and dropout
    """

    def __init__(
        self,
        config: RunConfig,
        model: MultilingualModel,
        train_sets: Mapping[str, List[Sentence]],
        dev_sets: Mapping[str, List[Sentence]],
        rng: np.random.Generator,
    ):
        self.config = config
        self.model = model
        self.dev_sets = {lang: list(s) for lang, s in sorted(dev_sets.items())}
        batch_rng, dropout_rng = rng.spawn(2)
        self.dropout = DropoutState(
            mu=1.0,
            fine_pos_rate=config.fine_pos_dropout,
            unk_rate=config.unk_replace,
            rng=dropout_rng,
        )
        self.optimizer = SGDTrainer(model.store, eta0=config.eta0, decay=config.eta_decay, clip=config.clip)
        self.examples = self._gold_examples(train_sets)
        self.batcher = BalancedBatcher(self.examples, batch_rng)

    def _gold_examples(self, train_sets: Mapping[str, List[Sentence]]) -> Dict[str, List[Tuple[Sentence, List[Action]]]]:
        """Pair each training sentence with the oracle actions of its projectivized tree"""
        examples: Dict[str, List[Tuple[Sentence, List[Action]]]] = {}
        for lang, sentences in sorted(train_sets.items()):
            lifted = 0
            pairs = []
            for sentence in sentences:
                tree, lifts = lift_nonprojective(sentence.gold_tree())
                lifted += lifts
                pairs.append((sentence, self.model.gold_actions(sentence, tree)))
            examples[lang] = pairs
            if lifted:
                logger.info(f"{lang}: {lifted} arcs lifted to projectivize the training trees")
        return examples

    # ============================================
    # Epochs
    # ============================================

    def run_epoch(self, epoch_index: int) -> Tuple[float, float, float, int]:
        """
        One pass of balanced mini-batches.

        Returns:
            (total loss, parse loss, tag loss, number of clipped updates)

        Raises:
            TrainingDivergedError: non-finite loss
        """
        total = parse = tag = 0.0
        clipped = 0
        for batch in self.batcher.epoch():
            for lang, (sentence, gold) in batch:
                loss = self.model.sentence_loss(sentence, self.dropout, training=True, gold_actions=gold)
                value = float(loss.total.value)
                if not math.isfinite(value):
                    raise TrainingDivergedError(
                        f"non-finite loss {value} in epoch {epoch_index + 1} on a {lang} sentence of {len(sentence)} tokens"
                    )
                backward(loss.total)
                total += value
                parse += loss.parse
                tag += loss.tag
            update = self.optimizer.update(epoch_index)
            if not math.isfinite(update.gradient_norm):
                raise TrainingDivergedError(f"non-finite gradient norm in epoch {epoch_index + 1}")
            clipped += update.clipped
        return total, parse, tag, clipped

    def evaluate_dev(self) -> Tuple[float, float, Optional[float]]:
        """Dev UAS, LAS (percent) and tag accuracy (fraction, joint models only)"""
        gold: List[Sentence] = []
        predicted: List[Sentence] = []
        for sentences in self.dev_sets.values():
            for sentence in sentences:
                result, tag_ids = self.model.decode(sentence)
                tree = result.tree.relabel(lambda r: self.model.vocab.deprels.symbol(int(r)))
                tags = None
                if tag_ids is not None:
                    tags = [self.model.vocab.upos.symbol(i) for i in tag_ids]
                gold.append(sentence)
                predicted.append(sentence.with_predictions(tree=tree, tags=tags))
        if not gold:
            return 0.0, 0.0, None
        scores = attachment_scores(gold, predicted)
        accuracy = tag_accuracy(gold, predicted) / 100.0 if self.model.joint else None
        return scores.uas, scores.las, accuracy

    def train(self) -> TrainingResult:
        config = self.config
        stopper = EarlyStopping(config.patience)
        result = TrainingResult(self.model)
        best_snapshot = self.model.store.snapshot()
        logger.info(
            f"Training on {', '.join(self.batcher.languages)}: {len(self.batcher)} mini-batches per epoch, "
            f"up to {config.max_epochs} epochs, patience {config.patience}"
        )

        for epoch_index in range(config.max_epochs):
            epoch = epoch_index + 1
            start = time.perf_counter()
            total, parse, tag, clipped = self.run_epoch(epoch_index)
            uas, las, accuracy = self.evaluate_dev()
            if self.model.joint and accuracy is not None:
                self.dropout.update_mu(accuracy)

            record = EpochRecord(
                epoch=epoch,
                loss=total,
                parse_loss=parse,
                tag_loss=tag,
                dev_uas=uas,
                dev_las=las,
                dev_tag_accuracy=accuracy,
                mu=self.dropout.mu,
                learning_rate=self.optimizer.learning_rate(epoch_index),
                clipped=clipped,
                seconds=time.perf_counter() - start,
            )
            result.history.append(record)
            tag_text = f", tag acc {100 * accuracy:.2f}, mu {self.dropout.mu:.3f}" if accuracy is not None else ""
            logger.info(
                f"Epoch {epoch}: loss {total:.3f} (parse {parse:.3f}, tag {tag:.3f}), "
                f"dev UAS {uas:.2f} LAS {las:.2f}{tag_text}, lr {record.learning_rate:.4f}, "
                f"{clipped} clipped, {record.seconds:.1f}s"
            )

            if stopper.update(uas, epoch):
                best_snapshot = self.model.store.snapshot()
                logger.info(f"New best dev UAS {uas:.2f} at epoch {epoch}")
            elif stopper.should_stop():
                logger.info(f"No improvement for {config.patience} epochs; stopping after epoch {epoch}")
                break

        self.model.store.restore(best_snapshot)
        result.best_epoch = stopper.best_epoch
        result.best_uas = stopper.best_score
        logger.info(f"Best dev UAS {result.best_uas:.2f} at epoch {result.best_epoch}")
        return result


def train(
    config: RunConfig,
    treebanks: Optional[Mapping[str, List[Sentence]]] = None,
    dev_treebanks: Optional[Mapping[str, List[Sentence]]] = None,
    resources: Optional[LexicalResources] = None,
) -> TrainingResult:
    """
    Train a model for `config`.

    Treebanks default to the files named by config.train / config.dev. The
    dev set is the first config.dev_sentences sentences per language; without
    dev files the training sentences stand in.

    Raises:
        ConfigError: no training data
        TrainingDivergedError: non-finite loss
    """
    init_seq, train_seq = np.random.SeedSequence(config.seed).spawn(2)
    resources = resources if resources is not None else load_resources(config)

    if treebanks is None:
        if not config.train:
            raise ConfigError("no training treebanks given (--train LANG=PATH)")
        read = read_treebanks(config.train, "train", config.langs, config.workers)
        treebanks = {lang: tb.sentences for lang, tb in read.items()}
    if dev_treebanks is None:
        read = read_treebanks(config.dev, "dev", config.langs, config.workers) if config.dev else {}
        dev_treebanks = {lang: tb.sentences for lang, tb in read.items()}

    train_sets = {lang: prepare_sentences(list(s), resources, lang) for lang, s in treebanks.items()}
    if not any(train_sets.values()):
        raise PolyparseError("training treebanks contain no sentences")
    if not dev_treebanks:
        logger.warning("No dev treebanks; early stopping uses the first training sentences")
        dev_treebanks = train_sets
    dev_sets = {
        lang: prepare_sentences(list(s)[: config.dev_sentences], resources, lang)
        for lang, s in dev_treebanks.items()
    }

    model = build_model(config, train_sets, resources, np.random.default_rng(init_seq))
    dev_sets = {lang: s for lang, s in dev_sets.items() if lang in model.supported_languages()}
    trainer = Trainer(config, model, train_sets, dev_sets, np.random.default_rng(train_seq))
    return trainer.train()
