"""
Evaluation
==========

Attachment scores, tag accuracy and class-wise recall of gold vs. predicted
treebanks. Every token counts, punctuation included. Relations are compared
after removing language-specific subtypes, since the parser only predicts
base relations.

Predicted values are read through Token.head / Token.deprel / Token.tag, so
both in-memory predictions and re-read CoNLL-U files work.
"""

import logging
from collections import OrderedDict
from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, Iterable, List, Optional, Sequence, Tuple, Union

from ..errors import AlignmentError
from ..treebank.conllu import Sentence, Token, Treebank, base_relation
from ..treebank.tree import ROOT

logger = logging.getLogger(__name__)

SentencesLike = Union[Treebank, Sequence[Sentence]]

LONG_DISTANCE = 6

RELATION_GROUPS: "OrderedDict[str, Tuple[str, ...]]" = OrderedDict([
    ("nsubj*", ("nsubj", "nsubjpass")),
    ("dobj", ("dobj", "obj")),
    ("conj", ("conj",)),
    ("*comp", ("ccomp", "xcomp")),
    ("case", ("case",)),
    ("*mod", ("nmod", "nummod", "amod", "appos")),
    ("neg", ("neg",)),
])
POSITION_CLASSES = ("left", "right", "root", "short", "long")


def _sentences(data: SentencesLike) -> List[Sentence]:
    return list(data.sentences) if isinstance(data, Treebank) else list(data)


def aligned_tokens(gold: SentencesLike, predicted: SentencesLike) -> Iterable[Tuple[Sentence, Token, Token]]:
    """
    Raises:
        AlignmentError: different sentence counts or sentence lengths
    """
    gold_sents, pred_sents = _sentences(gold), _sentences(predicted)
    if len(gold_sents) != len(pred_sents):
        raise AlignmentError(f"{len(gold_sents)} gold sentences but {len(pred_sents)} predicted")
    for k, (g, p) in enumerate(zip(gold_sents, pred_sents), start=1):
        if len(g) != len(p):
            raise AlignmentError(f"sentence {k}: {len(g)} gold tokens but {len(p)} predicted")
        for gt, pt in zip(g.tokens, p.tokens):
            yield g, gt, pt


def _same_relation(gold: Token, pred: Token) -> bool:
    return base_relation(gold.gold_deprel) == base_relation(pred.deprel)


@dataclass
class AttachmentScores:
    uas: float
    las: float
    tokens: int


def attachment_scores(gold: SentencesLike, predicted: SentencesLike) -> AttachmentScores:
    """UAS and LAS in percent over all tokens"""
    total = heads = labeled = 0
    for _, g, p in aligned_tokens(gold, predicted):
        total += 1
        if g.gold_head == p.head:
            heads += 1
            if _same_relation(g, p):
                labeled += 1
    if total == 0:
        return AttachmentScores(0.0, 0.0, 0)
    return AttachmentScores(100.0 * heads / total, 100.0 * labeled / total, total)


def tag_accuracy(gold: SentencesLike, predicted: SentencesLike) -> float:
    """Coarse-tag accuracy in percent"""
    total = correct = 0
    for _, g, p in aligned_tokens(gold, predicted):
        total += 1
        correct += g.upos == p.tag
    return 100.0 * correct / total if total else 0.0


@dataclass
class Recall:
    correct: int = 0
    total: int = 0

    @property
    def recall(self) -> Optional[float]:
        return 100.0 * self.correct / self.total if self.total else None


def relation_group(deprel: str) -> Optional[str]:
    base = base_relation(deprel)
    for group, members in RELATION_GROUPS.items():
        if base in members:
            return group
    return None


def class_recall(gold: SentencesLike, predicted: SentencesLike) -> "OrderedDict[str, Recall]":
    """
    Recall over gold arcs per class.

    Positional classes (left: head precedes dependent, right, root, short:
    distance 1, long: distance > 6) need the head only; root arcs are
    excluded from the other positional classes. Relation groups need head
    and relation.
    """
    table: "OrderedDict[str, Recall]" = OrderedDict((name, Recall()) for name in POSITION_CLASSES)
    for group in RELATION_GROUPS:
        table[group] = Recall()

    for _, g, p in aligned_tokens(gold, predicted):
        head_ok = g.gold_head == p.head
        classes = []
        if g.gold_head == ROOT:
            classes.append("root")
        else:
            classes.append("left" if g.gold_head < g.index else "right")
            distance = abs(g.gold_head - g.index)
            if distance == 1:
                classes.append("short")
            elif distance > LONG_DISTANCE:
                classes.append("long")
        for name in classes:
            table[name].total += 1
            table[name].correct += head_ok

        group = relation_group(g.gold_deprel)
        if group is not None:
            table[group].total += 1
            table[group].correct += head_ok and _same_relation(g, p)
    return table


# ============================================
# Reports
# ============================================

@dataclass
class LanguageScores:
    uas: float
    las: float
    tokens: int
    tag_accuracy: Optional[float] = None


@dataclass
class EvalReport:
    """Per-language and macro-averaged scores, plus class recall over everything"""
    languages: "OrderedDict[str, LanguageScores]" = field(default_factory=OrderedDict)
    recall: Optional["OrderedDict[str, Recall]"] = None

    @property
    def macro_uas(self) -> float:
        return _mean([s.uas for s in self.languages.values()])

    @property
    def macro_las(self) -> float:
        return _mean([s.las for s in self.languages.values()])

    @property
    def macro_tag_accuracy(self) -> Optional[float]:
        values = [s.tag_accuracy for s in self.languages.values() if s.tag_accuracy is not None]
        return _mean(values) if values else None

    def rows(self) -> List[Tuple[str, str, float]]:
        """(language, metric, value) rows; language "macro" holds the averages"""
        rows: List[Tuple[str, str, float]] = []
        for lang, s in self.languages.items():
            rows += [(lang, "UAS", s.uas), (lang, "LAS", s.las)]
            if s.tag_accuracy is not None:
                rows.append((lang, "TAG", s.tag_accuracy))
        if self.languages:
            rows += [("macro", "UAS", self.macro_uas), ("macro", "LAS", self.macro_las)]
            if self.macro_tag_accuracy is not None:
                rows.append(("macro", "TAG", self.macro_tag_accuracy))
        if self.recall is not None:
            for name, cell in self.recall.items():
                if cell.recall is not None:
                    rows.append(("all", f"recall:{name}", cell.recall))
        return rows

    def to_tsv(self) -> str:
        return "".join(f"{lang}\t{metric}\t{value:.2f}\n" for lang, metric, value in self.rows())

    def to_text(self) -> str:
        lines = [f"{'language':<10} {'tokens':>8} {'UAS':>7} {'LAS':>7} {'TAG':>7}"]
        for lang, s in self.languages.items():
            tag = f"{s.tag_accuracy:7.2f}" if s.tag_accuracy is not None else f"{'-':>7}"
            lines.append(f"{lang:<10} {s.tokens:>8} {s.uas:7.2f} {s.las:7.2f} {tag}")
        if len(self.languages) > 1:
            tag = self.macro_tag_accuracy
            tag_text = f"{tag:7.2f}" if tag is not None else f"{'-':>7}"
            tokens = sum(s.tokens for s in self.languages.values())
            lines.append(f"{'macro':<10} {tokens:>8} {self.macro_uas:7.2f} {self.macro_las:7.2f} {tag_text}")
        if self.recall is not None:
            lines.append("")
            lines.append(format_recall(self.recall))
        return "\n".join(lines) + "\n"

    def write(self, text_path: Optional[Union[str, Path]] = None, tsv_path: Optional[Union[str, Path]] = None) -> None:
        if text_path is not None:
            Path(text_path).write_text(self.to_text(), encoding="utf-8")
        if tsv_path is not None:
            Path(tsv_path).write_text(self.to_tsv(), encoding="utf-8")


def _mean(values: Sequence[float]) -> float:
    return sum(values) / len(values) if values else 0.0


def format_recall(table: "OrderedDict[str, Recall]") -> str:
    lines = [f"{'class':<10} {'gold':>7} {'recall':>7}"]
    for name, cell in table.items():
        value = f"{cell.recall:7.2f}" if cell.recall is not None else f"{'-':>7}"
        lines.append(f"{name:<10} {cell.total:>7} {value}")
    return "\n".join(lines)


def evaluate(
    gold: SentencesLike,
    predicted: SentencesLike,
    with_tags: bool = False,
    with_recall: bool = False,
) -> EvalReport:
    """
    Scores per language of the gold sentences (sentences without a language
    are grouped under "_").
    """
    gold_sents, pred_sents = _sentences(gold), _sentences(predicted)
    if len(gold_sents) != len(pred_sents):
        raise AlignmentError(f"{len(gold_sents)} gold sentences but {len(pred_sents)} predicted")

    groups: Dict[str, Tuple[List[Sentence], List[Sentence]]] = OrderedDict()
    for g, p in zip(gold_sents, pred_sents):
        pair = groups.setdefault(g.language or "_", ([], []))
        pair[0].append(g)
        pair[1].append(p)

    report = EvalReport()
    for lang in sorted(groups):
        g, p = groups[lang]
        scores = attachment_scores(g, p)
        report.languages[lang] = LanguageScores(
            uas=scores.uas,
            las=scores.las,
            tokens=scores.tokens,
            tag_accuracy=tag_accuracy(g, p) if with_tags else None,
        )
    if with_recall:
        report.recall = class_recall(gold_sents, pred_sents)
    return report
