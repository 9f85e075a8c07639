"""
CoNLL-U Treebank I/O
====================

Reads and writes the 10-column CoNLL-U format and applies the training
preprocessing (lowercasing, removal of language-specific relation subtypes).

Multiword-token ranges ("3-4") and empty nodes ("5.1") are dropped on read.
Comment lines are kept verbatim and written back unchanged, so a file that
only contains word lines and comments round-trips byte for byte.
"""

import io
import logging
import re
from dataclasses import dataclass, replace
from pathlib import Path
from typing import BinaryIO, Dict, Iterable, Iterator, List, Optional, Tuple, Union

from ..errors import ConlluFormatError, TreeStructureError
from .tree import DependencyTree, tree_problem

logger = logging.getLogger(__name__)

Source = Union[str, Path, BinaryIO]

N_COLUMNS = 10
LANGUAGE_COMMENT = re.compile(r"^#\s*language\s*=\s*(\S+)\s*$")
_WORD_ID = re.compile(r"^[0-9]+$")


@dataclass(frozen=True)
class Token:
    """
    One syntactic word.

    `gold_head` is None only for unannotated input (HEAD column "_").
    The `pred_*` fields carry parser or tagger output and, when set, are what
    write_conllu puts in the HEAD, DEPREL and UPOS columns.
    """
    index: int
    form: str
    upos: str
    xpos: Optional[str] = None
    gold_head: Optional[int] = None
    gold_deprel: str = "_"
    lowercased_form: str = ""
    cluster: Optional[str] = None
    lemma: str = "_"
    feats: str = "_"
    deps: str = "_"
    misc: str = "_"
    pred_head: Optional[int] = None
    pred_deprel: Optional[str] = None
    pred_upos: Optional[str] = None

    def __post_init__(self):
        if self.index < 1:
            raise TreeStructureError(f"token index {self.index} < 1")
        if self.gold_head is not None:
            if self.gold_head < 0:
                raise TreeStructureError(f"token {self.index} has negative head {self.gold_head}")
            if self.gold_head == self.index:
                raise TreeStructureError(f"token {self.index} is its own head")

    @property
    def head(self) -> Optional[int]:
        """Predicted head when present, gold head otherwise"""
        return self.pred_head if self.pred_head is not None else self.gold_head

    @property
    def deprel(self) -> str:
        return self.pred_deprel if self.pred_deprel is not None else self.gold_deprel

    @property
    def tag(self) -> str:
        return self.pred_upos if self.pred_upos is not None else self.upos

    @property
    def fine_tag(self) -> str:
        """Fine tag, falling back to the coarse tag for languages without one"""
        return self.xpos if self.xpos is not None else self.upos


@dataclass(frozen=True)
class Sentence:
    tokens: Tuple[Token, ...]
    language: Optional[str] = None
    metadata: Tuple[str, ...] = ()

    def __len__(self) -> int:
        return len(self.tokens)

    def __iter__(self) -> Iterator[Token]:
        return iter(self.tokens)

    @property
    def is_annotated(self) -> bool:
        return all(t.gold_head is not None for t in self.tokens)

    def gold_tree(self) -> DependencyTree:
        if not self.is_annotated:
            raise TreeStructureError("sentence has no gold heads")
        return DependencyTree(
            tuple(t.gold_head for t in self.tokens),
            tuple(t.gold_deprel for t in self.tokens),
        )

    def with_gold_tree(self, tree: DependencyTree) -> "Sentence":
        tokens = tuple(
            replace(t, gold_head=h, gold_deprel=str(lab))
            for t, h, lab in zip(self.tokens, tree.heads, tree.labels)
        )
        return replace(self, tokens=tokens)

    def with_predictions(
        self,
        tree: Optional[DependencyTree] = None,
        tags: Optional[List[str]] = None,
    ) -> "Sentence":
        tokens = list(self.tokens)
        if tree is not None:
            tokens = [
                replace(t, pred_head=h, pred_deprel=str(lab))
                for t, h, lab in zip(tokens, tree.heads, tree.labels)
            ]
        if tags is not None:
            tokens = [replace(t, pred_upos=tag) for t, tag in zip(tokens, tags)]
        return replace(self, tokens=tuple(tokens))

    def with_language(self, language: str) -> "Sentence":
        return replace(self, language=language)


@dataclass
class Treebank:
    """
    Sentences of one language and split.

    `skipped` counts sentences dropped on read because their heads did not
    form a tree.
    """
    sentences: List[Sentence]
    language: Optional[str] = None
    split: str = "train"
    skipped: int = 0

    def __len__(self) -> int:
        return len(self.sentences)

    def __iter__(self) -> Iterator[Sentence]:
        return iter(self.sentences)

    @property
    def n_tokens(self) -> int:
        return sum(len(s) for s in self.sentences)

    def languages(self) -> List[str]:
        seen: Dict[str, None] = {}
        for sentence in self.sentences:
            if sentence.language is not None:
                seen.setdefault(sentence.language)
        return list(seen)


# ============================================
# Reading
# ============================================

def _open_text(source: Source) -> Tuple[io.TextIOBase, bool]:
    if isinstance(source, (str, Path)):
        return open(source, "r", encoding="utf-8", newline=""), True
    return io.TextIOWrapper(source, encoding="utf-8", newline=""), False


def read_conllu(
    source: Source,
    language: Optional[str] = None,
    split: str = "train",
    require_tree: bool = True,
) -> Treebank:
    """
    Read a CoNLL-U treebank.

    Args:
        source: Path or binary stream
        language: Language of every sentence without a "# language = xx" comment
        split: train/dev/test tag stored on the treebank
        require_tree: Skip (with a warning) sentences whose heads are not a tree

    Returns:
        Treebank

    Raises:
        ConlluFormatError: malformed line (wrong column count, non-integer ID or HEAD)
        TreeStructureError: HEAD outside 0..n
    """
    stream, owned = _open_text(source)
    sentences: List[Sentence] = []
    skipped = 0
    try:
        for block, first_line in _blocks(stream):
            sentence, problem = _parse_block(block, first_line, language)
            if sentence is None and problem is None:
                continue
            if sentence is not None and require_tree and sentence.is_annotated:
                problem = tree_problem([t.gold_head for t in sentence.tokens])
            if problem and (require_tree or sentence is None):
                skipped += 1
                logger.warning("Skipping sentence at line %d: %s", first_line, problem)
                continue
            sentences.append(sentence)
    finally:
        if owned:
            stream.close()
        else:
            stream.detach()

    if skipped:
        logger.info(f"Skipped {skipped} non-tree sentences, kept {len(sentences)}")
    return Treebank(sentences, language=language, split=split, skipped=skipped)


def _blocks(stream: Iterable[str]) -> Iterator[Tuple[List[Tuple[int, str]], int]]:
    block: List[Tuple[int, str]] = []
    first = 0
    for line_number, raw in enumerate(stream, start=1):
        line = raw.rstrip("\r\n")
        if not line.strip():
            if block:
                yield block, first
                block = []
            continue
        if not block:
            first = line_number
        block.append((line_number, line))
    if block:
        yield block, first


def _parse_block(
    block: List[Tuple[int, str]], first_line: int, default_language: Optional[str]
) -> Tuple[Optional[Sentence], Optional[str]]:
    """Sentence of a block, or (None, problem) for a self-looping head; (None, None) for comment-only blocks"""
    metadata: List[str] = []
    language = default_language
    rows: List[Tuple[int, List[str]]] = []

    for line_number, line in block:
        if line.startswith("#"):
            metadata.append(line)
            match = LANGUAGE_COMMENT.match(line)
            if match:
                language = match.group(1)
            continue

        columns = line.split("\t")
        if len(columns) != N_COLUMNS:
            raise ConlluFormatError(
                f"expected {N_COLUMNS} tab-separated columns, found {len(columns)}", line_number
            )
        token_id = columns[0]
        if "-" in token_id or "." in token_id:
            continue
        if not _WORD_ID.match(token_id):
            raise ConlluFormatError(f"invalid token ID '{token_id}'", line_number)
        rows.append((line_number, columns))

    if not rows:
        if metadata:
            logger.debug("Comment-only block at line %d ignored", first_line)
        return None, None

    n = len(rows)
    heads: List[Optional[int]] = []
    for position, (line_number, columns) in enumerate(rows, start=1):
        token_id, head = columns[0], columns[6]
        if int(token_id) != position:
            raise ConlluFormatError(f"token ID {token_id} out of sequence (expected {position})", line_number)
        if head == "_":
            heads.append(None)
            continue
        try:
            value = int(head)
        except ValueError:
            raise ConlluFormatError(f"non-integer HEAD '{head}'", line_number) from None
        if value < 0 or value > n:
            raise TreeStructureError(f"line {line_number}: HEAD {value} outside 0..{n}")
        heads.append(value)

    if any(h is not None and h == d for d, h in enumerate(heads, start=1)):
        return None, "a token is its own head"

    tokens = tuple(
        Token(
            index=position,
            form=form,
            upos=upos,
            xpos=None if xpos == "_" else xpos,
            gold_head=gold_head,
            gold_deprel=deprel,
            lemma=lemma,
            feats=feats,
            deps=deps,
            misc=misc,
        )
        for position, ((_, (_, form, lemma, upos, xpos, feats, _, deprel, deps, misc)), gold_head)
        in enumerate(zip(rows, heads), start=1)
    )
    return Sentence(tokens, language=language, metadata=tuple(metadata)), None


# ============================================
# Preprocessing
# ============================================

def base_relation(deprel: str) -> str:
    """Relation with its language-specific subtype removed ("nmod:poss" -> "nmod")"""
    return deprel.split(":", 1)[0]


def preprocess(sentence: Sentence) -> Sentence:
    """Lowercase forms and strip relation subtypes"""
    tokens = tuple(
        replace(
            t,
            lowercased_form=t.form.lower(),
            gold_deprel=base_relation(t.gold_deprel),
        )
        for t in sentence.tokens
    )
    return replace(sentence, tokens=tokens)


# ============================================
# Writing
# ============================================

def format_sentence(sentence: Sentence) -> str:
    lines = list(sentence.metadata)
    for t in sentence.tokens:
        head = t.head
        lines.append("\t".join([
            str(t.index),
            t.form,
            t.lemma,
            t.tag,
            t.xpos if t.xpos is not None else "_",
            t.feats,
            "_" if head is None else str(head),
            t.deprel,
            t.deps,
            t.misc,
        ]))
    return "\n".join(lines) + "\n\n"


def write_conllu(treebank: Union[Treebank, Iterable[Sentence]], sink: Union[str, Path, BinaryIO]) -> None:
    """
    Write sentences as CoNLL-U (UTF-8, '\\n' line ends).

    Predicted heads, relations and tags replace the gold columns when present.
    """
    sentences = treebank.sentences if isinstance(treebank, Treebank) else list(treebank)
    payload = "".join(format_sentence(s) for s in sentences).encode("utf-8")
    if isinstance(sink, (str, Path)):
        with open(sink, "wb") as f:
            f.write(payload)
    else:
        sink.write(payload)
        if hasattr(sink, "flush"):
            sink.flush()
