"""
Vocabularies over words, tags, clusters, relations and languages.

Observed symbols get dense ids 0..n-1 in first-seen order; every table
reserves id n for unknown symbols, so an embedding table needs n + 1 rows.
"""

import hashlib
import logging
from collections import Counter
from dataclasses import dataclass, field
from typing import Dict, FrozenSet, Hashable, Iterable, List, Optional, Sequence

import msgpack

from ..errors import PolyparseError, UnknownLanguageError
from .conllu import Sentence, Treebank

logger = logging.getLogger(__name__)


class SymbolTable:
    """Dense symbol -> id map with a reserved UNK id"""

    def __init__(self, symbols: Iterable[str] = ()):
        self._symbols: List[str] = []
        self._ids: Dict[str, int] = {}
        for symbol in symbols:
            self.add(symbol)

    def add(self, symbol: str) -> int:
        if symbol not in self._ids:
            self._ids[symbol] = len(self._symbols)
            self._symbols.append(symbol)
        return self._ids[symbol]

    @property
    def unk_id(self) -> int:
        return len(self._symbols)

    @property
    def n_rows(self) -> int:
        """Rows an embedding table over this vocabulary needs (UNK included)"""
        return len(self._symbols) + 1

    def lookup(self, symbol: Optional[str]) -> int:
        if symbol is None:
            return self.unk_id
        return self._ids.get(symbol, self.unk_id)

    def symbol(self, index: int) -> str:
        return self._symbols[index]

    def __contains__(self, symbol: Hashable) -> bool:
        return symbol in self._ids

    def __len__(self) -> int:
        return len(self._symbols)

    def __iter__(self):
        return iter(self._symbols)

    @property
    def symbols(self) -> List[str]:
        return list(self._symbols)


@dataclass
class Vocabulary:
    words: SymbolTable = field(default_factory=SymbolTable)
    upos: SymbolTable = field(default_factory=SymbolTable)
    xpos: SymbolTable = field(default_factory=SymbolTable)
    clusters: SymbolTable = field(default_factory=SymbolTable)
    deprels: SymbolTable = field(default_factory=SymbolTable)
    languages: SymbolTable = field(default_factory=SymbolTable)
    singletons: FrozenSet[str] = frozenset()

    def language_id(self, language: Optional[str]) -> int:
        if language is None or language not in self.languages:
            raise UnknownLanguageError(str(language), self.languages.symbols)
        return self.languages.lookup(language)

    def to_dict(self) -> Dict[str, List[str]]:
        return {
            "words": self.words.symbols,
            "upos": self.upos.symbols,
            "xpos": self.xpos.symbols,
            "clusters": self.clusters.symbols,
            "deprels": self.deprels.symbols,
            "languages": self.languages.symbols,
            "singletons": sorted(self.singletons),
        }

    @classmethod
    def from_dict(cls, data: Dict[str, Sequence[str]]) -> "Vocabulary":
        return cls(
            words=SymbolTable(data["words"]),
            upos=SymbolTable(data["upos"]),
            xpos=SymbolTable(data["xpos"]),
            clusters=SymbolTable(data["clusters"]),
            deprels=SymbolTable(data["deprels"]),
            languages=SymbolTable(data["languages"]),
            singletons=frozenset(data.get("singletons", ())),
        )

    def content_hash(self) -> str:
        """SHA-256 of the canonical serialization, recorded in model manifests"""
        packed = msgpack.packb(self.to_dict(), use_bin_type=True)
        return hashlib.sha256(packed).hexdigest()


def _word_key(token) -> str:
    return token.lowercased_form or token.form.lower()


def build_vocabulary(treebanks: Sequence[Treebank]) -> Vocabulary:
    """
    Build vocabularies over preprocessed training treebanks.

    Words are keyed by lowercased form and shared across languages. Fine tags
    include the coarse tags, which stand in for missing fine tags.

    Raises:
        PolyparseError: no sentences at all
    """
    sentences: List[Sentence] = [s for tb in treebanks for s in tb.sentences]
    if not sentences:
        raise PolyparseError("cannot build a vocabulary from empty training data")

    vocab = Vocabulary()
    counts: Counter = Counter()

    for tb in treebanks:
        for sentence in tb.sentences:
            language = sentence.language or tb.language
            if language is None:
                raise PolyparseError("training sentence without a language")
            vocab.languages.add(language)
            for token in sentence.tokens:
                word = _word_key(token)
                counts[word] += 1
                vocab.words.add(word)
                vocab.upos.add(token.upos)
                vocab.xpos.add(token.fine_tag)
                if token.cluster is not None:
                    vocab.clusters.add(token.cluster)
                vocab.deprels.add(token.gold_deprel)

    vocab.singletons = frozenset(w for w, c in counts.items() if c == 1)
    logger.info(
        f"Vocabulary: {len(vocab.words)} words ({len(vocab.singletons)} singletons), "
        f"{len(vocab.upos)} coarse / {len(vocab.xpos)} fine tags, {len(vocab.clusters)} clusters, "
        f"{len(vocab.deprels)} relations, {len(vocab.languages)} languages"
    )
    return vocab
