"""
Lexical Resource Files
======================

Loaders and writers for the plain-text resources the parser consumes:

    embeddings   "word v1 ... vd" per line, optional "<vocab-size> <dim>" header
    clusters     "<cluster>\\t<word>[\\t<frequency>]" per line
    dictionary   "<target-lang>\\t<target-word>\\t<english-word>\\t<probability>"
    WALS table   "<language>\\t<genus>\\t<feature>=<value>[\\t...]"

Words in embedding and cluster files may be language-prefixed ("de:hund");
lookups try "<language>:<word>" first, then the bare word.
Duplicate entries keep the last occurrence and log a warning.
"""

import logging
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Dict, Iterator, List, Mapping, Optional, Sequence, Tuple, Union

import numpy as np

from ..errors import ResourceFormatError, ShapeError
from ..treebank.conllu import Sentence

logger = logging.getLogger(__name__)

PathLike = Union[str, Path]


def language_key(language: Optional[str], word: str) -> str:
    return f"{language}:{word}" if language else word


def _lines(path: PathLike) -> Iterator[Tuple[int, str]]:
    with open(path, "r", encoding="utf-8") as f:
        for line_number, raw in enumerate(f, start=1):
            line = raw.rstrip("\r\n")
            if line.strip():
                yield line_number, line


# ============================================
# Embeddings
# ============================================

class EmbeddingTable:
    """
    Word vectors plus a zero UNK row at index len(words).
    """

    def __init__(self, words: Sequence[str], vectors: np.ndarray):
        vectors = np.asarray(vectors, dtype=np.float64)
        if vectors.ndim != 2 or vectors.shape[0] != len(words):
            raise ShapeError(f"{len(words)} words but vector matrix of shape {vectors.shape}")
        self.words: List[str] = list(words)
        self.index: Dict[str, int] = {w: i for i, w in enumerate(self.words)}
        self.dim = vectors.shape[1]
        self.matrix = np.vstack([vectors, np.zeros((1, self.dim))])

    @classmethod
    def from_mapping(cls, vectors: Mapping[str, np.ndarray]) -> "EmbeddingTable":
        words = list(vectors)
        if not words:
            return cls([], np.zeros((0, 0)))
        dims = {np.asarray(vectors[w]).shape for w in words}
        if len(dims) != 1:
            raise ShapeError(f"embedding vectors of mixed shapes {sorted(dims)}")
        return cls(words, np.stack([np.asarray(vectors[w], dtype=np.float64) for w in words]))

    @property
    def unk_id(self) -> int:
        return len(self.words)

    @property
    def n_rows(self) -> int:
        return len(self.words) + 1

    def row(self, word: Optional[str], language: Optional[str] = None) -> int:
        if word is None:
            return self.unk_id
        if language:
            found = self.index.get(language_key(language, word))
            if found is not None:
                return found
        return self.index.get(word, self.unk_id)

    def vector(self, word: Optional[str], language: Optional[str] = None) -> np.ndarray:
        return self.matrix[self.row(word, language)]

    def __contains__(self, word: str) -> bool:
        return word in self.index

    def __len__(self) -> int:
        return len(self.words)

    def items(self) -> Iterator[Tuple[str, np.ndarray]]:
        for i, w in enumerate(self.words):
            yield w, self.matrix[i]


def load_embeddings(path: PathLike, dim: Optional[int] = None) -> EmbeddingTable:
    """
    Load a space-separated embedding file.

    Args:
        path: Embedding file
        dim: Expected dimension; defaults to the header or the first vector

    Raises:
        ResourceFormatError: malformed line or dimension mismatch
    """
    vectors: Dict[str, np.ndarray] = {}
    duplicates = 0
    first = True
    for line_number, line in _lines(path):
        fields = line.rstrip().split(" ")
        if first:
            first = False
            if len(fields) == 2 and all(f.isdigit() for f in fields):
                declared = int(fields[1])
                if dim is not None and declared != dim:
                    raise ResourceFormatError(f"header declares dimension {declared}, expected {dim}", line_number, str(path))
                dim = declared
                continue
        word, values = fields[0], fields[1:]
        if dim is None:
            dim = len(values)
        if len(values) != dim or dim == 0:
            raise ResourceFormatError(f"expected {dim} values for '{word}', found {len(values)}", line_number, str(path))
        try:
            vector = np.array([float(v) for v in values], dtype=np.float64)
        except ValueError:
            raise ResourceFormatError(f"non-numeric value in vector for '{word}'", line_number, str(path)) from None
        if word in vectors:
            duplicates += 1
            logger.warning("Duplicate embedding for '%s'; keeping the last one", word)
        vectors[word] = vector

    if not vectors:
        raise ResourceFormatError("no embeddings found", path=str(path))
    if duplicates:
        logger.info(f"{duplicates} duplicate embeddings in {path}")
    logger.info(f"Loaded {len(vectors)} embeddings of dimension {dim} from {path}")
    return EmbeddingTable.from_mapping(vectors)


def write_embeddings(table: EmbeddingTable, path: PathLike) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as f:
        f.write(f"{len(table)} {table.dim}\n")
        for word, vector in table.items():
            f.write(word + " " + " ".join(repr(float(v)) for v in vector) + "\n")


# ============================================
# Clusters
# ============================================

def load_clusters(path: PathLike) -> Dict[str, str]:
    """
    Load a word -> cluster map from "<cluster> <word> [<frequency>]" lines.

    Raises:
        ResourceFormatError: wrong field count or non-integer frequency
    """
    clusters: Dict[str, str] = {}
    for line_number, line in _lines(path):
        fields = line.split()
        if len(fields) not in (2, 3):
            raise ResourceFormatError(f"expected 'cluster word [frequency]', found {len(fields)} fields", line_number, str(path))
        if len(fields) == 3 and not fields[2].isdigit():
            raise ResourceFormatError(f"non-integer frequency '{fields[2]}'", line_number, str(path))
        cluster, word = fields[0], fields[1]
        if word in clusters and clusters[word] != cluster:
            logger.warning("Word '%s' listed in two clusters; keeping the last one", word)
        clusters[word] = cluster
    logger.info(f"Loaded {len(clusters)} cluster assignments from {path}")
    return clusters


def write_clusters(clusters: Mapping[str, str], path: PathLike) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as f:
        for word in sorted(clusters):
            f.write(f"{clusters[word]}\t{word}\n")


def lookup_cluster(clusters: Mapping[str, str], word: str, language: Optional[str] = None) -> Optional[str]:
    if language:
        found = clusters.get(language_key(language, word))
        if found is not None:
            return found
    return clusters.get(word)


def attach_clusters(sentence: Sentence, clusters: Mapping[str, str]) -> Sentence:
    """Fill Token.cluster from the lowercased forms"""
    tokens = tuple(
        replace(t, cluster=lookup_cluster(clusters, t.lowercased_form or t.form.lower(), sentence.language))
        for t in sentence.tokens
    )
    return replace(sentence, tokens=tokens)


# ============================================
# Bilingual dictionary
# ============================================

@dataclass(frozen=True)
class Alignment:
    """One dictionary row: target word aligned to an English word"""
    language: str
    target: str
    english: str
    probability: float


def load_dictionary(path: PathLike) -> List[Alignment]:
    """
    Raises:
        ResourceFormatError: wrong field count or invalid probability
    """
    rows: List[Alignment] = []
    for line_number, line in _lines(path):
        fields = line.split("\t")
        if len(fields) != 4:
            raise ResourceFormatError(f"expected 4 tab-separated fields, found {len(fields)}", line_number, str(path))
        language, target, english, prob = fields
        try:
            probability = float(prob)
        except ValueError:
            raise ResourceFormatError(f"invalid probability '{prob}'", line_number, str(path)) from None
        if not probability >= 0:
            raise ResourceFormatError(f"negative probability {probability}", line_number, str(path))
        rows.append(Alignment(language, target.lower(), english.lower(), probability))
    logger.info(f"Loaded {len(rows)} dictionary entries from {path}")
    return rows


# ============================================
# WALS typology table
# ============================================

@dataclass
class WalsTable:
    genus: Dict[str, str] = field(default_factory=dict)
    features: Dict[str, Dict[str, str]] = field(default_factory=dict)

    def __contains__(self, language: str) -> bool:
        return language in self.genus

    @property
    def languages(self) -> List[str]:
        return sorted(self.genus)

    def feature_names(self) -> List[str]:
        return sorted({name for values in self.features.values() for name in values})

    def values_of(self, feature: str) -> List[str]:
        """Observed categories of a feature, sorted"""
        return sorted({values[feature] for values in self.features.values() if feature in values})


def load_wals(path: PathLike) -> WalsTable:
    """
    Rows of "<language> <genus> <feature>=<value> ...", tab separated.

    A language may span several rows; its genus must not change.

    Raises:
        ResourceFormatError: short row, bad feature field or conflicting genus
    """
    table = WalsTable()
    for line_number, line in _lines(path):
        fields = line.split("\t")
        if len(fields) < 2:
            raise ResourceFormatError("expected '<language>\\t<genus>\\t<feature>=<value>...'", line_number, str(path))
        language, genus = fields[0].strip(), fields[1].strip()
        if table.genus.get(language, genus) != genus:
            raise ResourceFormatError(
                f"language '{language}' listed under genus '{table.genus[language]}' and '{genus}'",
                line_number,
                str(path),
            )
        table.genus[language] = genus
        values = table.features.setdefault(language, {})
        for item in fields[2:]:
            name, sep, value = item.partition("=")
            if not sep or not name.strip() or not value.strip():
                raise ResourceFormatError(f"feature field '{item}' is not '<feature>=<value>'", line_number, str(path))
            if name.strip() in values and values[name.strip()] != value.strip():
                logger.warning("Feature %s given twice for '%s'; keeping the last value", name.strip(), language)
            values[name.strip()] = value.strip()
    logger.info(f"Loaded WALS features for {len(table.genus)} languages from {path}")
    return table
