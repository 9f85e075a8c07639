"""
Projection of English lexical resources into other languages through a
bilingual dictionary with alignment probabilities.

Projected entries are keyed "<language>:<word>".
"""

import logging
from collections import defaultdict
from dataclasses import dataclass
from typing import Dict, Iterable, List, Mapping, Optional, Sequence, Set, Tuple, Union

import Levenshtein
import numpy as np

from ..errors import ResourceFormatError
from .resources import Alignment, EmbeddingTable, language_key

logger = logging.getLogger(__name__)


@dataclass
class ProjectionStats:
    aligned: int = 0
    edit_distance: int = 0
    unknown: int = 0


def _group_alignments(dictionary: Sequence[Alignment]) -> Dict[Tuple[str, str], List[Tuple[str, float]]]:
    grouped: Dict[Tuple[str, str], List[Tuple[str, float]]] = defaultdict(list)
    for row in dictionary:
        grouped[(row.language, row.target)].append((row.english, row.probability))
    return grouped


def _weighted_average(english: EmbeddingTable, translations: List[Tuple[str, float]]) -> Optional[np.ndarray]:
    known = [(w, p) for w, p in translations if w in english]
    if not known:
        return None
    weights = np.array([p for _, p in known], dtype=np.float64)
    total = weights.sum()
    if total > 0:
        weights = weights / total
    else:
        weights = np.full(len(known), 1.0 / len(known))
    vectors = np.stack([english.vector(w) for w, _ in known])
    return weights @ vectors


def _edit_neighbours(word: str, by_length: Mapping[int, List[str]]) -> List[str]:
    n = len(word)
    return [
        other
        for length in (n - 1, n, n + 1)
        for other in by_length.get(length, ())
        if Levenshtein.distance(word, other) == 1
    ]


def robust_projection(
    english: Union[EmbeddingTable, Mapping[str, np.ndarray]],
    dictionary: Sequence[Alignment],
    target_vocabulary: Optional[Mapping[str, Iterable[str]]] = None,
    english_language: Optional[str] = None,
) -> Tuple[EmbeddingTable, ProjectionStats]:
    """
    Build target-language embeddings from English ones.

    Aligned target words get the probability-weighted average of their
    English translations (weights renormalized per word). Unaligned words of
    `target_vocabulary` ({language: words}) get the plain average of the
    aligned words of their language at edit distance 1; the rest stay unknown.

    Args:
        english: English embeddings
        dictionary: Alignment rows
        target_vocabulary: Extra words per language to cover by edit distance
        english_language: When given, English vectors are also emitted as "<english_language>:<word>"

    Raises:
        ResourceFormatError: empty dictionary
        ShapeError: English vectors of mixed dimension
    """
    if not dictionary:
        raise ResourceFormatError("robust projection needs a nonempty bilingual dictionary")
    if not isinstance(english, EmbeddingTable):
        english = EmbeddingTable.from_mapping(english)

    stats = ProjectionStats()
    projected: Dict[str, np.ndarray] = {}
    aligned: Dict[str, Dict[str, np.ndarray]] = defaultdict(dict)

    for (language, target), translations in _group_alignments(dictionary).items():
        vector = _weighted_average(english, translations)
        if vector is None:
            continue
        aligned[language][target] = vector
        projected[language_key(language, target)] = vector
        stats.aligned += 1

    for language, words in (target_vocabulary or {}).items():
        known = aligned.get(language, {})
        by_length: Dict[int, List[str]] = defaultdict(list)
        for word in sorted(known):
            by_length[len(word)].append(word)
        seen: Set[str] = set()
        for word in words:
            if word in known or word in seen:
                continue
            seen.add(word)
            neighbours = _edit_neighbours(word, by_length)
            if neighbours:
                projected[language_key(language, word)] = np.mean([known[w] for w in neighbours], axis=0)
                stats.edit_distance += 1
            else:
                stats.unknown += 1

    if english_language:
        for word, vector in english.items():
            projected.setdefault(language_key(english_language, word), vector.copy())

    logger.info(
        f"Robust projection: {stats.aligned} aligned, {stats.edit_distance} by edit distance, "
        f"{stats.unknown} left unknown"
    )
    if not projected:
        return EmbeddingTable([], np.zeros((0, english.dim))), stats
    return EmbeddingTable.from_mapping(projected), stats


def project_clusters(
    english_clusters: Mapping[str, str],
    dictionary: Sequence[Alignment],
    english_language: Optional[str] = None,
) -> Dict[str, str]:
    """
    Give each aligned target word the cluster of its most probable English
    translation; ties go to the lexicographically smallest cluster.

    Raises:
        ResourceFormatError: empty cluster map or dictionary
    """
    if not english_clusters:
        raise ResourceFormatError("cluster projection needs a nonempty English cluster map")
    if not dictionary:
        raise ResourceFormatError("cluster projection needs a nonempty bilingual dictionary")

    projected: Dict[str, str] = {}
    for (language, target), translations in _group_alignments(dictionary).items():
        candidates = [(p, english_clusters[w]) for w, p in translations if w in english_clusters]
        if not candidates:
            continue
        best = max(p for p, _ in candidates)
        projected[language_key(language, target)] = min(c for p, c in candidates if p == best)

    if english_language:
        for word, cluster in english_clusters.items():
            projected.setdefault(language_key(english_language, word), cluster)

    logger.info(f"Projected clusters onto {len(projected)} words")
    return projected
