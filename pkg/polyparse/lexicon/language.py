"""
Language vectors: language-ID one-hots or typology vectors from WALS.

Typology features are categorical; each feature becomes a one-hot block over
its observed categories. A missing value is filled with the average block of
the language's genus, or of all languages when no genus-mate has it.
"""

import logging
from enum import Enum
from pathlib import Path
from typing import Dict, Optional, Sequence, Union

import numpy as np

from ..errors import ResourceFormatError, UnknownLanguageError
from .resources import WalsTable

logger = logging.getLogger(__name__)

# order of subject/verb, object/verb, adposition/noun, genitive/noun, adjective/noun
WORD_ORDER_FEATURES = ("82A", "83A", "85A", "86A", "87A")


class LanguageVectorMode(Enum):
    NONE = "none"
    LANG_ID = "lang-id"
    WORD_ORDER = "word-order"
    FULL_WALS = "full-wals"

    @property
    def uses_wals(self) -> bool:
        return self in (LanguageVectorMode.WORD_ORDER, LanguageVectorMode.FULL_WALS)


def _feature_block(wals: WalsTable, language: str, feature: str) -> np.ndarray:
    categories = wals.values_of(feature)
    if not categories:
        return np.zeros(0)

    def one_hot(lang: str) -> np.ndarray:
        block = np.zeros(len(categories))
        block[categories.index(wals.features[lang][feature])] = 1.0
        return block

    if feature in wals.features.get(language, {}):
        return one_hot(language)

    genus = wals.genus[language]
    mates = [
        lang for lang in wals.languages
        if lang != language and wals.genus[lang] == genus and feature in wals.features[lang]
    ]
    if not mates:
        mates = [lang for lang in wals.languages if feature in wals.features[lang]]
    return np.mean([one_hot(lang) for lang in mates], axis=0)


def language_vector(
    language: str,
    mode: LanguageVectorMode,
    languages: Sequence[str],
    wals: Optional[WalsTable] = None,
) -> np.ndarray:
    """
    The raw language vector l.

    Args:
        language: Language to encode
        mode: Vector definition
        languages: Ordered language inventory (for one-hot ids)
        wals: Typology table, required by the WALS modes

    Raises:
        UnknownLanguageError: language outside the inventory or the WALS table
        ResourceFormatError: WALS mode without a table, or no word-order feature in it
    """
    if mode is LanguageVectorMode.NONE:
        return np.zeros(0)
    if mode is LanguageVectorMode.LANG_ID:
        if language not in languages:
            raise UnknownLanguageError(language, languages)
        vector = np.zeros(len(languages))
        vector[list(languages).index(language)] = 1.0
        return vector

    if wals is None:
        raise ResourceFormatError(f"language-vector mode '{mode.value}' needs a WALS table")
    if language not in wals:
        raise UnknownLanguageError(language, wals.languages)

    if mode is LanguageVectorMode.WORD_ORDER:
        features = [f for f in WORD_ORDER_FEATURES if wals.values_of(f)]
        if not features:
            raise ResourceFormatError("WALS table has none of the word-order features " + ", ".join(WORD_ORDER_FEATURES))
        return np.concatenate([_feature_block(wals, language, f) for f in features])

    blocks = [_feature_block(wals, language, f) for f in wals.feature_names()]
    return 2.0 * np.concatenate(blocks) - 1.0


def language_vector_table(
    languages: Sequence[str],
    mode: LanguageVectorMode,
    wals: Optional[WalsTable] = None,
) -> Dict[str, np.ndarray]:
    """Vectors for every language of the inventory, all of one dimension"""
    table = {lang: language_vector(lang, mode, languages, wals) for lang in languages}
    if table:
        logger.info(f"Language vectors ({mode.value}): {len(table)} languages, dimension {len(next(iter(table.values())))}")
    return table


def write_language_vectors(table: Dict[str, np.ndarray], path: Union[str, Path]) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as f:
        for language in sorted(table):
            f.write(language + "\t" + " ".join(repr(float(v)) for v in table[language]) + "\n")


def read_language_vectors(path: Union[str, Path]) -> Dict[str, np.ndarray]:
    table: Dict[str, np.ndarray] = {}
    with open(path, "r", encoding="utf-8") as f:
        for line_number, line in enumerate(f, start=1):
            if not line.strip():
                continue
            language, _, values = line.rstrip("\n").partition("\t")
            try:
                table[language] = np.array([float(v) for v in values.split()])
            except ValueError:
                raise ResourceFormatError("non-numeric language vector", line_number, str(path)) from None
    dims = {len(v) for v in table.values()}
    if len(dims) > 1:
        raise ResourceFormatError(f"language vectors of mixed dimension {sorted(dims)}", path=str(path))
    return table
