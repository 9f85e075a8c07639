"""
Balanced multilingual mini-batches.

Every mini-batch holds one sentence per language; an epoch ends when the
smallest treebank has been used once. Larger treebanks keep their shuffled
queue across epochs and reshuffle when it runs out.
"""

import logging
from collections import deque
from typing import Deque, Dict, Generic, Iterator, List, Mapping, Sequence, Set, Tuple, TypeVar

import numpy as np

from ..errors import PolyparseError

logger = logging.getLogger(__name__)

T = TypeVar("T")


class BalancedBatcher(Generic[T]):
    """
    Args:
        treebanks: Items per language (sentences or precomputed examples)
        rng: Shuffling generator
    """

    def __init__(self, treebanks: Mapping[str, Sequence[T]], rng: np.random.Generator):
        if not treebanks:
            raise PolyparseError("balanced batching needs at least one training treebank")
        for language, items in treebanks.items():
            if len(items) == 0:
                raise PolyparseError(f"training treebank for '{language}' is empty")
        self.languages: List[str] = sorted(treebanks)
        self.treebanks: Dict[str, Sequence[T]] = {lang: treebanks[lang] for lang in self.languages}
        self.rng = rng
        self.epoch_length = min(len(items) for items in self.treebanks.values())
        self._queues: Dict[str, Deque[int]] = {lang: deque() for lang in self.languages}

    def _refill(self, language: str, drawn: Set[int]) -> None:
        """New permutation; indices not yet drawn this epoch come first"""
        size = len(self.treebanks[language])
        fresh = np.array([i for i in range(size) if i not in drawn], dtype=np.int64)
        used = np.array(sorted(drawn), dtype=np.int64)
        self._queues[language].extend(int(i) for i in self.rng.permutation(fresh))
        self._queues[language].extend(int(i) for i in self.rng.permutation(used))

    def _draw(self, language: str, drawn: Set[int]) -> int:
        if not self._queues[language]:
            self._refill(language, drawn)
        index = self._queues[language].popleft()
        drawn.add(index)
        return index

    def epoch(self) -> Iterator[List[Tuple[str, T]]]:
        """One epoch of mini-batches, languages in sorted order inside each batch"""
        drawn: Dict[str, Set[int]] = {lang: set() for lang in self.languages}
        for _ in range(self.epoch_length):
            yield [
                (lang, self.treebanks[lang][self._draw(lang, drawn[lang])])
                for lang in self.languages
            ]

    def __len__(self) -> int:
        return self.epoch_length


def balanced_batches(treebanks: Mapping[str, Sequence[T]], rng: np.random.Generator) -> Iterator[List[Tuple[str, T]]]:
    """Mini-batches of a single epoch"""
    return BalancedBatcher(treebanks, rng).epoch()
