from collections import Counter

import numpy as np
import pytest

from polyparse.errors import PolyparseError
from polyparse.training import BalancedBatcher, balanced_batches


def _treebanks(sizes):
    return {lang: [f"{lang}-{k}" for k in range(size)] for lang, size in sizes.items()}


class TestBalancedBatcher:
    def test_smallest_treebank_sets_epoch_length(self):
        batcher = BalancedBatcher(_treebanks({"de": 4, "en": 10, "sv": 25}), np.random.default_rng(42))
        batches = list(batcher.epoch())
        assert len(batcher) == 4
        assert len(batches) == 4
        for batch in batches:
            assert [lang for lang, _ in batch] == ["de", "en", "sv"]
        assert sorted(item for batch in batches for lang, item in batch if lang == "de") == [f"de-{k}" for k in range(4)]

    def test_no_repeats_within_an_epoch(self):
        batcher = BalancedBatcher(_treebanks({"de": 4, "en": 10}), np.random.default_rng(42))
        for _ in range(6):
            drawn = Counter(item for batch in batcher.epoch() for _, item in batch)
            assert max(drawn.values()) == 1

    def test_larger_queue_persists_across_epochs(self):
        batcher = BalancedBatcher(_treebanks({"de": 4, "en": 10}), np.random.default_rng(42))
        seen = [item for _ in range(2) for batch in batcher.epoch() for lang, item in batch if lang == "en"]
        assert len(set(seen)) == 8

    def test_single_language(self):
        batches = list(balanced_batches(_treebanks({"de": 5}), np.random.default_rng(42)))
        assert len(batches) == 5
        assert all(len(batch) == 1 for batch in batches)

    def test_deterministic_for_a_seed(self):
        a = list(balanced_batches(_treebanks({"de": 4, "en": 10}), np.random.default_rng(3)))
        b = list(balanced_batches(_treebanks({"de": 4, "en": 10}), np.random.default_rng(3)))
        assert a == b

    def test_empty_inputs(self):
        with pytest.raises(PolyparseError):
            BalancedBatcher({}, np.random.default_rng(42))
        with pytest.raises(PolyparseError):
            BalancedBatcher({"de": []}, np.random.default_rng(42))
