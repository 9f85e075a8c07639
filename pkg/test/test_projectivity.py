"""
Projectivity tests and arc lifting
"""

from collections import deque
from typing import Tuple

import numpy as np
import pytest

from polyparse.treebank import DependencyTree, is_projective, lift_nonprojective, nonprojective_arcs, projectivize


def random_tree(n: int, rng: np.random.Generator) -> DependencyTree:
    order = rng.permutation(np.arange(1, n + 1))
    heads = [0] * n
    for k in range(1, n):
        heads[order[k] - 1] = int(order[rng.integers(0, k)])
    return DependencyTree.from_lists(heads, [f"r{d}" for d in range(1, n + 1)])


def fewest_lifts(tree: DependencyTree) -> int:
    """Breadth-first search over every order of lifting nonprojective arcs"""
    seen = {tree.heads}
    queue = deque([(tree, 0)])
    while queue:
        current, depth = queue.popleft()
        arcs = nonprojective_arcs(current)
        if not arcs:
            return depth
        for arc in arcs:
            lifted = current.with_head(arc.dependent, current.head(arc.head))
            if lifted.heads not in seen:
                seen.add(lifted.heads)
                queue.append((lifted, depth + 1))
    raise AssertionError("no projective tree reachable")


class TestIsProjective:
    def test_chain(self):
        assert is_projective(DependencyTree.from_lists([0, 1, 2, 3]))

    def test_crossing_arcs(self):
        tree = DependencyTree.from_lists([0, 4, 1, 1])
        assert not is_projective(tree)
        assert [(a.head, a.dependent) for a in nonprojective_arcs(tree)] == [(4, 2)]

    def test_single_token(self):
        assert is_projective(DependencyTree.from_lists([0]))


class TestLifting:
    def test_crossing_example(self):
        tree = DependencyTree.from_lists([0, 4, 1, 1], ["root", "a", "b", "c"])
        lifted, lifts = lift_nonprojective(tree)
        assert lifts == 1
        assert lifted.heads == (0, 1, 1, 1)
        assert lifted.labels == tree.labels

    def test_projective_tree_unchanged(self):
        tree = DependencyTree.from_lists([2, 0, 2])
        assert lift_nonprojective(tree) == (tree, 0)

    def test_random_trees_become_projective(self):
        rng = np.random.default_rng(42)
        for _ in range(1000):
            tree = random_tree(int(rng.integers(1, 13)), rng)
            lifted = projectivize(tree)
            assert lifted.is_valid()
            assert is_projective(lifted)
            assert lifted.labels == tree.labels

    def test_idempotent(self):
        rng = np.random.default_rng(7)
        for _ in range(200):
            once = projectivize(random_tree(9, rng))
            assert projectivize(once) == once

    def test_lift_count_is_minimal_on_small_trees(self):
        rng = np.random.default_rng(11)
        checked = 0
        while checked < 150:
            tree = random_tree(int(rng.integers(4, 8)), rng)
            if is_projective(tree):
                continue
            _, lifts = lift_nonprojective(tree)
            assert lifts == fewest_lifts(tree), tree.heads
            checked += 1
