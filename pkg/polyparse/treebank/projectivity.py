"""
Projectivity checks and the pseudo-projective lifting transform.

Only the plain lifting scheme is implemented: labels are left untouched, so
lifted trees carry no information for undoing the transform. Parser output is
therefore never deprojectivized, and evaluation runs against the original
gold trees.
"""

from dataclasses import dataclass
from typing import List, Optional, Tuple

from .tree import ROOT, DependencyTree


@dataclass(frozen=True)
class ArcSpan:
    head: int
    dependent: int

    @property
    def lo(self) -> int:
        return min(self.head, self.dependent)

    @property
    def hi(self) -> int:
        return max(self.head, self.dependent)

    @property
    def length(self) -> int:
        return self.hi - self.lo


def _ancestor_sets(heads: Tuple[int, ...]) -> List[frozenset]:
    """ancestors[d] is the set of proper ancestors of d, ROOT included"""
    n = len(heads)
    ancestors: List[Optional[frozenset]] = [None] * (n + 1)
    ancestors[ROOT] = frozenset()

    def resolve(d: int) -> frozenset:
        chain = []
        node = d
        while ancestors[node] is None:
            chain.append(node)
            node = heads[node - 1]
        for member in reversed(chain):
            parent = heads[member - 1]
            ancestors[member] = ancestors[parent] | {parent}
        return ancestors[d]

    for d in range(1, n + 1):
        resolve(d)
    return ancestors  # type: ignore[return-value]


def nonprojective_arcs(tree: DependencyTree) -> List[ArcSpan]:
    """Arcs whose span contains a token not dominated by the arc's head"""
    ancestors = _ancestor_sets(tree.heads)
    found = []
    for d, h in enumerate(tree.heads, start=1):
        arc = ArcSpan(h, d)
        for k in range(arc.lo + 1, arc.hi):
            if h not in ancestors[k]:
                found.append(arc)
                break
    return found


def is_projective(tree: DependencyTree) -> bool:
    return not nonprojective_arcs(tree)


def lift_nonprojective(tree: DependencyTree) -> Tuple[DependencyTree, int]:
    """
    Lift nonprojective arcs until the tree is projective.

    The shortest nonprojective arc is lifted first (ties: leftmost dependent);
    a lift reattaches the dependent to its head's head.

    Returns:
        (projective tree, number of lifts)
    """
    lifts = 0
    while True:
        candidates = nonprojective_arcs(tree)
        if not candidates:
            return tree, lifts
        arc = min(candidates, key=lambda a: (a.length, a.dependent))
        tree = tree.with_head(arc.dependent, tree.head(arc.head))
        lifts += 1


def projectivize(tree: DependencyTree) -> DependencyTree:
    return lift_nonprojective(tree)[0]
