"""
Dependency trees as head/label arrays.

Token indices are 1-based; head 0 is the artificial ROOT.
"""

from dataclasses import dataclass
from typing import Callable, Hashable, List, Optional, Sequence, Set, Tuple

from ..errors import TreeStructureError

ROOT = 0


@dataclass(frozen=True)
class DependencyTree:
    """
    Head and relation arrays over a sentence.

    heads[k] and labels[k] belong to token k + 1.
    """
    heads: Tuple[int, ...]
    labels: Tuple[Hashable, ...]

    def __post_init__(self):
        if len(self.heads) != len(self.labels):
            raise TreeStructureError(
                f"{len(self.heads)} heads but {len(self.labels)} labels"
            )

    @classmethod
    def from_lists(cls, heads: Sequence[int], labels: Optional[Sequence[Hashable]] = None) -> "DependencyTree":
        if labels is None:
            labels = ["_"] * len(heads)
        return cls(tuple(int(h) for h in heads), tuple(labels))

    def __len__(self) -> int:
        return len(self.heads)

    def head(self, dependent: int) -> int:
        return self.heads[dependent - 1]

    def label(self, dependent: int) -> Hashable:
        return self.labels[dependent - 1]

    def arcs(self) -> List[Tuple[int, int, Hashable]]:
        """(head, dependent, label) for every token"""
        return [(h, d, lab) for d, (h, lab) in enumerate(zip(self.heads, self.labels), start=1)]

    def dependents(self) -> List[List[int]]:
        """dependents()[h] lists the dependents of h (index 0 is ROOT)"""
        deps: List[List[int]] = [[] for _ in range(len(self.heads) + 1)]
        for d, h in enumerate(self.heads, start=1):
            deps[h].append(d)
        return deps

    def with_head(self, dependent: int, head: int) -> "DependencyTree":
        heads = list(self.heads)
        heads[dependent - 1] = head
        return DependencyTree(tuple(heads), self.labels)

    def relabel(self, mapping: Callable[[Hashable], Hashable]) -> "DependencyTree":
        return DependencyTree(self.heads, tuple(mapping(lab) for lab in self.labels))

    def validate(self) -> None:
        """Raise TreeStructureError unless this is a single-rooted tree"""
        problem = tree_problem(self.heads)
        if problem:
            raise TreeStructureError(problem)

    def is_valid(self) -> bool:
        return tree_problem(self.heads) is None


def tree_problem(heads: Sequence[int]) -> Optional[str]:
    """
    Describe why `heads` is not a single-rooted tree, or return None.

    Out-of-range heads, self loops, zero or several roots and cycles are
    reported; the first problem found wins.
    """
    n = len(heads)
    if n == 0:
        return "empty sentence"

    roots = []
    for d, h in enumerate(heads, start=1):
        if h < 0 or h > n:
            return f"token {d} has head {h} outside 0..{n}"
        if h == d:
            return f"token {d} is its own head"
        if h == ROOT:
            roots.append(d)

    if not roots:
        return "no token attached to the root"
    if len(roots) > 1:
        return f"{len(roots)} tokens attached to the root ({', '.join(map(str, roots))})"

    # every token must reach ROOT without revisiting a node
    reaches_root: Set[int] = {ROOT}
    for start in range(1, n + 1):
        path: List[int] = []
        on_path: Set[int] = set()
        node = start
        while node not in reaches_root:
            if node in on_path:
                return f"cycle through token {node}"
            on_path.add(node)
            path.append(node)
            node = heads[node - 1]
        reaches_root.update(path)

    return None
