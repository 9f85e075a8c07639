"""
Treebank Package - CoNLL-U I/O, vocabularies and projectivity
"""

from .tree import ROOT, DependencyTree, tree_problem
from .conllu import (
    Sentence,
    Token,
    Treebank,
    base_relation,
    preprocess,
    read_conllu,
    write_conllu,
)
from .vocabulary import SymbolTable, Vocabulary, build_vocabulary
from .projectivity import ArcSpan, is_projective, lift_nonprojective, nonprojective_arcs, projectivize

__all__ = [
    "ROOT",
    "DependencyTree",
    "tree_problem",
    "Sentence",
    "Token",
    "Treebank",
    "base_relation",
    "preprocess",
    "read_conllu",
    "write_conllu",
    "SymbolTable",
    "Vocabulary",
    "build_vocabulary",
    "ArcSpan",
    "is_projective",
    "lift_nonprojective",
    "nonprojective_arcs",
    "projectivize",
]
