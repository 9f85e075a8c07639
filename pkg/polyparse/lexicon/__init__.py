"""
Lexicon Package - lexical resources, cross-lingual projection and language vectors
"""

from .resources import (
    Alignment,
    EmbeddingTable,
    WalsTable,
    attach_clusters,
    language_key,
    load_clusters,
    load_dictionary,
    load_embeddings,
    load_wals,
    lookup_cluster,
    write_clusters,
    write_embeddings,
)
from .projection import ProjectionStats, project_clusters, robust_projection
from .language import (
    WORD_ORDER_FEATURES,
    LanguageVectorMode,
    language_vector,
    language_vector_table,
    read_language_vectors,
    write_language_vectors,
)

__all__ = [
    "Alignment",
    "EmbeddingTable",
    "WalsTable",
    "attach_clusters",
    "language_key",
    "load_clusters",
    "load_dictionary",
    "load_embeddings",
    "load_wals",
    "lookup_cluster",
    "write_clusters",
    "write_embeddings",
    "ProjectionStats",
    "project_clusters",
    "robust_projection",
    "WORD_ORDER_FEATURES",
    "LanguageVectorMode",
    "language_vector",
    "language_vector_table",
    "read_language_vectors",
    "write_language_vectors",
]
