"""
Training Package - balanced batching, evaluation and the training loop
"""

from .batching import BalancedBatcher, balanced_batches
from .evaluation import (
    LONG_DISTANCE,
    POSITION_CLASSES,
    RELATION_GROUPS,
    AttachmentScores,
    EvalReport,
    LanguageScores,
    Recall,
    aligned_tokens,
    attachment_scores,
    class_recall,
    evaluate,
    format_recall,
    relation_group,
    tag_accuracy,
)
from .trainer import (
    EarlyStopping,
    EpochRecord,
    Trainer,
    TrainingResult,
    build_model,
    load_resources,
    prepare_sentences,
    read_treebanks,
    train,
)

__all__ = [
    "BalancedBatcher",
    "balanced_batches",
    "LONG_DISTANCE",
    "POSITION_CLASSES",
    "RELATION_GROUPS",
    "AttachmentScores",
    "EvalReport",
    "LanguageScores",
    "Recall",
    "aligned_tokens",
    "attachment_scores",
    "class_recall",
    "evaluate",
    "format_recall",
    "relation_group",
    "tag_accuracy",
    "EarlyStopping",
    "EpochRecord",
    "Trainer",
    "TrainingResult",
    "build_model",
    "load_resources",
    "prepare_sentences",
    "read_treebanks",
    "train",
]
