"""
polyparse - one transition-based dependency parser for many languages

    from polyparse import load_run_config, train, save_model, load_model

    config = load_run_config(preset="language-id", overrides={"train": {"de": "de.conllu", "en": "en.conllu"}, "embeddings": "multi.vec"})
    result = train(config)
    save_model(result.model, "model.pp")
"""

__version__ = "1.0.0"

from .config import PRESETS, BlockDropoutVariant, RunConfig, load_run_config
from .errors import PolyparseError
from .lexicon import LanguageVectorMode
from .parsing import MultilingualModel
from .storage import load_model, save_model
from .training import EvalReport, evaluate, train
from .treebank import Sentence, Token, Treebank, read_conllu, write_conllu

__all__ = [
    "__version__",
    "PRESETS",
    "BlockDropoutVariant",
    "RunConfig",
    "load_run_config",
    "PolyparseError",
    "LanguageVectorMode",
    "MultilingualModel",
    "load_model",
    "save_model",
    "EvalReport",
    "evaluate",
    "train",
    "Sentence",
    "Token",
    "Treebank",
    "read_conllu",
    "write_conllu",
]
