"""
Storage Package - model files
"""

from .model_store import FORMAT_VERSION, TensorCodec, load_model, model_document, save_model

__all__ = ["FORMAT_VERSION", "TensorCodec", "load_model", "model_document", "save_model"]
