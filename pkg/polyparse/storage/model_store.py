"""
Model Storage for polyparse
Serializes a trained model into a single msgpack document compressed with zstandard.

Document layout:
    format_version   integer, checked on load
    manifest         run configuration, vocabulary hash, language-vector table
    vocabulary       symbol lists per map, singleton words
    resources        pretrained-embedding words, cluster map
    tensors          [{name, shape, dtype, data}] sorted by name, raw little-endian bytes

Nothing time- or host-dependent is stored, so identical parameters give
identical files.
"""

import logging
from pathlib import Path
from typing import Any, Dict, List, Union

import msgpack
import numpy as np
import zstandard

from ..config import RunConfig
from ..errors import ConfigError, ModelFormatError
from ..lexicon.resources import EmbeddingTable
from ..parsing.model import MultilingualModel
from ..parsing.representations import LexicalResources
from ..treebank.vocabulary import Vocabulary

logger = logging.getLogger(__name__)

FORMAT_VERSION = 1
COMPRESSION_LEVEL = 9

PathLike = Union[str, Path]


class TensorCodec:
    """
    Tensor <-> record conversion:
    1. Byte order fixed to little-endian
    2. Shape and dtype kept next to the raw bytes
    """

    SUPPORTED = ("float32", "float64")

    def encode(self, name: str, array: np.ndarray) -> Dict[str, Any]:
        dtype = str(array.dtype)
        if dtype not in self.SUPPORTED:
            raise ModelFormatError(f"tensor {name}: unsupported dtype {dtype}")
        data = np.ascontiguousarray(array, dtype=np.dtype(dtype).newbyteorder("<")).tobytes()
        return {"name": name, "shape": list(array.shape), "dtype": dtype, "data": data}

    def decode(self, record: Dict[str, Any]) -> np.ndarray:
        try:
            name, shape, dtype, data = record["name"], tuple(record["shape"]), record["dtype"], record["data"]
        except (KeyError, TypeError):
            raise ModelFormatError("tensor record without name/shape/dtype/data") from None
        if dtype not in self.SUPPORTED:
            raise ModelFormatError(f"tensor {name}: unsupported dtype {dtype}")
        array = np.frombuffer(data, dtype=np.dtype(dtype).newbyteorder("<"))
        if array.size != int(np.prod(shape, dtype=np.int64)):
            raise ModelFormatError(f"tensor {name}: {array.size} values for shape {shape}")
        return array.reshape(shape).astype(dtype)


def model_document(model: MultilingualModel) -> Dict[str, Any]:
    codec = TensorCodec()
    pretrained = model.resources.pretrained
    return {
        "format_version": FORMAT_VERSION,
        "manifest": model.manifest(),
        "vocabulary": model.vocab.to_dict(),
        "resources": {
            "pretrained_words": list(pretrained.words) if pretrained is not None else None,
            "clusters": sorted(model.resources.clusters.items()),
        },
        "tensors": [codec.encode(p.name, p.value) for p in sorted(model.store, key=lambda p: p.name)],
    }


def save_model(model: MultilingualModel, path: PathLike) -> int:
    """
    Write the model; returns the file size in bytes.
    """
    packed = msgpack.packb(model_document(model), use_bin_type=True)
    compressed = zstandard.ZstdCompressor(level=COMPRESSION_LEVEL).compress(packed)
    with open(path, "wb") as f:
        f.write(compressed)
    logger.info(f"Model saved to {path} ({len(compressed) / 1024:.1f} KiB, {len(packed) / 1024:.1f} KiB unpacked)")
    return len(compressed)


def load_model(path: PathLike) -> MultilingualModel:
    """
    Raises:
        ModelFormatError: not a model file, wrong version, or tensors that do not fit
    """
    try:
        with open(path, "rb") as f:
            raw = f.read()
    except OSError as e:
        raise ModelFormatError(f"cannot read model {path}: {e}") from None
    try:
        document = msgpack.unpackb(zstandard.ZstdDecompressor().decompress(raw), raw=False)
    except (zstandard.ZstdError, msgpack.UnpackException, ValueError) as e:
        raise ModelFormatError(f"{path} is not a polyparse model: {e}") from None
    if not isinstance(document, dict):
        raise ModelFormatError(f"{path} is not a polyparse model")
    return model_from_document(document, str(path))


def model_from_document(document: Dict[str, Any], source: str = "model") -> MultilingualModel:
    version = document.get("format_version")
    if version != FORMAT_VERSION:
        raise ModelFormatError(f"{source}: format version {version}, expected {FORMAT_VERSION}")
    try:
        manifest = document["manifest"]
        vocab = Vocabulary.from_dict(document["vocabulary"])
        resources_doc = document["resources"]
        records: List[Dict[str, Any]] = document["tensors"]
    except (KeyError, TypeError) as e:
        raise ModelFormatError(f"{source}: missing field {e}") from None

    if vocab.content_hash() != manifest.get("vocabulary_hash"):
        raise ModelFormatError(f"{source}: vocabulary does not match the manifest hash")
    try:
        config = RunConfig.from_dict(manifest["config"])
    except ConfigError as e:
        raise ModelFormatError(f"{source}: bad configuration ({e})") from None

    codec = TensorCodec()
    tensors = {r["name"]: codec.decode(r) for r in records}

    pretrained = None
    words = resources_doc.get("pretrained_words")
    if words is not None:
        matrix = tensors.get("embed.pretrained")
        if matrix is None or matrix.shape[0] != len(words) + 1:
            raise ModelFormatError(f"{source}: pretrained words do not match the stored table")
        pretrained = EmbeddingTable(words, matrix[:-1])
    resources = LexicalResources(pretrained=pretrained, clusters=dict(map(tuple, resources_doc.get("clusters", []))))
    language_vectors = {k: np.asarray(v, dtype=np.float64) for k, v in manifest.get("language_vectors", {}).items()}

    model = MultilingualModel(config, vocab, resources, language_vectors)
    expected = set(model.store.names())
    if expected != set(tensors):
        missing, extra = sorted(expected - set(tensors)), sorted(set(tensors) - expected)
        raise ModelFormatError(f"{source}: tensor set mismatch (missing {missing}, unexpected {extra})")
    for name, array in tensors.items():
        param = model.store[name]
        if param.value.shape != array.shape:
            raise ModelFormatError(f"{source}: tensor {name} has shape {array.shape}, expected {param.value.shape}")
        param.value[...] = array
    logger.info(f"Model loaded from {source}: languages {', '.join(model.supported_languages())}")
    return model
