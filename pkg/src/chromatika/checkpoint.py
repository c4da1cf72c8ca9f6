"""Model checkpoints: a directory holding ``model.json`` (metadata,
hyperparameters, vocabulary, declared matrix shapes) plus raw little-endian
float64 matrices. The loader re-validates row sums before returning a model.
"""

import json
from pathlib import Path

import numpy as np

from .corpus import Vocabulary
from .errors import CheckpointError
from .jsonutil import round_floats
from .topicmodel import HyperParams, TrainedModel

CHECKPOINT_FORMAT = "chromatika-model"
CHECKPOINT_VERSION = 1
_MATRICES = ("phi", "psi", "theta")


def save_model(model: TrainedModel, path) -> Path:
    path = Path(path)
    path.mkdir(parents=True, exist_ok=True)
    matrix_meta = {}
    for name in _MATRICES:
        mat = np.ascontiguousarray(getattr(model, name), dtype="<f8")
        filename = f"{name}.bin"
        (path / filename).write_bytes(mat.tobytes())
        matrix_meta[name] = {
            "file": filename,
            "shape": list(mat.shape),
            "dtype": "<f8",
            "order": "C",
        }
    meta = {
        "format": CHECKPOINT_FORMAT,
        "version": CHECKPOINT_VERSION,
        "hyperparams": model.hyperparams.to_dict(),
        "color_types": int(model.phi.shape[1]),
        "vocabulary": list(model.vocabulary.tokens),
        "doc_ids": list(model.doc_ids),
        "doc_titles": list(model.doc_titles),
        "doc_genres": list(model.doc_genres),
        "topic_weights": [float(v) for v in model.topic_weights],
        "word_topic_weights": [float(v) for v in model.word_topic_weights],
        "color_topic_weights": [float(v) for v in model.color_topic_weights],
        "matrices": matrix_meta,
    }
    with open(path / "model.json", "w", encoding="utf-8") as fh:
        json.dump(round_floats(meta), fh, indent=2)
        fh.write("\n")
    return path


def load_model(path) -> TrainedModel:
    path = Path(path)
    meta_path = path / "model.json"
    if not meta_path.exists():
        raise CheckpointError(f"no model.json under {path}")
    try:
        with open(meta_path, "r", encoding="utf-8") as fh:
            meta = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise CheckpointError(f"cannot read {meta_path}: {exc}") from exc
    if meta.get("format") != CHECKPOINT_FORMAT:
        raise CheckpointError(f"{meta_path} is not a model checkpoint")
    if meta.get("version") != CHECKPOINT_VERSION:
        raise CheckpointError(f"unsupported checkpoint version {meta.get('version')}")

    mats = {}
    declared_c = meta.get("color_types")
    if declared_c is not None and declared_c != meta["matrices"]["phi"]["shape"][1]:
        raise CheckpointError("declared color_types does not match the phi shape")
    for name in _MATRICES:
        info = meta["matrices"][name]
        raw = (path / info["file"]).read_bytes()
        shape = tuple(info["shape"])
        arr = np.frombuffer(raw, dtype=info["dtype"])
        if arr.size != int(np.prod(shape)):
            raise CheckpointError(f"{name}: file size does not match shape {shape}")
        mats[name] = arr.reshape(shape).astype(np.float64)

    try:
        model = TrainedModel(
            phi=mats["phi"],
            psi=mats["psi"],
            theta=mats["theta"],
            topic_weights=np.array(meta["topic_weights"], dtype=np.float64),
            word_topic_weights=np.array(meta["word_topic_weights"], dtype=np.float64),
            color_topic_weights=np.array(meta["color_topic_weights"], dtype=np.float64),
            hyperparams=HyperParams(**meta["hyperparams"]),
            vocabulary=Vocabulary(tuple(meta["vocabulary"])),
            doc_ids=tuple(meta["doc_ids"]),
            doc_titles=tuple(meta.get("doc_titles", ())),
            doc_genres=tuple(meta.get("doc_genres", ())),
        )
    except ValueError as exc:
        raise CheckpointError(f"checkpoint failed validation: {exc}") from exc
    return model
