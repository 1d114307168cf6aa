"""Deterministic model checkpoints.

Stock tensor serializers embed archive metadata that differs between
processes, which would break byte-identical reruns, so checkpoints are
plain JSON with base64-encoded little-endian tensor payloads.
"""

from __future__ import annotations

import base64
import json

import numpy as np
import torch

from . import bpe
from .config import AE_DEPTHS, ExperimentConfig
from .model import SequenceClassifier, TokenAutoencoder

CHECKPOINT_FORMAT = 1


class CheckpointError(ValueError):
    pass


def _pack_state(module: torch.nn.Module) -> dict:
    out = {}
    for name, tensor in module.state_dict().items():
        arr = tensor.detach().cpu().numpy()
        out[name] = {
            "dtype": str(arr.dtype),
            "shape": list(arr.shape),
            "data": base64.b64encode(np.ascontiguousarray(arr).tobytes()).decode("ascii"),
        }
    return out


def _unpack_state(doc: dict) -> dict:
    state = {}
    for name, spec in doc.items():
        arr = np.frombuffer(
            base64.b64decode(spec["data"]), dtype=np.dtype(spec["dtype"])
        ).reshape(spec["shape"])
        state[name] = torch.from_numpy(arr.copy())
    return state


def save_checkpoint(
    model: SequenceClassifier,
    cfg: ExperimentConfig,
    vocab: bpe.Vocabulary,
    label_map: dict[str, int],
    max_len: int,
    encoder: TokenAutoencoder | None = None,
) -> bytes:
    doc = {
        "format": CHECKPOINT_FORMAT,
        "experiment": cfg.echo(),
        "vocab": json.loads(bpe.save_vocab(vocab).decode("utf-8")),
        "label_map": label_map,
        "max_len": max_len,
        "model": _pack_state(model),
        "encoder": None if encoder is None else _pack_state(encoder),
    }
    return (json.dumps(doc, sort_keys=True) + "\n").encode("utf-8")


def load_checkpoint(data: bytes):
    """Returns (model, experiment config, vocab, label_map, encoder)."""
    try:
        doc = json.loads(data.decode("utf-8"))
    except (UnicodeDecodeError, json.JSONDecodeError) as exc:
        raise CheckpointError(f"unreadable checkpoint: {exc}") from exc
    if doc.get("format") != CHECKPOINT_FORMAT:
        raise CheckpointError(f"unsupported checkpoint format {doc.get('format')!r}")
    exp = doc["experiment"]
    cfg = experiment_from_echo(exp)
    vocab = bpe.load_vocab(json.dumps(doc["vocab"]).encode("utf-8"))
    label_map = {str(k): int(v) for k, v in doc["label_map"].items()}

    encoder = None
    feature_dim = None
    vocab_size: int | None
    if cfg.method == "noenc":
        vocab_size = len(vocab.atoms)
    elif cfg.method == "bpe":
        vocab_size = len(vocab)
    else:
        vocab_size = None
        from dataclasses import replace

        ae_cfg = replace(cfg.autoencoder, encoder_hidden=AE_DEPTHS[cfg.ae_depth])
        encoder = TokenAutoencoder(ae_cfg, len(vocab.atoms))
        encoder.load_state_dict(_unpack_state(doc["encoder"]))
        encoder.eval()
        feature_dim = encoder.feature_dim

    model = SequenceClassifier(
        cfg.classifier,
        num_classes=len(label_map),
        max_len=int(doc["max_len"]),
        vocab_size=vocab_size,
        feature_dim=feature_dim,
    )
    model.load_state_dict(_unpack_state(doc["model"]))
    model.eval()
    return model, cfg, vocab, label_map, encoder


def experiment_from_echo(echo: dict) -> ExperimentConfig:
    from .config import AutoencoderConfig, ClassifierConfig
    from .tokenizer import IdtConfig, Modality

    clf = dict(echo["classifier"])
    clf["adam_betas"] = tuple(clf["adam_betas"])
    ae = dict(echo["autoencoder"])
    ae["encoder_hidden"] = tuple(ae["encoder_hidden"])
    return ExperimentConfig(
        modality=Modality(echo["modality"]),
        window_len=int(echo["window_len"]),
        method=echo["method"],
        bpe_k=int(echo["bpe_k"]),
        ae_depth=int(echo["ae_depth"]),
        n_folds=int(echo["n_folds"]),
        train_fraction=float(echo["train_fraction"]),
        seed=int(echo["seed"]),
        idt=IdtConfig(**echo["idt"]),
        classifier=ClassifierConfig(**clf),
        autoencoder=AutoencoderConfig(**ae),
    )
