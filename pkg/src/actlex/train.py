"""Dataset assembly, training loops and evaluation metrics.

Sequences are right-padded to the longest row of each batch with a reserved
pad id (one past the last vocabulary id), and padded positions are masked
out of both attention and pooling, so logits are a pure function of the
unpadded prefix.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field

import numpy as np
import torch
import torch.nn as nn

from . import bpe
from .config import AutoencoderConfig, ClassifierConfig
from .model import SequenceClassifier, TokenAutoencoder
from .tokenizer import WindowSample


class TrainingError(RuntimeError):
    def __init__(self, message: str, epoch: int | None = None):
        super().__init__(message if epoch is None else f"epoch {epoch}: {message}")
        self.epoch = epoch


@dataclass
class PaddedBatch:
    mask: torch.Tensor           # bool, True at padded positions
    labels: torch.Tensor
    ids: torch.Tensor | None = None       # long (batch, max_len)
    feats: torch.Tensor | None = None     # float (batch, max_len, feature_dim)

    def __post_init__(self):
        if (self.ids is None) == (self.feats is None):
            raise ValueError("batch needs exactly one of ids or feats")
        if bool(self.mask.all(dim=1).any()):
            raise ValueError("fully padded sample in batch")

    @property
    def inputs(self) -> torch.Tensor:
        return self.ids if self.ids is not None else self.feats


@dataclass
class EncodedDataset:
    """Variable-length encoded rows plus labels, batched on demand."""

    rows: list
    labels: list[int]
    num_classes: int
    max_len: int
    vocab_size: int | None = None    # id-based rows
    feature_dim: int | None = None   # feature-based rows

    def __len__(self) -> int:
        return len(self.rows)

    @property
    def pad_id(self) -> int:
        if self.vocab_size is None:
            raise ValueError("feature datasets have no pad id")
        return self.vocab_size

    def batch(self, indices: list[int]) -> PaddedBatch:
        rows = [self.rows[i] for i in indices]
        width = max(len(r) for r in rows)
        mask = torch.ones((len(rows), width), dtype=torch.bool)
        labels = torch.tensor([self.labels[i] for i in indices], dtype=torch.long)
        for r_i, row in enumerate(rows):
            mask[r_i, : len(row)] = False
        if self.vocab_size is not None:
            ids = torch.full((len(rows), width), self.pad_id, dtype=torch.long)
            for r_i, row in enumerate(rows):
                ids[r_i, : len(row)] = torch.as_tensor(row, dtype=torch.long)
            return PaddedBatch(mask=mask, labels=labels, ids=ids)
        feats = torch.zeros((len(rows), width, self.feature_dim))
        for r_i, row in enumerate(rows):
            feats[r_i, : row.shape[0]] = torch.as_tensor(row, dtype=torch.float32)
        return PaddedBatch(mask=mask, labels=labels, feats=feats)

    def batches(self, batch_size: int, order: np.ndarray | None = None):
        """Yield batches; the tail batch is simply smaller, never padded out."""
        idx = np.arange(len(self.rows)) if order is None else order
        for start in range(0, len(idx), batch_size):
            yield self.batch([int(i) for i in idx[start : start + batch_size]])


def label_map_for(windows: list[WindowSample]) -> dict[str, int]:
    return {task: i for i, task in enumerate(sorted({w.task_id for w in windows}))}


def build_dataset(
    windows: list[WindowSample],
    vocab: bpe.Vocabulary,
    method: str,
    label_map: dict[str, int],
    encoder: TokenAutoencoder | None = None,
) -> EncodedDataset:
    """Encode windows for one of the three methods.

    noenc passes atomic ids through; bpe applies the learned merges (rows
    shrink, hence the padding machinery); ae maps atomic ids through the
    frozen encoder to per-position feature vectors.
    """
    if method not in ("noenc", "bpe", "ae"):
        raise ValueError(f"unknown method {method!r}")
    labels = []
    for w in windows:
        if w.task_id not in label_map:
            raise ValueError(f"window task {w.task_id!r} missing from label map")
        labels.append(label_map[w.task_id])
    id_rows = [vocab.ids_for(w.tokens) for w in windows]
    if method == "noenc":
        rows = id_rows
        vocab_size: int | None = len(vocab.atoms)
        feature_dim = None
    elif method == "bpe":
        rows = [bpe.encode(r, vocab) for r in id_rows]
        vocab_size = len(vocab)
        feature_dim = None
    else:
        if encoder is None:
            raise ValueError("ae method needs a trained encoder")
        rows = []
        with torch.no_grad():
            for r in id_rows:
                feats = encoder.encode(torch.as_tensor(r, dtype=torch.long))
                rows.append(feats.numpy())
        vocab_size = None
        feature_dim = encoder.feature_dim
    max_len = max((len(r) for r in rows), default=0)
    return EncodedDataset(
        rows=rows,
        labels=labels,
        num_classes=len(label_map),
        max_len=max_len,
        vocab_size=vocab_size,
        feature_dim=feature_dim,
    )


@dataclass
class TrainReport:
    config: dict
    fold_scores: list[float] = field(default_factory=list)
    epoch_losses: list[list[float]] = field(default_factory=list)
    seconds: float = 0.0

    @property
    def mean_f1(self) -> float:
        return float(np.mean(self.fold_scores))

    @property
    def sd_f1(self) -> float:
        return float(np.std(self.fold_scores))


def train_classifier(
    cfg: ClassifierConfig,
    dataset: EncodedDataset,
    max_len: int | None = None,
) -> tuple[SequenceClassifier, list[float]]:
    """Train the sequence classifier; returns the model and per-epoch losses.

    max_len sizes the positional table; pass the window length when encoded
    evaluation rows may be longer than anything in the training set.
    Deterministic for a fixed seed: model init, epoch shuffling and all batch
    math derive from cfg.seed on a fixed thread count.
    """
    if len(set(dataset.labels)) < 2:
        raise ValueError("training data contains fewer than two classes")
    torch.manual_seed(cfg.seed)
    model = SequenceClassifier(
        cfg,
        num_classes=dataset.num_classes,
        max_len=max(max_len or 0, dataset.max_len, 1),
        vocab_size=dataset.vocab_size,
        feature_dim=dataset.feature_dim,
    )
    optim = torch.optim.AdamW(
        model.parameters(),
        lr=cfg.learning_rate,
        betas=cfg.adam_betas,
        weight_decay=cfg.weight_decay,
    )
    loss_fn = nn.CrossEntropyLoss(label_smoothing=cfg.label_smoothing)
    rng = np.random.Generator(np.random.PCG64(cfg.seed))
    epoch_losses = []
    model.train()
    for epoch in range(cfg.epochs):
        order = rng.permutation(len(dataset))
        total, count = 0.0, 0
        for batch in dataset.batches(cfg.batch_size, order):
            optim.zero_grad()
            logits = model(batch.inputs, batch.mask)
            loss = loss_fn(logits, batch.labels)
            if not torch.isfinite(loss):
                raise TrainingError("loss is not finite", epoch=epoch)
            loss.backward()
            optim.step()
            total += float(loss.detach()) * len(batch.labels)
            count += len(batch.labels)
        epoch_losses.append(total / count)
    model.eval()
    return model, epoch_losses


def predict(model: SequenceClassifier, dataset: EncodedDataset,
            batch_size: int = 64) -> np.ndarray:
    model.eval()
    out = []
    with torch.no_grad():
        for batch in dataset.batches(batch_size):
            out.append(model(batch.inputs, batch.mask).argmax(dim=1).numpy())
    return np.concatenate(out) if out else np.zeros(0, dtype=int)


def train_autoencoder(
    cfg: AutoencoderConfig,
    rows: list[list[int]],
    alphabet_size: int,
) -> tuple[TokenAutoencoder, list[float]]:
    """Fit the reconstruction autoencoder; returns the frozen model."""
    if not rows:
        raise ValueError("empty autoencoder corpus")
    torch.manual_seed(cfg.seed)
    model = TokenAutoencoder(cfg, alphabet_size)
    optim = torch.optim.AdamW(model.parameters(), lr=cfg.learning_rate)
    loss_fn = nn.CrossEntropyLoss()
    rng = np.random.Generator(np.random.PCG64(cfg.seed))
    epoch_losses = []
    model.train()
    for epoch in range(cfg.epochs):
        order = rng.permutation(len(rows))
        total, count = 0.0, 0
        for start in range(0, len(order), cfg.batch_size):
            chunk = [rows[int(i)] for i in order[start : start + cfg.batch_size]]
            ids = torch.as_tensor(np.asarray(chunk), dtype=torch.long)
            optim.zero_grad()
            logits = model(ids)
            loss = loss_fn(logits.reshape(-1, alphabet_size), ids.reshape(-1))
            if not torch.isfinite(loss):
                raise TrainingError("reconstruction loss is not finite", epoch=epoch)
            loss.backward()
            optim.step()
            total += float(loss.detach()) * ids.numel()
            count += ids.numel()
        epoch_losses.append(total / count)
    model.eval()
    for p in model.parameters():
        p.requires_grad_(False)
    return model, epoch_losses


def macro_f1(y_true, y_pred, num_classes: int) -> float:
    """Unweighted mean of per-class F1; a class absent from both the truth
    and the predictions contributes zero."""
    y_true = np.asarray(y_true)
    y_pred = np.asarray(y_pred)
    if y_true.shape != y_pred.shape or y_true.ndim != 1 or y_true.size == 0:
        raise ValueError("y_true and y_pred must be equal-length non-empty vectors")
    if y_true.min() < 0 or y_true.max() >= num_classes or \
            y_pred.min() < 0 or y_pred.max() >= num_classes:
        raise ValueError("labels outside [0, num_classes)")
    scores = []
    for c in range(num_classes):
        tp = int(np.sum((y_pred == c) & (y_true == c)))
        fp = int(np.sum((y_pred == c) & (y_true != c)))
        fn = int(np.sum((y_pred != c) & (y_true == c)))
        denom = 2 * tp + fp + fn
        scores.append(0.0 if denom == 0 else 2 * tp / denom)
    return float(np.mean(scores))


def gradient_check(
    model: nn.Module,
    batch: PaddedBatch,
    max_coords_per_tensor: int = 4,
    rel_step: float = 1e-5,
    seed: int = 0,
) -> float:
    """Max relative error between autograd and central finite differences.

    Runs in float64 with dropout off. The step is relative to each
    coordinate's magnitude (floored at 1), and the error is normalized by
    the larger gradient magnitude.
    """
    model = model.double().eval()
    inputs = batch.inputs
    if inputs.is_floating_point():
        inputs = inputs.double()
    labels = batch.labels
    loss_fn = nn.CrossEntropyLoss(label_smoothing=0.1)

    def loss_value() -> torch.Tensor:
        return loss_fn(model(inputs, batch.mask), labels)

    model.zero_grad()
    loss_value().backward()
    rng = np.random.Generator(np.random.PCG64(seed))
    worst = 0.0
    for param in model.parameters():
        if param.grad is None or param.numel() == 0:
            continue
        flat = param.data.view(-1)
        grad = param.grad.view(-1)
        n = min(max_coords_per_tensor, flat.numel())
        coords = rng.choice(flat.numel(), size=n, replace=False)
        for c in coords:
            c = int(c)
            orig = float(flat[c])
            h = rel_step * max(abs(orig), 1.0)
            with torch.no_grad():
                flat[c] = orig + h
            plus = float(loss_value().detach())
            with torch.no_grad():
                flat[c] = orig - h
            minus = float(loss_value().detach())
            with torch.no_grad():
                flat[c] = orig
            fd = (plus - minus) / (2 * h)
            an = float(grad[c])
            if not (np.isfinite(fd) and np.isfinite(an)):
                raise TrainingError("non-finite gradient encountered")
            err = abs(fd - an) / max(abs(fd), abs(an), 1e-8)
            worst = max(worst, err)
    return worst
