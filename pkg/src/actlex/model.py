"""Neural models for task recognition: an attention-based sequence
classifier over activity ids (or per-position feature vectors) and a
per-position autoencoder baseline over atomic token ids."""

from __future__ import annotations

import torch
import torch.nn as nn

from .config import AutoencoderConfig, ClassifierConfig


def masked_mean(x: torch.Tensor, pad_mask: torch.Tensor) -> torch.Tensor:
    """Mean over unpadded positions; pad_mask is True at padded slots."""
    keep = (~pad_mask).to(x.dtype).unsqueeze(-1)
    return (x * keep).sum(dim=1) / keep.sum(dim=1).clamp(min=1.0)


class SequenceClassifier(nn.Module):
    """Embedded ids (or projected features) + learned positions through a
    stack of attention encoder layers, mean-pooled into a linear head."""

    def __init__(self, cfg: ClassifierConfig, num_classes: int, max_len: int,
                 vocab_size: int | None = None, feature_dim: int | None = None):
        super().__init__()
        if (vocab_size is None) == (feature_dim is None):
            raise ValueError("pass exactly one of vocab_size or feature_dim")
        self.pad_id = vocab_size
        if vocab_size is not None:
            self.embed = nn.Embedding(vocab_size + 1, cfg.d_model,
                                      padding_idx=vocab_size)
            self.project = None
        else:
            self.embed = None
            self.project = nn.Linear(feature_dim, cfg.d_model)
        self.pos_embed = nn.Embedding(max_len, cfg.d_model)
        self.layers = nn.ModuleList([
            nn.TransformerEncoderLayer(
                d_model=cfg.d_model,
                nhead=cfg.heads,
                dim_feedforward=cfg.ff_dim,
                dropout=cfg.dropout,
                activation="relu",
                batch_first=True,
            )
            for _ in range(cfg.num_layers)
        ])
        self.head = nn.Linear(cfg.d_model, num_classes)

    def forward(self, ids_or_feats: torch.Tensor, pad_mask: torch.Tensor) -> torch.Tensor:
        if self.embed is not None:
            x = self.embed(ids_or_feats)
        else:
            x = self.project(ids_or_feats)
        positions = torch.arange(x.shape[1], device=x.device)
        x = x + self.pos_embed(positions)
        for layer in self.layers:
            x = layer(x, src_key_padding_mask=pad_mask)
        return self.head(masked_mean(x, pad_mask))


class TokenAutoencoder(nn.Module):
    """Self-supervised per-position reconstruction of atomic token ids.

    embedding -> shrinking FC encoder -> mirrored FC decoder -> logits over
    the atomic alphabet. After training only the encoder half is used, as a
    frozen feature extractor.
    """

    def __init__(self, cfg: AutoencoderConfig, alphabet_size: int):
        super().__init__()
        self.embed = nn.Embedding(alphabet_size, cfg.embed_dim)
        enc = []
        dims = (cfg.embed_dim,) + cfg.encoder_hidden
        for d_in, d_out in zip(dims, dims[1:]):
            enc += [nn.Linear(d_in, d_out), nn.ReLU(), nn.Dropout(cfg.dropout)]
        self.encoder = nn.Sequential(*enc)
        dec = []
        for d_in, d_out in zip(dims[::-1], dims[::-1][1:]):
            dec += [nn.Linear(d_in, d_out), nn.ReLU(), nn.Dropout(cfg.dropout)]
        self.decoder = nn.Sequential(*dec)
        self.reconstruct = nn.Linear(cfg.embed_dim, alphabet_size)
        self.feature_dim = cfg.encoder_hidden[-1]

    def encode(self, ids: torch.Tensor) -> torch.Tensor:
        return self.encoder(self.embed(ids))

    def forward(self, ids: torch.Tensor) -> torch.Tensor:
        return self.reconstruct(self.decoder(self.encode(ids)))
