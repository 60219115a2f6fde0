"""Permutation-invariant sprint classifier.

Per frame, a set-attention encoder turns each team's player set into a
fixed-size embedding conditioned on the sprinter: one induced
set-attention block followed by attention pooling with the sprinter as
the query seed. The same encoder (shared weights) reads the teammate
set and the opponent set; which side an embedding came from is encoded
by its position in the sequence fed downstream. A bidirectional GRU
consumes the paired per-frame embeddings together with the ball track,
and a fully connected softmax head converts its final hidden state into
a probability vector over the 15 categories.

Attention pooling makes the encoder order-invariant over the player set
but still sensitive to duplicates (a multiset, not a set): softmax
weights renormalize over repeated members, shifting the pooled value.
An all-absent set maps to a learned null embedding.
"""

from __future__ import annotations

from dataclasses import dataclass

import torch
from torch import nn

from .data import (
    Batch,
    CATEGORIES,
    N_FEATURES,
    OPPONENT_SLOTS,
    PLAYER_SLOTS,
    SPRINTER_SLOT,
    TEAM_SLOTS,
)


@dataclass(frozen=True)
class ModelConfig:
    """Architecture and training hyperparameters."""

    embed_dim: int = 32
    n_heads: int = 4
    n_inducing: int = 4
    rnn_hidden: int = 32
    n_categories: int = len(CATEGORIES)
    max_frames: int = 64
    lr: float = 1e-3
    epochs: int = 100
    batch_size: int | None = None  # None trains full-batch
    holdout_fraction: float = 0.2
    class_weights: bool = False  # inverse-frequency loss weights
    seed: int = 0

    def __post_init__(self) -> None:
        if self.n_categories != len(CATEGORIES):
            raise ValueError(f"n_categories is fixed to {len(CATEGORIES)}")
        if self.embed_dim % self.n_heads:
            raise ValueError("embed_dim must be divisible by n_heads")


class _AttentionBlock(nn.Module):
    """Multihead attention from ``x`` onto ``y`` with residuals and norms."""

    def __init__(self, dim: int, n_heads: int):
        super().__init__()
        self.attn = nn.MultiheadAttention(dim, n_heads, batch_first=True)
        self.norm_attn = nn.LayerNorm(dim)
        self.norm_ff = nn.LayerNorm(dim)
        self.ff = nn.Sequential(nn.Linear(dim, dim), nn.ReLU(), nn.Linear(dim, dim))

    def forward(
        self, x: torch.Tensor, y: torch.Tensor, y_mask: torch.Tensor | None = None
    ) -> torch.Tensor:
        key_padding = None if y_mask is None else ~y_mask
        att, _ = self.attn(x, y, y, key_padding_mask=key_padding, need_weights=False)
        h = self.norm_attn(x + att)
        return self.norm_ff(h + self.ff(h))


class SetEncoder(nn.Module):
    """Order-invariant encoding of a player set, conditioned on the sprinter.

    ``forward(sprinter, others, mask)`` maps a ``(B, in_dim)`` sprinter row
    and a ``(B, S, in_dim)`` set with a ``(B, S)`` presence mask to a
    ``(B, dim)`` embedding. Rows whose set is entirely absent return the
    learned null embedding.
    """

    def __init__(self, in_dim: int, dim: int, n_heads: int, n_inducing: int):
        super().__init__()
        self.input_proj = nn.Linear(in_dim, dim)
        self.query_proj = nn.Linear(in_dim, dim)
        self.inducing = nn.Parameter(torch.randn(n_inducing, dim) * 0.1)
        self.induce = _AttentionBlock(dim, n_heads)
        self.spread = _AttentionBlock(dim, n_heads)
        self.pool = _AttentionBlock(dim, n_heads)
        self.null_embedding = nn.Parameter(torch.zeros(dim))

    def forward(
        self, sprinter: torch.Tensor, others: torch.Tensor, mask: torch.Tensor
    ) -> torch.Tensor:
        empty = ~mask.any(dim=1)
        # Fully-masked rows would make the attention softmax degenerate, so
        # they attend a dummy slot and are overwritten with the null embedding.
        safe_mask = mask.clone()
        safe_mask[empty, 0] = True
        x = self.input_proj(others)
        q = self.query_proj(sprinter).unsqueeze(1)
        inducing = self.inducing.unsqueeze(0).expand(x.shape[0], -1, -1)
        induced = self.induce(inducing, x, safe_mask)
        spread = self.spread(x, induced)
        pooled = self.pool(q, spread, safe_mask).squeeze(1)
        null = self.null_embedding.to(pooled.dtype).expand_as(pooled)
        return torch.where(empty.unsqueeze(1), null, pooled)


class SprintClassifier(nn.Module):
    """Set encoder per team per frame, BiGRU over frames, softmax head."""

    def __init__(self, config: ModelConfig):
        super().__init__()
        self.config = config
        self.encoder = SetEncoder(
            N_FEATURES, config.embed_dim, config.n_heads, config.n_inducing
        )
        self.rnn = nn.GRU(
            2 * config.embed_dim + 2,
            config.rnn_hidden,
            batch_first=True,
            bidirectional=True,
        )
        self.head = nn.Linear(2 * config.rnn_hidden, config.n_categories)
        # Near-zero logits at initialization: the untrained model predicts an
        # almost uniform distribution, so the starting loss sits at ln(K).
        nn.init.normal_(self.head.weight, std=1e-2)
        nn.init.zeros_(self.head.bias)

    @staticmethod
    def _check_shapes(
        features: torch.Tensor,
        mask: torch.Tensor,
        ball: torch.Tensor,
        lengths: torch.Tensor,
    ) -> None:
        b, t = features.shape[:2]
        if features.shape != (b, t, PLAYER_SLOTS, N_FEATURES):
            raise ValueError(f"features must be (B, T, {PLAYER_SLOTS}, {N_FEATURES})")
        if mask.shape != (b, t, PLAYER_SLOTS):
            raise ValueError("mask shape must match features")
        if ball.shape != (b, t, 2):
            raise ValueError("ball shape must be (B, T, 2)")
        if lengths.shape != (b,):
            raise ValueError("lengths must be one per sample")
        if t < 1 or bool((lengths < 1).any()) or bool((lengths > t).any()):
            raise ValueError("each sample needs between 1 and T real frames")

    def encode_context(
        self, features: torch.Tensor, mask: torch.Tensor, side: str
    ) -> torch.Tensor:
        """Per-frame set embedding of one side: (B, T, 22, 8) -> (B, T, dim)."""
        if side == "team":
            slots = TEAM_SLOTS
        elif side == "opponents":
            slots = OPPONENT_SLOTS
        else:
            raise ValueError(f"side must be 'team' or 'opponents', not {side!r}")
        b, t = features.shape[:2]
        sprinter = features[:, :, SPRINTER_SLOT, :].reshape(b * t, N_FEATURES)
        others = features[:, :, slots, :].reshape(b * t, -1, N_FEATURES)
        side_mask = mask[:, :, slots].reshape(b * t, -1)
        return self.encoder(sprinter, others, side_mask).reshape(b, t, -1)

    def _encode_sides(
        self, features: torch.Tensor, mask: torch.Tensor, lengths: torch.Tensor
    ) -> tuple[torch.Tensor, torch.Tensor]:
        """Both sides' per-frame embeddings, computed only on real frames.

        Padded frames stay zero; the packed recurrent pass never reads
        them. On real frames this matches ``encode_context`` exactly,
        since every layer in the encoder acts row-independently.
        """
        b, t = features.shape[:2]
        frame = torch.arange(t, device=features.device).unsqueeze(0)
        valid = (frame < lengths.to(features.device).unsqueeze(1)).reshape(b * t)
        sprinter = features[:, :, SPRINTER_SLOT, :].reshape(b * t, N_FEATURES)[valid]
        out = []
        for slots in (TEAM_SLOTS, OPPONENT_SLOTS):
            others = features[:, :, slots, :].reshape(b * t, -1, N_FEATURES)[valid]
            side_mask = mask[:, :, slots].reshape(b * t, -1)[valid]
            encoded = self.encoder(sprinter, others, side_mask)
            z = encoded.new_zeros((b * t, encoded.shape[-1]))
            z[valid] = encoded
            out.append(z.reshape(b, t, -1))
        return out[0], out[1]

    def logits(
        self,
        features: torch.Tensor,
        mask: torch.Tensor,
        ball: torch.Tensor,
        lengths: torch.Tensor,
    ) -> torch.Tensor:
        self._check_shapes(features, mask, ball, lengths)
        z_team, z_opponents = self._encode_sides(features, mask, lengths)
        sequence = torch.cat([z_team, z_opponents, ball], dim=-1)
        packed = nn.utils.rnn.pack_padded_sequence(
            sequence, lengths.cpu(), batch_first=True, enforce_sorted=False
        )
        _, h_n = self.rnn(packed)
        h = torch.cat([h_n[0], h_n[1]], dim=-1)
        return self.head(h)

    def forward(
        self,
        features: torch.Tensor,
        mask: torch.Tensor,
        ball: torch.Tensor,
        lengths: torch.Tensor,
    ) -> torch.Tensor:
        """Probability over the 15 categories, one row per sample."""
        return torch.softmax(self.logits(features, mask, ball, lengths), dim=-1)


def build_model(config: ModelConfig) -> SprintClassifier:
    """Construct a classifier with seed-reproducible initial weights."""
    torch.manual_seed(config.seed)
    return SprintClassifier(config)


def tensors_from_batch(
    batch: Batch, dtype: torch.dtype = torch.float32
) -> tuple[torch.Tensor, torch.Tensor, torch.Tensor, torch.Tensor, torch.Tensor]:
    """Batch arrays as (features, mask, ball, lengths, labels) tensors."""
    return (
        torch.from_numpy(batch.features).to(dtype),
        torch.from_numpy(batch.mask),
        torch.from_numpy(batch.ball).to(dtype),
        torch.from_numpy(batch.lengths),
        torch.from_numpy(batch.labels),
    )
