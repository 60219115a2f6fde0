"""Loading and batching of packed per-sprint feature tensors.

This package consumes the tensor files that the ``sprintcat`` exporter
writes (``sprintcat export-features`` / ``sprintcat synth``). The file
format is the contract between the two packages, so the parser here is
written against the documented layout rather than importing the exporter:

Little-endian throughout. Magic ``SPFT``, u32 version (1), u32 sample
count, u32 category count (15); then per sample a u16-length utf-8 id,
u8 label index, u32 T/P/F, the float32 ``(T, 22, 8)`` feature payload in
row-major order, the u8 ``(T, 22)`` presence mask, and the float32
``(T, 2)`` ball track. Slot 0 is the sprinter, slots 1-10 the teammates,
slots 11-21 the opponents; the 8 per-player features are location,
velocity, speed, signed acceleration, and ball-relative location.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

import numpy as np

MAGIC = b"SPFT"
VERSION = 1
PLAYER_SLOTS = 22
N_FEATURES = 8
SPRINTER_SLOT = 0
TEAM_SLOTS = slice(1, 11)
OPPONENT_SLOTS = slice(11, 22)

# Canonical category order; label indices in the file refer to this tuple.
CATEGORIES: tuple[str, ...] = (
    "RWB", "EXS", "PEN", "BIB", "SUP", "OVL", "UNL", "MTR",
    "PRS", "COV", "REC", "INT", "CTO",
    "PUP", "OTH",
)


class ParseError(ValueError):
    """A feature file that cannot be decoded."""


@dataclass(frozen=True)
class SprintSample:
    """One sprint's tensors plus its category label."""

    sample_id: str
    label: str
    features: np.ndarray  # (T, 22, 8) float32
    mask: np.ndarray  # (T, 22) bool, True where the slot holds a present player
    ball: np.ndarray  # (T, 2) float32

    def __post_init__(self) -> None:
        t = self.features.shape[0]
        if self.features.shape != (t, PLAYER_SLOTS, N_FEATURES):
            raise ValueError(f"features must be (T, {PLAYER_SLOTS}, {N_FEATURES})")
        if self.mask.shape != (t, PLAYER_SLOTS):
            raise ValueError("mask shape must match features")
        if self.ball.shape != (t, 2):
            raise ValueError("ball shape must be (T, 2)")
        if self.label not in CATEGORIES:
            raise ValueError(f"unknown category label {self.label!r}")

    @property
    def label_index(self) -> int:
        return CATEGORIES.index(self.label)

    @property
    def n_frames(self) -> int:
        return self.features.shape[0]


class _Cursor:
    def __init__(self, path: Path):
        self.path = path
        self.data = path.read_bytes()
        self.pos = 0

    def take(self, n: int, what: str) -> bytes:
        if self.pos + n > len(self.data):
            raise ParseError(
                f"{self.path}: truncated at byte {self.pos} while reading {what}"
            )
        out = self.data[self.pos : self.pos + n]
        self.pos += n
        return out

    def unpack(self, fmt: str, what: str) -> tuple:
        return struct.unpack(fmt, self.take(struct.calcsize(fmt), what))


def read_feature_file(path: str | Path) -> list[SprintSample]:
    """Decode every sample in a packed feature file."""
    cur = _Cursor(Path(path))
    if cur.take(4, "magic") != MAGIC:
        raise ParseError(f"{cur.path}: not a {MAGIC.decode()} feature file")
    version, n_samples, n_categories = cur.unpack("<III", "header")
    if version != VERSION:
        raise ParseError(f"{cur.path}: unsupported version {version}")
    if n_categories != len(CATEGORIES):
        raise ParseError(
            f"{cur.path}: file declares {n_categories} categories, "
            f"expected {len(CATEGORIES)}"
        )
    samples = []
    for i in range(n_samples):
        where = f"sample {i}"
        (id_len,) = cur.unpack("<H", where)
        sid = cur.take(id_len, where).decode("utf-8")
        label_idx, t, p, f = cur.unpack("<BIII", where)
        if label_idx >= len(CATEGORIES):
            raise ParseError(f"{cur.path}: sample {i} has label index {label_idx}")
        if p != PLAYER_SLOTS or f != N_FEATURES:
            raise ParseError(
                f"{cur.path}: sample {i} has shape ({t}, {p}, {f}), "
                f"expected (*, {PLAYER_SLOTS}, {N_FEATURES})"
            )
        features = np.frombuffer(cur.take(4 * t * p * f, where), dtype="<f4")
        mask = np.frombuffer(cur.take(t * p, where), dtype=np.uint8)
        ball = np.frombuffer(cur.take(4 * t * 2, where), dtype="<f4")
        samples.append(
            SprintSample(
                sample_id=sid,
                label=CATEGORIES[label_idx],
                features=features.reshape(t, p, f).copy(),
                mask=mask.reshape(t, p).astype(bool),
                ball=ball.reshape(t, 2).copy(),
            )
        )
    if cur.pos != len(cur.data):
        raise ParseError(
            f"{cur.path}: {len(cur.data) - cur.pos} trailing bytes after last sample"
        )
    return samples


def pad_or_truncate(
    sample: SprintSample, max_frames: int
) -> tuple[np.ndarray, np.ndarray, np.ndarray, int]:
    """Fit one sample to a fixed frame count.

    Longer sprints keep their last ``max_frames`` frames (the end state
    carries the sprint's outcome); shorter ones are zero-padded at the end
    with an all-absent mask. Returns ``(features, mask, ball, length)``
    where ``length`` is the number of real frames.
    """
    t = sample.n_frames
    if t >= max_frames:
        sl = slice(t - max_frames, t)
        return (
            sample.features[sl],
            sample.mask[sl],
            sample.ball[sl],
            max_frames,
        )
    features = np.zeros((max_frames, PLAYER_SLOTS, N_FEATURES), dtype=np.float32)
    mask = np.zeros((max_frames, PLAYER_SLOTS), dtype=bool)
    ball = np.zeros((max_frames, 2), dtype=np.float32)
    features[:t] = sample.features
    mask[:t] = sample.mask
    ball[:t] = sample.ball
    return features, mask, ball, t


@dataclass(frozen=True)
class Batch:
    """Fixed-length arrays for a list of samples."""

    sample_ids: tuple[str, ...]
    features: np.ndarray  # (B, max_frames, 22, 8) float32
    mask: np.ndarray  # (B, max_frames, 22) bool
    ball: np.ndarray  # (B, max_frames, 2) float32
    lengths: np.ndarray  # (B,) int64, real frames per sample
    labels: np.ndarray  # (B,) int64, indices into CATEGORIES

    def __len__(self) -> int:
        return len(self.sample_ids)


def make_batch(samples: Sequence[SprintSample], max_frames: int) -> Batch:
    """Stack samples into fixed-length arrays, padding or truncating."""
    if not samples:
        raise ValueError("cannot batch zero samples")
    rows = [pad_or_truncate(s, max_frames) for s in samples]
    return Batch(
        sample_ids=tuple(s.sample_id for s in samples),
        features=np.stack([r[0] for r in rows]),
        mask=np.stack([r[1] for r in rows]),
        ball=np.stack([r[2] for r in rows]),
        lengths=np.asarray([r[3] for r in rows], dtype=np.int64),
        labels=np.asarray([s.label_index for s in samples], dtype=np.int64),
    )


def stratified_split(
    samples: Sequence[SprintSample], holdout_fraction: float, seed: int
) -> tuple[list[SprintSample], list[SprintSample]]:
    """Split into (train, holdout), stratified by label, fixed by seed.

    A zero fraction keeps every sample on the training side.
    """
    if not 0.0 <= holdout_fraction < 1.0:
        raise ValueError("holdout_fraction must be in [0, 1)")
    if holdout_fraction == 0.0:
        return list(samples), []
    rng = np.random.default_rng(seed)
    by_label: dict[str, list[int]] = {}
    for i, s in enumerate(samples):
        by_label.setdefault(s.label, []).append(i)
    train_idx: list[int] = []
    holdout_idx: list[int] = []
    for label in sorted(by_label):
        idx = np.asarray(by_label[label])
        rng.shuffle(idx)
        n_hold = max(1, round(len(idx) * holdout_fraction)) if len(idx) > 1 else 0
        holdout_idx.extend(idx[:n_hold])
        train_idx.extend(idx[n_hold:])
    return (
        [samples[i] for i in sorted(train_idx)],
        [samples[i] for i in sorted(holdout_idx)],
    )
