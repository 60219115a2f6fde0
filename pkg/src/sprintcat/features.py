"""Per-sprint feature tensors and their packed binary file format.

A sample covers one sprint: a ``(T, 22, 8)`` float32 tensor (all player
slots), a ``(T, 22)`` presence mask, the ball track ``(T, 2)`` and a
category label. Coordinates sit in the sprinter team's attacking-to-+x
view. Slot 0 is always the sprinter, slots 1-10 the teammates (sorted by
id), slots 11-21 the opponents (sorted by id); absent players occupy
zeroed, masked-out rows.

Per player and frame the 8 features are: location (x, y), velocity
(vx, vy), speed, signed acceleration along the path, and the location
relative to the ball (x, y). Velocities come from centred differences on
the sample grid (one-sided at the ends).

File layout (little-endian): magic ``SPFT``, u32 version, u32 sample
count, u32 category count; then per sample a u16-length utf-8 id, u8
label index, u32 T/P/F, the float32 feature payload in row-major order,
the u8 mask, and the float32 ball track.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from .rules import CATEGORIES, Classification
from .tracking import ParseError, TrackingSequence, normalize

MAGIC = b"SPFT"
VERSION = 1
PLAYER_SLOTS = 22
FEATURE_NAMES = ("x", "y", "vx", "vy", "speed", "accel", "ball_rel_x", "ball_rel_y")
N_FEATURES = len(FEATURE_NAMES)


@dataclass(frozen=True)
class FeatureSample:
    """One sprint's model-ready tensors plus its label."""

    sample_id: str
    label: str
    features: np.ndarray  # (T, 22, 8) float32
    mask: np.ndarray  # (T, 22) bool, True where the slot is a present player
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


def _slot_order(seq: TrackingSequence, player: str) -> list[str]:
    team = seq.team_of(player)
    mates = sorted(p for p in seq.roster(team).players if p != player)
    opponents = sorted(seq.roster(seq.opponent_of(team)).players)
    if len(mates) > PLAYER_SLOTS // 2 - 1 or len(opponents) > PLAYER_SLOTS // 2:
        raise ValueError(
            f"rosters exceed the {PLAYER_SLOTS}-slot layout "
            f"({len(mates) + 1} + {len(opponents)} players)"
        )
    order = [player] + mates
    order += [""] * (PLAYER_SLOTS // 2 - len(order))  # padded teammate slots
    order += opponents
    order += [""] * (PLAYER_SLOTS - len(order))
    return order


def sample_from_interval(
    seq: TrackingSequence,
    player: str,
    period: int,
    start_time: float,
    end_time: float,
    label: str,
    sample_id: str,
) -> FeatureSample:
    """Build the tensors for one sprint interval of ``player``."""
    frames = seq.frames_in(period, start_time, end_time)
    if len(frames) < 2:
        raise ValueError(
            f"interval [{start_time}, {end_time}] of period {period} has "
            f"fewer than two frames"
        )
    view = normalize(seq, seq.team_of(player))
    t = len(frames)
    dt = 1.0 / seq.sample_rate
    order = _slot_order(seq, player)

    ball = np.asarray([view.ball(f) for f in frames], dtype=np.float64)
    features = np.zeros((t, PLAYER_SLOTS, N_FEATURES), dtype=np.float32)
    mask = np.zeros((t, PLAYER_SLOTS), dtype=bool)
    for slot, pid in enumerate(order):
        if not pid:
            continue
        present = np.array([pid in f.players for f in frames])
        if not present.any():
            continue
        pos = np.full((t, 2), np.nan)
        for i, f in enumerate(frames):
            if present[i]:
                pos[i] = view.point(f.players[pid], f.period)
        # Differentiate on a gap-free track: holes are held at the nearest
        # earlier (else next) present position, then hidden again by the mask.
        filled = pos.copy()
        for i in range(1, t):
            if not present[i] and not np.isnan(filled[i - 1, 0]):
                filled[i] = filled[i - 1]
        for i in range(t - 2, -1, -1):
            if np.isnan(filled[i, 0]):
                filled[i] = filled[i + 1]
        vel = np.gradient(filled, dt, axis=0)
        speed = np.hypot(vel[:, 0], vel[:, 1])
        accel = np.gradient(speed, dt)
        block = np.column_stack(
            [filled[:, 0], filled[:, 1], vel[:, 0], vel[:, 1], speed, accel,
             filled[:, 0] - ball[:, 0], filled[:, 1] - ball[:, 1]]
        )
        block[~present] = 0.0
        features[:, slot, :] = block.astype(np.float32)
        mask[:, slot] = present
    return FeatureSample(
        sample_id=sample_id,
        label=label,
        features=features,
        mask=mask,
        ball=ball.astype(np.float32),
    )


def samples_from_classifications(
    seq: TrackingSequence,
    classified: Iterable[tuple],
) -> list[FeatureSample]:
    """One sample per (sprint, classification) pair, labelled by category."""
    out = []
    for sprint, result in classified:
        label = result.category if isinstance(result, Classification) else str(result)
        sid = f"{sprint.player_id}/{sprint.period}/{sprint.start_time:.2f}"
        out.append(
            sample_from_interval(
                seq,
                player=sprint.player_id,
                period=sprint.period,
                start_time=sprint.start_time,
                end_time=sprint.end_time,
                label=label,
                sample_id=sid,
            )
        )
    return out


def write_feature_file(path: str | Path, samples: Sequence[FeatureSample]) -> Path:
    path = Path(path)
    chunks = [MAGIC, struct.pack("<III", VERSION, len(samples), len(CATEGORIES))]
    for s in samples:
        sid = s.sample_id.encode("utf-8")
        t = s.features.shape[0]
        chunks.append(struct.pack("<H", len(sid)))
        chunks.append(sid)
        chunks.append(struct.pack("<BIII", CATEGORIES.index(s.label), t, PLAYER_SLOTS, N_FEATURES))
        chunks.append(np.ascontiguousarray(s.features, dtype="<f4").tobytes())
        chunks.append(np.ascontiguousarray(s.mask, dtype=np.uint8).tobytes())
        chunks.append(np.ascontiguousarray(s.ball, dtype="<f4").tobytes())
    path.write_bytes(b"".join(chunks))
    return path


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


def read_feature_file(path: str | Path) -> list[FeatureSample]:
    cur = _Cursor(Path(path))
    if cur.take(4, "magic") != MAGIC:
        raise ParseError(f"{cur.path}: not a {MAGIC.decode()} feature file")
    version, n_samples, n_categories = cur.unpack("<III", "header")
    if version != VERSION:
        raise ParseError(f"{cur.path}: unsupported version {version}")
    if n_categories != len(CATEGORIES):
        raise ParseError(
            f"{cur.path}: file declares {n_categories} categories, expected {len(CATEGORIES)}"
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
        features = np.frombuffer(cur.take(4 * t * p * f, where), dtype="<f4").reshape(t, p, f)
        mask = np.frombuffer(cur.take(t * p, where), dtype=np.uint8).reshape(t, p).astype(bool)
        ball = np.frombuffer(cur.take(4 * t * 2, where), dtype="<f4").reshape(t, 2)
        samples.append(
            FeatureSample(
                sample_id=sid,
                label=CATEGORIES[label_idx],
                features=features.copy(),
                mask=mask,
                ball=ball.copy(),
            )
        )
    if cur.pos != len(cur.data):
        raise ParseError(f"{cur.path}: {len(cur.data) - cur.pos} trailing bytes after last sample")
    return samples
