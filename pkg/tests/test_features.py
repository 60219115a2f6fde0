"""Feature tensor extraction and the packed binary file format."""

import numpy as np
import pytest

from sprintcat.features import (
    FEATURE_NAMES,
    MAGIC,
    N_FEATURES,
    PLAYER_SLOTS,
    FeatureSample,
    read_feature_file,
    sample_from_interval,
    samples_from_classifications,
    write_feature_file,
)
from sprintcat.rules import classify_match
from sprintcat.synth import Scenario, generate
from sprintcat.tracking import ParseError

from support import make_sequence, still


def linear(p0, v, n, rate=10.0):
    t = np.arange(n) / rate
    return np.stack([p0[0] + v[0] * t, p0[1] + v[1] * t], axis=1)


def fixture_sequence():
    n = 31
    return make_sequence(
        positions={
            "H07": linear((0.0, 0.0), (3.0, 0.0), n),
            "H02": still((-5.0, 3.0), n),
            "A02": linear((10.0, -4.0), (-2.0, 0.0), n),
        },
        ball=still((2.0, 1.0), n),
    )


def test_slot_layout_and_mask():
    seq = fixture_sequence()
    s = sample_from_interval(seq, "H07", 1, 0.5, 1.5, label="EXS", sample_id="x")
    assert s.features.shape == (11, PLAYER_SLOTS, N_FEATURES)
    assert s.mask.shape == (11, PLAYER_SLOTS)
    assert s.ball.shape == (11, 2)
    # Slot 0 is the sprinter, teammates fill the first half, opponents the
    # second; unused slots stay masked out and zeroed.
    assert s.mask[:, 0].all()
    used = s.mask.any(axis=0)
    assert used.sum() == len(seq.roster("home").players) + len(seq.roster("away").players)
    assert np.all(s.features[:, ~used, :] == 0.0)


def test_sprinter_features_match_track_arithmetic():
    seq = fixture_sequence()
    s = sample_from_interval(seq, "H07", 1, 0.5, 1.5, label="EXS", sample_id="x")
    x, y, vx, vy, speed, accel, brx, bry = (s.features[:, 0, i] for i in range(N_FEATURES))
    t = np.arange(5, 16) / 10.0
    assert np.allclose(x, 3.0 * t, atol=1e-6)
    assert np.allclose(y, 0.0)
    assert np.allclose(vx, 3.0, atol=1e-5)
    assert np.allclose(vy, 0.0, atol=1e-6)
    assert np.allclose(speed, 3.0, atol=1e-5)
    assert np.allclose(accel, 0.0, atol=1e-4)
    assert np.allclose(brx, 3.0 * t - 2.0, atol=1e-6)
    assert np.allclose(bry, -1.0, atol=1e-6)


def test_away_sample_uses_attacking_view():
    seq = fixture_sequence()
    s = sample_from_interval(seq, "A02", 1, 0.5, 1.5, label="PRS", sample_id="a")
    # Away attacks -x, so its normalized view flips both axes: a world
    # velocity of (-2, 0) reads as +2 along the attack direction.
    vx = s.features[:, 0, FEATURE_NAMES.index("vx")]
    assert np.allclose(vx, 2.0, atol=1e-5)
    assert np.allclose(s.features[0, 0, 0], -9.0, atol=1e-6)
    assert np.allclose(s.ball[:, 0], -2.0, atol=1e-6)


def test_absent_frames_are_masked_and_zeroed():
    n = 31
    gappy = linear((0.0, 0.0), (2.0, 0.0), n)
    gappy[10:14] = np.nan
    seq = make_sequence(
        positions={"H07": still((1.0, 1.0), n), "H08": gappy},
        ball=still((0.0, 0.0), n),
    )
    s = sample_from_interval(seq, "H07", 1, 0.0, 3.0, label="SUP", sample_id="g")
    mates = sorted(p for p in seq.roster("home").players if p != "H07")
    slot = 1 + mates.index("H08")
    assert not s.mask[10:14, slot].any()
    assert s.mask[:10, slot].all() and s.mask[14:, slot].all()
    assert np.all(s.features[10:14, slot, :] == 0.0)
    # Velocities on either side of the gap stay finite and sane.
    vx = s.features[:, slot, FEATURE_NAMES.index("vx")]
    assert np.isfinite(vx[s.mask[:, slot]]).all()


def test_too_short_interval_rejected():
    seq = fixture_sequence()
    with pytest.raises(ValueError, match="fewer than two frames"):
        sample_from_interval(seq, "H07", 1, 0.5, 0.5, label="EXS", sample_id="x")


def test_unknown_label_rejected():
    seq = fixture_sequence()
    with pytest.raises(ValueError, match="unknown category label"):
        sample_from_interval(seq, "H07", 1, 0.0, 1.0, label="ZZZ", sample_id="x")


def test_round_trip_is_exact(tmp_path):
    seq = fixture_sequence()
    samples = [
        sample_from_interval(seq, "H07", 1, 0.5, 1.5, label="EXS", sample_id="one"),
        sample_from_interval(seq, "A02", 1, 0.0, 2.0, label="PRS", sample_id="two/with/slashes"),
    ]
    path = write_feature_file(tmp_path / "f.bin", samples)
    loaded = read_feature_file(path)
    assert [s.sample_id for s in loaded] == ["one", "two/with/slashes"]
    assert [s.label for s in loaded] == ["EXS", "PRS"]
    for a, b in zip(samples, loaded):
        assert np.array_equal(a.features, b.features)
        assert np.array_equal(a.mask, b.mask)
        assert np.array_equal(a.ball, b.ball)


def test_empty_file_round_trip(tmp_path):
    path = write_feature_file(tmp_path / "empty.bin", [])
    assert read_feature_file(path) == []


def test_wrong_magic_rejected(tmp_path):
    p = tmp_path / "bad.bin"
    p.write_bytes(b"NOPE" + b"\x00" * 16)
    with pytest.raises(ParseError, match="not a SPFT feature file"):
        read_feature_file(p)


def test_unsupported_version_rejected(tmp_path):
    p = tmp_path / "v9.bin"
    p.write_bytes(MAGIC + (9).to_bytes(4, "little") + b"\x00" * 8)
    with pytest.raises(ParseError, match="unsupported version 9"):
        read_feature_file(p)


def test_truncated_file_reports_locus(tmp_path):
    seq = fixture_sequence()
    sample = sample_from_interval(seq, "H07", 1, 0.5, 1.5, label="EXS", sample_id="one")
    path = write_feature_file(tmp_path / "f.bin", [sample])
    data = path.read_bytes()
    (tmp_path / "cut.bin").write_bytes(data[: len(data) // 2])
    with pytest.raises(ParseError, match="truncated at byte .* sample 0"):
        read_feature_file(tmp_path / "cut.bin")


def test_trailing_bytes_rejected(tmp_path):
    seq = fixture_sequence()
    sample = sample_from_interval(seq, "H07", 1, 0.5, 1.5, label="EXS", sample_id="one")
    path = write_feature_file(tmp_path / "f.bin", [sample])
    (tmp_path / "pad.bin").write_bytes(path.read_bytes() + b"xx")
    with pytest.raises(ParseError, match="2 trailing bytes"):
        read_feature_file(tmp_path / "pad.bin")


def test_samples_from_classifications_carries_categories():
    seq, roles, _ = generate(Scenario("RWB"))
    results = classify_match(seq, roles=roles)
    samples = samples_from_classifications(seq, results)
    assert len(samples) == 1
    assert samples[0].label == "RWB"
    assert samples[0].sample_id.startswith("H10/1/")
    assert samples[0].mask[:, 0].all()


def test_sample_shape_validation():
    with pytest.raises(ValueError, match="features must be"):
        FeatureSample(
            sample_id="x",
            label="EXS",
            features=np.zeros((4, 3, N_FEATURES), dtype=np.float32),
            mask=np.zeros((4, 3), dtype=bool),
            ball=np.zeros((4, 2), dtype=np.float32),
        )
