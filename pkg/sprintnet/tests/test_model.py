"""Classifier forward-pass properties: invariances, masking, shapes."""

from __future__ import annotations

import numpy as np
import pytest
import torch

from sprintnet.data import N_FEATURES, make_batch
from sprintnet.model import ModelConfig, SetEncoder, build_model, tensors_from_batch


@pytest.fixture(scope="module")
def batch_tensors(small_samples):
    return tensors_from_batch(make_batch(small_samples, 64))


@pytest.fixture(scope="module")
def model():
    return build_model(ModelConfig(seed=0))


def permuted_within_teams(features, mask, generator):
    """Reorder teammate slots 1-10 and opponent slots 11-21 independently."""
    team = torch.randperm(10, generator=generator) + 1
    opponents = torch.randperm(11, generator=generator) + 11
    idx = torch.cat([torch.tensor([0]), team, opponents])
    return features[:, :, idx], mask[:, :, idx]


# -- output form ---------------------------------------------------------------------


def test_output_is_a_probability_vector(model, batch_tensors):
    features, mask, ball, lengths, _ = batch_tensors
    with torch.no_grad():
        probs = model(features, mask, ball, lengths)
    assert probs.shape == (features.shape[0], 15)
    assert (probs > 0).all()
    assert torch.allclose(probs.sum(dim=1), torch.ones(len(probs)), atol=1e-6)


def test_fixed_seed_reproduces_untrained_predictions(batch_tensors):
    features, mask, ball, lengths, _ = batch_tensors
    with torch.no_grad():
        a = build_model(ModelConfig(seed=3))(features, mask, ball, lengths)
        b = build_model(ModelConfig(seed=3))(features, mask, ball, lengths)
    assert torch.equal(a, b)


# -- permutation invariance ------------------------------------------------------------


def test_within_team_permutations_leave_predictions_unchanged(model, batch_tensors):
    features, mask, ball, lengths, _ = batch_tensors
    generator = torch.Generator().manual_seed(11)
    with torch.no_grad():
        base = model(features, mask, ball, lengths)
        for _ in range(5):
            f2, m2 = permuted_within_teams(features, mask, generator)
            probs = model(f2, m2, ball, lengths)
            assert (probs - base).abs().max().item() <= 1e-5


def test_teammate_order_leaves_context_embedding_unchanged(model, batch_tensors):
    features, mask, _, _, _ = batch_tensors
    generator = torch.Generator().manual_seed(4)
    idx = torch.cat(
        [torch.tensor([0]), torch.randperm(10, generator=generator) + 1,
         torch.arange(11, 22)]
    )
    with torch.no_grad():
        base = model.encode_context(features, mask, "team")
        permuted = model.encode_context(features[:, :, idx], mask[:, :, idx], "team")
    assert (permuted - base).abs().max().item() <= 1e-5


# -- set semantics ----------------------------------------------------------------------


def test_duplicating_a_teammate_changes_the_embedding(model, batch_tensors):
    features, mask, _, _, _ = batch_tensors
    f2 = features.clone()
    f2[:, :, 10] = f2[:, :, 1]  # slot 10 becomes a copy of the slot-1 teammate
    with torch.no_grad():
        base = model.encode_context(features, mask, "team")
        doubled = model.encode_context(f2, mask, "team")
    assert (doubled - base).abs().max().item() > 1e-3


def test_all_absent_set_returns_the_learned_null_embedding():
    encoder = SetEncoder(N_FEATURES, 32, 4, 4)
    sprinter = torch.randn(3, N_FEATURES)
    others = torch.randn(3, 10, N_FEATURES)
    out = encoder(sprinter, others, torch.zeros(3, 10, dtype=torch.bool))
    assert torch.equal(out, encoder.null_embedding.expand_as(out))


def test_single_member_set_depends_on_both_players():
    torch.manual_seed(0)
    encoder = SetEncoder(N_FEATURES, 32, 4, 4)
    sprinter = torch.randn(1, N_FEATURES)
    other = torch.randn(1, 1, N_FEATURES)
    mask = torch.ones(1, 1, dtype=torch.bool)
    with torch.no_grad():
        base = encoder(sprinter, other, mask)
        assert torch.equal(base, encoder(sprinter, other, mask))  # deterministic
        moved_other = encoder(sprinter, other + 1.0, mask)
        moved_sprinter = encoder(sprinter + 1.0, other, mask)
    assert not torch.equal(base, moved_other)
    assert not torch.equal(base, moved_sprinter)


# -- frame masking -----------------------------------------------------------------------


def test_padded_frames_cannot_influence_predictions(model, batch_tensors):
    features, mask, ball, lengths, _ = batch_tensors
    f2, b2 = features.clone(), ball.clone()
    for i, length in enumerate(lengths.tolist()):
        f2[i, length:] = 99.0
        b2[i, length:] = -42.0
    with torch.no_grad():
        base = model(features, mask, ball, lengths)
        noisy = model(f2, mask, b2, lengths)
    assert torch.equal(base, noisy)


def test_side_subset_encoding_matches_per_frame_encoding(model, batch_tensors):
    features, mask, ball, lengths, _ = batch_tensors
    with torch.no_grad():
        z_team, z_opponents = model._encode_sides(features, mask, lengths)
        full_team = model.encode_context(features, mask, "team")
        full_opponents = model.encode_context(features, mask, "opponents")
    for subset, full in ((z_team, full_team), (z_opponents, full_opponents)):
        for i, length in enumerate(lengths.tolist()):
            assert (subset[i, :length] - full[i, :length]).abs().max().item() <= 1e-6


# -- validation ----------------------------------------------------------------------------


def test_unknown_side_rejected(model, batch_tensors):
    features, mask, _, _, _ = batch_tensors
    with pytest.raises(ValueError, match="side must be 'team' or 'opponents'"):
        model.encode_context(features, mask, "referee")


def test_shape_mismatch_rejected(model, batch_tensors):
    features, mask, ball, lengths, _ = batch_tensors
    with pytest.raises(ValueError, match="features must be"):
        model(features[:, :, :21], mask, ball, lengths)
    with pytest.raises(ValueError, match="mask shape"):
        model(features, mask[:, :, :21], ball, lengths)
    with pytest.raises(ValueError, match="ball shape"):
        model(features, mask, ball[:, :, :1], lengths)
    with pytest.raises(ValueError, match="one per sample"):
        model(features, mask, ball, lengths[:-1])
    bad = lengths.clone()
    bad[0] = 0
    with pytest.raises(ValueError, match="between 1 and T"):
        model(features, mask, ball, bad)


def test_config_validation():
    with pytest.raises(ValueError, match="fixed to 15"):
        ModelConfig(n_categories=3)
    with pytest.raises(ValueError, match="divisible"):
        ModelConfig(embed_dim=30, n_heads=4)
