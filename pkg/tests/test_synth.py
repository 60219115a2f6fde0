"""Scenario generator contract: intended labels are recoverable."""

import numpy as np
import pytest

from sprintcat.rules import CATEGORIES, classify_match
from sprintcat.synth import (
    BOUNDARY_CATEGORIES,
    DURATION_S,
    NOISE,
    Scenario,
    generate,
    generate_corpus,
)


def run_scenario(scenario):
    seq, roles, expected = generate(scenario)
    return seq, expected, classify_match(seq, roles=roles)


def paired(expected, results):
    """The detected sprints overlapping one expected label (same player)."""
    return [
        (sprint, cls)
        for sprint, cls in results
        if sprint.player_id == expected.player
        and sprint.period == expected.period
        and sprint.start_time < expected.end_time
        and sprint.end_time > expected.start_time
    ]


@pytest.mark.parametrize("category", CATEGORIES)
def test_canonical_archetype_recovers_category(category):
    seq, expected, results = run_scenario(Scenario(category, seed=0, index=0))
    assert len(expected) == 1
    assert len(results) == 1, f"{category}: expected exactly one sprint"
    hits = paired(expected[0], results)
    assert len(hits) == 1
    _, cls = hits[0]
    assert cls.category == category


@pytest.mark.parametrize("category", CATEGORIES)
@pytest.mark.parametrize("index", [1, 2])
def test_jittered_scenarios_recover_category(category, index):
    seq, expected, results = run_scenario(Scenario(category, seed=0, index=index))
    assert len(results) == 1
    _, cls = paired(expected[0], results)[0]
    assert cls.category == category


def test_expected_labels_are_well_formed():
    for category in CATEGORIES:
        _, _, expected = generate(Scenario(category, index=1))
        (exp,) = expected
        assert exp.category == category
        assert exp.period == 1
        assert 0.0 <= exp.start_time < exp.end_time <= DURATION_S


def test_noise_scenario_has_no_sprints():
    seq, roles, expected = generate(Scenario(NOISE))
    assert expected == []
    assert classify_match(seq, roles=roles) == []


def test_generation_is_deterministic():
    a, roles_a, _ = generate(Scenario("CTO", seed=9, index=3))
    b, roles_b, _ = generate(Scenario("CTO", seed=9, index=3))
    assert len(a.frames) == len(b.frames)
    for fa, fb in zip(a.frames, b.frames):
        assert sorted(fa.players) == sorted(fb.players)
        for pid in fa.players:
            assert np.array_equal(fa.players[pid], fb.players[pid])
        assert np.array_equal(fa.ball, fb.ball)
        assert fa.possession_team == fb.possession_team
    assert roles_a.intervals == roles_b.intervals


def test_different_seeds_differ():
    a, _, _ = generate(Scenario("RWB", seed=1, index=1))
    b, _, _ = generate(Scenario("RWB", seed=2, index=1))
    assert any(
        not np.array_equal(fa.players[pid], fb.players[pid])
        for fa, fb in zip(a.frames, b.frames)
        for pid in fa.players
    )


def test_corpus_shape_and_ids():
    corpus = generate_corpus(2, seed=0)
    assert len(corpus) == 2 * len(CATEGORIES)
    ids = [item.scenario.scenario_id for item in corpus]
    assert len(set(ids)) == len(ids)
    assert all(len(item.expected) == 1 for item in corpus)


def test_corpus_writes_are_byte_identical(tmp_path):
    generate_corpus(1, seed=4, out_dir=tmp_path / "a")
    generate_corpus(1, seed=4, out_dir=tmp_path / "b")
    files_a = sorted(p.relative_to(tmp_path / "a") for p in (tmp_path / "a").rglob("*") if p.is_file())
    files_b = sorted(p.relative_to(tmp_path / "b") for p in (tmp_path / "b").rglob("*") if p.is_file())
    assert files_a == files_b and files_a
    for rel in files_a:
        assert (tmp_path / "a" / rel).read_bytes() == (tmp_path / "b" / rel).read_bytes(), rel


def test_corpus_files_on_disk(tmp_path):
    generate_corpus(1, seed=0, out_dir=tmp_path)
    labels = (tmp_path / "labels.csv").read_text().splitlines()
    assert labels[0] == "scenario_id,team_id,player_id,period,start_s,end_s,category"
    assert len(labels) == 1 + len(CATEGORIES)
    manifest = (tmp_path / "manifest.csv").read_text().splitlines()
    assert len(manifest) == 1 + len(CATEGORIES)
    bundle = tmp_path / "scenarios" / "RWB-000"
    assert (bundle / "tracking.csv").exists()
    assert (bundle / "metadata.json").exists()
    assert (bundle / "events.csv").exists()
    assert (bundle / "roles.csv").exists()
    assert (bundle / "labels.csv").exists()

    from sprintcat.features import read_feature_file

    samples = read_feature_file(tmp_path / "features.bin")
    assert len(samples) == len(CATEGORIES)
    assert sorted(s.label for s in samples) == sorted(CATEGORIES)


def test_corpus_round_trip_classifies_identically(tmp_path):
    from sprintcat.roles import load_roles
    from sprintcat.tracking import load_tracking

    generate_corpus(1, seed=0, out_dir=tmp_path)
    bundle = tmp_path / "scenarios" / "PEN-000"
    seq = load_tracking(bundle)
    roles = load_roles(bundle / "roles.csv")
    results = classify_match(seq, roles=roles)
    assert len(results) == 1
    assert results[0][1].category == "PEN"


def test_peak_speed_cap_enforced():
    with pytest.raises(ValueError, match="km/h"):
        generate(Scenario("RWB", index=1, parameters={"peak_speed_ms": 12.0}))


def test_unknown_parameter_rejected():
    with pytest.raises(ValueError, match="unknown scenario parameters"):
        generate(Scenario("RWB", index=1, parameters={"pace": 7.0}))


def test_unknown_category_rejected():
    with pytest.raises(ValueError, match="unknown scenario category"):
        generate(Scenario("XXX"))


def test_parameter_override_applies():
    seq, _, expected = generate(Scenario("RWB", index=1, parameters={"start_s": 5.0}))
    assert expected[0].start_time == 5.0


@pytest.mark.parametrize("category", BOUNDARY_CATEGORIES)
def test_boundary_variants_sit_outside_the_category(category):
    seq, expected, results = run_scenario(Scenario(category, boundary=True))
    assert len(results) == 1
    _, cls = paired(expected[0], results)[0]
    assert cls.category != category, f"{category} boundary variant must not classify as itself"


def test_boundary_trace_letters_fail_strictly():
    _, _, results = run_scenario(Scenario("EXS", boundary=True))
    trace = results[0][1].trace["EXS"]
    assert trace["b"] is False and trace["c"] is False

    _, _, results = run_scenario(Scenario("PRS", boundary=True))
    assert results[0][1].trace["PRS"] == {"a": False, "b": False}
    assert results[0][1].category == "OTH"

    _, _, results = run_scenario(Scenario("PUP", boundary=True))
    assert results[0][1].trace["PUP"]["b"] is False


@pytest.mark.parametrize("category", sorted(set(CATEGORIES) - set(BOUNDARY_CATEGORIES)))
def test_categories_without_boundary_variant_say_so(category):
    with pytest.raises(ValueError, match="no boundary variant"):
        generate(Scenario(category, boundary=True))
