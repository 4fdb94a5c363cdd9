import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from framespot.classify import ActivityLabelSet, classify_activity, load_labels
from framespot.score import FrameEmbeddingSeries

from conftest import VectorBackend, basis


def _frames(vectors, fingerprint="vector:8"):
    arr = np.stack([np.asarray(v, dtype=np.float32) for v in vectors])
    return FrameEmbeddingSeries(
        embeddings=arr,
        timestamps=np.arange(len(vectors), dtype=np.float64),
        video_hash="h",
        sampling_rate=1.0,
        backend_fingerprint=fingerprint,
    )


def _label_set(names, vectors, fingerprint="vector:8"):
    backend = VectorBackend(dim=len(vectors[0]), text_map=dict(zip(names, vectors)),
                            fingerprint=fingerprint)
    return ActivityLabelSet.build(list(names), backend)


def test_identical_frames_rank_label_first():
    e0 = basis(8, 0)
    labels = _label_set(["alpha", "beta"], [e0, basis(8, 1)])
    ranked = classify_activity(_frames([e0, e0, e0]), labels, top_k=2)
    assert ranked[0] == ("alpha", pytest.approx(1.0, abs=1e-6))
    assert ranked[1][1] == pytest.approx(0.0, abs=1e-6)


def test_orthogonal_scores():
    labels = _label_set(["a", "b"], [basis(8, 0), basis(8, 1)])
    ranked = classify_activity(_frames([basis(8, 0)]), labels, top_k=2)
    assert dict(ranked) == {
        "a": pytest.approx(1.0, abs=1e-6),
        "b": pytest.approx(0.0, abs=1e-6),
    }


def test_mixed_frames_tie_breaks_lexicographically():
    # mean of {e0, e1} has norm 1/sqrt(2); cosine to either basis = 1/sqrt(2)
    labels = _label_set(["zeta", "alpha"], [basis(8, 0), basis(8, 1)])
    ranked = classify_activity(_frames([basis(8, 0), basis(8, 1)]), labels, top_k=2)
    expected = 1 / np.sqrt(2)
    assert ranked[0] == ("alpha", pytest.approx(expected, abs=1e-9))
    assert ranked[1] == ("zeta", pytest.approx(expected, abs=1e-9))


def test_ranking_invariant_to_frame_order():
    rng = np.random.default_rng(0)
    vecs = [v / np.linalg.norm(v) for v in rng.standard_normal((5, 8))]
    labels = _label_set(["a", "b", "c"],
                        [v / np.linalg.norm(v) for v in rng.standard_normal((3, 8))])
    fwd = classify_activity(_frames(vecs), labels, top_k=3)
    rev = classify_activity(_frames(vecs[::-1]), labels, top_k=3)
    assert [l for l, _ in fwd] == [l for l, _ in rev]


def test_adding_label_preserves_relative_order():
    rng = np.random.default_rng(1)
    frame_vecs = [v / np.linalg.norm(v) for v in rng.standard_normal((4, 8))]
    label_vecs = [v / np.linalg.norm(v) for v in rng.standard_normal((4, 8))]
    small = _label_set(["a", "b", "c"], label_vecs[:3])
    big = _label_set(["a", "b", "c", "d"], label_vecs)
    order_small = [l for l, _ in classify_activity(_frames(frame_vecs), small, top_k=3)]
    order_big = [l for l, _ in classify_activity(_frames(frame_vecs), big, top_k=4)
                 if l != "d"]
    assert order_small == order_big


def test_fingerprint_mismatch_rejected():
    labels = _label_set(["a"], [basis(8, 0)], fingerprint="other:8")
    with pytest.raises(ValueError, match="fingerprint"):
        classify_activity(_frames([basis(8, 0)]), labels, top_k=1)


def test_top_k_clamps_and_validates():
    labels = _label_set(["a", "b"], [basis(8, 0), basis(8, 1)])
    frames = _frames([basis(8, 0)])
    assert len(classify_activity(frames, labels, top_k=10)) == 2
    with pytest.raises(ValueError):
        classify_activity(frames, labels, top_k=0)


def test_prompt_template_applied():
    backend = VectorBackend(
        dim=4, text_map={"a photo of surfing": basis(4, 2)}, fingerprint="vector:4"
    )
    labels = ActivityLabelSet.build(["surfing"], backend,
                                    prompt_template="a photo of {label}")
    assert np.array_equal(labels.label_embeddings[0], basis(4, 2))
    assert labels.prompt_template == "a photo of {label}"


def test_duplicate_labels_rejected():
    backend = VectorBackend(dim=4, text_map={"a": basis(4, 0)})
    with pytest.raises(ValueError, match="duplicate"):
        ActivityLabelSet.build(["a", "a"], backend)


def test_default_label_database():
    labels = load_labels()
    assert len(labels) >= 400
    assert len(set(labels)) == len(labels)
    assert "skydiving" in labels and "skateboarding" in labels


def test_load_labels_custom_file(tmp_path):
    path = tmp_path / "labels.txt"
    path.write_text("# comment\nrowing\n\nclimbing\n")
    assert load_labels(path) == ["rowing", "climbing"]
    empty = tmp_path / "empty.txt"
    empty.write_text("# nothing\n")
    with pytest.raises(ValueError):
        load_labels(empty)


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 10_000))
def test_scores_bounded(seed):
    rng = np.random.default_rng(seed)
    frame_vecs = [v / np.linalg.norm(v) for v in rng.standard_normal((3, 8))]
    label_vecs = [v / np.linalg.norm(v) for v in rng.standard_normal((4, 8))]
    labels = _label_set(["a", "b", "c", "d"], label_vecs)
    ranked = classify_activity(_frames(frame_vecs), labels, top_k=4)
    assert all(-1 - 1e-9 <= s <= 1 + 1e-9 for _, s in ranked)
    assert [s for _, s in ranked] == sorted((s for _, s in ranked), reverse=True)
