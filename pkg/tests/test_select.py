import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from framespot import media
from framespot.media import Interval
from framespot.select import assemble_montage, best_window, interval_mean, top_peaks

from conftest import series_from


def brute_force_best(scores, w):
    """Exhaustive oracle: explicit sum over every window, first max wins."""
    sums = [sum(scores[i: i + w]) for i in range(len(scores) - w + 1)]
    best = max(sums)
    return sums.index(best), best


def test_best_window_example():
    series = series_from([0.1, 0.9, 0.8, 0.2])
    result = best_window(series, 2.0)
    assert (result.interval.start, result.interval.end) == (1.0, 3.0)
    assert result.sum_score == pytest.approx(1.7)
    assert result.mean_score == pytest.approx(0.85)
    assert result.rank == 1


def test_best_window_constant_ties_earliest():
    series = series_from([0.4] * 6)
    result = best_window(series, 2.0)
    assert result.interval.start == 0.0
    assert result.interval.end == 2.0


def test_best_window_full_duration():
    series = series_from([0.1, 0.5, 0.9])
    result = best_window(series, 3.0)
    assert (result.interval.start, result.interval.end) == (0.0, 3.0)


def test_best_window_respects_sampling_rate():
    series = series_from([0.0, 0.0, 1.0, 1.0, 0.0, 0.0], rate=2.0)
    result = best_window(series, 1.0)  # 2 frames at 2 fps
    assert (result.interval.start, result.interval.end) == (1.0, 2.0)


def test_best_window_validation():
    series = series_from([0.1, 0.2, 0.3])
    with pytest.raises(ValueError):
        best_window(series, 0.0)
    with pytest.raises(ValueError):
        best_window(series, 99.0)
    with pytest.raises(ValueError):
        best_window(series, 0.1)  # rounds to zero frames at 1 fps


@settings(max_examples=80, deadline=None)
@given(st.data())
def test_best_window_matches_brute_force(data):
    n = data.draw(st.integers(1, 60))
    # quantized lattice values make both paths exact, so ties are real
    vals = data.draw(st.lists(st.integers(0, 8), min_size=n, max_size=n))
    scores = np.asarray(vals, dtype=np.float64) / 8.0
    w_frames = data.draw(st.integers(1, n))
    series = series_from(scores)
    result = best_window(series, float(w_frames))
    start, best = brute_force_best(scores.tolist(), w_frames)
    assert result.interval.start == pytest.approx(float(start))
    assert result.sum_score == pytest.approx(best)


def test_best_window_affine_invariance():
    rng = np.random.default_rng(3)
    scores = rng.uniform(0, 1, 40)
    a = best_window(series_from(scores), 7.0)
    b = best_window(series_from(0.5 * scores + 0.2), 7.0)
    assert (a.interval.start, a.interval.end) == (b.interval.start, b.interval.end)


def test_interval_mean_examples():
    series = series_from([0.2, 0.4, 0.9, 0.1])
    assert interval_mean(series, Interval(0.0, 2.0)) == pytest.approx(0.3)
    assert interval_mean(series, Interval(2.0, 3.0)) == pytest.approx(0.9)
    with pytest.raises(ValueError, match="no sampled frames"):
        interval_mean(series, Interval(2.1, 2.9))


def test_interval_mean_of_best_window_dominates():
    rng = np.random.default_rng(11)
    scores = rng.uniform(0, 1, 50)
    series = series_from(scores)
    best = best_window(series, 8.0)
    best_mean = interval_mean(series, best.interval)
    for start in range(0, 43):
        other = Interval(float(start), float(start + 8))
        assert best_mean >= interval_mean(series, other) - 1e-12


def test_top_peaks_two_bumps():
    scores = np.zeros(40)
    scores[10] = 1.0
    scores[30] = 0.9
    series = series_from(scores)
    results = top_peaks(series, k=2, min_separation_seconds=10.0, clip_length_seconds=4.0)
    assert len(results) == 2
    assert results[0].rank == 1 and results[1].rank == 2
    assert results[0].peak_time == pytest.approx(10.0)
    assert results[1].peak_time == pytest.approx(30.0)
    # windows centered on the bumps, non-overlapping
    assert results[0].interval.start == pytest.approx(8.0)
    assert results[0].interval.end == pytest.approx(12.0)
    assert not results[0].interval.overlaps(results[1].interval)


def test_top_peaks_k1_contains_argmax():
    rng = np.random.default_rng(5)
    scores = rng.uniform(0, 1, 60)
    series = series_from(scores)
    [result] = top_peaks(series, 1, 10.0, 10.0)
    argmax_t = float(np.argmax(scores))
    assert result.interval.start <= argmax_t < result.interval.end


def test_top_peaks_monotone_series_collapses_to_end():
    scores = np.linspace(0, 1, 30)
    series = series_from(scores)
    results = top_peaks(series, k=3, min_separation_seconds=series.duration,
                        clip_length_seconds=5.0)
    assert len(results) == 1
    # peak is the last frame; window clamped against the end of the span
    assert results[0].peak_time == pytest.approx(29.0)
    assert results[0].interval.end == pytest.approx(series.duration)


def test_top_peaks_validation():
    series = series_from([0.1, 0.2, 0.3, 0.4])
    with pytest.raises(ValueError):
        top_peaks(series, 0, 2.0, 2.0)
    with pytest.raises(ValueError):
        top_peaks(series, 1, 1.0, 2.0)  # separation below clip length
    with pytest.raises(ValueError):
        top_peaks(series, 1, 99.0, 99.0)  # clip longer than span


@settings(max_examples=60, deadline=None)
@given(st.data())
def test_top_peaks_properties(data):
    n = data.draw(st.integers(4, 80))
    vals = data.draw(st.lists(st.integers(0, 16), min_size=n, max_size=n))
    scores = np.asarray(vals, dtype=np.float64) / 16.0
    series = series_from(scores)
    k = data.draw(st.integers(1, 5))
    clip_len = data.draw(st.floats(0.5, float(n)))
    min_sep = data.draw(st.floats(clip_len, float(n) + 2))
    results = top_peaks(series, k, min_sep, clip_len)
    assert len(results) <= k
    peaks = [r.peak_time for r in results]
    for i, a in enumerate(peaks):
        for b in peaks[i + 1:]:
            assert abs(a - b) >= min_sep - 1e-9
    for r in results:
        assert r.interval.start >= -1e-9
        assert r.interval.end <= series.duration + 1e-9
        assert r.interval.length == pytest.approx(clip_len)
    for a, b in zip(results, results[1:]):
        assert not a.interval.overlaps(b.interval)
    top = next(r for r in results if r.rank == 1)
    argmax_t = float(np.argmax(scores))
    assert top.interval.start - 1e-9 <= argmax_t < top.interval.end + 1e-9


def test_assemble_montage(short_video, tmp_path):
    from framespot.select import HighlightResult

    results = [
        HighlightResult(Interval(0.0, 1.0), 0.0, 0.0, 1),
        HighlightResult(Interval(4.0, 5.0), 0.0, 0.0, 2),
        HighlightResult(Interval(8.0, 9.0), 0.0, 0.0, 3),
    ]
    out = assemble_montage(short_video, results, tmp_path / "montage.mp4")
    assert abs(media.probe(out).duration - 3.0) <= 6.0 / 10


def test_assemble_montage_single_equals_cut(short_video, tmp_path):
    from framespot.select import HighlightResult

    single = [HighlightResult(Interval(2.0, 4.0), 0.0, 0.0, 1)]
    out = assemble_montage(short_video, single, tmp_path / "one.mp4")
    direct = media.cut_clip(short_video, Interval(2.0, 4.0), tmp_path / "direct.mp4")
    assert abs(media.probe(out).duration - media.probe(direct).duration) <= 2.0 / 10


def test_assemble_montage_rejects_overlap(short_video, tmp_path):
    from framespot.select import HighlightResult

    overlapping = [
        HighlightResult(Interval(0.0, 3.0), 0.0, 0.0, 1),
        HighlightResult(Interval(2.0, 5.0), 0.0, 0.0, 2),
    ]
    with pytest.raises(ValueError, match="overlap"):
        assemble_montage(short_video, overlapping, tmp_path / "bad.mp4")
    with pytest.raises(ValueError):
        assemble_montage(short_video, [], tmp_path / "none.mp4")
