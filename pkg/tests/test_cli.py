import json

import pytest

from framespot import media
from framespot.cli import EXIT_INPUT, EXIT_PIPELINE, main

from conftest import series_from


def run(capsys, *argv):
    rc = main(list(argv))
    out = capsys.readouterr()
    return rc, out.out, out.err


def write_score_file(tmp_path, normalized, rate=1.0):
    series = series_from(normalized, rate=rate)
    path = tmp_path / "scores.json"
    path.write_text(json.dumps(series.to_json()))
    return path


def test_usage_error_exit_code():
    with pytest.raises(SystemExit) as excinfo:
        main(["highlight"])  # missing required video / source flags
    assert excinfo.value.code == 2


def test_missing_video_is_input_error(capsys, tmp_path):
    rc, _, err = run(capsys, "classify", str(tmp_path / "none.mp4"),
                     "--backend", "stub", "--dim", "32")
    assert rc == EXIT_INPUT
    assert "not found" in err


def test_undecodable_video_is_pipeline_error(capsys, tmp_path):
    bogus = tmp_path / "fake.mp4"
    bogus.write_text("not a video")
    rc, _, err = run(capsys, "classify", str(bogus), "--backend", "stub", "--dim", "32")
    assert rc == EXIT_PIPELINE


def test_classify_command(capsys, fixture_video, tmp_path):
    labels = tmp_path / "labels.txt"
    labels.write_text("circles\ncheckers\nrowing\n")
    rc, out, _ = run(capsys, "classify", str(fixture_video),
                     "--backend", "stub", "--dim", "32",
                     "--labels", str(labels), "--top", "2", "--format", "json")
    assert rc == 0
    ranked = json.loads(out)["labels"]
    assert len(ranked) == 2
    assert {r["label"] for r in ranked} <= {"circles", "checkers", "rowing"}


def test_score_command_writes_file(capsys, fixture_video, x_photo_dir, tmp_path):
    out_file = tmp_path / "fixture.scores.json"
    rc, out, _ = run(capsys, "score", str(fixture_video),
                     "--backend", "stub", "--dim", "32",
                     "--photos", str(x_photo_dir), "--out", str(out_file))
    assert rc == 0
    data = json.loads(out_file.read_text())
    assert len(data["raw"]) == len(data["normalized"]) == len(data["timestamps"])
    assert data["provenance"]["kind"] == "prior"


def test_score_command_text_prompt(capsys, fixture_video, tmp_path):
    out_file = tmp_path / "text.scores.json"
    rc, _, _ = run(capsys, "score", str(fixture_video),
                   "--backend", "stub", "--dim", "32",
                   "--text-prompt", "bright circles", "--out", str(out_file))
    assert rc == 0
    assert json.loads(out_file.read_text())["provenance"]["kind"] == "text"


def test_highlight_replays_window_oracle_case(capsys, fixture_video, tmp_path):
    # the derived brute-force example: scores [0.1, 0.9, 0.8, 0.2], w=2 -> [1, 3)
    score_file = write_score_file(tmp_path, [0.1, 0.9, 0.8, 0.2])
    rc, out, _ = run(capsys, "highlight", str(fixture_video),
                     "--scores", str(score_file), "--length", "2", "--format", "json")
    assert rc == 0
    result = json.loads(out)
    assert result["interval"] == {"start": 1.0, "end": 3.0}
    assert result["sum_score"] == pytest.approx(1.7)


def test_highlight_export(capsys, fixture_video, x_photo_dir, tmp_path):
    clip = tmp_path / "clip.mp4"
    rc, out, _ = run(capsys, "highlight", str(fixture_video),
                     "--backend", "stub", "--dim", "32",
                     "--photos", str(x_photo_dir), "--length", "5",
                     "--export", str(clip), "--format", "json")
    assert rc == 0
    assert json.loads(out)["export"] == str(clip)
    assert abs(media.probe(clip).duration - 5.0) <= 0.3


def test_montage_command(capsys, fixture_video, tmp_path):
    normalized = [0.0] * 30
    normalized[5] = 1.0
    normalized[20] = 0.8
    score_file = write_score_file(tmp_path, normalized)
    out_path = tmp_path / "montage.mp4"
    rc, out, _ = run(capsys, "montage", str(fixture_video),
                     "--scores", str(score_file), "--peaks", "2", "--length", "4",
                     "--min-sep", "10", "--export", str(out_path), "--format", "json")
    assert rc == 0
    payload = json.loads(out)
    assert len(payload["results"]) == 2
    assert abs(media.probe(out_path).duration - 8.0) <= 0.5


def test_report_command(capsys, tmp_path):
    score_file = write_score_file(tmp_path, [0.1, 0.9, 0.8, 0.2, 0.5])
    out_dir = tmp_path / "report"
    rc, out, _ = run(capsys, "report", "--scores", str(score_file),
                     "--out-dir", str(out_dir), "--length", "2", "--format", "json")
    assert rc == 0
    paths = json.loads(out)
    assert (out_dir / "highlights.csv").is_file()
    assert (out_dir / "highlights.png").is_file()
    header = (out_dir / "highlights.csv").read_text().splitlines()[0]
    assert header == "frame_index,timestamp_seconds,raw_score,normalized_score"


def test_compare_command(capsys, fixture_video, x_photo_dir, tmp_path):
    rc, out, _ = run(capsys, "compare", str(fixture_video),
                     "--keyword", "circles", "--photos", str(x_photo_dir),
                     "--backend", "stub", "--dim", "32", "--length", "5",
                     "--project-dir", str(tmp_path / "projects"),
                     "--out-dir", str(tmp_path / "pair"), "--format", "json")
    assert rc == 0
    results = json.loads(out)
    assert set(results) == {"prior", "text"}
    for cond in results.values():
        assert abs(media.probe(cond["clip"]).duration - 5.0) <= 0.3


def test_init_model_command(capsys, tmp_path):
    out = tmp_path / "model.pt"
    rc, _, _ = run(capsys, "init-model", str(out), "--dim", "32", "--resolution", "32")
    assert rc == 0
    assert out.is_file() and out.stat().st_size > 10_000


def test_highlight_default_length_is_ten_seconds():
    from framespot.cli import build_parser

    args = build_parser().parse_args(["highlight", "v.mp4", "--text-prompt", "x"])
    assert args.length == 10.0


def test_keyword_without_photo_root_is_input_error(capsys, fixture_video):
    rc, _, err = run(capsys, "score", str(fixture_video),
                     "--backend", "stub", "--dim", "32", "--keyword", "circles")
    assert rc == EXIT_INPUT
    assert "photo" in err.lower()
