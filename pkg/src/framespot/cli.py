"""Command-line interface.

Exit codes: 0 success, 2 usage error, 3 input error (bad paths or
values), 4 pipeline failure (decode, inference, provider, or storage).
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

from .config import AppConfig
from .errors import FramespotError

log = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_INPUT = 3
EXIT_PIPELINE = 4


def _add_common(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--config", help="JSON config file")
    parser.add_argument("--model", help="TorchScript model path (FRAMESPOT_MODEL)")
    parser.add_argument("--backend", choices=["torchscript", "stub"],
                        help="embedding backend kind")
    parser.add_argument("--dim", type=int, help="embedding dimension")
    parser.add_argument("--resolution", type=int, help="model input resolution")
    parser.add_argument("--decoder", help="FFmpeg-compatible decoder binary (FRAMESPOT_FFMPEG)")
    parser.add_argument("--photo-root", help="local photo library for keyword priors")
    parser.add_argument("-v", "--verbose", action="store_true")


def _add_scoring_source(parser: argparse.ArgumentParser, allow_scores_file: bool) -> None:
    group = parser.add_mutually_exclusive_group(required=True)
    group.add_argument("--keyword", help="activity keyword; photos come from the photo library")
    group.add_argument("--photos", help="folder of exemplar photos for a personalized prior")
    group.add_argument("--text-prompt", help="score directly against a text prompt (baseline)")
    if allow_scores_file:
        group.add_argument("--scores", help="previously saved score file")
    parser.add_argument("--rate", type=float, help="sampling rate, frames/second (default 1)")
    parser.add_argument("--smooth", type=int, help="odd moving-average window (frames)")
    parser.add_argument("--photo-count", type=int, default=None,
                        help="exemplar photos per prior (default 10)")


def _config_from(args) -> AppConfig:
    return AppConfig.load(
        config_file=args.config,
        model_path=getattr(args, "model", None),
        backend=getattr(args, "backend", None),
        dim=getattr(args, "dim", None),
        input_resolution=getattr(args, "resolution", None),
        decoder_path=getattr(args, "decoder", None),
        photo_root=getattr(args, "photo_root", None),
    )


def _emit(args, payload: dict, text_lines: list[str]) -> None:
    if getattr(args, "format", "text") == "json":
        print(json.dumps(payload, indent=2))
    else:
        for line in text_lines:
            print(line)


def _require_file(path: str, what: str) -> Path:
    p = Path(path)
    if not p.is_file():
        raise FileNotFoundError(f"{what} not found: {path}")
    return p


def _compute_series(args, config: AppConfig):
    """Score a video per the CLI flags, or load a saved score file."""
    from . import pipeline
    from .prior import LocalFolderProvider, build_prior, build_prior_from_images, fetch_photos
    from .score import ScoreSeries, build_score_series, score_frames, score_frames_text

    if getattr(args, "scores", None):
        data = json.loads(_require_file(args.scores, "score file").read_text())
        return ScoreSeries.from_json(data)

    _require_file(args.video, "video")
    backend = pipeline.make_backend(config)
    rate = args.rate if args.rate is not None else config.sampling_rate
    n_photos = args.photo_count if args.photo_count is not None else config.photos_per_prior
    frames = pipeline.compute_frame_embeddings(
        args.video, rate, backend, decoder=config.decoder_path
    )
    if args.text_prompt:
        raw = score_frames_text(args.text_prompt, frames, backend)
        provenance = {"kind": "text", "prompt": args.text_prompt}
    else:
        if args.photos:
            provider = LocalFolderProvider(args.photos)
            fetched = fetch_photos("", provider, n_photos)
            prior = build_prior_from_images(
                [img for img, _ in fetched], "", backend,
                refs=[ref for _, ref in fetched],
            )
        else:
            provider = pipeline.default_provider(config)
            if provider is None:
                raise ValueError(
                    "keyword scoring needs a photo library: pass --photo-root "
                    "or set FRAMESPOT_PHOTO_ROOT"
                )
            prior = build_prior(args.keyword, provider, backend, n=n_photos)
        raw = score_frames(prior, frames)
        provenance = {"kind": "prior", "keyword": prior.keyword}
    return build_score_series(raw, frames, provenance, args.smooth)


def cmd_classify(args) -> int:
    from . import pipeline
    from .classify import ActivityLabelSet, classify_activity, load_labels

    config = _config_from(args)
    _require_file(args.video, "video")
    backend = pipeline.make_backend(config)
    rate = args.rate if args.rate is not None else config.sampling_rate
    frames = pipeline.compute_frame_embeddings(
        args.video, rate, backend, decoder=config.decoder_path
    )
    labels = ActivityLabelSet.build(load_labels(args.labels or config.labels_path), backend)
    ranked = classify_activity(frames, labels, top_k=args.top)
    _emit(
        args,
        {"labels": [{"label": l, "score": s} for l, s in ranked]},
        [f"{s: .4f}  {l}" for l, s in ranked],
    )
    return EXIT_OK


def cmd_score(args) -> int:
    config = _config_from(args)
    series = _compute_series(args, config)
    out = Path(args.out) if args.out else Path(args.video).with_suffix(".scores.json")
    out.parent.mkdir(parents=True, exist_ok=True)
    out.write_text(json.dumps(series.to_json(), indent=2))
    _emit(
        args,
        {"out": str(out), "frames": len(series)},
        [f"wrote {len(series)} frame scores to {out}"],
    )
    return EXIT_OK


def cmd_highlight(args) -> int:
    from . import media, select

    config = _config_from(args)
    series = _compute_series(args, config)
    result = select.best_window(series, args.length)
    payload = result.to_json()
    lines = [
        f"highlight: {result.interval.start:.3f}s .. {result.interval.end:.3f}s  "
        f"mean={result.mean_score:.4f} sum={result.sum_score:.4f}"
    ]
    if args.export:
        info = media.probe(args.video, config.decoder_path)
        interval = media.Interval(
            result.interval.start, min(result.interval.end, info.duration)
        )
        clip = media.cut_clip(args.video, interval, args.export,
                              decoder=config.decoder_path, info=info)
        payload["export"] = str(clip)
        lines.append(f"exported clip: {clip}")
    _emit(args, payload, lines)
    return EXIT_OK


def cmd_montage(args) -> int:
    from . import select

    config = _config_from(args)
    series = _compute_series(args, config)
    min_sep = args.min_sep if args.min_sep is not None else args.length
    results = select.top_peaks(series, args.peaks, min_sep, args.length)
    payload = {"results": [r.to_json() for r in results]}
    lines = [
        f"peak {r.rank}: {r.interval.start:.3f}s .. {r.interval.end:.3f}s  "
        f"mean={r.mean_score:.4f}"
        for r in results
    ]
    if args.export:
        clip = select.assemble_montage(args.video, results, args.export,
                                       decoder=config.decoder_path)
        payload["export"] = str(clip)
        lines.append(f"exported montage: {clip}")
    _emit(args, payload, lines)
    return EXIT_OK


def cmd_report(args) -> int:
    from . import report, select
    from .score import ScoreSeries

    data = json.loads(_require_file(args.scores, "score file").read_text())
    series = ScoreSeries.from_json(data)
    highlights = None
    if args.length:
        highlights = [select.best_window(series, args.length)]
        if args.peaks:
            highlights = select.top_peaks(series, args.peaks, args.length, args.length)
    paths = report.write_report(
        series, args.out_dir, highlights=highlights,
        basename=args.basename, title=args.title,
    )
    _emit(args, paths, [f"wrote {paths['csv']}", f"wrote {paths['figure']}"])
    return EXIT_OK


def cmd_compare(args) -> int:
    from . import pipeline
    from .prior import LocalFolderProvider
    from .store import ProjectStore, file_sha256, stable_id

    config = _config_from(args)
    if args.project_dir:
        config.project_dir = args.project_dir
    _require_file(args.video, "video")
    backend = pipeline.make_backend(config)
    rate = args.rate if args.rate is not None else config.sampling_rate
    provider = (LocalFolderProvider(args.photos) if args.photos
                else pipeline.default_provider(config))
    project_id = stable_id("project", file_sha256(args.video), rate)
    store = ProjectStore(config.project_dir, project_id)
    results = pipeline.paired_highlight_clips(
        store, args.video, backend,
        keyword=args.keyword,
        out_dir=args.out_dir,
        text_prompt=args.text_prompt,
        provider=provider,
        rate=rate,
        length_seconds=args.length,
        decoder=config.decoder_path,
        n_photos=args.photo_count or config.photos_per_prior,
    )
    _emit(
        args,
        results,
        [f"{name}: {r['interval'][0]:.3f}s .. {r['interval'][1]:.3f}s -> {r['clip']}"
         for name, r in results.items()],
    )
    return EXIT_OK


def cmd_serve(args) -> int:
    from .service import serve

    config = AppConfig.load(
        config_file=args.config,
        model_path=args.model,
        backend=args.backend,
        dim=args.dim,
        input_resolution=args.resolution,
        decoder_path=args.decoder,
        photo_root=args.photo_root,
        project_dir=args.project_dir,
        labels_path=args.labels,
        port=args.port,
        host=args.host,
        ui_dir=args.ui_dir,
    )
    serve(config)
    return EXIT_OK


def cmd_init_model(args) -> int:
    from .embedding import build_demo_model

    path = build_demo_model(
        args.out, dim=args.dim or 128, input_resolution=args.resolution or 64,
        seed=args.seed,
    )
    print(f"wrote demo model to {path}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="framespot",
        description="Find highlight moments in videos using exemplar-photo priors.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("classify", help="predict the primary activity of a video")
    _add_common(p)
    p.add_argument("video")
    p.add_argument("--labels", help="label database file (one label per line)")
    p.add_argument("--top", type=int, default=5)
    p.add_argument("--rate", type=float)
    p.add_argument("--format", choices=["text", "json"], default="text")
    p.set_defaults(func=cmd_classify)

    p = sub.add_parser("score", help="compute per-frame highlight scores")
    _add_common(p)
    p.add_argument("video")
    _add_scoring_source(p, allow_scores_file=False)
    p.add_argument("--out", help="output score file (JSON)")
    p.add_argument("--format", choices=["text", "json"], default="text")
    p.set_defaults(func=cmd_score)

    p = sub.add_parser("highlight", help="select the best fixed-length window")
    _add_common(p)
    p.add_argument("video")
    _add_scoring_source(p, allow_scores_file=True)
    p.add_argument("--length", type=float, default=10.0, help="highlight length, seconds")
    p.add_argument("--export", help="cut the selected interval to this path")
    p.add_argument("--format", choices=["text", "json"], default="text")
    p.set_defaults(func=cmd_highlight)

    p = sub.add_parser("montage", help="select several peak windows and cut a montage")
    _add_common(p)
    p.add_argument("video")
    _add_scoring_source(p, allow_scores_file=True)
    p.add_argument("--peaks", type=int, required=True, help="number of peaks")
    p.add_argument("--length", type=float, default=10.0, help="clip length per peak, seconds")
    p.add_argument("--min-sep", type=float, help="minimum separation between peaks, seconds")
    p.add_argument("--export", help="write the montage to this path")
    p.add_argument("--format", choices=["text", "json"], default="text")
    p.set_defaults(func=cmd_montage)

    p = sub.add_parser("report", help="render a highlight graph figure and CSV from a score file")
    _add_common(p)
    p.add_argument("--scores", required=True, help="score file (JSON)")
    p.add_argument("--out-dir", required=True)
    p.add_argument("--length", type=float, help="mark the best window of this length")
    p.add_argument("--peaks", type=int, help="mark this many peaks instead")
    p.add_argument("--basename", default="highlights")
    p.add_argument("--title")
    p.add_argument("--format", choices=["text", "json"], default="text")
    p.set_defaults(func=cmd_report)

    p = sub.add_parser("compare", help="emit photo-prior and text-baseline clips side by side")
    _add_common(p)
    p.add_argument("video")
    p.add_argument("--keyword", required=True)
    p.add_argument("--photos", help="exemplar photo folder (defaults to the photo library)")
    p.add_argument("--text-prompt", help="baseline prompt (defaults to the keyword)")
    p.add_argument("--rate", type=float)
    p.add_argument("--length", type=float, default=10.0)
    p.add_argument("--photo-count", type=int)
    p.add_argument("--project-dir", default=None)
    p.add_argument("--out-dir", required=True)
    p.add_argument("--format", choices=["text", "json"], default="text")
    p.set_defaults(func=cmd_compare)

    p = sub.add_parser("serve", help="run the local HTTP service")
    _add_common(p)
    p.add_argument("--port", type=int)
    p.add_argument("--host")
    p.add_argument("--project-dir")
    p.add_argument("--labels")
    p.add_argument("--ui-dir", help="built UI bundle to host at /")
    p.set_defaults(func=cmd_serve)

    p = sub.add_parser("init-model", help="generate the small demo encoder model")
    p.add_argument("out")
    p.add_argument("--dim", type=int)
    p.add_argument("--resolution", type=int)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_init_model)

    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(
        level=logging.DEBUG if getattr(args, "verbose", False) else logging.INFO,
        format="%(levelname)s %(name)s: %(message)s",
    )
    try:
        return args.func(args)
    except (FileNotFoundError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except FramespotError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PIPELINE


if __name__ == "__main__":
    sys.exit(main())
