"""Command-line interface.

Subcommands cover the whole loop: generate a synthetic labeled stream,
train a model on it, evaluate against a manifest, replay a stream live
(one verdict line per completed action), and inspect a saved model.

Exit codes: 0 on success, 1 for usage errors, 2 for data errors such as
unreadable files, malformed models, or streams the pipeline rejects.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import sys
from typing import Iterable, Iterator

from .config import Config, load_config
from .errors import SomActionError
from .evaluate import evaluate
from .generate import generate_stream
from .pipeline import (
    RecognizerModel,
    TrainReport,
    load_model,
    run_online,
    save_model,
    train_pipeline,
    verdict_to_json,
    window_encoding,
    window_winners,
)
from .stream import StreamStats, iter_windows, read_manifest, write_manifest
from .trace import trace_length


class _Parser(argparse.ArgumentParser):
    # usage problems exit 1; data problems exit 2 (handled in main)
    def error(self, message):
        self.print_usage(sys.stderr)
        sys.stderr.write(f"{self.prog}: error: {message}\n")
        raise SystemExit(1)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(
        prog="somaction",
        description="online action recognition on skeleton/object record streams",
    )
    parser.add_argument("--config", metavar="TOML", help="configuration file")
    parser.add_argument(
        "--seed", type=int, help="override the seed of both generator and pipeline"
    )
    sub = parser.add_subparsers(dest="command", required=True, metavar="COMMAND")

    p = sub.add_parser("generate", help="write a synthetic labeled record stream")
    p.add_argument("--out", metavar="PATH", help="stream file (default stdout)")
    p.add_argument("--manifest", metavar="PATH", help="also write the window manifest")
    p.set_defaults(func=_cmd_generate)

    p = sub.add_parser("train", help="train a model on a labeled stream")
    p.add_argument("--stream", default="-", metavar="PATH", help="record stream, - for stdin")
    p.add_argument("--model", required=True, metavar="PATH", help="where to save the model")
    p.set_defaults(func=_cmd_train)

    p = sub.add_parser("evaluate", help="score a model on a stream with a manifest")
    p.add_argument("--stream", default="-", metavar="PATH", help="record stream, - for stdin")
    p.add_argument("--manifest", required=True, metavar="PATH", help="ground-truth manifest")
    p.add_argument("--model", required=True, metavar="PATH", help="saved model")
    p.add_argument("--json", action="store_true", help="print the report as JSON")
    p.set_defaults(func=_cmd_evaluate)

    p = sub.add_parser("run", help="replay a stream, one verdict line per action")
    p.add_argument("--stream", default="-", metavar="PATH", help="record stream, - for stdin")
    p.add_argument("--model", required=True, metavar="PATH", help="saved model")
    p.set_defaults(func=_cmd_run)

    p = sub.add_parser("inspect", help="describe a saved model")
    p.add_argument("--model", required=True, metavar="PATH", help="saved model")
    p.add_argument(
        "--stream", metavar="PATH", help="also summarize each window of this stream"
    )
    p.set_defaults(func=_cmd_inspect)
    return parser


def _load_config(args) -> Config:
    cfg = load_config(args.config) if args.config else Config()
    if args.seed is not None:
        cfg = Config(
            generator=dataclasses.replace(cfg.generator, seed=args.seed),
            pipeline=dataclasses.replace(cfg.pipeline, seed=args.seed),
        )
    return cfg


def _read_lines(path: str) -> Iterator[str]:
    if path == "-":
        yield from sys.stdin
    else:
        with open(path, encoding="utf-8") as fp:
            yield from fp


def _load_model(path: str) -> RecognizerModel:
    with open(path, encoding="utf-8") as fp:
        return load_model(fp)


def _cmd_generate(args) -> int:
    cfg = _load_config(args)
    lines, manifest = generate_stream(cfg.generator)
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fp:
            fp.writelines(line + "\n" for line in lines)
    else:
        for line in lines:
            print(line)
    if args.manifest:
        with open(args.manifest, "w", encoding="utf-8") as fp:
            write_manifest(manifest, fp)
    print(f"{len(lines)} records, {len(manifest)} windows", file=sys.stderr)
    return 0


def _format_train_report(report: TrainReport) -> str:
    width = max(len("action"), *(len(lab) for lab in report.labels))
    lines = [f"{'action':<{width}}  samples  recognized"]
    for lab in report.labels:
        n, k = report.per_label[lab]
        lines.append(f"{lab:<{width}}  {n:>7}  {k:>10}")
    lines.append(
        f"training accuracy: {report.recognized}/{report.total}"
        f" ({100.0 * report.accuracy:.1f}%)"
    )
    return "\n".join(lines)


def _cmd_train(args) -> int:
    cfg = _load_config(args)
    stats = StreamStats()
    windows = list(iter_windows(_read_lines(args.stream), stats))
    model, report = train_pipeline(windows, cfg.pipeline)
    with open(args.model, "w", encoding="utf-8") as fp:
        save_model(model, fp)
    if stats.malformed:
        print(f"skipped {stats.malformed} malformed line(s)", file=sys.stderr)
    print(_format_train_report(report))
    print(f"model saved to {args.model}", file=sys.stderr)
    return 0


def _cmd_evaluate(args) -> int:
    model = _load_model(args.model)
    with open(args.manifest, encoding="utf-8") as fp:
        manifest = read_manifest(fp)
    report = evaluate(model, _read_lines(args.stream), manifest)
    if args.json:
        print(json.dumps(report.to_dict()))
    else:
        print(report.format_table())
    return 0


def _cmd_run(args) -> int:
    model = _load_model(args.model)

    def sink(verdict):
        sys.stdout.write(verdict_to_json(verdict) + "\n")
        sys.stdout.flush()

    summary = run_online(model, _read_lines(args.stream), sink)
    print(
        f"{summary.actions} verdicts, latency mean {summary.mean_latency_ms:.1f} ms"
        f" p95 {summary.p95_latency_ms:.1f} ms, {summary.malformed} malformed,"
        f" {summary.discarded_frames} frames outside windows",
        file=sys.stderr,
    )
    if summary.open_window_discarded:
        print("warning: stream ended inside a window; it was dropped", file=sys.stderr)
    return 0


def _weight_stats(name: str, weights) -> str:
    return (
        f"{name}: shape {'x'.join(str(s) for s in weights.shape)},"
        f" weights in [{weights.min():.6f}, {weights.max():.6f}]"
    )


def _cmd_inspect(args) -> int:
    model = _load_model(args.model)
    rows1, cols1 = model.layer1.shape
    rows2, cols2 = model.layer2.shape
    print(f"format_version {model.format_version}")
    print(f"labels: {' '.join(model.labels)}")
    print(
        f"attended part: {model.part.name}"
        f" (joints {', '.join(str(j) for j in model.part.joints)}),"
        f" posture dim {model.part.dim}"
    )
    print(_weight_stats(f"layer1 ({rows1}x{cols1})", model.layer1.weights))
    print(f"encoder: {model.encoder.n_segments} segments, ordered-vector dim {model.encoder.dim}")
    print(_weight_stats(f"layer2 ({rows2}x{cols2})", model.layer2.weights))
    print(_weight_stats("readout", model.output.weights))
    print(f"config: {json.dumps(dataclasses.asdict(model.config))}")
    if args.stream:
        for i, window in enumerate(iter_windows(_read_lines(args.stream))):
            winners = window_winners(model, window)
            trace, vec = window_encoding(model, window)
            label = window.label if window.label is not None else "?"
            print(
                f"window {i}: label {label}, {len(window.skeleton_frames)} frames,"
                f" {len(winners)} winners, {trace.points.shape[0]} trace points,"
                f" path length {trace_length(trace):.4f}"
            )
    return 0


def main(argv: Iterable[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except SomActionError as err:
        print(f"error: {err}", file=sys.stderr)
        return 2
    except OSError as err:
        print(f"error: {err}", file=sys.stderr)
        return 2
    except (ValueError, json.JSONDecodeError) as err:
        print(f"error: {err}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
