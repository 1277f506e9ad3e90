"""Command-line entry points: run, check-config, bench."""

from __future__ import annotations

import argparse
import json
import logging
import signal
import sys
import threading

from .config import ConfigError, PipelineConfig, load_config
from .control import PlayerLink
from .pipeline import CommandDispatcher, FrameDumpSink, bench_pipeline, percentile, run_pipeline
from .sources import SourceError, SyntheticScript, camera_source, directory_source, synthetic_source


def _build_source(spec: str):
    kind, _, arg = spec.partition(":")
    if not arg:
        raise SourceError(f"source must be synthetic:<script.json>, dir:<path>, or camera:<id>, got {spec!r}")
    if kind == "synthetic":
        with open(arg, "r", encoding="utf-8") as f:
            return synthetic_source(SyntheticScript.from_dict(json.load(f)))
    if kind == "dir":
        return directory_source(arg)
    if kind == "camera":
        device = int(arg) if arg.lstrip("-").isdigit() else arg
        return camera_source(device)
    raise SourceError(f"unknown source kind {kind!r}")


def _cmd_run(args) -> int:
    try:
        config = load_config(args.config) if args.config else PipelineConfig()
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    try:
        source = _build_source(args.source)
    except (SourceError, OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2

    stop = threading.Event()
    signal.signal(signal.SIGINT, lambda *_: stop.set())
    signal.signal(signal.SIGTERM, lambda *_: stop.set())

    sinks = []
    server = None
    listen = None if args.headless else (args.listen or config.listen_address)
    if listen:
        from .server import StateServer

        server = StateServer.from_address(listen).start()
        sinks.append(server.publish)
    if args.dump_frames:
        sinks.append(FrameDumpSink(args.dump_frames))

    dispatcher = None
    if config.player_socket_path:
        dispatcher = CommandDispatcher(PlayerLink(config.player_socket_path))

    try:
        return run_pipeline(
            config, source, sinks, dispatcher=dispatcher, tuning=server, stop=stop
        )
    finally:
        if dispatcher is not None:
            dispatcher.close()
        if server is not None:
            server.stop()


def _cmd_check_config(args) -> int:
    try:
        config = load_config(args.file)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    print(json.dumps(config.to_dict(), indent=2, sort_keys=True))
    return 0


def _cmd_bench(args) -> int:
    try:
        width, height = (int(v) for v in args.size.lower().split("x"))
    except ValueError:
        print(f"error: --size must look like 640x480, got {args.size!r}", file=sys.stderr)
        return 2
    config = None
    if args.config:
        try:
            config = load_config(args.config)
        except ConfigError as exc:
            print(f"error: {exc}", file=sys.stderr)
            return 2
    stages = bench_pipeline(args.frames, width, height, config)
    order = ["blur", "threshold", "blob", "track", "overlay", "total"]
    print(f"{'stage':<12} {'p50 ms':>8} {'p95 ms':>8}")
    for stage in order:
        values = stages[stage]
        print(f"{stage:<12} {percentile(values, 50) / 1000:>8.2f} {percentile(values, 95) / 1000:>8.2f}")
    return 0


def main(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(
        prog="airmenu",
        description="Gesture-controlled virtual menu for media players.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="run the recognition pipeline")
    p_run.add_argument("--config", help="JSON config file (defaults apply if omitted)")
    p_run.add_argument(
        "--source",
        required=True,
        help="synthetic:<script.json> | dir:<ppm dir> | camera:<id>",
    )
    p_run.add_argument("--headless", action="store_true", help="never start the broadcast server")
    p_run.add_argument("--dump-frames", metavar="DIR", help="write overlay frames as PPM files")
    p_run.add_argument("--listen", metavar="HOST:PORT", help="broadcast address (overrides config)")
    p_run.set_defaults(func=_cmd_run)

    p_check = sub.add_parser("check-config", help="validate a config file and print it normalized")
    p_check.add_argument("file")
    p_check.set_defaults(func=_cmd_check_config)

    p_bench = sub.add_parser("bench", help="measure per-stage latency on a synthetic run")
    p_bench.add_argument("--frames", type=int, default=300)
    p_bench.add_argument("--size", default="640x480")
    p_bench.add_argument("--config", help="JSON config file")
    p_bench.set_defaults(func=_cmd_bench)

    args = parser.parse_args(argv)
    logging.basicConfig(
        stream=sys.stderr, level=logging.INFO, format="%(levelname)s %(name)s: %(message)s"
    )
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
