"""Command-line pipeline driver: each stage loads the workspace, runs, saves.

Exit codes: 0 ok, 2 usage, 3 missing prerequisite stage, 4 invalid input data,
5 workspace file problem, 1 anything else.
"""

from __future__ import annotations

import argparse
import sys
import time

from . import __version__, pipeline
from .config import load_config
from .errors import IngestError, StageMissingError, UrbanLensError, WorkspaceError
from .samplecity import PRESETS, generate_sample_city
from .workspace import load_workspace, save_workspace

EXIT_CODES = {
    StageMissingError: 3,
    IngestError: 4,
    WorkspaceError: 5,
}


def _exit_code(exc: UrbanLensError) -> int:
    for cls, code in EXIT_CODES.items():
        if isinstance(exc, cls):
            return code
    return 1


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="urbanlens",
        description="Multi-layer urban data exploration engine",
    )
    parser.add_argument("--version", action="version", version=f"urbanlens {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    sample = sub.add_parser("sample-data", help="generate a synthetic demo city")
    sample.add_argument("--out", required=True, help="output directory")
    sample.add_argument("--preset", choices=sorted(PRESETS), default="desk")
    sample.add_argument("--seed", type=int, default=99)

    for name, help_text in (
        ("ingest", "load all layer files into a fresh workspace"),
        ("build", "build the street graph, classify corners, detect hotspots"),
        ("synth-trips", "generate the synthetic trip table"),
        ("train", "aggregate features, train and evaluate the classifier"),
        ("analyze", "compute correlation and attribution reports"),
    ):
        p = sub.add_parser(name, help=help_text)
        p.add_argument("--config", required=True, help="config YAML path")

    serve = sub.add_parser("serve", help="start the HTTP API over the workspace")
    serve.add_argument("--config", required=True)
    serve.add_argument("--host", default=None)
    serve.add_argument("--port", type=int, default=None)

    export = sub.add_parser("export", help="write grid and analytics CSV files")
    export.add_argument("--config", required=True)
    export.add_argument("--out", required=True, help="output directory")
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return _dispatch(args)
    except UrbanLensError as exc:
        print(f"error [{exc.code}]: {exc.message}", file=sys.stderr)
        return _exit_code(exc)
    except FileNotFoundError as exc:
        print(f"error: config or data file not found: {exc.filename}", file=sys.stderr)
        return 2


def _dispatch(args: argparse.Namespace) -> int:
    if args.command == "sample-data":
        config_path = generate_sample_city(args.out, preset=args.preset, seed=args.seed)
        print(f"sample city written; config at {config_path}")
        return 0

    cfg = load_config(args.config)
    ws_path = cfg["workspace"]

    if args.command == "ingest":
        started = time.perf_counter()
        w = pipeline.run_ingest(cfg)
        save_workspace(w, ws_path)
        _report(w, "ingest", started, ws_path)
        return 0

    w = load_workspace(ws_path)
    w.config = cfg  # rerunning with an edited config takes effect immediately

    if args.command == "serve":
        import uvicorn

        from .server import create_app

        host = args.host or cfg["server"]["host"]
        port = args.port if args.port is not None else int(cfg["server"]["port"])
        uvicorn.run(create_app(w), host=host, port=port)
        return 0

    if args.command == "export":
        written = pipeline.run_export(w, args.out)
        for path in written:
            print(f"wrote {path}")
        return 0

    started = time.perf_counter()
    if args.command == "build":
        pipeline.run_build(w)
    elif args.command == "synth-trips":
        pipeline.run_synth_trips(w)
    elif args.command == "train":
        pipeline.run_train(w)
    elif args.command == "analyze":
        pipeline.run_analyze(w)
    save_workspace(w, ws_path)
    _report(w, args.command, started, ws_path)
    return 0


def _report(w, command: str, started: float, ws_path: str) -> None:
    elapsed = time.perf_counter() - started
    print(f"{command}: done in {elapsed:.1f}s; workspace at {ws_path}")
    if command == "build" and w.hotspots is not None:
        n_hot = sum(1 for h in w.hotspots if h.is_hotspot)
        print(f"  graph: {w.graph.node_count} nodes, {len(w.graph.edges)} edges; {n_hot} hotspot corners")
    if command == "synth-trips" and w.trips is not None:
        print(f"  trips: {len(w.trips)} generated, {w.trips.occurrence_count} occurrences")
    if command == "train" and w.evaluation:
        print(f"  held-out G-mean: {w.evaluation['g_mean']:.4f} "
              f"on {w.evaluation['heldout_trips']} trips")
    for warning in w.warnings:
        print(f"  warning: {warning}")


if __name__ == "__main__":
    sys.exit(main())
