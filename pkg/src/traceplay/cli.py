"""Command-line front door: serve the API/UI, print statistics, export
screenshots, build and validate indexes."""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .errors import PrefsError, TraceError
from .index import build_index, save_sidecar
from .prefs import Preferences, load_prefs
from .session import TraceSession

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_IO = 2
EXIT_CONTRACT = 3


class _Parser(argparse.ArgumentParser):
    def error(self, message: str):
        self.print_usage(sys.stderr)
        print(f"error: {message}", file=sys.stderr)
        sys.exit(EXIT_USAGE)


def _build_parser() -> _Parser:
    parser = _Parser(prog="traceplay", description=__doc__)
    commands = parser.add_subparsers(dest="command", required=True)

    serve = commands.add_parser("serve", help="run the HTTP service and host the UI")
    serve.add_argument("--trace", required=True, help="trace file to open at start")
    serve.add_argument("--port", type=int, default=8000)
    serve.add_argument("--bind", default="127.0.0.1")
    serve.add_argument("--prefs", help="preferences XML file")
    serve.add_argument("--root", help="directory trace paths are confined to (default: the trace's directory)")
    serve.add_argument("--ui", help="UI bundle directory (default: ./frontend/dist when present)")

    stats = commands.add_parser("stats", help="print network and per-node counters")
    stats.add_argument("--trace", required=True)
    stats.add_argument("--at", type=int, default=None, help="event index (default: last event)")
    stats.add_argument("--format", choices=("text", "json"), default="text")

    screenshot = commands.add_parser("screenshot", help="export one frame as PNG")
    screenshot.add_argument("--trace", required=True)
    screenshot.add_argument("--event", type=int, required=True)
    screenshot.add_argument("--out", help="output path (default: <screenshot_dir>/frame_<event>.png)")
    screenshot.add_argument("--range", type=float, default=None, help="radio range for the partition overlay")
    screenshot.add_argument("--prefs", help="preferences XML file")

    index = commands.add_parser("index", help="build and persist the sidecar index")
    index.add_argument("--trace", required=True)

    validate = commands.add_parser("validate", help="parse everything and report skipped lines")
    validate.add_argument("--trace", required=True)

    return parser


def _load_prefs(path: str | None) -> Preferences:
    return load_prefs(path) if path else Preferences()


def _cmd_serve(args) -> int:
    import uvicorn

    from .server import create_app

    trace = Path(args.trace).resolve()
    prefs = _load_prefs(args.prefs)
    root = Path(args.root).resolve() if args.root else trace.parent
    ui_dir = args.ui
    if ui_dir is None:
        default_ui = Path.cwd() / "frontend" / "dist"
        ui_dir = default_ui if default_ui.is_dir() else None
    app = create_app(root, prefs=prefs, open_path=trace, ui_dir=ui_dir)
    session = app.state.registry.all()[0]
    print(f"session {session.id}: {session.path} ({session.index.total_events} events)")
    print(f"serving on http://{args.bind}:{args.port}/ (UI at /ui/)" if ui_dir else
          f"serving on http://{args.bind}:{args.port}/")
    uvicorn.run(app, host=args.bind, port=args.port, log_level="warning")
    return EXIT_OK


def _counter_row(counters: dict) -> str:
    return (
        f"sent {counters['sent']:>12}  received {counters['received']:>12}  "
        f"forwarded {counters['forwarded']:>12}  dropped {counters['dropped']:>12}"
    )


def _cmd_stats(args) -> int:
    session = TraceSession(args.trace)
    last = session.index.total_events - 1
    k = args.at if args.at is not None else last
    payload = session.stats_payload(k)
    if args.format == "json":
        print(json.dumps(payload, indent=2))
        return EXIT_OK
    print(f"trace: {session.path}")
    print(f"event: {payload['event_index']} of {session.index.total_events}")
    network = payload["network"]
    print(f"network routing  {_counter_row(network['routing'])}")
    print(f"network agent    {_counter_row(network['agent'])}")
    breakdown = network["agent_breakdown"]
    print(f"agent breakdown  cbr {breakdown['cbr']}  tcp_ack {breakdown['tcp_ack']}  other {breakdown['other']}")
    for node in payload["nodes"]:
        marker = "" if node["settled"] else " (unsettled)"
        print(f"node {node['node_id']:>4}{marker}")
        print(f"  routing {_counter_row(node['routing'])}")
        print(f"  agent   {_counter_row(node['agent'])}")
    return EXIT_OK


def _cmd_screenshot(args) -> int:
    prefs = _load_prefs(args.prefs)
    session = TraceSession(args.trace, prefs=prefs)
    png = session.screenshot_png(args.event, args.range)
    out = Path(args.out) if args.out else Path(prefs.screenshot_dir) / f"frame_{args.event}.png"
    out.parent.mkdir(parents=True, exist_ok=True)
    out.write_bytes(png)
    print(f"wrote {out}")
    return EXIT_OK


def _cmd_index(args) -> int:
    index = build_index(args.trace)
    target = save_sidecar(index)
    print(f"indexed {index.total_lines} lines, {index.total_events} events -> {target}")
    return EXIT_OK


def _cmd_validate(args) -> int:
    index = build_index(args.trace)
    prescan = index.prescan
    print(f"{index.total_lines} lines, {index.total_events} events, {prescan.skipped_lines} skipped")
    for reason, count in sorted(prescan.skipped_reasons.items()):
        print(f"  skipped ({reason}): {count}")
    if prescan.out_of_order_times:
        print(f"  warning: {prescan.out_of_order_times} events with out-of-order timestamps")
    if prescan.malformed_lines:
        print(f"error: {prescan.malformed_lines} malformed event lines", file=sys.stderr)
        return EXIT_CONTRACT
    return EXIT_OK


_COMMANDS = {
    "serve": _cmd_serve,
    "stats": _cmd_stats,
    "screenshot": _cmd_screenshot,
    "index": _cmd_index,
    "validate": _cmd_validate,
}


def main(argv: list[str] | None = None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        return _COMMANDS[args.command](args)
    except (PrefsError, TraceError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONTRACT
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
