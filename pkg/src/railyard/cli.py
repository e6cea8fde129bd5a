"""Batch CLI and local HTTP service.

Exit codes: 0 success, 1 input error, 2 target width below min-content,
3 well-formedness violations (layout input).

The service exposes ``POST /layout`` taking a JSON LayoutRequest
(``source``, ``input_kind``, ``params``, optional ``dump``) and returning
``svg``, ``stats``, and ``diagnostics``.  Requests are handled statelessly;
identical requests produce identical SVG.  When a static directory is
configured (``--static-dir`` or ``RAILYARD_STATIC_DIR``), it is served at
``/`` for the web playground.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from dataclasses import replace
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer
from pathlib import Path

from . import _sexpr, frontends, layout as layout_mod, pipeline, render
from .diagram import Diagram, canonicalize, parse_diagram
from .layout import Direction, StyleConstants, top_level_well_formed, width
from .pipeline import (
    ALIGN_POLICIES,
    JUSTIFY_POLICIES,
    WRAP_MODES,
    LayoutParams,
    TargetTooSmall,
    WrapOrder,
    align,
    compile_with_stats,
    global_wrap,
    local_wrap,
    print_aligned,
    print_immediate,
    print_wrapped,
    to_immediate,
)
from .render import IllFormedLayout, RenderStyle, render_svg

INPUT_KINDS = ("diagram", "regex", "bnf", "layout")
DUMP_STAGES = ("immediate", "aligned", "wrapped", "layout")

EXIT_OK = 0
EXIT_INPUT = 1
EXIT_TOO_SMALL = 2
EXIT_ILL_FORMED = 3


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # input errors exit 1, not argparse's 2
        self.print_usage(sys.stderr)
        raise _CliError(message)


class _CliError(Exception):
    pass


def _build_parser() -> _Parser:
    p = _Parser(prog="railyard", description="Compile railroad diagrams to SVG layouts.")
    p.add_argument("source", nargs="?", default="-", help="input file, literal source, or - for stdin")
    p.add_argument("--input-kind", choices=INPUT_KINDS, default="diagram")
    p.add_argument("--width", type=float, default=600.0, help="target layout width")
    p.add_argument("--wrap", choices=WRAP_MODES, default="local")
    p.add_argument("--align", choices=ALIGN_POLICIES, default="baseline")
    p.add_argument("--justify", choices=JUSTIFY_POLICIES, default="start")
    p.add_argument("--flex-absorb", type=float, default=0.5)
    p.add_argument("--gap", type=float, default=0.0)
    p.add_argument("--global-budget", type=int, default=100_000)
    p.add_argument("--dump", choices=DUMP_STAGES, help="print an intermediate representation")
    p.add_argument("-o", "--output", help="output file (directory for --input-kind bnf)")
    p.add_argument("--no-style", action="store_true", help="emit classes only, no embedded CSS")
    return p


def _params_from_args(args) -> LayoutParams:
    return LayoutParams(
        target_width=args.width,
        wrap_mode=args.wrap,
        align_items=args.align,
        justify_content=args.justify,
        flex_absorb=args.flex_absorb,
        gap=args.gap,
        global_budget=args.global_budget,
    )


def _read_source(spec: str) -> str:
    if spec == "-":
        return sys.stdin.read()
    path = Path(spec)
    if path.exists() and path.is_file():
        return path.read_text(encoding="utf-8")
    return spec


def _dump_ir(d: Diagram, params: LayoutParams, stage: str) -> str:
    imm = to_immediate(canonicalize(d), Direction.LTR)
    if stage == "immediate":
        return print_immediate(imm)
    aligned = align(imm, params)
    if stage == "aligned":
        return print_aligned(aligned)
    lwd = local_wrap(aligned, params)
    if stage == "wrapped":
        if params.wrap_mode == "global":
            resolved, _ = global_wrap(lwd, params)
            if resolved is not None:
                return print_wrapped(resolved, params.style)
        return print_wrapped(lwd, params.style)
    result = compile_with_stats(d, params)
    return layout_mod.print_layout(result.layout)


def _emit(text: str, output: str | None) -> None:
    if output:
        Path(output).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


def _render_style(no_style: bool) -> RenderStyle:
    return RenderStyle(embed_css=not no_style)


def _diagrams_from_source(text: str, kind: str) -> list[tuple[str, Diagram]]:
    if kind == "diagram":
        return [("diagram", parse_diagram(text))]
    if kind == "regex":
        rx = frontends.eliminate_empty(frontends.parse_regex(text))
        return [("regex", frontends.regex_to_diagram(rx))]
    if kind == "bnf":
        return frontends.bnf_to_diagrams(frontends.parse_bnf(text))
    raise ValueError(kind)


def run_cli(argv: list[str]) -> int:
    if argv[:1] == ["serve"]:
        return _run_serve(argv[1:])
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except _CliError as exc:
        print(f"railyard: error: {exc}", file=sys.stderr)
        return EXIT_INPUT

    try:
        text = _read_source(args.source)
    except OSError as exc:
        print(f"railyard: error: {exc}", file=sys.stderr)
        return EXIT_INPUT

    try:
        if args.input_kind == "layout":
            return _run_layout_kind(text, args)
        named = _diagrams_from_source(text, args.input_kind)
        params = _params_from_args(args)
        params.validate()

        if args.dump:
            chunks = []
            for name, d in named:
                prefix = f"; {name}\n" if args.input_kind == "bnf" else ""
                chunks.append(prefix + _dump_ir(d, params, args.dump) + "\n")
            _emit("".join(chunks), args.output)
            return EXIT_OK

        if args.input_kind == "bnf":
            outdir = Path(args.output or ".")
            outdir.mkdir(parents=True, exist_ok=True)
            for name, d in named:
                result = compile_with_stats(d, params)
                svg = render_svg(result.layout, _render_style(args.no_style))
                (outdir / f"{name}.svg").write_text(svg, encoding="utf-8")
            return EXIT_OK

        _, d = named[0]
        result = compile_with_stats(d, params)
        svg = render_svg(result.layout, _render_style(args.no_style))
        _emit(svg, args.output)
        return EXIT_OK
    except TargetTooSmall as exc:
        print(f"railyard: error: {exc}", file=sys.stderr)
        return EXIT_TOO_SMALL
    except (
        _sexpr.SexprError,
        frontends.FrontendError,
        ValueError,
    ) as exc:
        print(f"railyard: error: {exc}", file=sys.stderr)
        return EXIT_INPUT


def _run_layout_kind(text: str, args) -> int:
    try:
        l = layout_mod.parse_layout(text)
    except _sexpr.SexprError as exc:
        print(f"railyard: error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    report = top_level_well_formed(l)
    if not report.ok:
        for violation in report.violations:
            print(str(violation), file=sys.stderr)
        return EXIT_ILL_FORMED
    if args.dump == "layout":
        _emit(layout_mod.print_layout(l) + "\n", args.output)
        return EXIT_OK
    svg = render_svg(l, _render_style(args.no_style))
    _emit(svg, args.output)
    return EXIT_OK


# --- service -------------------------------------------------------------------


class RequestError(ValueError):
    pass


_STYLE_KEYS = {
    "s",
    "char_width",
    "text_pad",
    "marker_char_width",
    "marker",
    "row_gap",
    "station_height",
}
_ORDER_KEYS = {"mode", "weights"}
_PARAM_KEYS = {
    "target_width",
    "wrap_mode",
    "align_items",
    "justify_content",
    "flex_absorb",
    "gap",
    "style",
    "order",
    "global_budget",
}
_REQUEST_KEYS = {"source", "input_kind", "params", "dump"}


def _params_from_json(obj) -> LayoutParams:
    if not isinstance(obj, dict):
        raise RequestError("params must be an object")
    unknown = set(obj) - _PARAM_KEYS
    if unknown:
        raise RequestError(f"unknown params keys: {sorted(unknown)}")
    style_obj = obj.get("style", {})
    if not isinstance(style_obj, dict) or set(style_obj) - _STYLE_KEYS:
        raise RequestError("bad style object")
    style = replace(StyleConstants(), **style_obj)
    order_obj = obj.get("order", {})
    if not isinstance(order_obj, dict) or set(order_obj) - _ORDER_KEYS:
        raise RequestError("bad order object")
    weights = order_obj.get("weights", {})
    if set(weights) - {"content", "penalty", "height"}:
        raise RequestError("bad order weights")
    order = WrapOrder(
        mode=order_obj.get("mode", "lexicographic"),
        content_weight=float(weights.get("content", 1.0)),
        penalty_weight=float(weights.get("penalty", 1.0)),
        height_weight=float(weights.get("height", 1.0)),
    )
    if order.mode not in ("lexicographic", "weighted"):
        raise RequestError(f"unknown order mode {order.mode!r}")
    try:
        params = LayoutParams(
            target_width=float(obj.get("target_width", 600.0)),
            wrap_mode=obj.get("wrap_mode", "local"),
            align_items=obj.get("align_items", "baseline"),
            justify_content=obj.get("justify_content", "start"),
            flex_absorb=float(obj.get("flex_absorb", 0.5)),
            gap=float(obj.get("gap", 0.0)),
            style=style,
            order=order,
            global_budget=int(obj.get("global_budget", 100_000)),
        )
        params.validate()
    except (TypeError, ValueError) as exc:
        raise RequestError(str(exc)) from exc
    return params


def _stats_json(stats: pipeline.CompileStats) -> dict:
    return {
        "min_content": stats.min_content,
        "max_content": stats.max_content,
        "chosen_content": stats.chosen_content,
        "height": stats.height,
        "wrap_penalty": stats.wrap_penalty,
        "elapsed_ms": stats.elapsed_ms,
        "degraded": stats.degraded,
    }


def handle_layout_request(body: bytes) -> tuple[int, dict]:
    """Service logic for POST /layout, separated from the socket layer."""
    import time

    try:
        obj = json.loads(body.decode("utf-8"))
    except (UnicodeDecodeError, json.JSONDecodeError) as exc:
        return 400, {"error": f"malformed JSON: {exc}"}
    if not isinstance(obj, dict):
        return 400, {"error": "request body must be a JSON object"}
    unknown = set(obj) - _REQUEST_KEYS
    if unknown:
        return 400, {"error": f"unknown request keys: {sorted(unknown)}"}

    source = obj.get("source")
    if not isinstance(source, str):
        return 400, {"error": "source must be a string"}
    kind = obj.get("input_kind", "diagram")
    if kind not in INPUT_KINDS:
        return 400, {"error": f"input_kind must be one of {list(INPUT_KINDS)}"}
    dump = obj.get("dump")
    if dump is not None and dump not in DUMP_STAGES:
        return 400, {"error": f"dump must be one of {list(DUMP_STAGES)}"}

    try:
        params = _params_from_json(obj.get("params", {}))
    except RequestError as exc:
        return 400, {"error": str(exc)}

    try:
        if kind == "layout":
            return _handle_layout_kind(source, params)
        started = time.perf_counter()
        named = _diagrams_from_source(source, kind)
        diagnostics: list[str] = []
        if kind == "bnf" and len(named) > 1:
            names = ", ".join(name for name, _ in named[1:])
            diagnostics.append(f"grammar has {len(named)} rules; rendering {named[0][0]!r} (also: {names})")
        name, d = named[0]
        result = compile_with_stats(d, params)
        svg = render_svg(result.layout, _style_for_render(params.style))
        result.stats.elapsed_ms = (time.perf_counter() - started) * 1000.0
        payload = {"svg": svg, "stats": _stats_json(result.stats), "diagnostics": diagnostics}
        if dump:
            payload["dump"] = _dump_ir(d, params, dump)
        return 200, payload
    except TargetTooSmall as exc:
        return 422, {"error": str(exc), "min_content": exc.min_content}
    except (_sexpr.SexprError, frontends.FrontendError, ValueError) as exc:
        return 400, {"error": str(exc)}


def _style_for_render(style: StyleConstants) -> RenderStyle:
    """Carry the request's layout style into rendering so widths agree."""
    from dataclasses import asdict

    return RenderStyle(**asdict(style))


def _handle_layout_kind(source: str, params: LayoutParams) -> tuple[int, dict]:
    import time

    started = time.perf_counter()
    l = layout_mod.parse_layout(source)
    render_style = _style_for_render(params.style)
    report = top_level_well_formed(l, params.style)
    if not report.ok:
        return 200, {
            "svg": "",
            "stats": None,
            "diagnostics": [str(v) for v in report.violations],
        }
    svg = render_svg(l, render_style)
    w = width(l, params.style)
    placed = render.place_layout(l, render_style)
    stats = pipeline.CompileStats(
        min_content=w,
        max_content=w,
        chosen_content=w,
        height=placed.height,
        wrap_penalty=0.0,
        elapsed_ms=(time.perf_counter() - started) * 1000.0,
        degraded=False,
    )
    return 200, {"svg": svg, "stats": _stats_json(stats), "diagnostics": []}


class _Handler(BaseHTTPRequestHandler):
    static_dir: Path | None = None

    def log_message(self, fmt, *args):
        pass

    def _send_json(self, status: int, payload: dict) -> None:
        body = json.dumps(payload).encode("utf-8")
        self.send_response(status)
        self.send_header("Content-Type", "application/json; charset=utf-8")
        self.send_header("Content-Length", str(len(body)))
        self.end_headers()
        self.wfile.write(body)

    def do_POST(self):
        if self.path.rstrip("/") != "/layout":
            self._send_json(404, {"error": "unknown endpoint"})
            return
        length = int(self.headers.get("Content-Length", 0))
        body = self.rfile.read(length)
        status, payload = handle_layout_request(body)
        self._send_json(status, payload)

    def do_GET(self):
        if self.static_dir is None:
            self._send_json(404, {"error": "no static bundle configured"})
            return
        rel = self.path.split("?", 1)[0].lstrip("/") or "index.html"
        target = (self.static_dir / rel).resolve()
        if not str(target).startswith(str(self.static_dir.resolve())) or not target.is_file():
            self._send_json(404, {"error": "not found"})
            return
        data = target.read_bytes()
        ctype = {
            ".html": "text/html; charset=utf-8",
            ".js": "text/javascript; charset=utf-8",
            ".css": "text/css; charset=utf-8",
            ".svg": "image/svg+xml",
            ".json": "application/json",
        }.get(target.suffix, "application/octet-stream")
        self.send_response(200)
        self.send_header("Content-Type", ctype)
        self.send_header("Content-Length", str(len(data)))
        self.end_headers()
        self.wfile.write(data)


def make_server(port: int, static_dir: str | None = None) -> ThreadingHTTPServer:
    handler = type("Handler", (_Handler,), {})
    sdir = static_dir or os.environ.get("RAILYARD_STATIC_DIR")
    handler.static_dir = Path(sdir) if sdir else None
    return ThreadingHTTPServer(("127.0.0.1", port), handler)


def serve(port: int, static_dir: str | None = None) -> None:
    """Run the layout service until interrupted."""
    server = make_server(port, static_dir)
    try:
        server.serve_forever()
    finally:
        server.server_close()


def _run_serve(argv: list[str]) -> int:
    p = _Parser(prog="railyard serve")
    p.add_argument("--port", type=int, default=8941)
    p.add_argument("--static-dir", default=None)
    try:
        args = p.parse_args(argv)
    except _CliError as exc:
        print(f"railyard: error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    try:
        server = make_server(args.port, args.static_dir)
    except OSError as exc:
        print(f"railyard: error: cannot bind port {args.port}: {exc}", file=sys.stderr)
        return EXIT_INPUT
    port = server.server_address[1]
    print(f"railyard service on http://127.0.0.1:{port}/ (POST /layout)", flush=True)
    try:
        server.serve_forever()
    except KeyboardInterrupt:
        pass
    finally:
        server.server_close()
    return EXIT_OK


def main() -> None:
    sys.exit(run_cli(sys.argv[1:]))


if __name__ == "__main__":
    main()
