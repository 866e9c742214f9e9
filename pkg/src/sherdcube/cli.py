"""Command-line entry point: generate, ingest, query, scenario replay, charts, serve."""

from __future__ import annotations

import argparse
import json
import os
import sys
from importlib import resources

from . import etl
from .cql import ParseError, SemanticError, UnexpectedChar, parse, plan_and_execute
from .cube import CubeError, build_cube
from .generator import GeneratorManifest, InvalidManifest, default_manifest, generate, manifest_json
from .payloads import AxisMismatch, chart_compare_json, fmt_number, result_json

EXIT_OK = 0
EXIT_DATA = 1
EXIT_USAGE = 2


def _read_cql_arg(value: str) -> str:
    if os.path.exists(value):
        with open(value, encoding="utf-8") as fh:
            return fh.read()
    return value


def _canonical_query(name: str) -> str:
    return resources.files("sherdcube").joinpath(f"queries/{name}.cql").read_text("utf-8")


def _caret_block(text: str, start_byte: int, end_byte: int) -> str:
    encoded = text.encode("utf-8")
    prefix = encoded[:start_byte].decode("utf-8", errors="replace")
    marked = encoded[start_byte:end_byte].decode("utf-8", errors="replace")
    line_start = prefix.rfind("\n") + 1
    rest = text[len(prefix):]
    line_end = rest.find("\n")
    line = prefix[line_start:] + (rest if line_end < 0 else rest[:line_end])
    column = len(prefix) - line_start
    carets = "^" * max(1, len(marked))
    return f"{line}\n{' ' * column}{carets}"


def _print_cql_error(text: str, exc: Exception) -> None:
    if isinstance(exc, UnexpectedChar):
        sys.stderr.write(f"syntax error: {exc}\n")
        sys.stderr.write(_caret_block(text, exc.offset, exc.offset + 1) + "\n")
    elif isinstance(exc, ParseError):
        sys.stderr.write(f"syntax error: {exc}\n")
        sys.stderr.write(_caret_block(text, exc.span.start, exc.span.end) + "\n")
    else:
        sys.stderr.write(f"semantic error: {exc}\n")
        span = getattr(exc, "span", None)
        if span is not None:
            sys.stderr.write(_caret_block(text, span.start, span.end) + "\n")


def _render_table(headers: list[str], rows: list[list[str]], numeric_last: bool = True) -> str:
    widths = [len(h) for h in headers]
    for row in rows:
        for i, cell in enumerate(row):
            widths[i] = max(widths[i], len(cell))
    lines = []

    def fmt_row(row: list[str]) -> str:
        cells = []
        for i, cell in enumerate(row):
            if numeric_last and i == len(row) - 1:
                cells.append(cell.rjust(widths[i]))
            else:
                cells.append(cell.ljust(widths[i]))
        return "  ".join(cells).rstrip()

    lines.append(fmt_row(headers))
    lines.append("  ".join("-" * w for w in widths))
    lines.extend(fmt_row(row) for row in rows)
    return "\n".join(lines)


def _result_rows(result) -> tuple[list[str], list[list[str]]]:
    headers = [f"{dim}.{level}" for dim, level in result.group_levels]
    headers.append(result.measure_label)
    rows = []
    for members, value in result.rows:
        rows.append([m.label for m in members] + [fmt_number(value) or ""])
    total = fmt_number(result.total)
    rows.append(["TOTAL"] * max(1, len(result.group_levels)) + [total or ""])
    if not result.group_levels:
        headers = ["", result.measure_label]
    return headers, rows


def _emit_result(result, fmt: str) -> None:
    if fmt == "json":
        payload = result_json(result)
        sys.stdout.write(json.dumps(payload, indent=2, ensure_ascii=False) + "\n")
        return
    headers, rows = _result_rows(result)
    if fmt == "csv":
        import csv as _csv

        writer = _csv.writer(sys.stdout, lineterminator="\n")
        writer.writerow(headers)
        writer.writerows(rows)
        return
    sys.stdout.write(_render_table(headers, rows) + "\n")


def _run_query_text(star_dir: str, text: str, fmt: str, bundle_format: str) -> int:
    star = etl.load_star(star_dir, bundle_format)
    cube = build_cube(star)
    try:
        from .cql.parser import parse_script

        queries = parse_script(text)
    except (UnexpectedChar, ParseError) as exc:
        _print_cql_error(text, exc)
        return EXIT_USAGE
    try:
        for i, ast in enumerate(queries):
            if i:
                sys.stdout.write("\n")
            result = plan_and_execute(ast, cube)
            _emit_result(result, fmt)
    except SemanticError as exc:
        _print_cql_error(text, exc)
        return EXIT_DATA
    return EXIT_OK


def cmd_generate(args) -> int:
    if args.manifest:
        with open(args.manifest, encoding="utf-8") as fh:
            manifest = GeneratorManifest.from_dict(json.load(fh))
    else:
        manifest = default_manifest()
    if args.seed is not None:
        manifest.seed = args.seed
    try:
        files, echo = generate(manifest)
    except InvalidManifest as exc:
        sys.stderr.write(f"invalid manifest: {exc}\n")
        return EXIT_DATA
    etl.write_bundle(args.out, files)
    with open(os.path.join(args.out, "manifest.json"), "wb") as fh:
        fh.write(manifest_json(echo))
    sys.stdout.write(
        f"wrote {echo['derived']['sample_count']} samples / "
        f"{echo['derived']['analysis_count']} analyses to {args.out}\n"
    )
    return EXIT_OK


def cmd_ingest(args) -> int:
    files = etl.read_bundle(args.source, args.format)
    dataset = etl.parse_source(files, args.format)
    try:
        star = etl.build_star(dataset)
    except etl.ValidationFailed as exc:
        sys.stderr.write(f"validation failed: {len(exc.report)} violation(s)\n")
        for v in exc.report:
            sys.stderr.write(f"  {v.record_type} {v.record_id}: {v.rule}: {v.message}\n")
        return EXIT_DATA
    etl.write_bundle(args.out, etl.export_star(star))
    sys.stdout.write(f"ingested {star.fact_count} facts into {args.out}\n")
    return EXIT_OK


def cmd_query(args) -> int:
    text = _read_cql_arg(args.cql)
    return _run_query_text(args.star_dir, text, args.format, args.bundle_format)


def cmd_scenario(args) -> int:
    if args.name != "zeuxippus":
        sys.stderr.write(f"unknown scenario {args.name!r}\n")
        return EXIT_USAGE
    star = etl.load_star(args.star_dir)
    cube = build_cube(star)
    sections = (
        ("Typological classification (description mentions the ware)", "zeuxippus_typology"),
        ("Chemical classification (reference group members)", "zeuxippus_stricto"),
    )
    for i, (title, query_name) in enumerate(sections):
        text = _canonical_query(query_name).strip()
        result = plan_and_execute(parse(text), cube)
        if i:
            sys.stdout.write("\n")
        sys.stdout.write(title + "\n")
        sys.stdout.write(text + "\n\n")
        headers, rows = _result_rows(result)
        sys.stdout.write(_render_table(headers, rows) + "\n")
    return EXIT_OK


def cmd_chart(args) -> int:
    if args.mode != "compare":
        sys.stderr.write(f"unknown chart mode {args.mode!r}\n")
        return EXIT_USAGE
    star = etl.load_star(args.star_dir)
    cube = build_cube(star)
    left = _read_cql_arg(args.left)
    right = _read_cql_arg(args.right)
    try:
        payload = chart_compare_json(cube, left, right, args.axis)
    except (UnexpectedChar, ParseError) as exc:
        _print_cql_error(left + "\n" + right, exc)
        return EXIT_USAGE
    except (AxisMismatch, SemanticError, CubeError) as exc:
        sys.stderr.write(f"error: {exc}\n")
        return EXIT_DATA
    data = json.dumps(payload, indent=2, ensure_ascii=False) + "\n"
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(data)
    else:
        sys.stdout.write(data)
    return EXIT_OK


def cmd_serve(args) -> int:
    import uvicorn

    from .server import create_app

    app = create_app(state_dir=args.state_dir)
    uvicorn.run(app, host=args.host, port=args.port, log_level="info")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="sherdcube",
        description="Warehouse and OLAP explorer for ceramic sample analyses",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("generate", help="write a deterministic synthetic bundle")
    p.add_argument("--seed", type=int, default=None, help="override the manifest seed")
    p.add_argument("--out", required=True, help="output directory")
    p.add_argument("--manifest", default=None, help="manifest JSON to use instead of defaults")
    p.set_defaults(func=cmd_generate)

    p = sub.add_parser("ingest", help="validate a source bundle and write the star bundle")
    p.add_argument("source", help="directory with source tables")
    p.add_argument("--out", required=True, help="star bundle output directory")
    p.add_argument("--format", dest="format", default="csv_bundle", choices=etl.FORMATS)
    p.set_defaults(func=cmd_ingest)

    p = sub.add_parser("query", help="run CQL against a star bundle")
    p.add_argument("star_dir", help="directory with an ingested star bundle")
    p.add_argument("--cql", required=True, help="CQL text or a path to a .cql file")
    p.add_argument("--format", default="table", choices=("table", "csv", "json"))
    p.add_argument("--bundle-format", default="csv_bundle", choices=etl.FORMATS)
    p.set_defaults(func=cmd_query)

    p = sub.add_parser("scenario", help="replay a canned analysis scenario")
    p.add_argument("name", help="scenario name (zeuxippus)")
    p.add_argument("star_dir", help="directory with an ingested star bundle")
    p.set_defaults(func=cmd_scenario)

    p = sub.add_parser("chart", help="emit chart data")
    p.add_argument("mode", help="chart mode (compare)")
    p.add_argument("star_dir", help="directory with an ingested star bundle")
    p.add_argument("--left", required=True, help="left CQL text or file")
    p.add_argument("--right", required=True, help="right CQL text or file")
    p.add_argument("--axis", required=True, help="shared axis as dim.level")
    p.add_argument("--out", default=None, help="write JSON here instead of stdout")
    p.set_defaults(func=cmd_chart)

    p = sub.add_parser("serve", help="run the HTTP API")
    p.add_argument("--port", type=int, default=8000)
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--state-dir", default=None, help="snapshot/reload star bundles here")
    p.set_defaults(func=cmd_serve)

    return parser


def main(argv: "list[str] | None" = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except FileNotFoundError as exc:
        sys.stderr.write(f"no such file or directory: {exc.filename}\n")
        return EXIT_USAGE
    except etl.EtlError as exc:
        sys.stderr.write(f"error: {exc}\n")
        return EXIT_DATA
    except CubeError as exc:
        sys.stderr.write(f"error: {exc}\n")
        return EXIT_DATA


if __name__ == "__main__":
    sys.exit(main())
