"""Command-line interface: analyze tables, inspect tablecloths, benchmark,
and launch the collection service.

Exit codes: 0 success, 2 input parse error, 3 validation error, 4 I/O error.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

from . import accel
from .bench import format_report, run_benchmark
from .geometry import gabriel_graph
from .layout import LayoutParams
from .pipeline import analyze, summary_lines
from .render import RenderStyle, render_tablecloth
from .sessions import SessionStore
from .tableio import ParseError, parse_table, table_to_tablecloths

EXIT_OK = 0
EXIT_PARSE = 2
EXIT_VALIDATION = 3
EXIT_IO = 4

STORE_ENV = "NAPGRAPH_STORE"


def _load_config(path: str | None) -> tuple[dict, dict]:
    if path is None:
        return {}, {}
    with open(path, "r", encoding="utf-8") as handle:
        doc = json.load(handle)
    return doc.get("layout", {}), doc.get("render", {})


def _layout_params(args, layout_overrides: dict, default_diameter: float) -> LayoutParams:
    fields = {
        "spring_constant": 100.0,
        "max_updates": 1000,
        "tolerance": 0.1,
        "display_diameter": default_diameter,
        "seed": None,
    }
    fields.update(layout_overrides)
    if getattr(args, "seed", None) is not None:
        fields["seed"] = args.seed
    return LayoutParams(**fields)


def _read_table(path: str):
    with open(path, "rb") as handle:
        return parse_table(handle.read())


def cmd_analyze(args) -> int:
    layout_overrides, render_overrides = _load_config(args.params)
    table = _read_table(args.input)
    cloths = table_to_tablecloths(table)
    params = _layout_params(args, layout_overrides, table.sheet.diagonal)
    style = RenderStyle(**render_overrides) if render_overrides else None

    result = analyze(
        cloths,
        table.sample_names,
        sheet=table.sheet,
        params=params,
        style=style,
        workers=args.workers,
    )

    stem = Path(args.input).with_suffix("")
    out_svg = Path(args.out) if args.out else stem.with_suffix(".svg")
    out_matrix = Path(args.matrix) if args.matrix else Path(f"{stem}_matrix.csv")
    out_svg.write_bytes(result.svg)
    out_matrix.write_text(result.matrix_csv, encoding="utf-8")
    written = [str(out_svg), str(out_matrix)]
    if args.percentages:
        Path(args.percentages).write_text(result.percentages_csv, encoding="utf-8")
        written.append(args.percentages)
    if args.json:
        Path(args.json).write_text(
            json.dumps(result.to_json_dict(), indent=2) + "\n", encoding="utf-8"
        )
        written.append(args.json)
    if args.trace:
        with open(args.trace, "w", encoding="utf-8") as handle:
            for rec in result.layout.trace:
                handle.write(
                    json.dumps(
                        {
                            "iteration": rec.iteration,
                            "node": rec.node,
                            "gradient_norm": rec.gradient_norm,
                            "energy": rec.energy,
                        }
                    )
                    + "\n"
                )
        written.append(args.trace)

    for line in summary_lines(result):
        print(line)
    print("wrote: " + ", ".join(written))
    return EXIT_OK


def cmd_gabriel(args) -> int:
    table = _read_table(args.input)
    cloths = table_to_tablecloths(table)
    if args.assessor is not None:
        cloths = [t for t in cloths if t.assessor_id == args.assessor]
        if not cloths:
            print(f"error: no assessor {args.assessor!r} in {args.input}", file=sys.stderr)
            return EXIT_VALIDATION
    out_dir = Path(args.out_dir) if args.out_dir else Path(f"{Path(args.input).with_suffix('')}_tablecloths")
    out_dir.mkdir(parents=True, exist_ok=True)
    for cloth in cloths:
        graph = gabriel_graph(cloth)
        svg = render_tablecloth(cloth, graph, sample_names=table.sample_names)
        path = out_dir / f"{cloth.assessor_id}.svg"
        path.write_bytes(svg)
        edges = ", ".join(
            f"{table.sample_names[i]}-{table.sample_names[j]}" for i, j in graph.sorted_edges()
        )
        print(f"{cloth.assessor_id}: {len(graph)} edges: {edges}")
    print(f"wrote {len(cloths)} SVG file(s) to {out_dir}")
    return EXIT_OK


def cmd_bench(args) -> int:
    assessor_counts = [int(a) for a in args.assessors.split(",") if a.strip()]
    if not assessor_counts:
        print("error: --assessors needs at least one count", file=sys.stderr)
        return EXIT_VALIDATION
    impls = ["numba", "numpy"] if args.impl == "both" else [None if args.impl == "active" else args.impl]
    for impl in impls:
        report = run_benchmark(
            args.samples, assessor_counts, repeats=args.repeats, seed=args.seed, impl=impl
        )
        print(format_report(report))
    return EXIT_OK


def cmd_serve(args) -> int:
    import uvicorn

    from .service import create_app

    store_dir = args.store or os.environ.get(STORE_ENV)
    if not store_dir:
        print(f"error: give --store DIR or set {STORE_ENV}", file=sys.stderr)
        return EXIT_VALIDATION
    app = create_app(SessionStore(store_dir))
    uvicorn.run(app, host=args.host, port=args.port, log_level="info")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="napgraph",
        description=(
            "Consensus graphics for projective-mapping (napping) data: Gabriel "
            "graphs per tablecloth, a global similarity matrix, a Kamada-Kawai "
            "consensus layout, and force-encoded SVG output."
        ),
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("analyze", help="full pipeline on a coordinate-table CSV")
    p.add_argument("input", help="coordinate table (sample,<id>_x,<id>_y,... in cm)")
    p.add_argument("--out", help="consensus SVG path (default: <input>.svg)")
    p.add_argument("--matrix", help="similarity-matrix CSV path (default: <input>_matrix.csv)")
    p.add_argument("--percentages", help="also write the percentage matrix CSV here")
    p.add_argument("--json", help="also write positions/matrix/summary as JSON here")
    p.add_argument("--trace", help="write one JSON line per layout update here")
    p.add_argument("--seed", type=int, help="jitter seed for the layout start (default: none)")
    p.add_argument("--params", help="JSON config with 'layout' and 'render' overrides")
    p.add_argument(
        "--workers",
        type=int,
        default=os.cpu_count() or 1,
        help="threads for per-tablecloth Gabriel extraction (default: cpu count)",
    )
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("gabriel", help="per-tablecloth Gabriel graph SVGs and edge lists")
    p.add_argument("input")
    p.add_argument("--assessor", help="only this assessor id (default: all)")
    p.add_argument("--out-dir", help="output directory (default: <input>_tablecloths/)")
    p.set_defaults(func=cmd_gabriel)

    p = sub.add_parser("bench", help="scaling benchmark over assessor counts")
    p.add_argument("--samples", type=int, default=10)
    p.add_argument("--assessors", default="64,128,256,512", help="comma-separated counts")
    p.add_argument("--repeats", type=int, default=5)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument(
        "--impl",
        choices=["active", "numba", "numpy", "both"],
        default="active",
        help=f"kernel path to time (active = {accel.active_impl()})",
    )
    p.set_defaults(func=cmd_bench)

    p = sub.add_parser("serve", help="run the collection HTTP service")
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=8037)
    p.add_argument("--store", help=f"session directory (or set {STORE_ENV})")
    p.set_defaults(func=cmd_serve)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except ParseError as exc:
        print(f"parse error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except json.JSONDecodeError as exc:
        print(f"parse error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except ValueError as exc:
        print(f"validation error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except OSError as exc:
        print(f"io error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
