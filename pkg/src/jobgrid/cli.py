"""Headless command-line interface: ingest, synth, summarize, views, export,
and serve.

Exit codes: 0 success, 1 usage error, 2 data error, 3 I/O error.
"""

from __future__ import annotations

import argparse
import sys

import numpy as np

from .config import parse_kv_document, resolve_config
from .errors import IoError, JobgridError, UnreadableSource
from .export import document_for_table, export_text, retrieve_selected_records, write_export
from .ingest import ingest_table, parse_iso_timestamp
from .model import JobTable
from .selection import Mutation, new_session, update_state
from .synth import default_scenario, generate_synthetic, scenario_from_document
from .views import document_to_json, facet_partition, facet_views, serialize_views


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # argparse would exit(2); usage errors are exit 1
        raise UsageError(message)


def build_parser() -> _Parser:
    parser = _Parser(prog="jobgrid", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    def add_input(p, required=False):
        p.add_argument("--input", required=required, help="accounting CSV to ingest")
        p.add_argument("--format", default="csv", help="input format (csv)")
        p.add_argument("--scenario", help="synthetic scenario file (instead of --input)")
        p.add_argument("--seed", type=int, help="default synthetic scenario with this seed")

    p = sub.add_parser("ingest", help="validate an accounting export and report")
    add_input(p, required=True)
    p.add_argument("--config", help="encoding config file (timezone is used)")

    p = sub.add_parser("synth", help="generate a synthetic trace")
    p.add_argument("--scenario", help="scenario key-value file")
    p.add_argument("--seed", type=int, help="override the scenario seed")
    p.add_argument("--out", help="output CSV path (default stdout)")

    p = sub.add_parser("summarize", help="per-queue record counts and wait quantiles")
    add_input(p)

    p = sub.add_parser("views", help="write serialized view bundles for a config")
    add_input(p)
    p.add_argument("--config", help="encoding config file")
    p.add_argument("--out", help="output JSON path (default stdout)")

    p = sub.add_parser("export", help="apply filter/brush flags and export the selection")
    add_input(p)
    p.add_argument("--config", help="encoding config file")
    p.add_argument("--filter", help="comma-separated categorical labels to pin")
    p.add_argument("--x-range", dest="x_range", help="brush LO:HI on x (number or ISO time)")
    p.add_argument("--y-range", dest="y_range", help="brush LO:HI on y")
    p.add_argument("--facet", help="facet to brush (default: every facet)")
    p.add_argument("--out", help="output path (default stdout)")
    p.add_argument("--export-format", dest="export_format", default="csv", choices=("csv", "json"))

    p = sub.add_parser("serve", help="start the HTTP service")
    add_input(p)
    p.add_argument("--config", help="encoding config file")
    p.add_argument("--bind", default="127.0.0.1:8787", help="HOST:PORT to listen on")
    p.add_argument("--idle-timeout", type=float, default=3600.0, help="session expiry seconds")

    return parser


def _read_text(path: str) -> str:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            return fh.read()
    except OSError as exc:
        raise IoError(f"cannot read {path}: {exc}") from exc


def _load_config(args, schema):
    document = _read_text(args.config) if getattr(args, "config", None) else None
    return resolve_config(document, schema)


def _load_table(args) -> JobTable:
    if getattr(args, "input", None):
        table, _ = ingest_table(args.input, format=args.format)
        return table
    if getattr(args, "scenario", None):
        scenario = scenario_from_document(_read_text(args.scenario))
        if getattr(args, "seed", None) is not None:
            from dataclasses import replace

            scenario = replace(scenario, seed=args.seed)
        return generate_synthetic(scenario)
    if getattr(args, "seed", None) is not None:
        return generate_synthetic(default_scenario(args.seed))
    raise UsageError("one of --input, --scenario, or --seed is required")


def _cmd_ingest(args) -> int:
    timezone_name = "UTC"
    if args.config:
        kv = parse_kv_document(_read_text(args.config))
        timezone_name = kv.get("timezone", "UTC")
    table, report = ingest_table(args.input, format=args.format, timezone_name=timezone_name)
    print(f"source: {report.source}")
    print(f"accepted: {report.accepted_count}")
    print(f"rejected: {report.rejected_count}")
    for line in report.details:
        print(f"  {line}")
    for line in report.warnings:
        print(f"  warning: {line}")
    return 0


def _cmd_synth(args) -> int:
    if args.scenario:
        scenario = scenario_from_document(_read_text(args.scenario))
        if args.seed is not None:
            from dataclasses import replace

            scenario = replace(scenario, seed=args.seed)
    else:
        scenario = default_scenario(args.seed if args.seed is not None else 7)
    table = generate_synthetic(scenario)
    document = document_for_table(table)
    if args.out:
        write_export(document, args.out, "csv")
        print(f"wrote {len(document.rows)} records to {args.out}")
    else:
        sys.stdout.write(export_text(document, "csv"))
    return 0


def _cmd_summarize(args) -> int:
    table = _load_table(args)
    waits = table.numeric_values("queue_wait")
    parts, _ = facet_partition(table, "queue")
    print(f"{'queue':<12} {'records':>8} {'p25':>10} {'median':>10} {'p75':>10} {'p95':>12}")
    for label, ids in parts:
        qs = np.quantile(waits[ids], [0.25, 0.5, 0.75, 0.95])
        print(
            f"{label:<12} {len(ids):>8} "
            f"{qs[0]:>10.0f} {qs[1]:>10.0f} {qs[2]:>10.0f} {qs[3]:>12.0f}"
        )
    return 0


def _cmd_views(args) -> int:
    table = _load_table(args)
    config = _load_config(args, table.schema)
    bundles = facet_views(table, config)
    _, missing_facet = facet_partition(table, config.facet_field)
    text = document_to_json(serialize_views(bundles, config, excluded_missing_facet=missing_facet))
    if args.out:
        try:
            with open(args.out, "w", encoding="utf-8") as fh:
                fh.write(text)
        except OSError as exc:
            raise IoError(f"cannot write {args.out}: {exc}") from exc
        print(f"wrote view document to {args.out}")
    else:
        sys.stdout.write(text)
    return 0


def _parse_range(text: str, name: str) -> tuple[float, float]:
    parts = text.split(":", 1)
    if len(parts) != 2:
        raise UsageError(f"--{name} expects LO:HI")

    def parse_bound(s: str) -> float:
        try:
            return float(s)
        except ValueError:
            return float(parse_iso_timestamp(s))

    lo, hi = parse_bound(parts[0]), parse_bound(parts[1])
    if lo > hi:
        raise UsageError(f"--{name} has lo > hi")
    return lo, hi


def _cmd_export(args) -> int:
    table = _load_table(args)
    config = _load_config(args, table.schema)
    session = new_session(table, config)
    if args.filter:
        for label in args.filter.split(","):
            session = update_state(session, Mutation(op="pin", label=label.strip()))
    x_range = _parse_range(args.x_range, "x-range") if args.x_range else None
    y_range = _parse_range(args.y_range, "y-range") if args.y_range else None
    if x_range or y_range:
        facets = [args.facet] if args.facet else [
            label for label, _ in facet_partition(table, config.facet_field)[0]
        ]
        for facet in facets:
            session = update_state(
                session, Mutation(op="set_brush", facet=facet, x_range=x_range, y_range=y_range)
            )
    document = retrieve_selected_records(session)
    if args.out:
        write_export(document, args.out, args.export_format)
        print(f"wrote {len(document.rows)} selected records to {args.out}")
    else:
        sys.stdout.write(export_text(document, args.export_format))
    return 0


def _cmd_serve(args) -> int:
    from .service import serve

    table = _load_table(args)
    config = _load_config(args, table.schema)
    host, _, port_text = args.bind.rpartition(":")
    if not host or not port_text.isdigit():
        raise UsageError(f"--bind expects HOST:PORT, got {args.bind!r}")
    serve(table, config, host=host, port=int(port_text), idle_timeout_s=args.idle_timeout)
    return 0


_COMMANDS = {
    "ingest": _cmd_ingest,
    "synth": _cmd_synth,
    "summarize": _cmd_summarize,
    "views": _cmd_views,
    "export": _cmd_export,
    "serve": _cmd_serve,
}


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        return _COMMANDS[args.command](args)
    except UsageError as exc:
        print(f"jobgrid: usage error: {exc}", file=sys.stderr)
        return 1
    except (IoError, UnreadableSource) as exc:
        print(f"jobgrid: i/o error: {exc}", file=sys.stderr)
        return 3
    except OSError as exc:
        print(f"jobgrid: i/o error: {exc}", file=sys.stderr)
        return 3
    except JobgridError as exc:
        print(f"jobgrid: data error: {exc}", file=sys.stderr)
        return 2


def entrypoint() -> None:
    sys.exit(main())


if __name__ == "__main__":
    entrypoint()
