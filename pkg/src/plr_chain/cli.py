"""``plr-chain`` command line.

Usage::

    plr-chain <experiment> --config FILE [--threads N] [--out DIR] [--dry-run]
    plr-chain validate --config FILE
    plr-chain oracle-suite

Each experiment writes ``<output>.csv`` and a ``<output>.json`` sidecar into
``--out``.  The sidecar holds the fully resolved configuration plus a
``provenance`` block and can be passed back as ``--config``.
"""

from __future__ import annotations

import argparse
import csv
import json
import sys
import time
from pathlib import Path

from . import __version__
from .config import EXPERIMENTS, load_spec
from .ensemble import default_threads
from .errors import PLRChainError
from .experiments import run_experiment

SIDECAR_SCHEMA = 1


def _fmt(value):
    if isinstance(value, float):
        return repr(value)
    return str(value)


def write_outputs(spec, table, out_dir: Path, wall_time: float, threads: int):
    out_dir.mkdir(parents=True, exist_ok=True)
    csv_path = out_dir / f"{spec.output}.csv"
    json_path = out_dir / f"{spec.output}.json"
    with csv_path.open("w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(table.columns)
        for row in table.rows:
            writer.writerow([_fmt(v) for v in row])
    sidecar = spec.resolved()
    sidecar["provenance"] = {
        "schema_version": SIDECAR_SCHEMA,
        "tool": "plr-chain",
        "version": __version__,
        "disorder": spec.disorder.to_dict(),
        "master_seed": spec.disorder.master_seed,
        "wall_time_s": wall_time,
        "threads": threads,
        "rows": len(table.rows),
        "columns": table.columns,
        "summary": table.summary,
    }
    json_path.write_text(json.dumps(sidecar, indent=2, sort_keys=True) + "\n")
    return csv_path, json_path


def _build_parser():
    parser = argparse.ArgumentParser(prog="plr-chain", description=__doc__.split("\n")[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)
    for name in EXPERIMENTS:
        p = sub.add_parser(name, help=f"run the {name} experiment")
        p.add_argument("--config", required=True, type=Path)
        p.add_argument("--threads", type=int, default=None, help="worker threads (default: $PLR_THREADS or CPU count)")
        p.add_argument("--out", type=Path, default=Path("."))
        p.add_argument("--dry-run", action="store_true", help="print the resolved configuration and exit")
    v = sub.add_parser("validate", help="validate a configuration file and echo it with defaults")
    v.add_argument("path", nargs="?", type=Path)
    v.add_argument("--config", type=Path, default=None)
    sub.add_parser("oracle-suite", help="cross-check quasi-free formulas against dense many-body dynamics")
    return parser


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        if args.command == "oracle-suite":
            from .oracle import format_suite, run_oracle_suite

            results = run_oracle_suite()
            print(format_suite(results))
            return 0 if all(r.passed for r in results) else 1

        if args.command == "validate":
            path = args.config or args.path
            if path is None:
                print("error: validate needs a configuration path", file=sys.stderr)
                return 2
            spec = load_spec(path)
            print(json.dumps(spec.resolved(), indent=2, sort_keys=True))
            return 0

        spec = load_spec(args.config, args.command)
        if args.dry_run:
            print(json.dumps(spec.resolved(), indent=2, sort_keys=True))
            return 0
        threads = args.threads if args.threads is not None else default_threads()
        if threads < 1:
            print("error: --threads must be >= 1", file=sys.stderr)
            return 2
        start = time.perf_counter()
        table = run_experiment(spec, threads)
        elapsed = time.perf_counter() - start
        csv_path, json_path = write_outputs(spec, table, args.out, elapsed, threads)
        print(f"{csv_path}: {len(table.rows)} rows ({', '.join(table.columns)})")
        print(f"{json_path}: provenance sidecar")
        return 0
    except PLRChainError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
