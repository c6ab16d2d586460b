"""Command-line front end: flow, energy, pool, and batch subcommands.

Conventions shared by every subcommand: machine-readable results (paths,
CSV rows, the batch summary) go to standard output, diagnostics go to the
error stream, and exit codes are 0 for success, 1 for a job or runtime
failure, 2 for unusable invocations or an unreadable manifest.
"""

from __future__ import annotations

import argparse
import os
import sys
from concurrent.futures import ThreadPoolExecutor, as_completed
from pathlib import Path

from .cache import FlowCache
from .errors import FlowPoolError, InvalidRankError
from .frame_io import load_frame_dir, write_flo
from .optical_flow import FlowParams
from .pipeline import (
    FLOW_FILE_FORMAT,
    METHODS,
    JobSpec,
    compute_pair_flows,
    iter_manifest,
    parse_manifest_line,
    profile_for_sequence,
    run_pool_job,
)


def _add_flow_params(parser: argparse.ArgumentParser) -> None:
    parser.add_argument(
        "--smoothness", type=float, default=15.0,
        help="flow regularization weight; larger gives smoother fields (default 15)",
    )
    parser.add_argument(
        "--iterations", type=int, default=100,
        help="flow solver sweeps per pyramid level (default 100)",
    )
    parser.add_argument(
        "--levels", type=int, default=3,
        help="maximum pyramid depth (default 3)",
    )


def _add_cache_flag(parser: argparse.ArgumentParser) -> None:
    parser.add_argument(
        "--cache-dir", default=None,
        help="flow cache directory; overrides the FLOWPOOL_CACHE environment variable",
    )


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="flowpool",
        description="Collapse frame sequences into single summary images "
        "weighted by optical-flow energy.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_flow = sub.add_parser(
        "flow", help="compute pairwise flow fields and write them as .flo files"
    )
    p_flow.add_argument("input_dir", help="directory of PNG/PPM frames")
    p_flow.add_argument("out_dir", help="directory to receive flow_NNNNNN.flo files")
    _add_flow_params(p_flow)
    _add_cache_flag(p_flow)

    p_energy = sub.add_parser(
        "energy", help="write the per-frame flow energy profile as CSV"
    )
    p_energy.add_argument("input_dir", help="directory of PNG/PPM frames")
    p_energy.add_argument(
        "--out", default=None, help="CSV output path (default: standard output)"
    )
    p_energy.add_argument(
        "--flow-dir", default=None,
        help="directory of precomputed flow_NNNNNN.flo files to use instead of estimating",
    )
    p_energy.add_argument(
        "--plot", default=None,
        help="also render the energy curve to this image file",
    )
    _add_flow_params(p_energy)
    _add_cache_flag(p_energy)

    p_pool = sub.add_parser(
        "pool", help="pool a frame directory into one summary PNG"
    )
    p_pool.add_argument("input_dir", help="directory of PNG/PPM frames")
    p_pool.add_argument("output", help="output PNG path")
    p_pool.add_argument("--method", required=True, choices=METHODS)
    p_pool.add_argument(
        "--r", type=int, default=None, dest="rank_r",
        help="flatten the energy profile: top r frames get --high, the rest --low",
    )
    p_pool.add_argument("--high", type=float, default=1.0)
    p_pool.add_argument("--low", type=float, default=0.0)
    p_pool.add_argument(
        "--flow-dir", default=None,
        help="directory of precomputed flow_NNNNNN.flo files",
    )
    _add_flow_params(p_pool)
    _add_cache_flag(p_pool)

    p_batch = sub.add_parser(
        "batch", help="run every pooling job listed in a manifest file"
    )
    p_batch.add_argument(
        "manifest",
        help="text file, one job per line as space-separated key=value pairs "
        "(# starts a comment); keys: input output method r high low "
        "smoothness iterations levels flow_dir",
    )
    p_batch.add_argument(
        "--jobs", type=int, default=None,
        help="concurrent jobs (default: number of processors)",
    )
    _add_cache_flag(p_batch)
    return parser


def _resolve_cache(flag_value: str | None) -> FlowCache | None:
    root = flag_value if flag_value is not None else os.environ.get("FLOWPOOL_CACHE")
    return FlowCache(root) if root else None


def _flow_params(args: argparse.Namespace) -> FlowParams:
    return FlowParams(
        smoothness=args.smoothness, iterations=args.iterations, levels=args.levels
    )


def _cmd_flow(args: argparse.Namespace) -> int:
    seq = load_frame_dir(args.input_dir)
    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    if len(seq) < 2:
        print(
            "warning: single-frame sequence has no frame pairs; nothing to compute",
            file=sys.stderr,
        )
        return 0
    flows = compute_pair_flows(seq, _flow_params(args), _resolve_cache(args.cache_dir))
    for i, field in enumerate(flows, start=1):
        path = out_dir / FLOW_FILE_FORMAT.format(i)
        write_flo(field, path)
        print(path)
    return 0


def _cmd_energy(args: argparse.Namespace) -> int:
    seq = load_frame_dir(args.input_dir)
    profile = profile_for_sequence(
        seq, _flow_params(args), args.flow_dir, _resolve_cache(args.cache_dir)
    )
    # repr of a Python float is the shortest decimal that round-trips.
    rows = ["frame,energy"]
    rows += [f"{i},{float(e)!r}" for i, e in enumerate(profile, start=1)]
    text = "\n".join(rows) + "\n"
    if args.out is not None:
        Path(args.out).write_text(text, encoding="utf-8")
        print(args.out)
    else:
        sys.stdout.write(text)
    if args.plot is not None:
        from .report import plot_energy_profile

        plot_energy_profile(profile, args.plot, title=Path(args.input_dir).name)
        print(f"wrote plot: {args.plot}", file=sys.stderr)
    return 0


def _cmd_pool(args: argparse.Namespace) -> int:
    job = JobSpec(
        input_dir=args.input_dir,
        output=args.output,
        method=args.method,
        rank_r=args.rank_r,
        high=args.high,
        low=args.low,
        smoothness=args.smoothness,
        iterations=args.iterations,
        levels=args.levels,
        flow_dir=args.flow_dir,
    )
    outcome = run_pool_job(job, _resolve_cache(args.cache_dir))
    print(outcome.output)
    if outcome.max_residual is not None:
        print(f"max_residual={outcome.max_residual!r}")
    return 0


def _cmd_batch(args: argparse.Namespace) -> int:
    try:
        entries = list(iter_manifest(args.manifest))
    except OSError as exc:
        print(f"error: cannot read manifest: {exc}", file=sys.stderr)
        return 2
    cache = _resolve_cache(args.cache_dir)
    workers = args.jobs if args.jobs is not None else (os.cpu_count() or 1)
    workers = max(1, workers)

    def run_one(line: str):
        return run_pool_job(parse_manifest_line(line), cache)

    ok = failed = 0
    with ThreadPoolExecutor(max_workers=workers) as executor:
        futures = {
            executor.submit(run_one, line): lineno for lineno, line in entries
        }
        for future in as_completed(futures):
            lineno = futures[future]
            try:
                outcome = future.result()
            except Exception as exc:  # jobs are isolated: one failure must not abort the rest
                failed += 1
                print(f"line {lineno}: failed: {exc}", file=sys.stderr)
            else:
                ok += 1
                print(f"line {lineno}: wrote {outcome.output}", file=sys.stderr)
    print(f"ok={ok} failed={failed}")
    return 0 if failed == 0 else 1


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        code = exc.code
        return code if isinstance(code, int) else 2
    handlers = {
        "flow": _cmd_flow,
        "energy": _cmd_energy,
        "pool": _cmd_pool,
        "batch": _cmd_batch,
    }
    try:
        return handlers[args.command](args)
    except InvalidRankError as exc:
        print(f"error: {exc}", file=sys.stderr)
        print(
            "hint: --r must be an integer between 1 and the frame count, "
            "with --high greater than --low",
            file=sys.stderr,
        )
        return 1
    except (FlowPoolError, OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
