"""Batch command-line frontend.

Subcommands: ``diff`` (difference image of a pair), ``cluster`` (change
map from a diff image or a pair), ``sweep`` (parameter sweep to CSV),
``bench`` (synthetic benchmark to CSV).

Exit codes: 0 success, 2 input error (files, shapes, config), 3
numerical failure (collapsed cluster, degenerate data). Every
invocation writes a JSON run manifest next to its outputs, on success
and on failure with partial results alike.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import os
import sys
import time
from datetime import datetime, timezone

import numpy as np

from . import __version__
from .benchmark import benchmark_csv, benchmark_rows
from .clustering import run_sfcm, sweep_m, sweep_pq, trace_to_csv
from .config import SfcmConfig, load_config
from .diffimage import difference_image, quantize
from .errors import ConfigError, ImageIOError, NumericalError
from .grid import load_image, save_image

EXIT_OK = 0
EXIT_INPUT = 2
EXIT_NUMERICAL = 3


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    manifest = {
        "tool": "sfcm",
        "version": __version__,
        "command": args.command,
        "inputs": {},
        "config": None,
        "output_dir": None,
        "outputs": [],
        "status": "ok",
        "error": None,
        "started_at": datetime.now(timezone.utc).isoformat(),
        "duration_seconds": None,
    }
    start = time.monotonic()
    try:
        code = args.func(args, manifest)
    except (ImageIOError, ConfigError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        manifest["status"] = "error"
        manifest["error"] = str(exc)
        code = EXIT_INPUT
    except NumericalError as exc:
        print(f"numerical error: {exc}", file=sys.stderr)
        manifest["status"] = "error"
        manifest["error"] = str(exc)
        code = EXIT_NUMERICAL
    finally:
        manifest["duration_seconds"] = time.monotonic() - start
        _write_manifest(args, manifest)
    return code


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="sfcm",
        description="Change detection on co-registered grayscale image pairs "
                    "via spatially regularized fuzzy c-means.",
    )
    parser.add_argument("--version", action="version", version=f"sfcm {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p_diff = sub.add_parser("diff", help="normalized difference image of two acquisitions")
    p_diff.add_argument("--before", required=True, help="earlier acquisition (PGM/PNG)")
    p_diff.add_argument("--after", required=True, help="later acquisition (PGM/PNG)")
    p_diff.add_argument("--out", required=True, help="output image path (.pgm or .png)")
    p_diff.set_defaults(func=cmd_diff)

    p_cluster = sub.add_parser("cluster", help="cluster a difference image into a change map")
    p_cluster.add_argument("--diff", help="precomputed difference image")
    p_cluster.add_argument("--before", help="earlier acquisition (pair mode)")
    p_cluster.add_argument("--after", help="later acquisition (pair mode)")
    p_cluster.add_argument("--config", required=True, help="key=value config file")
    p_cluster.add_argument("--out", required=True, help="output directory")
    p_cluster.add_argument("--quantize", type=int, metavar="N",
                           help="in pair mode, cluster the N-level grey image instead of "
                                "the real-valued difference image")
    p_cluster.add_argument("--seed", type=int, help="override the config seed")
    p_cluster.set_defaults(func=cmd_cluster)

    p_sweep = sub.add_parser("sweep", help="changed-pixel count over a parameter sweep")
    p_sweep.add_argument("--diff", required=True, help="difference image to cluster")
    p_sweep.add_argument("--config", required=True, help="key=value config file")
    p_sweep.add_argument("--axis", required=True, choices=("pq", "m"),
                         help="sweep the p/q ratio (q fixed) or the exponent m")
    p_sweep.add_argument("--values", required=True, help="comma-separated sweep values")
    p_sweep.add_argument("--out", required=True, help="output CSV path")
    p_sweep.add_argument("--seed", type=int, help="override the config seed")
    p_sweep.set_defaults(func=cmd_sweep)

    p_bench = sub.add_parser("bench", help="synthetic speckle benchmark with ground truth")
    p_bench.add_argument("--config", required=True, help="key=value config file")
    p_bench.add_argument("--out", required=True, help="output CSV path")
    p_bench.add_argument("--seeds", type=int, required=True, help="number of noise seeds")
    p_bench.add_argument("--seed", type=int, default=0, help="first seed value (default 0)")
    p_bench.set_defaults(func=cmd_bench)
    return parser


def cmd_diff(args, manifest) -> int:
    manifest["inputs"] = {"before": args.before, "after": args.after}
    before = load_image(args.before)
    after = load_image(args.after)
    diff = difference_image(before, after)
    grey = quantize(diff, 256)
    save_image(grey, args.out, bit_depth=8)
    manifest["outputs"] = [args.out]
    print(f"S: min={diff.min():.6f} mean={diff.mean():.6f} max={diff.max():.6f}")
    return EXIT_OK


def cmd_cluster(args, manifest) -> int:
    cfg = _load_cfg(args)
    manifest["config"] = _config_dict(cfg)
    img = _resolve_cluster_input(args, manifest)
    os.makedirs(args.out, exist_ok=True)
    manifest["output_dir"] = args.out

    result = run_sfcm(img, cfg)

    change_path = os.path.join(args.out, "change_map.png")
    labels_path = os.path.join(args.out, "labels.pgm")
    trace_path = os.path.join(args.out, "trace.csv")
    save_image(result.change_map * 255.0, change_path, bit_depth=8)
    save_image(result.labels.astype(np.float64), labels_path,
               bit_depth=8 if cfg.c <= 256 else 16)
    with open(trace_path, "w", encoding="utf-8", newline="") as f:
        f.write(trace_to_csv(result.trace))
    manifest["outputs"] = [change_path, labels_path, trace_path]

    centers = " ".join(f"{v:.8g}" for v in result.centers)
    print(f"iterations: {result.iterations}")
    print(f"centers: {centers}")
    print(f"changed pixels: {result.changed_count}")
    return EXIT_OK


def cmd_sweep(args, manifest) -> int:
    cfg = _load_cfg(args)
    manifest["config"] = _config_dict(cfg)
    manifest["inputs"]["diff"] = args.diff
    values = [v for v in (s.strip() for s in args.values.split(",")) if v]
    if not values:
        raise ValueError("empty sweep")
    parsed = [float(v) for v in values]
    img = load_image(args.diff)
    if args.axis == "pq":
        table = sweep_pq(img, cfg, parsed)
    else:
        table = sweep_m(img, cfg, parsed)
    lines = ["value,changed_count"]
    for value, count in table:
        lines.append(f"{value!r},{count}")
        print(f"{args.axis}={value:g}: changed={count}")
    with open(args.out, "w", encoding="utf-8", newline="") as f:
        f.write("\n".join(lines) + "\n")
    manifest["outputs"] = [args.out]
    return EXIT_OK


def cmd_bench(args, manifest) -> int:
    cfg = load_config(args.config)
    manifest["inputs"]["config"] = args.config
    manifest["config"] = _config_dict(cfg)
    if args.seeds < 1:
        raise ValueError(f"--seeds must be >= 1, got {args.seeds}")
    seeds = [args.seed + i for i in range(args.seeds)]
    rows = benchmark_rows(cfg, seeds)
    with open(args.out, "w", encoding="utf-8", newline="") as f:
        f.write(benchmark_csv(rows))
    manifest["outputs"] = [args.out]

    failures = [r for r in rows if r.failed]
    print(f"wrote {len(rows)} rows to {args.out}")
    for variant in ("none", "neighbor", "intensity"):
        scored = [r.metrics.overall_accuracy for r in rows
                  if r.variant == variant and not r.failed and r.looks == 4]
        if scored:
            print(f"mean OA at looks=4, {variant}: {np.mean(scored):.4f}")
    if failures:
        for row in failures:
            print(f"failed: seed={row.seed} looks={row.looks} variant={row.variant}: {row.error}",
                  file=sys.stderr)
        manifest["status"] = "error"
        manifest["error"] = f"{len(failures)} benchmark rows failed"
        return EXIT_NUMERICAL
    return EXIT_OK


def _load_cfg(args) -> SfcmConfig:
    cfg = load_config(args.config)
    if getattr(args, "seed", None) is not None and args.command != "bench":
        cfg = cfg.with_overrides(seed=args.seed)
    return cfg


def _resolve_cluster_input(args, manifest) -> np.ndarray:
    pair = args.before is not None and args.after is not None
    if args.diff is not None:
        if pair or args.before or args.after:
            raise ValueError("give either --diff or --before/--after, not both")
        if args.quantize is not None:
            raise ValueError("--quantize applies to pair mode only")
        manifest["inputs"]["diff"] = args.diff
        return load_image(args.diff)
    if not pair:
        raise ValueError("cluster needs --diff or both --before and --after")
    manifest["inputs"]["before"] = args.before
    manifest["inputs"]["after"] = args.after
    diff = difference_image(load_image(args.before), load_image(args.after))
    if args.quantize is not None:
        return quantize(diff, args.quantize)
    return diff


def _config_dict(cfg: SfcmConfig) -> dict:
    out = dataclasses.asdict(cfg)
    if isinstance(out["init"], tuple):
        out["init"] = list(out["init"])
    return out


def _manifest_path(args) -> str | None:
    out = getattr(args, "out", None)
    if out is None:
        return None
    if args.command == "cluster":
        return os.path.join(out, "manifest.json")
    return out + ".manifest.json"


def _write_manifest(args, manifest) -> None:
    path = _manifest_path(args)
    if path is None:
        return
    try:
        parent = os.path.dirname(path)
        if parent:
            os.makedirs(parent, exist_ok=True)
        with open(path, "w", encoding="utf-8") as f:
            json.dump(manifest, f, indent=2, sort_keys=True)
            f.write("\n")
    except OSError as exc:  # never mask the command's own outcome
        print(f"warning: could not write manifest {path}: {exc}", file=sys.stderr)


if __name__ == "__main__":
    sys.exit(main())
