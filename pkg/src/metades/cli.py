"""Command-line benchmark driver.

Subcommands cover the full workflow: synthetic data generation, training,
evaluation, pool/selection-set sweeps, decision-boundary rasterization,
and per-query competence traces. Flags may also be given in a flat
key=value config file via --config; explicit flags win over file entries.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .core import METHODS, trace_query
from .datagen import SPLIT_TAGS, GenSpec, generate, read_csv, write_csv
from .experiment import (
    ExperimentConfig,
    run_boundary,
    run_eval,
    run_sweep,
    run_train,
)
from .persist import load_system

DEFAULTS = {
    "problem": "p2",
    "base": "perceptron",
    "pool": 5,
    "k": 7,
    "kp": 5,
    "hc": 0.7,
    "upsilon": 0.5,
    "dsel_size": 500,
    "seed": 0,
    "seeds": 1,
    "methods": "metades_h",
    "out": "results",
    "resolution": 100,
}

_INT_KEYS = {"pool", "k", "kp", "dsel_size", "seed", "seeds", "resolution"}
_FLOAT_KEYS = {"hc", "upsilon"}


def read_config_file(path) -> dict:
    """Parse flat key=value lines; '#' starts a comment, blanks are skipped."""
    values = {}
    for lineno, raw in enumerate(Path(path).read_text().splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ValueError(f"{path}:{lineno}: expected key=value, got {raw!r}")
        key, _, value = line.partition("=")
        key = key.strip().replace("-", "_")
        if key not in DEFAULTS and key not in ("axis", "model", "test"):
            raise ValueError(f"{path}:{lineno}: unknown config key {key!r}")
        values[key] = value.strip()
    return values


def _coerce(key: str, value):
    if isinstance(value, str):
        if key in _INT_KEYS:
            return int(value)
        if key in _FLOAT_KEYS:
            return float(value)
    return value


def resolve(args: argparse.Namespace) -> dict:
    """Merge option sources: CLI flag > config file entry > built-in default."""
    from_file = read_config_file(args.config) if args.config else {}
    merged = {}
    for key in set(DEFAULTS) | set(from_file) | set(vars(args)):
        if key in ("config", "func", "command", "query", "overlay", "method",
                   "axis", "model", "test"):
            continue
        cli = getattr(args, key, None)
        if cli is not None:
            merged[key] = cli
        elif key in from_file:
            merged[key] = _coerce(key, from_file[key])
        elif key in DEFAULTS:
            merged[key] = DEFAULTS[key]
    for key in ("axis", "model", "test"):
        if getattr(args, key, None) is not None:
            merged[key] = getattr(args, key)
        elif key in from_file:
            merged[key] = from_file[key]
    return merged


def _experiment_config(opts: dict, sweep: str = "none") -> ExperimentConfig:
    base_seed = opts["seed"]
    return ExperimentConfig(
        problem=opts["problem"],
        base_kind=opts["base"],
        m=opts["pool"],
        sizes=(500, 500, opts["dsel_size"], 2000),
        k=opts["k"],
        kp=opts["kp"],
        h_c=opts["hc"],
        upsilon=opts["upsilon"],
        methods=tuple(m for m in opts["methods"].split(",") if m),
        seeds=tuple(base_seed + i for i in range(opts["seeds"])),
        sweep=sweep,
        out_dir=opts["out"],
    )


def cmd_gen_data(args) -> int:
    opts = resolve(args)
    spec = GenSpec(opts["problem"], (500, 500, opts["dsel_size"], 2000),
                   opts["seed"])
    out = Path(opts["out"])
    out.mkdir(parents=True, exist_ok=True)
    for tag, split in zip(SPLIT_TAGS, generate(spec)):
        path = out / f"{tag}.csv"
        write_csv(split, path, header=True)
        print(f"wrote {path} ({len(split)} samples)")
    return 0


def cmd_train(args) -> int:
    opts = resolve(args)
    cfg = _experiment_config(opts)
    run_train(cfg, seed=opts["seed"])
    print(f"wrote {Path(cfg.out_dir) / 'model.json'}")
    return 0


def cmd_eval(args) -> int:
    opts = resolve(args)
    if opts.get("model") is None or opts.get("test") is None:
        raise ValueError("eval needs --model and --test paths")
    methods = tuple(m for m in opts["methods"].split(",") if m)
    rows = run_eval(opts["model"], opts["test"], methods, opts["out"],
                    seed=opts["seed"])
    for row in rows:
        print(f"{row.method}: {row.accuracy:.4f}")
    print(f"wrote {Path(opts['out']) / 'results.csv'}")
    return 0


def cmd_sweep(args) -> int:
    opts = resolve(args)
    if opts.get("axis") is None:
        raise ValueError("sweep needs --axis (pool, dsel, or both)")
    cfg = _experiment_config(opts, sweep=opts["axis"])
    rows = run_sweep(cfg)
    ok = sum(r.status == "ok" for r in rows)
    print(f"wrote {Path(cfg.out_dir) / 'results.csv'} "
          f"({ok}/{len(rows)} rows ok)")
    return 0


def cmd_boundary(args) -> int:
    opts = resolve(args)
    if opts.get("model") is None:
        raise ValueError("boundary needs --model")
    method = args.method or opts["methods"].split(",")[0]
    overlay = read_csv(args.overlay, split="G") if args.overlay else None
    run_boundary(opts["model"], method, opts["resolution"], opts["out"],
                 samples=overlay)
    out = Path(opts["out"])
    print(f"wrote {out / 'boundary.csv'} and {out / 'boundary.svg'}")
    return 0


def cmd_trace(args) -> int:
    opts = resolve(args)
    if opts.get("model") is None:
        raise ValueError("trace needs --model")
    if not args.query:
        raise ValueError("trace needs at least one --query X,Y")
    system = load_system(opts["model"])
    out = Path(opts["out"])
    out.mkdir(parents=True, exist_ok=True)
    path = out / "trace.jsonl"
    with open(path, "w", encoding="ascii") as fh:
        for spec in args.query:
            x, _, y = spec.partition(",")
            record = trace_query(system, (float(x), float(y)))
            fh.write(json.dumps(record, sort_keys=True) + "\n")
    print(f"wrote {path} ({len(args.query)} queries)")
    return 0


def _add_common(sub: argparse.ArgumentParser) -> None:
    sub.add_argument("--config", help="flat key=value option file")
    sub.add_argument("--problem", choices=("p2", "xor"))
    sub.add_argument("--base", choices=("perceptron", "stump"))
    sub.add_argument("--pool", type=int, help="ensemble size M")
    sub.add_argument("--k", type=int, help="competence neighborhood size")
    sub.add_argument("--kp", type=int, help="output-profile neighborhood size")
    sub.add_argument("--hc", type=float, help="consensus cutoff for meta-training")
    sub.add_argument("--upsilon", type=float, help="competence selection threshold")
    sub.add_argument("--dsel-size", type=int, dest="dsel_size")
    sub.add_argument("--seed", type=int, help="base seed")
    sub.add_argument("--seeds", type=int, help="number of consecutive seeds")
    sub.add_argument("--methods", help="comma-separated method list; any of "
                     + ",".join(METHODS))
    sub.add_argument("--out", help="output directory")
    sub.add_argument("--resolution", type=int, help="boundary grid resolution")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="metades",
        description="dynamic ensemble selection benchmarks on synthetic "
                    "two-class problems")
    subs = parser.add_subparsers(dest="command", required=True)

    p = subs.add_parser("gen-data", help="write the four dataset splits as CSV")
    _add_common(p)
    p.set_defaults(func=cmd_gen_data)

    p = subs.add_parser("train", help="train a system and persist model.json")
    _add_common(p)
    p.set_defaults(func=cmd_train)

    p = subs.add_parser("eval", help="evaluate a saved model on a test CSV")
    _add_common(p)
    p.add_argument("--model", help="path to model.json")
    p.add_argument("--test", help="path to test split CSV")
    p.set_defaults(func=cmd_eval)

    p = subs.add_parser("sweep", help="accuracy vs pool size or selection-set size")
    _add_common(p)
    p.add_argument("--axis", choices=("pool", "dsel", "both"))
    p.set_defaults(func=cmd_sweep)

    p = subs.add_parser("boundary", help="rasterize decision regions to CSV + SVG")
    _add_common(p)
    p.add_argument("--model", help="path to model.json")
    p.add_argument("--method", help="method to rasterize (default: first of --methods)")
    p.add_argument("--overlay", help="CSV of samples to draw over the tiles")
    p.set_defaults(func=cmd_boundary)

    p = subs.add_parser("trace", help="dump per-query competence details")
    _add_common(p)
    p.add_argument("--model", help="path to model.json")
    p.add_argument("--query", action="append",
                   help="query point as X,Y (repeatable)")
    p.set_defaults(func=cmd_trace)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except Exception as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
