"""Command-line entry point.

Subcommands map one-to-one onto the harness experiments:

    parvqe benchmark-pairs --seed 7 --out results/bench
    parvqe heatmap         --seed 7 --pairs 25 --shots 10000 --out results/heat
    parvqe vqe             --seed 7 --optimizer mgd --pairs 12 --out results/vqe
    parvqe shots-sweep     --seed 7 --out results/shots
    parvqe optimizer-compare --seed 7 --out results/compare
"""

from __future__ import annotations

import argparse
import sys

from .harness import (
    ExperimentConfig,
    cmd_benchmark_pairs,
    cmd_heatmap,
    cmd_optimizer_compare,
    cmd_shots_sweep,
    cmd_vqe,
    default_calibration_path,
    default_cost_model_path,
)


def _int_list(text: str) -> tuple[int, ...]:
    return tuple(int(tok) for tok in text.split(",") if tok)


def _add_common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--seed", type=int, required=True,
                   help="base seed; all randomness derives from it")
    p.add_argument("--out", required=True, help="output directory")
    p.add_argument("--calibration", default=str(default_calibration_path()),
                   help="device calibration JSON")
    p.add_argument("--cost-model", default=str(default_cost_model_path()),
                   help="wall-clock cost model JSON")
    p.add_argument("--pairs", type=int, default=None, help="number of pairs to select")
    p.add_argument("--select", choices=["greedy", "matching"], default="greedy")
    p.add_argument("--cap", type=float, default=None,
                   help="exclude edges below this CZ fidelity")
    p.add_argument("--shots", type=int, default=None)
    p.add_argument("--iterations", type=int, default=None)
    p.add_argument("--mitigation", choices=["none", "ni", "tflo", "ni+tflo"],
                   default="ni+tflo")
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--repeats", type=int, default=1)
    p.add_argument("--crosstalk", type=float, default=0.0,
                   help="extra depolarizing probability for adjacent active pairs")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="parvqe",
                                     description="parallel two-qubit VQE testbed")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("benchmark-pairs", help="benchmark every pair and the "
                       "greedy parallel sweep")
    _add_common(p)

    p = sub.add_parser("heatmap", help="energy landscape heatmaps")
    _add_common(p)
    p.add_argument("--grid", type=int, default=20, help="points per axis")

    p = sub.add_parser("vqe", help="full optimisation runs")
    _add_common(p)
    p.add_argument("--optimizer", choices=["spsa", "mgd"], default="spsa")
    p.add_argument("--eta", type=float, default=2.0,
                   help="points-per-iteration metaparameter for single-pair mgd")
    p.add_argument("--start", type=float, nargs=2, default=(0.6, 0.8),
                   metavar=("PHI", "THETA"))
    p.add_argument("--speedup-sweep", action="store_true",
                   help="emit modelled speedups over --pair-counts instead of running")
    p.add_argument("--pair-counts", type=_int_list, default=(2, 4, 8, 12, 16, 20, 25))

    p = sub.add_parser("shots-sweep", help="SPSA at several shot counts")
    _add_common(p)
    p.add_argument("--shots-list", type=_int_list, default=(100, 1000, 10_000))

    p = sub.add_parser("optimizer-compare", help="SPSA vs surrogate descent "
                       "across pair counts")
    _add_common(p)
    p.add_argument("--pair-counts", type=_int_list, default=(2, 4, 6, 9, 12, 25))

    return parser


def config_from_args(args: argparse.Namespace) -> ExperimentConfig:
    default_shots = {"benchmark-pairs": 10_000, "heatmap": 10_000}.get(args.command, 1000)
    kwargs = dict(
        seed=args.seed,
        out_dir=args.out,
        calibration=args.calibration,
        cost_model=args.cost_model,
        pairs=args.pairs,
        select=args.select,
        cap=args.cap,
        shots=args.shots if args.shots is not None else default_shots,
        iterations=args.iterations,
        mitigation=args.mitigation,
        workers=args.workers,
        repeats=args.repeats,
        crosstalk_p=args.crosstalk,
    )
    if hasattr(args, "grid"):
        kwargs["grid"] = args.grid
    if hasattr(args, "optimizer"):
        kwargs["optimizer"] = args.optimizer
        kwargs["eta"] = args.eta
        kwargs["start"] = tuple(args.start)
    if hasattr(args, "shots_list"):
        kwargs["shots_list"] = args.shots_list
    if hasattr(args, "pair_counts"):
        kwargs["pair_counts"] = args.pair_counts
    return ExperimentConfig(**kwargs)


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    cfg = config_from_args(args)
    handlers = {
        "benchmark-pairs": cmd_benchmark_pairs,
        "heatmap": cmd_heatmap,
        "vqe": lambda c: cmd_vqe(c, speedup_sweep=getattr(args, "speedup_sweep", False)),
        "shots-sweep": cmd_shots_sweep,
        "optimizer-compare": cmd_optimizer_compare,
    }
    record = handlers[args.command](cfg)
    print(f"wrote {cfg.out_dir}/record.json ({len(record.artifacts)} artifacts)")
    return 0


if __name__ == "__main__":
    sys.exit(main())
