"""Command-line entry point.

Exit codes: 0 success, 1 a stage failed, 2 unusable input.

Examples:
    molinterp analyze --out run1 --seed 0 --threads 1
    molinterp descriptors --corpus mols.smi --out desc
    molinterp counterfactual "Clc1ccccc1" --surrogate run1/surrogate.ckpt
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

EXIT_OK = 0
EXIT_STAGE = 1
EXIT_INPUT = 2

COMMANDS = (
    "parse",
    "descriptors",
    "embed",
    "sae-train",
    "sae-analyze",
    "probe",
    "saliency",
    "counterfactual",
    "analyze",
    "report",
)


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="INI-style run configuration")
    common.add_argument(
        "--set", action="append", default=[], metavar="SECTION.KEY=VALUE", help="override one config key (repeatable)"
    )
    common.add_argument("--out", help="output directory (paths.output)")
    common.add_argument("--seed", type=int, help="master seed (run.seed)")
    common.add_argument("--threads", type=int, help="cap on BLAS threads (run.threads)")
    common.add_argument("--corpus", help="SMILES file, one molecule per line (paths.corpus)")
    common.add_argument("--embeddings", help="embedding matrix file (paths.embeddings)")
    common.add_argument("--surrogate", help="surrogate checkpoint (paths.surrogate)")

    parser = argparse.ArgumentParser(prog="molinterp", description="Interpretability toolkit for molecular embeddings.")
    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("parse", parents=[common], help="parse a corpus and write canonical SMILES")
    sub.add_parser("descriptors", parents=[common], help="descriptor table for a corpus")
    sub.add_parser("embed", parents=[common], help="planted-signal embeddings and ledger")
    sub.add_parser("sae-train", parents=[common], help="train the sparse autoencoder")
    p = sub.add_parser("sae-analyze", parents=[common], help="sparsity, factor correlations, reward predictors")
    p.add_argument("--sae", help="SAE checkpoint (paths.sae)")
    sub.add_parser("probe", parents=[common], help="per-motif probes and co-occurrence baseline")
    sub.add_parser("saliency", parents=[common], help="IG saliency and counterfactuals on a corpus sample")
    p = sub.add_parser("counterfactual", parents=[common], help="saliency and counterfactual scan for one molecule")
    p.add_argument("smiles")
    sub.add_parser("analyze", parents=[common], help="run every stage and write a manifest")
    sub.add_parser("report", parents=[common], help="summarize an output directory as markdown")
    return parser


def resolve_config(args: argparse.Namespace):
    from .config import load_config

    overrides = list(args.set)
    flag_map = {
        "out": "paths.output",
        "corpus": "paths.corpus",
        "embeddings": "paths.embeddings",
        "surrogate": "paths.surrogate",
        "sae": "paths.sae",
        "seed": "run.seed",
        "threads": "run.threads",
    }
    for attr, dotted in flag_map.items():
        value = getattr(args, attr, None)
        if value is not None:
            overrides.append(f"{dotted}={value}")
    return load_config(args.config, overrides)


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    from .config import ConfigError

    try:
        cfg = resolve_config(args)
        if args.command != "report":
            cfg.validate()
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT

    from threadpoolctl import threadpool_limits

    from . import commands

    handler = getattr(commands, "cmd_" + args.command.replace("-", "_"))
    with threadpool_limits(limits=cfg.run.threads):
        try:
            return handler(cfg, args)
        except commands.InputError as exc:
            print(f"error: {exc}", file=sys.stderr)
            return EXIT_INPUT
        except Exception as exc:  # noqa: BLE001 - reported, then mapped to an exit code
            print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
            return EXIT_STAGE


def run() -> None:
    sys.exit(main())


if __name__ == "__main__":
    run()
