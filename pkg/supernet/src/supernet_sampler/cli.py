"""Command line: train a supernet checkpoint, export loss samples."""

from __future__ import annotations

import argparse
import sys

from .data import DatasetError
from .export import export_loss_samples
from .train import train_supernet


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="supernet-sampler",
        description="toy weight-sharing supernet: train and export loss samples",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("train", help="train shared weights by sub-network sampling")
    p.add_argument("--dataset", default="digits", choices=("digits", "synthetic", "cifar10"))
    p.add_argument("--epochs", type=int, default=1)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--subset", type=int, default=1000, help="training images used")
    p.add_argument("--samples-per-step", type=int, default=1)
    p.add_argument("--batch-size", type=int, default=16)
    p.add_argument("--lr", type=float, default=0.01)
    p.add_argument("--download", action="store_true",
                   help="allow fetching a missing dataset (cifar10)")
    p.add_argument("--out", required=True, help="checkpoint path")
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("export", help="write loss samples from a checkpoint")
    p.add_argument("--ckpt", required=True)
    p.add_argument("--n", type=int, default=200)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True, help="loss-sample CSV path")
    p.set_defaults(func=cmd_export)
    return parser


def cmd_train(args) -> int:
    ckpt = train_supernet(
        dataset=args.dataset,
        epochs=args.epochs,
        samples_per_step=args.samples_per_step,
        seed=args.seed,
        subset=args.subset,
        batch_size=args.batch_size,
        lr=args.lr,
        download=args.download,
        out=args.out,
    )
    meta = ckpt["metadata"]
    print(
        f"trained {meta['steps']} steps on {meta['dataset']}[{meta['subset']}], "
        f"maximal-net CE {meta['initial_max_ce']:.4f} -> {meta['final_max_ce']:.4f}"
    )
    print(f"wrote checkpoint to {args.out}")
    return 0


def cmd_export(args) -> int:
    n = export_loss_samples(args.ckpt, args.n, args.seed, args.out)
    print(f"wrote {n} loss samples to {args.out}")
    return 0


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (DatasetError, FileNotFoundError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
